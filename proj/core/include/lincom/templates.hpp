#pragma once

#include <map>
#include <optional>
#include <string>

#include "lincom/sysalg.hpp"

namespace lincom {

using Key = std::vector<Int>;  // integer d-tuple

// Finitely supported hermitian map g: Z^d -> C with g(0) = 0.
// `entries` stores the full closure (both r and -r). When every value is a
// Gaussian rational, `exact` holds the same data exactly and sigma sums are
// evaluated without rounding.
struct FourierTemplate {
  int d = 1;
  std::map<Key, Cplx> entries;
  std::optional<std::map<Key, GaussQ>> exact;

  Cplx value(const Key& r) const {
    auto it = entries.find(r);
    return it == entries.end() ? Cplx(0, 0) : it->second;
  }
  bool empty() const { return entries.empty(); }
};

struct SigmaReport {
  std::vector<double> per_B;  // one sigma value per critical set, in B order
  double total = 0.0;
  double imag_residual = 0.0;
};

// Builds a template from one representative per +-pair; the mirror entries
// are filled with conjugates. Conflicting assignments raise NonHermitian;
// a nonzero value at the origin raises OriginAssignment.
FourierTemplate make_template(int d, const std::map<Key, Cplx>& values,
                              const std::optional<std::map<Key, GaussQ>>& exact =
                                  std::nullopt);

double sigma(const LinearSystem& L, const FourierTemplate& g);

SigmaReport sigma_critical_sum(const LinearSystem& L, const FourierTemplate& g);

FourierTemplate join(const FourierTemplate& g, const FourierTemplate& g2);

FourierTemplate random_template(int M, uint64_t seed);

struct MonteCarloHit {
  FourierTemplate g;
  SigmaReport report;
  int trial = 0;
};
std::optional<MonteCarloHit> monte_carlo_find(const LinearSystem& L, int M,
                                              int trials, uint64_t seed);

FourierTemplate spike_template(const std::vector<std::pair<Int, Cplx>>& points);

// Same, with exact Gaussian-rational values.
FourierTemplate spike_template_exact(
    const std::vector<std::pair<Int, GaussQ>>& points);

struct CaseAReport {
  std::string subcase;      // which construction fired
  int witness_index = 0;    // index (0-based) of the family the spike targets
  double C = 0.0;           // scale used, 0 if none
  SigmaReport sums;         // per-family sigma values and total
};
// families: the critical-equation multisets of a 2x5 system (five for girth 4
// with no additive quadruple, three for the girth-3 coincidence fallback).
// Builds a spike/join template with total <= -1.
std::pair<FourierTemplate, CaseAReport> case_a_template(
    const std::vector<IntVec>& families);

// sigma of a single-equation system given directly by its coefficient list.
double sigma_equation(const IntVec& coeffs, const FourierTemplate& g);

}  // namespace lincom
