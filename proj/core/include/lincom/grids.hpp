#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lincom/templates.hpp"

namespace lincom {

// Complex-valued function on a signed multiplicative grid, evaluated in
// (sign, valuation-vector) coordinates. Hermitian: h(-r) = conj(h(r)).
struct PeriodicGridFunction {
  std::vector<long> primes;            // grid primes, ascending
  std::vector<long> period;            // declared period per prime
  std::string provenance;
  std::function<Cplx(int sign, const std::vector<long>& d)> rule;

  Cplx operator()(int sign, const std::vector<long>& d) const {
    return rule(sign, d);
  }
  // Evaluate at a rational grid point; rejects points off the grid.
  Cplx at(const Rat& r) const;
};

struct GridReport {
  std::string branch;
  std::vector<long> primes;
  std::vector<long> period;
  Cplx periodic_value{0.0, 0.0};  // sum over one period box
  long depth = 0;                 // truncation depth D
  double truncated_total = 0.0;   // raw sigma total of the truncation
  long certified_depth = 0;       // smallest depth with negative counted total
  double certified_total = 0.0;   // counted sigma total at certified_depth
  std::string notes;
};

// Sorted primes dividing any |a| over all families.
std::vector<long> prime_set(const std::vector<IntVec>& families);

// p-adic valuation of |r|; negative for denominators.
long valuation(long p, const Rat& r);

// Two positive and two negative entries with equal products in absolute value.
bool is_cancelling(const IntVec& A);

// t with 1 + sum cos(gamma_i * t) <= -1e-3; constructive branches first,
// then grid scan with golden-section refinement.
double cosine_search(const std::vector<Rat>& gammas);

// Constant-phase grid functions: "h1" is e(1/8) on positive grid points,
// "h2" is i; both conjugated on the negative side.
PeriodicGridFunction build_signed_constant(const std::string& kind);

// Pure-phase function exp(+-i (theta . d) t). Theta defaults to the sweep
// (1, M, M^2, ...) with the smallest M making every non-cancelling
// two-positive-two-negative family's exponent nonzero; t from cosine_search
// (rationalized when some family needs a nontrivial period).
PeriodicGridFunction build_h3(
    const std::vector<IntVec>& families,
    std::optional<std::vector<Rat>> theta_override = std::nullopt,
    std::optional<double> t_override = std::nullopt);

// Product over a in A of h(sign(a)*sign, d + valuations(a)).
Cplx family_value(const PeriodicGridFunction& h, const IntVec& A, int sign,
                  const std::vector<long>& d);

// Sum over the period box [0,u) of sum_i h_{A_i}(p^d); checks declared
// periodicity on sampled points first.
Cplx periodic_sum(const PeriodicGridFunction& h,
                  const std::vector<IntVec>& families,
                  const std::vector<long>& u);

// Restriction of h to +-{p^d : 0 <= d_j <= D} as a 1-dimensional template.
FourierTemplate truncate(const PeriodicGridFunction& h, long D);

// Number of r in +-G_D with a*r in +-G_D for every a in the family.
long support_count(const IntVec& family, const std::vector<long>& primes,
                   long D);

// Certificate builders for girth-4 systems with one additive quadruple
// (case_b), the one-extra-common-equation family parameterized by coprime
// (a, b) (case_c), and girth-3 systems (case_e).
std::pair<FourierTemplate, GridReport> case_b_template(
    const std::vector<IntVec>& families);

std::pair<FourierTemplate, GridReport> case_c_template(long a, long b);

std::pair<FourierTemplate, GridReport> case_e_template(const LinearSystem& L);

// Certificate for a single uncommon even-length equation given by its
// nonzero coefficient multiset.
std::pair<FourierTemplate, GridReport> uncommon_equation_template(
    const IntVec& A);

}  // namespace lincom
