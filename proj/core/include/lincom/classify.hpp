#pragma once

#include <optional>
#include <set>
#include <string>

#include "lincom/certify_types.hpp"
#include "lincom/sysalg.hpp"
#include "lincom/templates.hpp"

namespace lincom {

enum class Status { Common, Uncommon, Unknown };

struct Verdict {
  Status status = Status::Unknown;
  std::string case_tag;  // "A", "B", "C", "D", "E(girth3)", "2x4", "equation",
                         // or a common-family id
  std::optional<Certificate> certificate;
  std::vector<std::string> notes;
};

struct EquationClass {
  bool sidorenko = false;
  bool common = false;
};

// Coefficients split into zero-sum pairs => sidorenko; sidorenko or odd
// length => common.
EquationClass classify_equation(const IntVec& coeffs);

// Some(lambda) with canonical lambda >= 1 iff A = {{a,-a,b,-b}} with
// b = lambda*a up to order; additive quadruples report lambda = 1.
std::optional<Rat> is_lambda_common(const IntVec& A);

// |a/b| or |b/a| matches some lambda in `lambdas` (all canonicalized >= 1).
bool coincidental(const Rat& a, const Rat& b, const std::set<Rat>& lambdas);

// Canonical representative of |q| with value >= 1.
Rat canonical_ratio(const Rat& q);

// The lambda values for which some critical-equation multiset is
// lambda-common.
std::set<Rat> lambda_set(const std::vector<IntVec>& families);

enum class CaseTag { A, B, C, D };
CaseTag case_of(const LinearSystem& L);

std::optional<std::string> match_common_family(const LinearSystem& L);

Verdict classify_system(const LinearSystem& L);

}  // namespace lincom
