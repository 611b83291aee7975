#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lincom/certify_types.hpp"
#include "lincom/sysalg.hpp"

namespace lincom {

// Integer row basis of {q : M q = 0}, rows primitive, first nonzero positive.
IntMat integer_kernel(const IntMat& M);

// Sufficient projection parameters for mapping a template's support into F_p:
// C separates base-C digits, and any prime p > min_p_bound makes every
// relevant integer relation detectable inside (-p/2, p/2).
struct ProjectionBounds {
  Int C = 0;
  Int min_p_bound = 0;  // p must satisfy p > min_p_bound
};
ProjectionBounds freiman_bounds(const LinearSystem& L, const FourierTemplate& g);

// Projects the template's support points w to residues w_0 + w_1 C + ... and
// installs g's values as Fourier coefficients of a function on F_p. The
// sigma = density equality is re-verified per critical set when affordable,
// escalating C by doubling while the prime still admits it.
// Throws PrimeTooSmall (message reports the minimal admissible prime).
FieldFunction freiman_project(const LinearSystem& L, const FourierTemplate& g,
                              long p);

// sum over r in (F_p)^m of prod_i f_hat(a_i . r)
double density_fourier(const LinearSystem& L, const FieldFunction& f);

// direct kernel enumeration of E[prod f(x_i) : L x = 0]; TooLarge when
// p^{k-m} > 1e8
double density_direct(const LinearSystem& L, const FieldFunction& f);

// pointwise values f(0..p-1) reconstructed from the Fourier table
std::vector<double> field_values(const FieldFunction& f);

// t_L(h) + t_L(1-h) - 2^{1-k} for h = 1/2 + epsilon * f; RangeViolation when
// h leaves [0,1]
double two_color_gap(const LinearSystem& L, const FieldFunction& f,
                     double epsilon);

// Function on F_p x F_p given by its Fourier table over frequency pairs.
struct ProductFunction {
  long p = 0;
  std::map<std::pair<long, long>, Cplx> coefficients;

  Cplx coeff(long r1, long r2) const {
    auto it = coefficients.find({((r1 % p) + p) % p, ((r2 % p) + p) % p});
    return it == coefficients.end() ? Cplx(0, 0) : it->second;
  }
};

// h(y, z) = f(y) * indicator(z = 0)
ProductFunction tensor_indicator(const FieldFunction& f);

// sum over critical sets B of t_{L_B}(h)
double tensor_critical_sum(const LinearSystem& L, const ProductFunction& h);

// sum over critical sets B of t_{L_B}(f), split by subsystem row count:
// first = sum over m_B = 1, second = sum over m_B = 2
std::pair<double, double> critical_density_split(const LinearSystem& L,
                                                 const FieldFunction& f);

// Packages the classifier's template and sigma report; attaches a concrete
// prime witness (smallest admissible p with p^m <= 1e7, epsilon = 1/(4 max|f|)
// halved until the gap is negative, at most 20 times) when one fits the
// resource guard. witness is left empty when no admissible prime fits or the
// certificate's negativity is analytic rather than a counted sigma sum.
Certificate certify_uncommon(const LinearSystem& L);

struct SampleReport {
  double min_gap = 0.0;
  std::string argmin;  // description of the minimizing function
};

// random f: F_p -> [0,1] (uniform i.i.d. values alternating with mean+spike
// profiles); returns the minimum of t_L(f) + t_L(1-f) - 2^{1-k}
SampleReport sample_commonness(const LinearSystem& L, long p, int trials,
                               uint64_t seed);

}  // namespace lincom
