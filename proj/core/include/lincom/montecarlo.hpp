#pragma once

#include <cstdint>

#include "lincom/sysalg.hpp"

namespace lincom {

// Exact pairing counts for the random-template model on a 2 x k system with
// girth k-1: images of (r1, r2) under the k columns, restricted to the box
// [-M, M] \ {0}, split into zero-sum pairs.
struct CountReport {
  long N = 0;       // outer box radius for (r1, r2)
  long M = 0;       // image box radius, N = lambda * M
  long lambda = 0;  // box inflation factor
  Int B_count = 0;          // points whose image multiset fully pairs up
  Int variance_sum = 0;     // sum over (u,v) in A_N^2 of E[X_u X_v]
  Int pair_sum_max = 0;     // max over u in A_N of sum over v of E[X_u X_v]
  Int triple_sum = 0;       // sum over (u,v,w) in A_N^3 of E[X_u X_v X_w]
  Int neighbor_sum_max = 0; // max over (u,v) of the closed-neighborhood
                            // conjugate pair sum
};

// Smallest integer lambda with: all k images inside [-M, M] forces
// |r1|, |r2| <= lambda * M. Requires pairwise independent columns.
long box_inflation(const LinearSystem& L);

// Exact |B_N| for N = lambda * M.
Int count_B(const LinearSystem& L, long M);

// All CountReport fields for outer radius N (M = N / lambda, at least 1).
CountReport claim44_stats(const LinearSystem& L, long N);

// Normal-approximation error bound sqrt(2/pi * rho^-3 * (3*triple +
// 4*variance*sqrt(neighbor_max))) with rho^2 the variance sum.
double stein_bound(const LinearSystem& L, long N);

// Fraction of random unit-modulus templates of support radius M whose
// critical sigma total is negative; deterministic per seed.
double negative_fraction(const LinearSystem& L, int M, int trials,
                         uint64_t seed);

}  // namespace lincom
