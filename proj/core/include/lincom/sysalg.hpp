#pragma once

#include <optional>
#include <utility>

#include "lincom/common.hpp"

namespace lincom {

// An m x k integer matrix viewed as m homogeneous equations in k variables.
struct LinearSystem {
  IntMat rows;
  int m = 0;
  int k = 0;
  bool irredundant = false;

  IntVec column(int j) const {
    IntVec c(m);
    for (int i = 0; i < m; ++i) c[i] = rows[i][j];
    return c;
  }
};

// Column subset supporting a maximal subsystem of full variable support.
struct CriticalSet {
  std::vector<int> B;  // sorted 0-based column indices, |B| = c(L)
  int m_B = 0;
  LinearSystem L_B;  // primitive basis on the |B| columns, in B order
};

// Per-column critical equation data for 2x5 girth-4 systems: for each omitted
// column i, the primitive span vector vanishing at i and its off-i
// coefficient multiset (sorted).
struct CriticalEquation {
  int omitted;      // 0-based column index with zero coefficient
  IntVec vector_k;  // full-length primitive vector, first nonzero entry > 0
  IntVec multiset;  // the 4 nonzero coefficients, sorted ascending
};

LinearSystem validate(const IntMat& matrix);

struct ReduceResult {
  LinearSystem system;
  // For each original column: final column index, or -1 if deleted.
  // Merged columns share a final index.
  std::vector<int> column_map;
};
ReduceResult irredundant_reduce(const LinearSystem& L);

int girth(const LinearSystem& L);

std::vector<CriticalSet> critical_sets(const LinearSystem& L);

bool isomorphic(const LinearSystem& L, const LinearSystem& L2);

std::vector<CriticalEquation> critical_equation_multisets(const LinearSystem& L);

// --- exact linear algebra helpers (shared across modules) ---

// Reduced row echelon form over Q with each row scaled to a primitive integer
// vector whose leading entry is positive. Zero rows dropped.
IntMat canonical_span(const IntMat& rows);

int rank_of(const IntMat& rows);

// Primitive integer basis of (row span of L) intersected with vectors
// supported inside B (0-based sorted indices); canonical form.
IntMat span_supported_on(const LinearSystem& L, const std::vector<int>& B);

// Whether v lies in the rational row span of rows.
bool in_span(const IntMat& rows, const IntVec& v);

// Scale an integer vector to primitive with first nonzero entry positive.
IntVec primitive_normalize(IntVec v);

// Solve A*x = b over Q for square nonsingular A; nullopt if singular or
// inconsistent usage; exact arithmetic.
std::optional<RatVec> solve_square(const RatMat& A, const RatVec& b);

}  // namespace lincom
