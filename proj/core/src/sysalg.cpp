#include "lincom/sysalg.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace lincom {

namespace {

// In-place reduced row echelon form over Q; returns pivot column per row.
std::vector<int> rref(RatMat& A) {
  std::vector<int> pivots;
  if (A.empty()) return pivots;
  int m = static_cast<int>(A.size());
  int k = static_cast<int>(A[0].size());
  int row = 0;
  for (int col = 0; col < k && row < m; ++col) {
    int sel = -1;
    for (int i = row; i < m; ++i) {
      if (A[i][col] != 0) {
        sel = i;
        break;
      }
    }
    if (sel < 0) continue;
    std::swap(A[row], A[sel]);
    Rat inv = A[row][col];
    for (int j = col; j < k; ++j) A[row][j] /= inv;
    for (int i = 0; i < m; ++i) {
      if (i == row || A[i][col] == 0) continue;
      Rat f = A[i][col];
      for (int j = col; j < k; ++j) A[i][j] -= f * A[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  A.resize(pivots.size(), RatVec(k, Rat(0)));
  return pivots;
}

RatMat to_rat(const IntMat& M) {
  RatMat R;
  R.reserve(M.size());
  for (const auto& r : M) {
    RatVec rr;
    rr.reserve(r.size());
    for (const auto& x : r) rr.emplace_back(x);
    R.push_back(std::move(rr));
  }
  return R;
}

// Kernel basis of A (solutions x with A*x = 0), exact.
RatMat kernel_basis(RatMat A, int ncols) {
  if (A.empty()) {
    RatMat basis;
    for (int j = 0; j < ncols; ++j) {
      RatVec e(ncols, Rat(0));
      e[j] = 1;
      basis.push_back(std::move(e));
    }
    return basis;
  }
  std::vector<int> pivots = rref(A);
  std::vector<bool> is_pivot(ncols, false);
  for (int p : pivots) is_pivot[p] = true;
  RatMat basis;
  for (int j = 0; j < ncols; ++j) {
    if (is_pivot[j]) continue;
    RatVec v(ncols, Rat(0));
    v[j] = 1;
    for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -A[i][j];
    basis.push_back(std::move(v));
  }
  return basis;
}

IntVec rat_row_to_primitive(const RatVec& r) {
  Int lcm_den = 1;
  for (const auto& q : r) {
    Int d = q.get_den();
    lcm_den = lcm(lcm_den, d);
  }
  IntVec v(r.size());
  for (size_t j = 0; j < r.size(); ++j) {
    Rat scaled = r[j] * Rat(lcm_den);
    v[j] = scaled.get_num();
  }
  return primitive_normalize(std::move(v));
}

std::vector<int> support_of(const IntVec& v) {
  std::vector<int> s;
  for (size_t j = 0; j < v.size(); ++j)
    if (v[j] != 0) s.push_back(static_cast<int>(j));
  return s;
}

bool next_combination(std::vector<int>& c, int n) {
  int r = static_cast<int>(c.size());
  for (int i = r - 1; i >= 0; --i) {
    if (c[i] < n - (r - i)) {
      ++c[i];
      for (int j = i + 1; j < r; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

bool has_unit_difference_in_span(const IntMat& rows, int k) {
  IntVec diff(k, Int(0));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      diff.assign(k, Int(0));
      diff[i] = 1;
      diff[j] = -1;
      if (in_span(rows, diff)) return true;
    }
  }
  return false;
}

bool has_zero_column(const IntMat& rows, int k) {
  for (int j = 0; j < k; ++j) {
    bool all_zero = true;
    for (const auto& r : rows)
      if (r[j] != 0) {
        all_zero = false;
        break;
      }
    if (all_zero) return true;
  }
  return false;
}

}  // namespace

IntVec primitive_normalize(IntVec v) {
  Int g = 0;
  for (const auto& x : v) g = gcd(g, x);
  if (g == 0) return v;
  int lead = -1;
  for (size_t j = 0; j < v.size(); ++j)
    if (v[j] != 0) {
      lead = static_cast<int>(j);
      break;
    }
  if (v[lead] < 0) g = -g;
  for (auto& x : v) x /= g;
  return v;
}

IntMat canonical_span(const IntMat& rows) {
  RatMat A = to_rat(rows);
  rref(A);
  IntMat out;
  out.reserve(A.size());
  for (const auto& r : A) out.push_back(rat_row_to_primitive(r));
  return out;
}

int rank_of(const IntMat& rows) {
  RatMat A = to_rat(rows);
  return static_cast<int>(rref(A).size());
}

bool in_span(const IntMat& rows, const IntVec& v) {
  IntMat aug = rows;
  aug.push_back(v);
  return rank_of(aug) == rank_of(rows);
}

std::optional<RatVec> solve_square(const RatMat& A, const RatVec& b) {
  int n = static_cast<int>(A.size());
  RatMat aug = A;
  for (int i = 0; i < n; ++i) aug[i].push_back(b[i]);
  std::vector<int> pivots = rref(aug);
  if (static_cast<int>(pivots.size()) != n) return std::nullopt;
  for (int i = 0; i < n; ++i)
    if (pivots[i] != i) return std::nullopt;
  RatVec x(n);
  for (int i = 0; i < n; ++i) x[i] = aug[i][n];
  return x;
}

LinearSystem validate(const IntMat& matrix) {
  if (matrix.empty() || matrix[0].empty())
    throw Error("Empty", "matrix has no rows or no columns");
  size_t k = matrix[0].size();
  for (const auto& r : matrix)
    if (r.size() != k) throw Error("Empty", "ragged matrix");
  LinearSystem L;
  L.rows = matrix;
  L.m = static_cast<int>(matrix.size());
  L.k = static_cast<int>(k);
  if (rank_of(matrix) != L.m)
    throw Error("RankDeficient", "rows are dependent over Q");
  L.irredundant =
      !has_zero_column(matrix, L.k) && !has_unit_difference_in_span(matrix, L.k);
  return L;
}

ReduceResult irredundant_reduce(const LinearSystem& L) {
  // Track span basis and, per original column, its current position (or -1).
  IntMat basis = canonical_span(L.rows);
  std::vector<int> col_map(L.k);
  std::iota(col_map.begin(), col_map.end(), 0);
  int k = L.k;

  auto drop_column = [&](int j) {
    for (auto& r : basis) r.erase(r.begin() + j);
    for (auto& c : col_map) {
      if (c == j) c = -1;
      else if (c > j) --c;
    }
    --k;
  };
  auto merge_into = [&](int i, int j) {  // x_j := x_i, add col j into col i
    for (auto& r : basis) {
      r[i] += r[j];
      r.erase(r.begin() + j);
    }
    int i_final = i > j ? i - 1 : i;
    for (auto& c : col_map) {
      if (c == j) c = i_final;
      else if (c > j) --c;
    }
    --k;
  };

  for (;;) {
    if (k == 0 || basis.empty())
      throw Error("Degenerate", "reduction emptied the system");
    basis = canonical_span(basis);
    if (basis.empty())
      throw Error("Degenerate", "reduction emptied the system");
    int m = static_cast<int>(basis.size());
    // zero columns
    int zc = -1;
    for (int j = 0; j < k && zc < 0; ++j) {
      bool z = true;
      for (const auto& r : basis)
        if (r[j] != 0) {
          z = false;
          break;
        }
      if (z) zc = j;
    }
    if (zc >= 0) {
      drop_column(zc);
      continue;
    }
    // support-1 span vector: a variable forced to 0
    for (int j = 0; j < k; ++j) {
      IntMat others;
      for (const auto& r : basis) {
        IntVec rr = r;
        rr.erase(rr.begin() + j);
        others.push_back(std::move(rr));
      }
      if (rank_of(others) < m)
        throw Error("Degenerate", "variable forced to zero");
    }
    // e_i - e_j in span: substitute x_j := x_i
    int mi = -1, mj = -1;
    for (int i = 0; i < k && mi < 0; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        IntVec diff(k, Int(0));
        diff[i] = 1;
        diff[j] = -1;
        if (in_span(basis, diff)) {
          mi = i;
          mj = j;
          break;
        }
      }
    }
    if (mi >= 0) {
      merge_into(mi, mj);
      continue;
    }
    break;
  }
  ReduceResult res;
  res.system = validate(basis);
  res.column_map = col_map;
  return res;
}

int girth(const LinearSystem& L) {
  for (int s = 1; s <= L.k; ++s) {
    std::vector<int> S(s);
    std::iota(S.begin(), S.end(), 0);
    do {
      // span vector supported in S exists iff rank of complement columns < m
      std::vector<bool> in_S(L.k, false);
      for (int j : S) in_S[j] = true;
      IntMat restricted;
      for (const auto& r : L.rows) {
        IntVec rr;
        for (int j = 0; j < L.k; ++j)
          if (!in_S[j]) rr.push_back(r[j]);
        restricted.push_back(std::move(rr));
      }
      bool drop;
      if (restricted[0].empty())
        drop = true;
      else
        drop = rank_of(restricted) < L.m;
      if (drop) return s;
    } while (next_combination(S, L.k));
  }
  return L.k;  // unreachable for valid systems
}

IntMat span_supported_on(const LinearSystem& L, const std::vector<int>& B) {
  std::vector<bool> in_B(L.k, false);
  for (int j : B) in_B[j] = true;
  // y in Q^m with (y^T L)_j = 0 for all j outside B
  RatMat C;
  for (int j = 0; j < L.k; ++j) {
    if (in_B[j]) continue;
    RatVec row;
    for (int i = 0; i < L.m; ++i) row.emplace_back(L.rows[i][j]);
    C.push_back(std::move(row));
  }
  RatMat ys = kernel_basis(std::move(C), L.m);
  IntMat vecs;
  for (const auto& y : ys) {
    RatVec w(L.k, Rat(0));
    for (int i = 0; i < L.m; ++i)
      for (int j = 0; j < L.k; ++j) w[j] += y[i] * Rat(L.rows[i][j]);
    bool nonzero = false;
    for (const auto& x : w)
      if (x != 0) nonzero = true;
    if (nonzero) vecs.push_back(rat_row_to_primitive(w));
  }
  return canonical_span(vecs);
}

std::vector<CriticalSet> critical_sets(const LinearSystem& L) {
  int s = girth(L);
  int c = (s % 2 == 0) ? s : s + 1;
  std::vector<CriticalSet> out;
  if (c > L.k) return out;
  std::vector<int> B(c);
  std::iota(B.begin(), B.end(), 0);
  do {
    IntMat W = span_supported_on(L, B);
    if (W.empty()) continue;
    // the maximal subsystem must use every variable of B
    std::set<int> used;
    for (const auto& w : W)
      for (int j : support_of(w)) used.insert(j);
    if (static_cast<int>(used.size()) != c) continue;
    CriticalSet cs;
    cs.B = B;
    cs.m_B = static_cast<int>(W.size());
    IntMat restricted;
    for (const auto& w : W) {
      IntVec rr;
      for (int j : B) rr.push_back(w[j]);
      restricted.push_back(std::move(rr));
    }
    cs.L_B.rows = restricted;
    cs.L_B.m = cs.m_B;
    cs.L_B.k = c;
    cs.L_B.irredundant = !has_zero_column(restricted, c) &&
                         !has_unit_difference_in_span(restricted, c);
    out.push_back(std::move(cs));
  } while (next_combination(B, L.k));
  return out;
}

bool isomorphic(const LinearSystem& L, const LinearSystem& L2) {
  if (L.k != L2.k) throw Error("DimensionMismatch", "different column counts");
  if (L.m != L2.m) return false;
  if (L.k > 10) throw Error("TooLarge", "isomorphism search limited to k <= 10");
  IntMat target = canonical_span(L.rows);
  std::vector<int> perm(L.k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    IntMat permuted;
    for (const auto& r : L2.rows) {
      IntVec rr(L.k);
      for (int j = 0; j < L.k; ++j) rr[j] = r[perm[j]];
      permuted.push_back(std::move(rr));
    }
    if (canonical_span(permuted) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

std::vector<CriticalEquation> critical_equation_multisets(const LinearSystem& L) {
  if (L.m != 2 || L.k != 5 || !L.irredundant || girth(L) != 4)
    throw Error("NotApplicable", "requires an irredundant 2x5 system of girth 4");
  std::vector<CriticalEquation> out;
  for (int i = 0; i < 5; ++i) {
    // y = (L[1][i], -L[0][i]) kills coordinate i
    IntVec v(5);
    for (int j = 0; j < 5; ++j)
      v[j] = L.rows[1][i] * L.rows[0][j] - L.rows[0][i] * L.rows[1][j];
    v = primitive_normalize(std::move(v));
    CriticalEquation ce;
    ce.omitted = i;
    ce.vector_k = v;
    for (int j = 0; j < 5; ++j)
      if (j != i) ce.multiset.push_back(v[j]);
    std::sort(ce.multiset.begin(), ce.multiset.end());
    out.push_back(std::move(ce));
  }
  return out;
}

}  // namespace lincom
