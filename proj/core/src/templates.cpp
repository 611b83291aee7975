#include "lincom/templates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>

#include "lincom/classify.hpp"

namespace lincom {

namespace {

Key negate(const Key& r) {
  Key n;
  n.reserve(r.size());
  for (const auto& x : r) n.emplace_back(-x);
  return n;
}

bool is_origin(const Key& r) {
  return std::all_of(r.begin(), r.end(), [](const Int& x) { return x == 0; });
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// --- generic sigma evaluation ---

struct CplxOps {
  using V = Cplx;
  static V zero() { return {0.0, 0.0}; }
  static bool is_zero(const V& v) { return v == V(0.0, 0.0); }
  static V conj_of(const V& v) { return std::conj(v); }
};
struct ExactOps {
  using V = GaussQ;
  static V zero() { return {}; }
  static bool is_zero(const V& v) { return v.is_zero(); }
  static V conj_of(const V& v) { return v.conj(); }
};

std::vector<int> pivot_columns(const LinearSystem& L) {
  std::vector<int> piv;
  IntMat sel;  // rows = selected columns as m-vectors
  int r = 0;
  for (int j = 0; j < L.k && static_cast<int>(piv.size()) < L.m; ++j) {
    IntVec col(L.m);
    for (int i = 0; i < L.m; ++i) col[i] = L.rows[i][j];
    sel.push_back(col);
    int nr = rank_of(sel);
    if (nr > r) {
      piv.push_back(j);
      r = nr;
    } else {
      sel.pop_back();
    }
  }
  return piv;
}

// Inverse of the m x m matrix whose columns are L's pivot columns.
RatMat inverse_of_pivot_block(const LinearSystem& L,
                              const std::vector<int>& piv) {
  int m = L.m;
  RatMat A(m, RatVec(m));
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < m; ++t) A[i][t] = Rat(L.rows[i][piv[t]]);
  RatMat inv(m, RatVec(m, Rat(0)));
  for (int col = 0; col < m; ++col) {
    RatVec e(m, Rat(0));
    e[col] = 1;
    auto x = solve_square(A, e);
    if (!x) throw Error("Internal", "pivot block not invertible");
    for (int i = 0; i < m; ++i) inv[i][col] = (*x)[i];
  }
  return inv;
}

template <class Ops>
typename Ops::V sigma_impl(const LinearSystem& L,
                           const std::map<Key, typename Ops::V>& g, int d) {
  using V = typename Ops::V;
  for (int j = 0; j < L.k; ++j) {
    bool zero_col = true;
    for (int i = 0; i < L.m; ++i)
      if (L.rows[i][j] != 0) zero_col = false;
    if (zero_col) return Ops::zero();  // image hits the origin, g(0) = 0
  }
  std::vector<int> piv = pivot_columns(L);
  if (static_cast<int>(piv.size()) != L.m)
    throw Error("Internal", "rank-deficient system in sigma");
  RatMat Ainv = inverse_of_pivot_block(L, piv);
  std::vector<bool> is_piv(L.k, false);
  for (int j : piv) is_piv[j] = true;

  std::vector<const Key*> keys;
  std::vector<const V*> vals;
  for (const auto& [r, v] : g) {
    keys.push_back(&r);
    vals.push_back(&v);
  }
  int n = static_cast<int>(keys.size());
  int m = L.m;

  V total = Ops::zero();
  std::vector<int> choice(m, 0);
  // R (d x m) with rational entries; recompute per assignment
  RatMat R(d, RatVec(m));
  for (;;) {
    // product over pivot columns
    V prod = *vals[choice[0]];
    for (int t = 1; t < m; ++t) prod = prod * (*vals[choice[t]]);
    if (!Ops::is_zero(prod)) {
      // R = S * Ainv with S columns = chosen support points
      bool integral = true;
      for (int row = 0; row < d && integral; ++row) {
        for (int i = 0; i < m; ++i) {
          Rat acc(0);
          for (int t = 0; t < m; ++t)
            acc += Rat((*keys[choice[t]])[row]) * Ainv[t][i];
          if (acc.get_den() != 1) {
            integral = false;
            break;
          }
          R[row][i] = acc;
        }
      }
      if (integral) {
        for (int j = 0; j < L.k && !Ops::is_zero(prod); ++j) {
          if (is_piv[j]) continue;
          Key img(d);
          for (int row = 0; row < d; ++row) {
            Rat acc(0);
            for (int i = 0; i < m; ++i) acc += R[row][i] * Rat(L.rows[i][j]);
            img[row] = acc.get_num();
          }
          auto it = g.find(img);
          if (it == g.end()) {
            prod = Ops::zero();
          } else {
            prod = prod * it->second;
          }
        }
        if (!Ops::is_zero(prod)) total += prod;
      }
    }
    // next assignment
    int t = m - 1;
    while (t >= 0 && ++choice[t] == n) choice[t--] = 0;
    if (t < 0) break;
  }
  return total;
}

std::pair<double, double> sigma_with_residual(const LinearSystem& L,
                                              const FourierTemplate& g) {
  if (g.entries.empty()) return {0.0, 0.0};
  if (g.exact) {
    GaussQ v = sigma_impl<ExactOps>(L, *g.exact, g.d);
    if (v.im != 0)
      throw Error("Internal", "exact sigma has nonzero imaginary part");
    return {to_double(v.re), 0.0};
  }
  Cplx v = sigma_impl<CplxOps>(L, g.entries, g.d);
  return {v.real(), std::abs(v.imag())};
}

}  // namespace

FourierTemplate make_template(
    int d, const std::map<Key, Cplx>& values,
    const std::optional<std::map<Key, GaussQ>>& exact) {
  FourierTemplate g;
  g.d = d;
  for (const auto& [r, v] : values) {
    if (static_cast<int>(r.size()) != d)
      throw Error("DimensionMismatch", "key arity does not match d");
    if (is_origin(r)) {
      if (v != Cplx(0, 0))
        throw Error("OriginAssignment", "template must vanish at the origin");
      continue;
    }
    if (v == Cplx(0, 0)) continue;
    Key nr = negate(r);
    Cplx cv = std::conj(v);
    auto it = g.entries.find(r);
    if (it != g.entries.end() && std::abs(it->second - v) > 1e-12)
      throw Error("NonHermitian", "conflicting values at a +- pair");
    g.entries[r] = v;
    auto it2 = g.entries.find(nr);
    if (it2 != g.entries.end() && std::abs(it2->second - cv) > 1e-12)
      throw Error("NonHermitian", "conflicting values at a +- pair");
    g.entries[nr] = cv;
  }
  if (exact) {
    std::map<Key, GaussQ> ex;
    for (const auto& [r, v] : *exact) {
      if (is_origin(r)) {
        if (!v.is_zero())
          throw Error("OriginAssignment", "template must vanish at the origin");
        continue;
      }
      if (v.is_zero()) continue;
      ex[r] = v;
      ex[negate(r)] = v.conj();
    }
    if (ex.size() != g.entries.size())
      throw Error("NonHermitian", "exact and floating supports differ");
    g.exact = std::move(ex);
  }
  return g;
}

double sigma(const LinearSystem& L, const FourierTemplate& g) {
  auto [re, im] = sigma_with_residual(L, g);
  if (im > 1e-9 * (1.0 + std::abs(re)))
    throw Error("NonHermitian", "sigma imaginary residual too large");
  return re;
}

SigmaReport sigma_critical_sum(const LinearSystem& L, const FourierTemplate& g) {
  SigmaReport rep;
  for (const auto& cs : critical_sets(L)) {
    auto [re, im] = sigma_with_residual(cs.L_B, g);
    if (im > 1e-9 * (1.0 + std::abs(re)))
      throw Error("NonHermitian", "sigma imaginary residual too large");
    rep.per_B.push_back(re);
    rep.total += re;
    rep.imag_residual = std::max(rep.imag_residual, im);
  }
  return rep;
}

double sigma_equation(const IntVec& coeffs, const FourierTemplate& g) {
  return sigma(validate(IntMat{coeffs}), g);
}

FourierTemplate join(const FourierTemplate& g, const FourierTemplate& g2) {
  FourierTemplate h;
  h.d = g.d + g2.d;
  for (const auto& [r1, v1] : g.entries) {
    for (const auto& [r2, v2] : g2.entries) {
      Key r = r1;
      r.insert(r.end(), r2.begin(), r2.end());
      h.entries[r] = v1 * v2;
    }
  }
  if (g.exact && g2.exact) {
    std::map<Key, GaussQ> ex;
    for (const auto& [r1, v1] : *g.exact) {
      for (const auto& [r2, v2] : *g2.exact) {
        Key r = r1;
        r.insert(r.end(), r2.begin(), r2.end());
        ex[r] = v1 * v2;
      }
    }
    h.exact = std::move(ex);
  }
  return h;
}

FourierTemplate random_template(int M, uint64_t seed) {
  if (M < 1) throw Error("BadArgument", "M must be >= 1");
  std::mt19937_64 rng(splitmix64(seed));
  std::map<Key, Cplx> values;
  for (int r = 1; r <= M; ++r) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    values[{Int(r)}] = std::polar(1.0, 2.0 * std::numbers::pi * u);
  }
  return make_template(1, values);
}

std::optional<MonteCarloHit> monte_carlo_find(const LinearSystem& L, int M,
                                              int trials, uint64_t seed) {
  for (int t = 0; t < trials; ++t) {
    uint64_t trial_seed = splitmix64(seed ^ splitmix64(static_cast<uint64_t>(t)));
    FourierTemplate g = random_template(M, trial_seed);
    SigmaReport rep = sigma_critical_sum(L, g);
    if (rep.total < -1e-6) return MonteCarloHit{std::move(g), std::move(rep), t};
  }
  return std::nullopt;
}

FourierTemplate spike_template(const std::vector<std::pair<Int, Cplx>>& points) {
  std::map<Key, Cplx> values;
  for (const auto& [r, v] : points) {
    if (r == 0) throw Error("OriginAssignment", "no spike at the origin");
    values[{r}] = v;
  }
  return make_template(1, values);
}

namespace {

struct AbsGroup {
  Int absval;
  std::vector<Int> members;  // signed values
};

std::vector<AbsGroup> abs_groups(const IntVec& A) {
  std::vector<AbsGroup> gs;
  for (const auto& x : A) {
    Int ax = abs(x);
    auto it = std::find_if(gs.begin(), gs.end(),
                           [&](const AbsGroup& g) { return g.absval == ax; });
    if (it == gs.end())
      gs.push_back({ax, {x}});
    else
      it->members.push_back(x);
  }
  std::sort(gs.begin(), gs.end(), [](const AbsGroup& a, const AbsGroup& b) {
    return a.members.size() > b.members.size();
  });
  return gs;
}

}  // namespace

std::pair<FourierTemplate, CaseAReport> case_a_template(
    const std::vector<IntVec>& families) {
  int n = static_cast<int>(families.size());
  if (n != 5 && n != 3)
    throw Error("BadArgument", "expected the critical-equation multisets");
  for (const auto& A : families)
    if (A.size() != 4) throw Error("BadArgument", "families must have size 4");
  std::set<Rat> lambdas = lambda_set(families);
  auto coin = [&](const Int& a, const Int& b) {
    return coincidental(Rat(a), Rat(b), lambdas);
  };
  auto isolated_elems = [&](const IntVec& A) {
    std::vector<int> out;
    for (int j = 0; j < 4; ++j) {
      bool iso = true;
      for (int t = 0; t < 4 && iso; ++t)
        if (t != j && coin(A[j], A[t])) iso = false;
      if (iso) out.push_back(j);
    }
    return out;
  };
  auto eval = [&](const FourierTemplate& g) {
    SigmaReport rep;
    for (const auto& A : families) {
      double v = sigma_equation(A, g);
      rep.per_B.push_back(v);
      rep.total += v;
    }
    return rep;
  };
  using Hit = std::pair<FourierTemplate, CaseAReport>;
  auto finish = [&](FourierTemplate g, const std::string& subcase, int idx,
                    double C) -> std::optional<Hit> {
    SigmaReport rep = eval(g);
    if (!(rep.total <= -1.0 + 1e-9)) return std::nullopt;
    return std::make_pair(std::move(g),
                          CaseAReport{subcase, idx, C, std::move(rep)});
  };
  auto escalate = [&](const std::function<FourierTemplate(long)>& builder,
                      const std::string& subcase,
                      int idx) -> std::optional<Hit> {
    for (long C = 2; C <= (1L << 20); C *= 2) {
      FourierTemplate g = builder(C);
      SigmaReport rep = eval(g);
      if (rep.total <= -1.0)
        return Hit{std::move(g), CaseAReport{subcase, idx,
                                             static_cast<double>(C),
                                             std::move(rep)}};
    }
    return std::nullopt;
  };

  std::vector<std::vector<int>> iso(n);
  std::vector<int> E;
  for (int i = 0; i < n; ++i) {
    iso[i] = isolated_elems(families[i]);
    if (!iso[i].empty()) E.push_back(i);
  }

  if (!E.empty()) {
    // all-unit families: constant-phase spikes at +-1
    for (int i : E) {
      const IntVec& A = families[i];
      bool unit = std::all_of(A.begin(), A.end(),
                              [](const Int& x) { return abs(x) == 1; });
      if (!unit) continue;
      int pos = static_cast<int>(
          std::count_if(A.begin(), A.end(), [](const Int& x) { return x > 0; }));
      if (pos == 0 || pos == 4) {
        if (auto r = finish(
                spike_template(
                    {{Int(1), std::polar(1.0, std::numbers::pi / 4)}}),
                "unit-phase-spike", i, 0.0))
          return std::move(*r);
      }
      if (pos == 1 || pos == 3) {
        if (auto r =
                finish(spike_template_exact({{Int(1), GaussQ(Rat(0), Rat(1))}}),
                       "unit-imaginary-spike", i, 0.0))
          return std::move(*r);
      }
    }
    // {{a,a,a,b}} / {{a,a,-a,b}}: large positive spike on the triple
    for (int i : E) {
      auto gs = abs_groups(families[i]);
      if (gs.size() == 2 && gs[0].members.size() == 3) {
        Int a = gs[0].absval, b = gs[1].absval;
        if (auto r = escalate(
                [&](long C) {
                  return spike_template_exact({{a, GaussQ(Rat(C), Rat(0))},
                                               {b, GaussQ(Rat(-1), Rat(0))}});
                },
                "triple-spike", i))
          return std::move(*r);
      }
    }
    // two repeated absolute values: 2-dimensional joins
    for (int i : E) {
      auto gs = abs_groups(families[i]);
      if (!(gs.size() == 2 && gs[0].members.size() == 2)) continue;
      bool eq0 = gs[0].members[0] == gs[0].members[1];
      bool eq1 = gs[1].members[0] == gs[1].members[1];
      Cplx e8 = std::polar(1.0, std::numbers::pi / 4);
      if (eq0 && eq1) {
        // {{a,a,b,b}}
        Int a = gs[0].members[0], b = gs[1].members[0];
        auto g1 = spike_template({{a, e8}, {b, e8}});
        auto g2 = spike_template({{a, e8}, {b, std::conj(e8)}});
        if (auto r = finish(join(g1, g2), "equal-pairs-join", i, 0.0))
          return std::move(*r);
      }
      if (eq0 != eq1) {
        // {{a,a,b,-b}} with a the equal pair
        Int a = eq0 ? gs[0].members[0] : gs[1].members[0];
        Int b = eq0 ? gs[1].absval : gs[0].absval;
        auto g1 = spike_template_exact(
            {{a, GaussQ(Rat(1), Rat(0))}, {b, GaussQ(Rat(0), Rat(1))}});
        auto g2 = spike_template_exact(
            {{b, GaussQ(Rat(1), Rat(0))}, {a, GaussQ(Rat(0), Rat(1))}});
        if (auto r = finish(join(g1, g2), "mixed-pairs-join", i, 0.0))
          return std::move(*r);
      }
      // {{a,-a,b,-b}} is lambda-common and cannot carry an isolated element
    }
    // {{a,a,b,c}} / {{a,-a,b,c}} with the repeated value isolated
    for (int i : E) {
      auto gs = abs_groups(families[i]);
      if (!(gs.size() == 3 && gs[0].members.size() == 2)) continue;
      bool dup_isolated = false;
      for (int j : iso[i])
        if (abs(families[i][j]) == gs[0].absval) dup_isolated = true;
      if (!dup_isolated) continue;
      Int a = gs[0].absval, b = gs[1].absval, c = gs[2].absval;
      for (long C = 2; C <= (1L << 20); C *= 2) {
        for (int swap = 0; swap < 2; ++swap) {
          Rat vb = swap ? Rat(-1) : Rat(1);
          auto g = spike_template_exact({{a, GaussQ(Rat(C), Rat(0))},
                                         {b, GaussQ(vb, Rat(0))},
                                         {c, GaussQ(-vb, Rat(0))}});
          SigmaReport rep = eval(g);
          if (rep.total <= -1.0)
            return {std::move(g),
                    CaseAReport{"double-spike", i, static_cast<double>(C),
                                std::move(rep)}};
        }
      }
    }
    // isolated value of multiplicity one: negative spike there
    for (int i : E) {
      for (int j : iso[i]) {
        const IntVec& A = families[i];
        Int aj = abs(A[j]);
        int mult = 0;
        for (const auto& x : A)
          if (abs(x) == aj) ++mult;
        if (mult != 1) continue;
        std::set<Int> others;
        for (int t = 0; t < 4; ++t)
          if (t != j) others.insert(abs(A[t]));
        if (auto r = escalate(
                [&](long C) {
                  std::vector<std::pair<Int, GaussQ>> pts{
                      {aj, GaussQ(Rat(-C), Rat(0))}};
                  for (const auto& o : others)
                    pts.push_back({o, GaussQ(Rat(1), Rat(0))});
                  return spike_template_exact(pts);
                },
                "isolated-spike", i))
          return std::move(*r);
      }
    }
  }
  // one element coincidental with the other three, which are pairwise not
  for (int i = 0; i < n; ++i) {
    const IntVec& A = families[i];
    for (int j = 0; j < 4; ++j) {
      bool hub = true;
      for (int t = 0; t < 4; ++t)
        if (t != j && !coin(A[j], A[t])) hub = false;
      if (!hub) continue;
      std::vector<int> rest;
      for (int t = 0; t < 4; ++t)
        if (t != j) rest.push_back(t);
      bool pairwise_not = !coin(A[rest[0]], A[rest[1]]) &&
                          !coin(A[rest[0]], A[rest[2]]) &&
                          !coin(A[rest[1]], A[rest[2]]);
      if (!pairwise_not) continue;
      std::set<Int> others;
      for (int t : rest) others.insert(abs(A[t]));
      if (auto r = escalate(
              [&, j](long C) {
                std::vector<std::pair<Int, GaussQ>> pts{
                    {abs(A[j]), GaussQ(Rat(1), Rat(0))}};
                for (const auto& o : others)
                  pts.push_back({o, GaussQ(Rat(-C), Rat(0))});
                return spike_template_exact(pts);
              },
              "dominant-spike", i))
        return std::move(*r);
    }
  }

  // last resort: exhaustive search over small-phase spikes on one family's
  // absolute values with one escalated coefficient, verified by evaluation
  const double kQuarter = std::numbers::pi / 4;
  std::vector<Cplx> small{Cplx(0.0, 0.0)};
  for (int t = 0; t < 8; ++t) small.push_back(std::polar(1.0, kQuarter * t));
  const std::array<double, 3> big_phases = {0.0, kQuarter, 2 * kQuarter};
  const std::array<long, 3> scales = {4, 256, 65536};
  for (int i = 0; i < n; ++i) {
    std::vector<Int> vals;
    for (const auto& x : families[i]) {
      Int ax = abs(x);
      if (std::find(vals.begin(), vals.end(), ax) == vals.end())
        vals.push_back(ax);
    }
    std::sort(vals.begin(), vals.end());
    size_t u = vals.size();
    size_t combos = 1;
    for (size_t t = 1; t < u; ++t) combos *= small.size();
    for (size_t bigj = 0; bigj < u; ++bigj)
      for (double bp : big_phases)
        for (size_t code = 0; code < combos; ++code)
          for (long C : scales) {
            std::vector<std::pair<Int, Cplx>> pts{
                {vals[bigj], std::polar(static_cast<double>(C), bp)}};
            size_t rem = code;
            for (size_t t = 0; t < u; ++t) {
              if (t == bigj) continue;
              Cplx v = small[rem % small.size()];
              rem /= small.size();
              if (v != Cplx(0.0, 0.0)) pts.push_back({vals[t], v});
            }
            FourierTemplate g = spike_template(pts);
            SigmaReport rep = eval(g);
            if (rep.total <= -1.0)
              return {std::move(g),
                      CaseAReport{"phase-spike", i, static_cast<double>(C),
                                  std::move(rep)}};
          }
  }
  throw Error("Inconclusive", "no spike construction applies");
}

FourierTemplate spike_template_exact(
    const std::vector<std::pair<Int, GaussQ>>& points) {
  std::map<Key, Cplx> values;
  std::map<Key, GaussQ> exact;
  for (const auto& [r, v] : points) {
    if (r == 0) throw Error("OriginAssignment", "no spike at the origin");
    values[{r}] = v.to_cplx();
    exact[{r}] = v;
  }
  return make_template(1, values, exact);
}

}  // namespace lincom
