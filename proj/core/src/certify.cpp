#include "lincom/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lincom/classify.hpp"
#include "lincom/templates.hpp"

namespace lincom {

namespace {

constexpr double kTau = 2 * std::numbers::pi;

long mod_p(const Int& a, long p) {
  Int r = a % p;
  if (r < 0) r += p;
  return r.get_si();
}

long pow_mod(long b, long e, long p) {
  long r = 1 % p;
  b %= p;
  while (e > 0) {
    if (e & 1) r = static_cast<long>((__int128)r * b % p);
    b = static_cast<long>((__int128)b * b % p);
    e >>= 1;
  }
  return r;
}

long inv_mod(long a, long p) { return pow_mod(((a % p) + p) % p, p - 2, p); }

std::vector<Cplx> dense_table(const FieldFunction& f) {
  if (f.p <= 1 || f.p > 4'000'000)
    throw Error("TooLarge", "field size out of range: " + std::to_string(f.p));
  std::vector<Cplx> tab(f.p, Cplx(0, 0));
  for (const auto& [r, v] : f.coefficients) tab[r] = v;
  return tab;
}

// t_{L}(f) as a complex sum, shared by the public evaluators
Cplx density_fourier_cplx(const LinearSystem& L, const FieldFunction& f) {
  const long p = f.p;
  double work = 1.0;
  for (int i = 0; i < L.m; ++i) work *= p;
  if (work > 2e8)
    throw Error("TooLarge", "p^m too large for the Fourier-side sum");
  auto tab = dense_table(f);
  std::vector<std::vector<long>> col(L.k, std::vector<long>(L.m));
  for (int i = 0; i < L.k; ++i)
    for (int j = 0; j < L.m; ++j) col[i][j] = mod_p(L.rows[j][i], p);
  std::vector<long> r(L.m, 0);
  Cplx total(0, 0);
  while (true) {
    Cplx prod(1, 0);
    for (int i = 0; i < L.k && prod != Cplx(0, 0); ++i) {
      long idx = 0;
      for (int j = 0; j < L.m; ++j)
        idx = (idx + col[i][j] * r[j]) % p;
      prod *= tab[idx];
    }
    total += prod;
    int j = 0;
    while (j < L.m && ++r[j] == p) r[j++] = 0;
    if (j == L.m) break;
  }
  return total;
}

// the subsystem stored in a CriticalSet is already stripped to |B| columns
double critical_density(const CriticalSet& cs, const FieldFunction& f) {
  return std::real(density_fourier_cplx(cs.L_B, f));
}

struct GapDetail {
  double t_h = 0.0, t_1mh = 0.0, gap = 0.0;
};

GapDetail two_color_detail(const LinearSystem& L, const FieldFunction& f,
                           double epsilon) {
  auto vals = field_values(f);
  double maxf = 0.0;
  for (double v : vals) maxf = std::max(maxf, std::abs(v));
  if (epsilon * maxf > 0.5 + 1e-12)
    throw Error("RangeViolation",
                "h = 1/2 + eps*f leaves [0,1]; max |f| = " +
                    std::to_string(maxf));
  FieldFunction h, h1m;
  h.p = h1m.p = f.p;
  for (const auto& [r, v] : f.coefficients) {
    h.coefficients[r] = epsilon * v;
    h1m.coefficients[r] = -epsilon * v;
  }
  h.coefficients[0] += 0.5;
  h1m.coefficients[0] += 0.5;
  GapDetail out;
  out.t_h = density_fourier(L, h);
  out.t_1mh = density_fourier(L, h1m);
  out.gap = out.t_h + out.t_1mh - std::ldexp(1.0, 1 - L.k);
  return out;
}

Int gamma_of(const Key& w, const Int& C) {
  Int acc = 0, pw = 1;
  for (const auto& c : w) {
    acc += c * pw;
    pw *= C;
  }
  return acc;
}

FieldFunction project_with(const FourierTemplate& g, long p, const Int& C) {
  FieldFunction f;
  f.p = p;
  for (const auto& [w, v] : g.entries) {
    Int gm = gamma_of(w, C);
    if (gm == 0) continue;
    f.coefficients[mod_p(gm, p)] = v;
  }
  return f;
}

bool is_probable_prime(long p) {
  Int z = p;
  return mpz_probab_prime_p(z.get_mpz_t(), 30) > 0;
}

long next_prime_above(const Int& n) {
  Int q;
  mpz_nextprime(q.get_mpz_t(), n.get_mpz_t());
  if (!q.fits_slong_p()) throw Error("TooLarge", "prime bound overflows");
  return q.get_si();
}

std::mt19937_64 derived_rng(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{seed, stream};
  return std::mt19937_64(seq);
}

}  // namespace

IntMat integer_kernel(const IntMat& M) {
  if (M.empty()) return {};
  const int k = static_cast<int>(M[0].size());
  RatMat A;
  for (const auto& row : M) {
    RatVec r;
    for (const auto& x : row) r.emplace_back(x);
    A.push_back(std::move(r));
  }
  // rational RREF, tracking pivot columns
  std::vector<int> pivots;
  int lead = 0;
  for (size_t row = 0; row < A.size() && lead < k; ++lead) {
    size_t sel = row;
    while (sel < A.size() && A[sel][lead] == 0) ++sel;
    if (sel == A.size()) continue;
    std::swap(A[row], A[sel]);
    Rat pv = A[row][lead];
    for (int j = 0; j < k; ++j) A[row][j] /= pv;
    for (size_t i = 0; i < A.size(); ++i) {
      if (i == row || A[i][lead] == 0) continue;
      Rat c = A[i][lead];
      for (int j = 0; j < k; ++j) A[i][j] -= c * A[row][j];
    }
    pivots.push_back(lead);
    ++row;
  }
  std::vector<bool> is_pivot(k, false);
  for (int j : pivots) is_pivot[j] = true;
  IntMat out;
  for (int free = 0; free < k; ++free) {
    if (is_pivot[free]) continue;
    RatVec v(k, Rat(0));
    v[free] = 1;
    for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -A[i][free];
    Int den = 1;
    for (const auto& q : v) den = lcm(den, Int(q.get_den()));
    IntVec w(k);
    for (int j = 0; j < k; ++j) w[j] = Int(v[j] * den);
    out.push_back(primitive_normalize(std::move(w)));
  }
  return out;
}

ProjectionBounds freiman_bounds(const LinearSystem& L,
                                const FourierTemplate& g) {
  Int M = 0;
  for (const auto& [w, v] : g.entries)
    for (const auto& c : w) M = std::max(M, Int(abs(c)));
  if (M == 0) throw Error("BadArgument", "empty template support");
  Int W = 1;
  for (const auto& cs : critical_sets(L)) {
    for (const auto& q : integer_kernel(cs.L_B.rows)) {
      Int s = 0;
      for (const auto& x : q) s += abs(x);
      W = std::max(W, Int(s + 1));
    }
  }
  ProjectionBounds b;
  b.C = 2 * M * W + 1;
  Int Gamma = 0;
  for (const auto& [w, v] : g.entries)
    Gamma = std::max(Gamma, Int(abs(gamma_of(w, b.C))));
  b.min_p_bound = 2 * W * Gamma;
  return b;
}

FieldFunction freiman_project(const LinearSystem& L, const FourierTemplate& g,
                              long p) {
  if (p < 3 || !is_probable_prime(p))
    throw Error("BadArgument", "p must be an odd prime");
  ProjectionBounds b = freiman_bounds(L, g);
  if (b.min_p_bound >= p)
    throw Error("PrimeTooSmall", "minimal admissible prime is " +
                                     std::to_string(next_prime_above(
                                         b.min_p_bound)));
  Int M = 0, W = (b.C - 1) / 2;  // C = 2MW+1
  for (const auto& [w, v] : g.entries)
    for (const auto& c : w) M = std::max(M, Int(abs(c)));
  W = M == 0 ? Int(1) : Int(W / M);

  auto crits = critical_sets(L);
  Int C = b.C;
  for (int attempt = 0; attempt < 20; ++attempt) {
    FieldFunction f = project_with(g, p, C);
    bool ok = true;
    for (const auto& cs : crits) {
      double work = static_cast<double>(cs.L_B.k);
      for (int i = 0; i < cs.L_B.m; ++i) work *= p;
      if (work > 2e7) continue;  // verification unaffordable, trust the bound
      double t = critical_density(cs, f);
      double s = sigma(cs.L_B, g);
      if (std::abs(t - s) > 1e-6 * std::max(1.0, std::abs(s))) {
        ok = false;
        break;
      }
    }
    if (ok) return f;
    C *= 2;
    Int Gamma = 0;
    for (const auto& [w, v] : g.entries)
      Gamma = std::max(Gamma, Int(abs(gamma_of(w, C))));
    if (2 * W * Gamma >= p)
      throw Error("PrimeTooSmall",
                  "projection equality failed and no larger base fits");
  }
  throw Error("Inconclusive", "projection equality failed after escalation");
}

double density_fourier(const LinearSystem& L, const FieldFunction& f) {
  Cplx t = density_fourier_cplx(L, f);
  if (std::abs(t.imag()) > 1e-7 * std::max(1.0, std::abs(t.real())))
    throw Error("Inconclusive", "density has a non-negligible imaginary part");
  return t.real();
}

double density_direct(const LinearSystem& L, const FieldFunction& f) {
  const long p = f.p;
  double work = 1.0;
  for (int i = 0; i < L.k - L.m; ++i) work *= p;
  if (work > 1e8) throw Error("TooLarge", "p^{k-m} exceeds the direct guard");
  auto vals = field_values(f);

  // row-reduce L mod p to express pivot variables by the free ones
  std::vector<std::vector<long>> A(L.m, std::vector<long>(L.k));
  for (int i = 0; i < L.m; ++i)
    for (int j = 0; j < L.k; ++j) A[i][j] = mod_p(L.rows[i][j], p);
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < L.k && row < L.m; ++col) {
    int sel = row;
    while (sel < L.m && A[sel][col] == 0) ++sel;
    if (sel == L.m) continue;
    std::swap(A[row], A[sel]);
    long inv = inv_mod(A[row][col], p);
    for (int j = 0; j < L.k; ++j)
      A[row][j] = static_cast<long>((__int128)A[row][j] * inv % p);
    for (int i = 0; i < L.m; ++i) {
      if (i == row || A[i][col] == 0) continue;
      long c = A[i][col];
      for (int j = 0; j < L.k; ++j)
        A[i][j] =
            static_cast<long>(((A[i][j] - (__int128)c * A[row][j]) % p + p) %
                              p);
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (row < L.m) throw Error("Degenerate", "system drops rank mod p");
  std::vector<int> free_col;
  for (int j = 0; j < L.k; ++j)
    if (std::find(pivot_col.begin(), pivot_col.end(), j) == pivot_col.end())
      free_col.push_back(j);

  std::vector<long> x(L.k, 0), fr(free_col.size(), 0);
  double sum = 0.0;
  long count = 0;
  while (true) {
    for (size_t t = 0; t < free_col.size(); ++t) x[free_col[t]] = fr[t];
    for (int i = 0; i < L.m; ++i) {
      __int128 acc = 0;
      for (size_t t = 0; t < free_col.size(); ++t)
        acc += (__int128)A[i][free_col[t]] * fr[t];
      x[pivot_col[i]] = static_cast<long>(((-acc) % p + p) % p);
    }
    double prod = 1.0;
    for (int j = 0; j < L.k; ++j) prod *= vals[x[j]];
    sum += prod;
    ++count;
    size_t j = 0;
    while (j < free_col.size() && ++fr[j] == p) fr[j++] = 0;
    if (j == free_col.size()) break;
  }
  return sum / count;
}

std::vector<double> field_values(const FieldFunction& f) {
  const long p = f.p;
  if (p <= 1 || p > 2'000'000)
    throw Error("TooLarge", "field size out of range for value reconstruction");
  std::vector<double> vals(p, 0.0);
  for (const auto& [r, v] : f.coefficients) {
    for (long x = 0; x < p; ++x) {
      double ang = kTau * static_cast<double>((__int128)r * x % p) / p;
      vals[x] += v.real() * std::cos(ang) - v.imag() * std::sin(ang);
    }
  }
  return vals;
}

double two_color_gap(const LinearSystem& L, const FieldFunction& f,
                     double epsilon) {
  return two_color_detail(L, f, epsilon).gap;
}

ProductFunction tensor_indicator(const FieldFunction& f) {
  if (f.p > 4000)
    throw Error("TooLarge", "tensor table would have p * |supp| entries");
  ProductFunction h;
  h.p = f.p;
  double inv_p = 1.0 / f.p;
  for (const auto& [r1, v] : f.coefficients)
    for (long r2 = 0; r2 < f.p; ++r2) h.coefficients[{r1, r2}] = v * inv_p;
  return h;
}

double tensor_critical_sum(const LinearSystem& L, const ProductFunction& h) {
  const long p = h.p;
  Cplx total(0, 0);
  for (const auto& cs : critical_sets(L)) {
    const LinearSystem& S = cs.L_B;
    double work = static_cast<double>(S.k);
    for (int i = 0; i < 2 * S.m; ++i) work *= p;
    if (work > 2e8) throw Error("TooLarge", "p^{2m} exceeds the tensor guard");
    std::vector<std::vector<long>> col(S.k, std::vector<long>(S.m));
    for (int i = 0; i < S.k; ++i)
      for (int j = 0; j < S.m; ++j) col[i][j] = mod_p(S.rows[j][i], p);
    std::vector<long> r(2 * S.m, 0);  // frequencies (y-part, z-part)
    while (true) {
      Cplx prod(1, 0);
      for (int i = 0; i < S.k && prod != Cplx(0, 0); ++i) {
        long i1 = 0, i2 = 0;
        for (int j = 0; j < S.m; ++j) {
          i1 = (i1 + col[i][j] * r[j]) % p;
          i2 = (i2 + col[i][j] * r[S.m + j]) % p;
        }
        prod *= h.coeff(i1, i2);
      }
      total += prod;
      size_t j = 0;
      while (j < r.size() && ++r[j] == p) r[j++] = 0;
      if (j == r.size()) break;
    }
  }
  return total.real();
}

std::pair<double, double> critical_density_split(const LinearSystem& L,
                                                 const FieldFunction& f) {
  double one = 0.0, two = 0.0;
  for (const auto& cs : critical_sets(L)) {
    double t = critical_density(cs, f);
    (cs.m_B == 1 ? one : two) += t;
  }
  return {one, two};
}

Certificate certify_uncommon(const LinearSystem& Lin) {
  LinearSystem L = irredundant_reduce(Lin).system;
  Verdict v = classify_system(L);
  if (v.status != Status::Uncommon)
    throw Error("NotApplicable", "system is not classified as uncommon");
  Certificate cert = *v.certificate;
  // analytic density certificates carry no counted sigma margin to project
  if (cert.sums.total > -1e-6) return cert;

  ProjectionBounds b;
  try {
    b = freiman_bounds(L, cert.g);
  } catch (const Error&) {
    return cert;
  }
  double limit = std::pow(1e7, 1.0 / L.m);
  Int first = b.min_p_bound;
  if (first < 2) first = 2;
  long p = next_prime_above(first);
  if (static_cast<double>(p) > limit) return cert;  // witness skipped

  FieldFunction f;
  try {
    f = freiman_project(L, cert.g, p);
  } catch (const Error&) {
    return cert;
  }
  auto vals = field_values(f);
  double maxf = 0.0;
  for (double x : vals) maxf = std::max(maxf, std::abs(x));
  if (maxf == 0.0) return cert;
  double eps = 1.0 / (4.0 * maxf);
  for (int halvings = 0; halvings <= 20; ++halvings, eps /= 2) {
    GapDetail d;
    try {
      d = two_color_detail(L, f, eps);
    } catch (const Error&) {
      break;
    }
    if (d.gap < 0) {
      Witness w;
      w.p = p;
      w.C = b.C;
      w.epsilon = eps;
      w.t_h = d.t_h;
      w.t_1mh = d.t_1mh;
      w.gap = d.gap;
      cert.witness = w;
      return cert;
    }
  }
  return cert;  // witness skipped; sigma report remains the certificate
}

SampleReport sample_commonness(const LinearSystem& L, long p, int trials,
                               uint64_t seed) {
  if (!is_probable_prime(p)) throw Error("BadArgument", "p must be prime");
  double limit = 1.0;
  for (int i = 0; i < L.m; ++i) limit *= p;
  if (limit > 1e7) throw Error("TooLarge", "p^m exceeds the sampling guard");

  SampleReport rep;
  rep.min_gap = 1e18;
  for (int t = 0; t < trials; ++t) {
    auto rng = derived_rng(seed, static_cast<uint64_t>(t));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> vals(p);
    std::string desc;
    if (t % 2 == 0) {
      for (auto& x : vals) x = unif(rng);
      desc = "uniform";
    } else {
      // mean + a few cosine spikes, clipped into [0,1]
      double alpha = 0.3 + 0.4 * unif(rng);
      int spikes = 1 + static_cast<int>(3 * unif(rng));
      std::vector<double> beta(spikes), phase(spikes);
      std::vector<long> freq(spikes);
      for (int s = 0; s < spikes; ++s) {
        beta[s] = 0.1 * unif(rng);
        phase[s] = kTau * unif(rng);
        freq[s] = 1 + static_cast<long>((p - 1) * unif(rng));
      }
      for (long x = 0; x < p; ++x) {
        double y = alpha;
        for (int s = 0; s < spikes; ++s)
          y += 2 * beta[s] * std::cos(kTau * freq[s] * x / p + phase[s]);
        vals[x] = std::clamp(y, 0.0, 1.0);
      }
      desc = "mean+spikes";
    }
    // forward transform, then Fourier-side densities of f and 1-f
    FieldFunction f, f1m;
    f.p = f1m.p = p;
    for (long r = 0; r < p; ++r) {
      Cplx acc(0, 0);
      for (long x = 0; x < p; ++x) {
        double ang = -kTau * static_cast<double>((__int128)r * x % p) / p;
        acc += vals[x] * Cplx(std::cos(ang), std::sin(ang));
      }
      acc /= static_cast<double>(p);
      if (std::abs(acc) < 1e-14) continue;
      f.coefficients[r] = acc;
      f1m.coefficients[r] = -acc;
    }
    f1m.coefficients[0] += 1.0;
    double gap = density_fourier(L, f) + density_fourier(L, f1m) -
                 std::ldexp(1.0, 1 - L.k);
    if (gap < rep.min_gap) {
      rep.min_gap = gap;
      std::ostringstream os;
      os << desc << " trial " << t << ", mean "
         << (f.coefficients.count(0) ? f.coefficients[0].real() : 0.0);
      rep.argmin = os.str();
    }
  }
  return rep;
}

}  // namespace lincom
