#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "lincom/certify.hpp"
#include "lincom/classify.hpp"
#include "lincom/templates.hpp"

using namespace lincom;

namespace {

IntMat mat(std::initializer_list<std::initializer_list<long>> rows) {
  IntMat M;
  for (auto& r : rows) {
    IntVec v;
    for (long x : r) v.emplace_back(x);
    M.push_back(std::move(v));
  }
  return M;
}

// reference 1x4 uncommon instance: coefficients (1,2,3,4), template with
// g(+-1) = -1 and g(+-2) = g(+-3) = g(+-4) = 1, sigma = -2
LinearSystem ref_system() { return validate(mat({{1, 2, 3, 4}})); }

FourierTemplate ref_template() {
  std::map<Key, Cplx> v;
  v[{Int(1)}] = Cplx(-1, 0);
  v[{Int(2)}] = Cplx(1, 0);
  v[{Int(3)}] = Cplx(1, 0);
  v[{Int(4)}] = Cplx(1, 0);
  return make_template(1, v);
}

FieldFunction constant_one(long p) {
  FieldFunction f;
  f.p = p;
  f.coefficients[0] = Cplx(1, 0);
  return f;
}

FieldFunction zero_indicator(long p) {
  FieldFunction f;
  f.p = p;
  for (long r = 0; r < p; ++r) f.coefficients[r] = Cplx(1.0 / p, 0);
  return f;
}

FieldFunction random_field(long p, int support, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::uniform_int_distribution<long> rr(1, p - 1);
  FieldFunction f;
  f.p = p;
  f.coefficients[0] = Cplx(u(rng), 0);
  for (int s = 0; s < support; ++s) {
    long r = rr(rng);
    Cplx v(u(rng), u(rng));
    f.coefficients[r] = v;
    f.coefficients[p - r] = std::conj(v);
  }
  return f;
}

double parseval_residual(const FieldFunction& f) {
  double lhs = 0.0;
  for (const auto& [r, v] : f.coefficients) lhs += std::norm(v);
  auto vals = field_values(f);
  double rhs = 0.0;
  for (double x : vals) rhs += x * x;
  rhs /= static_cast<double>(f.p);
  return std::abs(lhs - rhs);
}

}  // namespace

TEST_CASE("integer_kernel spans the orthogonal lattice") {
  auto K = integer_kernel(mat({{1, 2, 3, 4}}));
  REQUIRE(K.size() == 3);
  for (const auto& q : K) {
    Int dot = 0;
    IntVec row{1, 2, 3, 4};
    for (size_t j = 0; j < 4; ++j) dot += q[j] * row[j];
    CHECK(dot == 0);
  }
  K = integer_kernel(mat({{1, 0, -1, 1, -1}, {0, 2, 2, 0, 3}}));
  REQUIRE(K.size() == 3);
  for (const auto& q : K)
    for (const auto& row : mat({{1, 0, -1, 1, -1}, {0, 2, 2, 0, 3}})) {
      Int dot = 0;
      for (size_t j = 0; j < 5; ++j) dot += q[j] * row[j];
      CHECK(dot == 0);
    }
}

TEST_CASE("freiman_project installs the template at an admissible prime") {
  auto L = ref_system();
  auto g = ref_template();
  auto f = freiman_project(L, g, 101);
  CHECK(f.p == 101);
  CHECK(f.coeff(1) == Cplx(-1, 0));
  CHECK(f.coeff(-1) == Cplx(-1, 0));
  CHECK(f.coeff(2) == Cplx(1, 0));
  CHECK(f.coeff(3) == Cplx(1, 0));
  CHECK(f.coeff(4) == Cplx(1, 0));
  CHECK(f.coeff(0) == Cplx(0, 0));
  CHECK(f.coefficients.size() == 8);
}

TEST_CASE("freiman_project rejects too-small primes with the minimal bound") {
  CHECK_THROWS_WITH_AS(freiman_project(ref_system(), ref_template(), 11),
                       doctest::Contains("PrimeTooSmall"), Error);
  // the reported minimum admits the projection
  auto b = freiman_bounds(ref_system(), ref_template());
  CHECK(b.min_p_bound == 48);  // W = 6, Gamma = 4
  CHECK_NOTHROW(freiman_project(ref_system(), ref_template(), 53));
}

TEST_CASE("freiman_project in dimension two separates coordinates by base C") {
  std::map<Key, Cplx> v;
  v[{Int(1), Int(0)}] = Cplx(0.5, 0);
  v[{Int(0), Int(1)}] = Cplx(0.0, 0.5);
  auto g = make_template(2, v);
  auto L = ref_system();
  auto b = freiman_bounds(L, g);
  CHECK(b.C == 13);  // M = 1, W = 6
  auto f = freiman_project(L, g, 1009);
  CHECK(f.coeff(1) == Cplx(0.5, 0));
  CHECK(f.coeff(13) == Cplx(0.0, 0.5));
  CHECK(f.coeff(-13) == Cplx(0.0, -0.5));
  CHECK(f.coefficients.size() == 4);
}

TEST_CASE("density_fourier basics") {
  auto L = validate(mat({{1, 1, -1, -1, 0}, {1, -1, 4, 0, -4}}));
  CHECK(density_fourier(L, constant_one(7)) == doctest::Approx(1.0));
  // indicator of {0}: density p^{m-k}
  CHECK(density_fourier(L, zero_indicator(7)) ==
        doctest::Approx(std::pow(7.0, -3)).epsilon(1e-9));
  // projected reference template: density equals sigma = -2
  auto f = freiman_project(ref_system(), ref_template(), 101);
  CHECK(density_fourier(ref_system(), f) == doctest::Approx(-2.0));
}

TEST_CASE("density_direct agrees with density_fourier") {
  auto L = validate(mat({{1, 1, -1, -1, 0}, {1, -1, 4, 0, -4}}));
  CHECK(density_direct(L, constant_one(7)) == doctest::Approx(1.0));
  CHECK(density_direct(L, zero_indicator(7)) ==
        doctest::Approx(std::pow(7.0, -3)).epsilon(1e-9));
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    auto f = random_field(101, 4, seed);
    CHECK(density_direct(L, f) ==
          doctest::Approx(density_fourier(L, f)).epsilon(1e-9));
  }
  FieldFunction big = constant_one(101);
  CHECK_THROWS_WITH_AS(density_direct(validate(mat({{1, 2, 3, 4, 5}})), big),
                       doctest::Contains("TooLarge"), Error);
}

TEST_CASE("Parseval holds for constructed field functions") {
  CHECK(parseval_residual(constant_one(13)) < 1e-9);
  CHECK(parseval_residual(zero_indicator(13)) < 1e-9);
  for (uint64_t seed = 0; seed < 3; ++seed)
    CHECK(parseval_residual(random_field(101, 5, seed)) < 1e-9);
}

TEST_CASE("two_color_gap on the reference instance") {
  auto L = ref_system();
  auto f = freiman_project(L, ref_template(), 101);
  double eps = 0.05;
  double want = 2 * std::pow(eps, 4) * (-2.0);
  CHECK(two_color_gap(L, f, eps) == doctest::Approx(want).epsilon(1e-9));
  // zero perturbation: no gap
  FieldFunction z;
  z.p = 101;
  CHECK(two_color_gap(L, z, 0.05) == doctest::Approx(0.0));
  // max |f| = 8, so eps = 0.1 pushes h out of [0,1]
  CHECK_THROWS_WITH_AS(two_color_gap(L, f, 0.1),
                       doctest::Contains("RangeViolation"), Error);
}

TEST_CASE("two_color_gap reproduces the two-sided density witness") {
  auto L = validate(mat({{1, -1, 0, 0, 2}, {0, 0, 1, -1, 3}}));
  // mean 0.4995 with weight 0.0834 on +-1 and +-2, realized as h = 1/2 + f
  FieldFunction f;
  f.p = 1009;
  f.coefficients[0] = Cplx(-0.0005, 0);
  for (long r : {1L, 2L}) {
    f.coefficients[r] = Cplx(0.0834, 0);
    f.coefficients[f.p - r] = Cplx(0.0834, 0);
  }
  double gap = two_color_gap(L, f, 1.0);
  CHECK(gap < 0.0);
  double alpha = 0.4995, beta = 0.0834;
  double want = std::pow(alpha, 5) + std::pow(1 - alpha, 5) +
                (2 * alpha - 1) * 2 * std::pow(beta, 3);
  CHECK(gap + 1.0 / 16.0 == doctest::Approx(want).epsilon(1e-9));
  CHECK(gap + 1.0 / 16.0 == doctest::Approx(0.0624995).epsilon(1e-7));
}

TEST_CASE("tensor_indicator weighting identity") {
  auto f = random_field(11, 3, 7);
  auto h = tensor_indicator(f);
  CHECK(std::abs(h.coeff(0, 0) - f.coeff(0) / 11.0) < 1e-12);
  CHECK(std::abs(h.coeff(3, 8) - f.coeff(3) / 11.0) < 1e-12);

  auto L = validate(mat({{1, -1, 2, -2, 0}, {1, 0, 3, 0, 5}}));  // girth 3
  auto [one, two] = critical_density_split(L, f);
  int c = 4;  // critical subsystems have 4 columns here
  double want = std::pow(11.0, 1 - c) * one + std::pow(11.0, 2 - c) * two;
  CHECK(tensor_critical_sum(L, h) == doctest::Approx(want).epsilon(1e-8));

  // zero function tensors to zero
  FieldFunction z;
  z.p = 11;
  CHECK(tensor_indicator(z).coefficients.empty());
}

TEST_CASE("tensor_critical_sum matches direct enumeration on one subsystem") {
  const long p = 11;
  auto f = random_field(p, 2, 3);
  auto h = tensor_indicator(f);
  auto L = validate(mat({{1, -1, 2, -2, 0}, {1, 0, 3, 0, 5}}));
  auto crits = critical_sets(L);
  REQUIRE(!crits.empty());
  const LinearSystem& S = crits[0].L_B;
  REQUIRE(S.m == 1);
  auto vals = field_values(f);
  // t_{S}(f * 1_{z=0}) over (F_p x F_p)^k: kernel has 3 free pair-variables
  double direct = 0.0;
  long a0 = ((S.rows[0][0].get_si() % p) + p) % p;
  long inv = 1;
  for (long t = 1; t < p; ++t)
    if (a0 * t % p == 1) inv = t;
  long n = 0;
  std::vector<long> y(4), z(4);
  for (y[1] = 0; y[1] < p; ++y[1])
    for (y[2] = 0; y[2] < p; ++y[2])
      for (y[3] = 0; y[3] < p; ++y[3])
        for (z[1] = 0; z[1] < p; ++z[1])
          for (z[2] = 0; z[2] < p; ++z[2])
            for (z[3] = 0; z[3] < p; ++z[3]) {
              long sy = 0, sz = 0;
              for (int j = 1; j < 4; ++j) {
                sy += S.rows[0][j].get_si() * y[j];
                sz += S.rows[0][j].get_si() * z[j];
              }
              y[0] = ((-sy % p) * inv % p + p) % p;
              z[0] = ((-sz % p) * inv % p + p) % p;
              double prod = 1.0;
              for (int j = 0; j < 4; ++j)
                prod *= vals[y[j]] * (z[j] == 0 ? 1.0 : 0.0);
              direct += prod;
              ++n;
            }
  direct /= static_cast<double>(n);
  // Fourier-side value of the same subsystem
  double fourier = 0.0;
  {
    std::vector<long> cols(4);
    for (int j = 0; j < 4; ++j)
      cols[j] = ((S.rows[0][j].get_si() % p) + p) % p;
    std::complex<double> acc(0, 0);
    for (long r1 = 0; r1 < p; ++r1)
      for (long r2 = 0; r2 < p; ++r2) {
        std::complex<double> prod(1, 0);
        for (int j = 0; j < 4; ++j)
          prod *= h.coeff(cols[j] * r1 % p, cols[j] * r2 % p);
        acc += prod;
      }
    fourier = acc.real();
  }
  CHECK(direct == doctest::Approx(fourier).epsilon(1e-8));
}

TEST_CASE("certify_uncommon packages witnesses for small supports") {
  auto cert = certify_uncommon(ref_system());
  CHECK(cert.sums.total <= -2.0);
  REQUIRE(cert.witness.has_value());
  CHECK(cert.witness->p >= 53);
  CHECK(cert.witness->gap < 0.0);
  // for a 1x4 system the gap is exactly 2 eps^4 times the projected density
  double eps = cert.witness->epsilon;
  CHECK(cert.witness->gap ==
        doctest::Approx(2 * std::pow(eps, 4) * cert.sums.total).epsilon(1e-6));

  auto L = validate(mat({{1, 3, -1, -3, 0}, {2, 3, -3, 0, -2}}));
  cert = certify_uncommon(L);
  CHECK(cert.sums.total <= -1e-6);
  if (cert.witness) CHECK(cert.witness->gap < 0.0);

  CHECK_THROWS_WITH_AS(
      certify_uncommon(validate(mat({{1, -1, 2, -2, 0}, {1, 1, 0, 0, -2}}))),
      doctest::Contains("NotApplicable"), Error);
}

TEST_CASE("certify_uncommon tolerates witness-free certificates") {
  // truncated-grid template: projection may be skipped, sigma report stands
  auto L = validate(mat({{1, -1, 1, -1, 0}, {-2, 4, 3, 0, -9}}));
  auto cert = certify_uncommon(L);
  CHECK(cert.sums.total <= -1e-6);
}

TEST_CASE("sample_commonness finds no violation for proven common systems") {
  auto r = sample_commonness(
      validate(mat({{1, 0, -1, 2, -2}, {0, 1, 2, -1, -2}})), 7, 500, 42);
  CHECK(r.min_gap >= -1e-9);
  r = sample_commonness(validate(mat({{1, 2, 0, 0, 3}, {0, 0, 1, 2, 3}})), 11,
                        500, 42);
  CHECK(r.min_gap >= -1e-9);
}

TEST_CASE("constant one-half function sits exactly at the two-color bound") {
  auto L = validate(mat({{1, 0, -1, 2, -2}, {0, 1, 2, -1, -2}}));
  FieldFunction half;
  half.p = 7;
  half.coefficients[0] = Cplx(0.5, 0);
  double t = density_fourier(L, half);
  CHECK(2 * t - std::ldexp(1.0, 1 - L.k) == doctest::Approx(0.0));
}
