#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "lincom/classify.hpp"
#include "lincom/grids.hpp"
#include "lincom/sysalg.hpp"

using namespace lincom;

namespace {

IntVec fam(std::initializer_list<long> xs) {
  IntVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

IntMat mat(std::initializer_list<std::initializer_list<long>> rows) {
  IntMat M;
  for (auto& r : rows) {
    IntVec v;
    for (long x : r) v.emplace_back(x);
    M.push_back(std::move(v));
  }
  return M;
}

Verdict classify(const IntMat& M) { return classify_system(validate(M)); }

// A few uncommon verdicts rest on a two-sided density argument whose margin
// below 1/16 is analytic rather than a counted sigma sum; their recorded
// total is negative but smaller than the generic tolerance.
bool density_cert(const Verdict& v) {
  return v.certificate &&
         v.certificate->construction.find("alpha-beta-spike") !=
             std::string::npos;
}

void check_uncommon(const Verdict& v) {
  REQUIRE(v.status == Status::Uncommon);
  REQUIRE(v.certificate.has_value());
  if (density_cert(v))
    CHECK(v.certificate->sums.total < 0.0);
  else
    CHECK(v.certificate->sums.total <= -1e-6);
}

// random column permutation composed with a unimodular row mix
IntMat transformed(const IntMat& M, std::mt19937_64& rng) {
  std::vector<int> perm(M[0].size());
  for (size_t j = 0; j < perm.size(); ++j) perm[j] = static_cast<int>(j);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_int_distribution<int> coef(-2, 2);
  Int a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
  if (a * d - b * c == 0) {
    a = 1, b = 0, c = coef(rng), d = 1;
  }
  IntMat out(M.size(), IntVec(M[0].size()));
  for (size_t j = 0; j < perm.size(); ++j) {
    out[0][perm[j]] = a * M[0][j] + b * M[1][j];
    out[1][perm[j]] = c * M[0][j] + d * M[1][j];
  }
  return out;
}

}  // namespace

TEST_CASE("classify_equation: pair-matching and odd length") {
  auto r = classify_equation(fam({1, -1, 2, -2}));
  CHECK(r.sidorenko);
  CHECK(r.common);
  r = classify_equation(fam({1, 1, 1}));
  CHECK_FALSE(r.sidorenko);
  CHECK(r.common);
  r = classify_equation(fam({1, 2, 3, 4}));
  CHECK_FALSE(r.sidorenko);
  CHECK_FALSE(r.common);
  // matching must use each element once: {1,1,-1,-1,2,-2} pairs up
  r = classify_equation(fam({1, 1, -1, -1, 2, -2}));
  CHECK(r.sidorenko);
  // even length without a perfect matching
  r = classify_equation(fam({1, 1, 1, -1}));
  CHECK_FALSE(r.sidorenko);
  CHECK_FALSE(r.common);
}

TEST_CASE("is_lambda_common recognizes the {a,-a,b,-b} pattern") {
  auto l = is_lambda_common(fam({2, -2, 6, -6}));
  REQUIRE(l.has_value());
  CHECK(*l == Rat(3));
  l = is_lambda_common(fam({1, 1, -1, -1}));
  REQUIRE(l.has_value());
  CHECK(*l == Rat(1));
  CHECK_FALSE(is_lambda_common(fam({2, 3, -1, -4})).has_value());
  // canonical representative is >= 1 regardless of order
  l = is_lambda_common(fam({6, -6, 2, -2}));
  REQUIRE(l.has_value());
  CHECK(*l == Rat(3));
}

TEST_CASE("coincidental ratios against a lambda set") {
  std::set<Rat> lams{Rat(3)};
  CHECK(coincidental(Rat(2), Rat(6), lams));
  CHECK_FALSE(coincidental(Rat(2), Rat(5), lams));
  CHECK(coincidental(Rat(-6), Rat(2), lams));
  // reference girth-4 system with quadruple ratio 3: 1 and 3 match, 1 and 2
  // do not
  auto L = validate(mat({{1, 3, -1, -3, 0}, {2, 3, -3, 0, -2}}));
  auto lset = lambda_set([&] {
    std::vector<IntVec> fs;
    for (const auto& ce : critical_equation_multisets(L))
      fs.push_back(ce.multiset);
    return fs;
  }());
  CHECK(coincidental(Rat(1), Rat(3), lset));
  CHECK_FALSE(coincidental(Rat(1), Rat(2), lset));
}

TEST_CASE("case_of: four-way split for girth-4 systems") {
  CHECK(case_of(validate(mat({{1, 3, -1, -3, 0}, {2, 3, -3, 0, -2}}))) ==
        CaseTag::A);
  CHECK(case_of(validate(mat({{1, -1, 1, -1, 0}, {-2, 4, 3, 0, -9}}))) ==
        CaseTag::B);
  CHECK(case_of(validate(mat({{1, 1, -1, -1, 0}, {1, -1, 4, 0, -4}}))) ==
        CaseTag::C);
  CHECK(case_of(validate(mat({{1, -1, 2, -2, 0}, {1, 2, -1, 0, -2}}))) ==
        CaseTag::D);
  // girth 3 is out of scope
  CHECK_THROWS_WITH_AS(
      case_of(validate(mat({{1, 2, 0, 0, 3}, {0, 0, 1, 2, 3}}))),
      doctest::Contains("NotApplicable"), Error);
}

TEST_CASE("match_common_family: explicit matrices and parametric families") {
  auto id = match_common_family(validate(mat({{1, 0, -1, 2, -2},
                                              {0, 1, 2, -1, -2}})));
  REQUIRE(id.has_value());
  CHECK(*id == "explicit-common-1");
  id = match_common_family(validate(mat({{1, 2, 0, 0, 3}, {0, 0, 1, 2, 3}})));
  REQUIRE(id.has_value());
  CHECK(id->find("three-term-pair") == 0);
  id = match_common_family(
      validate(mat({{1, -1, 2, -2, 0}, {1, 1, 0, 0, -2}})));
  REQUIRE(id.has_value());
  CHECK(id->find("ratio-family") == 0);
  CHECK(id->find("1/2") != std::string::npos);
  CHECK_FALSE(match_common_family(validate(mat({{1, 3, -1, -3, 0},
                                                {2, 3, -3, 0, -2}})))
                  .has_value());
}

TEST_CASE("classify_system: unknown only for the exceptional pair") {
  auto v = classify(mat({{1, 1, -1, -1, 0}, {1, -1, 3, 0, -3}}));
  CHECK(v.status == Status::Unknown);
  CHECK(v.case_tag == "C");
  v = classify(mat({{2, -2, 3, 0, -3}, {1, 1, -1, -1, 0}}));
  CHECK(v.status == Status::Unknown);
}

TEST_CASE("classify_system: single equations and 2x4 systems") {
  auto v = classify(mat({{1, 2, 3, 4}}));
  check_uncommon(v);
  CHECK(v.case_tag == "equation");
  v = classify(mat({{1, -1, 2, -2}}));
  CHECK(v.status == Status::Common);
  v = classify(mat({{1, -2, 1, 0}, {0, 1, -2, 1}}));
  check_uncommon(v);
  CHECK(v.case_tag == "2x4");
}

TEST_CASE("classify_system: proven common 2x5 systems") {
  for (auto M : {mat({{1, 0, -1, 2, -2}, {0, 1, 2, -1, -2}}),
                 mat({{1, -1, 1, -1, 0}, {1, 2, -1, 0, -2}}),
                 mat({{1, 1, -1, -1, 0}, {2, -2, 1, 0, -1}}),
                 mat({{1, 2, 0, 0, 3}, {0, 0, 1, 2, 3}}),
                 mat({{1, -1, 2, -2, 0}, {1, 1, 0, 0, -2}})}) {
    auto v = classify(M);
    CHECK(v.status == Status::Common);
    CHECK_FALSE(v.certificate.has_value());
  }
}

TEST_CASE("classify_system: uncommon girth-4 cases carry verified templates") {
  auto v = classify(mat({{1, 3, -1, -3, 0}, {2, 3, -3, 0, -2}}));
  check_uncommon(v);
  CHECK(v.case_tag == "A");
  v = classify(mat({{1, -1, 1, -1, 0}, {-2, 4, 3, 0, -9}}));
  check_uncommon(v);
  CHECK(v.case_tag == "B");
  v = classify(mat({{1, 1, -1, -1, 0}, {1, -1, 4, 0, -4}}));
  check_uncommon(v);
  CHECK(v.case_tag == "C");
  v = classify(mat({{1, 1, -1, -1, 0}, {3, -3, 1, 0, -1}}));
  check_uncommon(v);
  CHECK(v.case_tag == "C");
  v = classify(mat({{1, -1, 3, -3, 0}, {1, 3, -1, 0, -3}}));
  check_uncommon(v);
  CHECK(v.case_tag == "D");
}

TEST_CASE("classify_system: girth <= 3 routes") {
  auto v = classify(mat({{1, 2, 0, 0, 0}, {0, 0, 1, 1, 1}}));
  check_uncommon(v);
  CHECK(v.case_tag == "E(girth3)");
  v = classify(mat({{1, -1, 2, -2, 0}, {1, 0, 3, 0, 5}}));
  check_uncommon(v);
  CHECK(v.case_tag == "E(girth3)");
  v = classify(mat({{1, 0, -1, 1, -1}, {0, 2, 2, 0, 3}}));
  check_uncommon(v);
  v = classify(mat({{1, 2, 0, 0, -3}, {0, 0, 1, 3, -4}}));
  check_uncommon(v);
}

TEST_CASE("uncommon certificates re-verify on the reduced system") {
  for (auto M : {mat({{1, 3, -1, -3, 0}, {2, 3, -3, 0, -2}}),
                 mat({{1, -1, 1, -1, 0}, {-2, 4, 3, 0, -9}}),
                 mat({{1, -1, 3, -3, 0}, {1, 3, -1, 0, -3}}),
                 mat({{1, 0, -1, 1, -1}, {0, 2, 2, 0, 3}})}) {
    auto L = irredundant_reduce(validate(M)).system;
    auto v = classify_system(L);
    REQUIRE(v.status == Status::Uncommon);
    REQUIRE(v.certificate.has_value());
    auto sr = sigma_critical_sum(L, v.certificate->g);
    CHECK(sr.total <= -1e-6);
  }
}

TEST_CASE("verdicts are invariant under column permutations and row mixes") {
  const std::vector<IntMat> bases = {
      mat({{1, 1, -1, -1, 0}, {1, -1, 3, 0, -3}}),   // unknown
      mat({{1, 1, -1, -1, 0}, {2, -2, 1, 0, -1}}),   // common
      mat({{1, 3, -1, -3, 0}, {2, 3, -3, 0, -2}}),   // uncommon, case A
      mat({{1, -1, 1, -1, 0}, {-2, 4, 3, 0, -9}}),   // uncommon, case B
      mat({{1, 2, 0, 0, 3}, {0, 0, 1, 2, 3}}),       // common, girth 3
  };
  std::mt19937_64 rng(12345);
  for (const auto& M : bases) {
    Status want = classify(M).status;
    for (int t = 0; t < 20; ++t) {
      auto v = classify(transformed(M, rng));
      CHECK(v.status == want);
    }
  }
}

TEST_CASE("classify_system is total on random 2x5 systems") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> d(-5, 5);
  int seen = 0;
  for (int t = 0; t < 120 || seen < 60; ++t) {
    REQUIRE(t < 2000);
    IntMat M(2, IntVec(5));
    for (auto& r : M)
      for (auto& x : r) x = d(rng);
    LinearSystem L0{};
    try {
      L0 = irredundant_reduce(validate(M)).system;
    } catch (const Error&) {
      continue;  // degenerate or rank-deficient draw
    }
    if (L0.m != 2 || L0.k != 5) continue;
    ++seen;
    auto v = classify_system(L0);
    if (v.status == Status::Uncommon) check_uncommon(v);
  }
}
