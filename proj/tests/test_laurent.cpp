#include <doctest.h>

#include <random>

#include "phimod/laurent.hpp"

using namespace phimod;

namespace {

LaurentPoly random_poly(const Context& ctx, std::mt19937_64& rng, i64 lo, i64 hi, int n) {
  std::vector<LaurentPoly::Term> t;
  for (int i = 0; i < n; ++i) t.push_back({lo + i64(rng() % u64(hi - lo + 1)), rng() % ctx.modulus});
  return LaurentPoly::from_terms(ctx, t);
}

}  // namespace

TEST_CASE("basic arithmetic examples") {
  Context c = Context::make(3, 1);
  LaurentPoly z = LaurentPoly::monomial(c, 1);
  CHECK((z - z).is_zero());
  LaurentPoly one_plus_z = LaurentPoly::constant(c, 1) + z;
  CHECK(one_plus_z.pow(3) == LaurentPoly::constant(c, 1) + LaurentPoly::monomial(c, 3));
  Context c2 = Context::make(3, 2, 2);
  LaurentPoly half = LaurentPoly::monomial(c2, 1);
  CHECK(half * half == LaurentPoly::monomial(c2, 2));
  CHECK_THROWS(z + half);
}

TEST_CASE("canonical storage drops zero residues") {
  Context c = Context::make(3, 2);
  auto a = LaurentPoly::from_terms(c, {{1, 4}, {1, 5}, {2, 9}, {0, 1}});
  CHECK(a.size() == 1);
  CHECK(a.coeff(0) == 1);
  CHECK(a.coeff(1) == 0);
}

TEST_CASE("frobenius sums") {
  Context c = Context::make(3, 1);
  CHECK(frobenius_sum(c, 0).is_zero());
  CHECK(frobenius_sum(c, 2) == LaurentPoly::from_terms(c, {{1, 1}, {3, 1}}));
  Context c2 = Context::make(3, 1, 2);
  CHECK(frobenius_sum(c2, 2) == LaurentPoly::from_terms(c2, {{2, 1}, {6, 1}}));
  CHECK(frobenius_sum_w(c2, 2) == LaurentPoly::from_terms(c2, {{1, 1}, {3, 1}}));
}

TEST_CASE("frobenius sum identity s^p = s + z^(p^a) - z mod p") {
  for (u64 p : {3, 5, 7}) {
    Context c = Context::make(p, 1);
    for (unsigned a = 0; a <= (p == 3 ? 6u : 5u); ++a) {
      LaurentPoly s = frobenius_sum(c, a);
      LaurentPoly lhs = s.pow(p) - s - LaurentPoly::monomial(c, i64(ipow(p, a))) + LaurentPoly::monomial(c, 1);
      CHECK(lhs.is_zero());
    }
  }
}

TEST_CASE("to_series examples") {
  Context c = Context::make(3, 1);
  auto s = to_series(LaurentPoly::from_terms(c, {{1, 1}, {3, 1}}), 3);
  CHECK(s.get(1) == 1);
  CHECK(s.get(0) == 0);
  CHECK(s.order == 3);
  CHECK(to_series(LaurentPoly(c), 5).is_zero());
  auto t = to_series(LaurentPoly::from_terms(c, {{-1, 1}, {0, 1}}), 2);
  CHECK(t.low == -1);
  CHECK(t.get(-1) == 1);
  CHECK(t.get(0) == 1);
}

TEST_CASE("ring laws on random inputs") {
  std::mt19937_64 rng(11);
  Context c = Context::make(5, 3);
  for (int it = 0; it < 200; ++it) {
    auto a = random_poly(c, rng, -5, 8, 5), b = random_poly(c, rng, -3, 6, 4), d = random_poly(c, rng, 0, 4, 3);
    CHECK(a * b == b * a);
    CHECK((a * b) * d == a * (b * d));
    CHECK(a * (b + d) == a * b + a * d);
    CHECK((a + b) - b == a);
    CHECK(a.pow(3) == a * a * a);
  }
}

TEST_CASE("freshman's dream: f(w)^p = f(w^p) mod p") {
  std::mt19937_64 rng(12);
  for (u64 p : {2, 3, 5, 7}) {
    Context c = Context::make(p, 1);
    for (int it = 0; it < 200; ++it) {
      auto a = random_poly(c, rng, -4, 9, 6);
      CHECK(a.pow(p) == a.substitute_power(i64(p)));
    }
  }
}

TEST_CASE("sparse and dense multiplication agree") {
  Context c = Context::make(3, 4);
  auto a = LaurentPoly::from_terms(c, {{0, 2}, {1000000, 5}, {-7, 1}});
  auto b = LaurentPoly::from_terms(c, {{3, 7}, {1000000, 1}});
  auto ab = a * b;
  CHECK(ab.coeff(2000000) == 5);
  CHECK(ab.coeff(-4) == 7);
  CHECK(ab.coeff(1000000 - 7) == 1);
}

TEST_CASE("truncated series products") {
  Context c = Context::make(3, 3);
  auto a = to_series(LaurentPoly::from_terms(c, {{-1, 1}, {0, 1}}), 10);
  auto b = to_series(LaurentPoly::from_terms(c, {{1, 2}, {2, 1}}), 10);
  auto ab = a * b;
  CHECK(ab.low == -1);
  CHECK(ab.order == 9);
  CHECK(ab.get(0) == 2);
  CHECK(ab.get(1) == 3);
  CHECK(ab.get(2) == 1);
}

TEST_CASE("json round trip") {
  Context c = Context::make(3, 3, 2);
  auto a = LaurentPoly::from_terms(c, {{-2, 5}, {4, 26}});
  auto j = to_json(a);
  CHECK(j.dump() == R"({"scaleD":2,"terms":[[-2,5],[4,26]]})");
  CHECK(laurent_from_json(c, j) == a);
  nlohmann::json neg = {{"scaleD", 2}, {"terms", {{1, -1}}}};
  CHECK(laurent_from_json(c, neg).coeff(1) == 26);
}
