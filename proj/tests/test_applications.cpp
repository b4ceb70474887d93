#include <doctest.h>

#include "phimod/applications.hpp"

using namespace phimod;

namespace {

std::vector<Int> ints(std::initializer_list<long> v) {
  std::vector<Int> r;
  for (long x : v) r.push_back(Int(x));
  return r;
}

std::vector<Int> head(const std::vector<Int>& v, std::size_t n) { return {v.begin(), v.begin() + long(n)}; }

// z-unit coefficients of the exact solution
std::vector<Int> z_series(const FunctionalEquation& eq, u64 N) {
  auto w = series_solution_exact(eq, i64(N + 1) * eq.scaleD);
  std::vector<Int> r;
  for (u64 n = 0; n <= N; ++n) r.push_back(w[n * u64(eq.scaleD)]);
  return r;
}

}  // namespace

TEST_CASE("oracle values") {
  CHECK(oracle_terms("kreweras", 3) == ints({1, 2, 16, 192}));
  CHECK(head(oracle_terms("fusscatalan_T", 3, {3, 1, 0}), 4) == ints({0, 1, 3, 12}));
  CHECK(oracle_terms("noncrossing", 4) == ints({0, 1, 1, 4, 23}));
  CHECK(blossom_number(0, 3) == 2);
  CHECK(blossom_number(1, 3) == 1);
  CHECK(blossom_number(2, 3) == 2);
  CHECK(head(oracle_terms("gessel_f1", 3), 4) == ints({1, 6, 48, 420}));
  CHECK(head(oracle_terms("gessel_f5", 3), 4) == ints({1, 4, 30, 256}));
  CHECK(head(oracle_terms("gessel_f2", 3), 4) == ints({0, 1, -9, 82}));
  CHECK_THROWS(fuss_catalan(0, 3));
}

TEST_CASE("N_n: series recursion and binomial sum agree") {
  auto rec = oracle_terms("noncrossing", 500);
  for (u64 n = 0; n <= 500; ++n) REQUIRE(rec[n] == noncrossing_sum(n));
}

TEST_CASE("builtin equations are solved by their oracles") {
  struct Case {
    std::string name;
    BuiltinParams bp;
  };
  std::vector<Case> cases = {{"noncrossing", {}}, {"kreweras", {}},          {"fusscatalan", {3, 1, 0}},
                             {"fusscatalan", {2, 2, 0}}, {"fusscatalan", {5, 1, 0}}, {"blossom", {3, 1, 0}},
                             {"blossom", {5, 1, 0}},     {"blossom", {5, 1, 7}},     {"gessel_f1", {}},
                             {"gessel_f2", {}},          {"gessel_f3", {}},          {"gessel_f4", {}},
                             {"gessel_f5", {}}};
  for (auto& c : cases) {
    CAPTURE(c.name);
    Builtin b = builtin(c.name, c.bp);
    const u64 N = 60;
    CHECK(z_series(b.eq, N) == oracle_terms(b.oracle, N, c.bp));
  }
  CHECK(builtin("blossom", {3, 1, 0}).eq.initial == ints({2}));
}

TEST_CASE("builtin rejections") {
  CHECK_THROWS_WITH(builtin("blossom", {3, 1, 4}), doctest::Contains("odd"));
  CHECK_THROWS_WITH(builtin("blossom", {3, 1, 7}), doctest::Contains("1 mod p"));
  CHECK_THROWS_WITH(builtin("kreweras", {5, 1, 0}), doctest::Contains("p=3"));
  CHECK_THROWS_WITH(builtin("nope"), doctest::Contains("unknown builtin"));
}

TEST_CASE("blossom polynomial coefficients are integral and match the reduction mod p") {
  BivarPoly P = blossom_polynomial(3);
  // z^2 B^3 + c_0 z + c_1 z B + c_2 z B^2 + B - 2
  CHECK(P.coeff(2, 3) == 1);
  CHECK(P.coeff(0, 1) == 1);
  CHECK(P.coeff(0, 0) == -2);
  for (u64 p : {3, 5, 7}) {
    // mod p: z^2 B^p - 2^((p+1)/2) z B^((p+1)/2) + B - 2^-1
    BivarPoly Q = blossom_polynomial(p);
    Context c = Context::make(p, 1);
    CHECK(c.reduce(Q.coeff(0, 1)) == 1);
    CHECK(c.reduce(Q.coeff(0, 0)) == c.neg(c.inv(2)));
    CHECK(c.reduce(Q.coeff(1, (p + 1) / 2)) == c.neg(c.pow(2, (p + 1) / 2)));
    for (u64 s = 0; s <= (p + 1) / 2; ++s)
      if (s != (p + 1) / 2) CHECK(c.reduce(Q.coeff(1, s)) == 0);
  }
}

TEST_CASE("verify_appendix") {
  CHECK(verify_appendix(3, 60).ok());
  CHECK(verify_appendix(5, 40).ok());
  CHECK(verify_appendix(7, 25).ok());
  CHECK_THROWS(verify_appendix(4, 10));
}

TEST_CASE("bases verify and the Gessel bases hold for alpha 0..2") {
  for (auto name : {"noncrossing", "kreweras", "gessel_f1", "gessel_f2", "gessel_f3", "gessel_f4", "gessel_f5"}) {
    Builtin b = builtin(name);
    for (unsigned a = 0; a <= 2; ++a) {
      CAPTURE(name);
      CAPTURE(a);
      CHECK(verify_base(b.eq, b.base(a)));
    }
  }
  for (u64 p : {3, 5, 7}) {
    Builtin f = builtin("fusscatalan", {p, 1, 0});
    Builtin bl = builtin("blossom", {p, 1, 0});
    for (unsigned a = 0; a <= 1; ++a) {
      CHECK(verify_base(f.eq, f.base(a)));
      CHECK(verify_base(bl.eq, bl.base(a)));
    }
  }
  CHECK(verify_base(builtin("fusscatalan", {3, 2, 0}).eq, builtin("fusscatalan", {3, 2, 0}).base(1)));
  // a wrong base is rejected
  Builtin n = builtin("noncrossing");
  Builtin k = builtin("gessel_f2");
  CHECK_FALSE(verify_base(n.eq, k.base(0).recast(n.eq.context(1))));
}

TEST_CASE("displayed solutions against oracles") {
  CHECK(verify_against_oracle(noncrossing_mod27(), make_oracle("noncrossing"), 300, 27).ok);
  CHECK(verify_against_oracle(noncrossing_mod27(), make_oracle("noncrossing"), 300, 27, 0, Route::Extract).ok);
  CHECK(verify_against_oracle(kreweras_mod27(), make_oracle("kreweras"), 300, 27).ok);
  for (u64 p : {3, 5, 7}) {
    CHECK(verify_against_oracle(fusscatalan_mod_p2(p), make_oracle("fusscatalan_T", {p, 1, 0}), 200, p * p, 1).ok);
    CHECK(verify_against_oracle(blossom_mod_p2(p), make_oracle("blossom", {p, 1, 0}), 200, p * p).ok);
  }
  // negative control
  PhiPoly bad = noncrossing_mod27() + PhiPoly::constant(noncrossing_mod27().ctx(), 1,
                                                         LaurentPoly::monomial(noncrossing_mod27().ctx(), 17, 1));
  OracleCheck r = verify_against_oracle(bad, make_oracle("noncrossing"), 100, 27);
  CHECK_FALSE(r.ok);
  REQUIRE(r.mismatch);
  CHECK(*r.mismatch == 17);
  CHECK(r.to_json()["mismatch"]["n"] == 17);
}

TEST_CASE("classification tables") {
  ResidueTable t = classify(noncrossing_mod27(), 243, 3, 4, Route::Extract);
  ResidueTable t1 = classify(noncrossing_mod27(), 243, 3, 1, Route::Extract);
  CHECK(t.residue == t1.residue);  // independent of the schedule
  CHECK(classify(noncrossing_mod27(), 243, 3, 1, Route::Series).residue == t.residue);
  std::vector<Int> want1, want2;
  for (u64 n = 1; n <= 243; ++n) {
    bool one = false, two = false;
    for (u64 a = 1; a <= n; a *= 3) {
      if (a == n || 2 * a == n) one = true;
      for (u64 b = 1; b < a; b *= 3)
        if (a + b == n) two = true;
    }
    if (one) want1.push_back(Int(std::to_string(n)));
    if (two) want2.push_back(Int(std::to_string(n)));
  }
  CHECK(t.select(1) == want1);
  CHECK(t.select(2) == want2);
  CHECK(t.to_csv().rfind("n,residue\n0,0\n1,1\n", 0) == 0);
  CHECK(t.to_json()["rows"][3][1] == 1);
  ResidueTable o = classify(oracle_terms("noncrossing", 243), 3);
  CHECK(o.residue == t.residue);
  // arbitrary-size indices
  ResidueTable big = classify(noncrossing_mod27(), {Int("1853020188851841"), Int("3706040377703682")}, 27);
  CHECK(big.residue == std::vector<u64>{13, 1});  // 3^32 and 2*3^32
  CHECK_THROWS(classify(noncrossing_mod27(), 5, 5));
}
