#include <doctest.h>

#include <algorithm>
#include <random>

#include "phimod/modarith.hpp"

using namespace phimod;

namespace {

unsigned factorial_valuation(u64 d, u64 p) {
  Int f;
  mpz_fac_ui(f.get_mpz_t(), d);
  return vp(f, p);
}

}  // namespace

TEST_CASE("vp examples") {
  CHECK(vp(Int("297398301914493"), 3) == 28);
  CHECK(vp(Int(7), 3) == 0);
  CHECK(vp(Int(54), 3) == 3);
  CHECK(vp(i64(-54), 3) == 3);
  CHECK_THROWS_WITH(vp(Int(0), 3), "valuation of zero undefined");
  // the number in question is 3^28 + 3^29 + 3^30
  CHECK(Int("297398301914493") == ipow_big(3, 28) + ipow_big(3, 29) + ipow_big(3, 30));
}

TEST_CASE("vp_factorial and digit_sum examples") {
  CHECK(vp_factorial(6, 3) == 2);
  CHECK(vp_factorial(0, 5) == 0);
  CHECK(vp_factorial(9, 3) == 4);
  CHECK(factorial_valuation(6, 3) == 2);
  CHECK(factorial_valuation(9, 3) == 4);
  CHECK(digit_sum(8, 3) == 4);
  CHECK(digit_sum(0, 7) == 0);
  for (u64 p : {2, 3, 5, 7})
    for (unsigned k = 0; k < 10; ++k) CHECK(digit_sum(ipow(p, k), p) == 1);
}

TEST_CASE("multinomial examples") {
  CHECK(multinomial(5, {2, 1, 1, 1}) == 60);
  CHECK(multinomial_mod(5, {2, 1, 1, 1}, 27) == 6);
  CHECK(multinomial_mod(5, {5}, Int(1000000000)) == 1);
  CHECK(multinomial_mod(5, {1, 1, 1, 1, 1}, Int(1000000000)) == 120);
  CHECK_THROWS(multinomial_mod(5, {2, 2}, 27));
}

TEST_CASE("Legendre formula against direct factorials") {
  for (u64 p : {2, 3, 5, 7}) {
    Int f = 1, tmp;
    Int pz = Int(std::to_string(p));
    for (u64 d = 0; d <= 5000; ++d) {
      if (d > 0) f *= Int(std::to_string(d));
      unsigned direct = unsigned(mpz_remove(tmp.get_mpz_t(), f.get_mpz_t(), pz.get_mpz_t()));
      u64 sum = 0;
      for (u64 pl = p; pl <= d; pl *= p) sum += d / pl;
      REQUIRE(vp_factorial(d, p) == direct);
      REQUIRE(sum == direct);
    }
  }
}

TEST_CASE("multinomial is symmetric in its parts") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    std::vector<unsigned> parts;
    unsigned K = 0;
    int r = 1 + int(rng() % 5);
    for (int i = 0; i < r; ++i) {
      parts.push_back(1 + unsigned(rng() % 6));
      K += parts.back();
    }
    Int m = 3 * 3 * 3 * 3 * 5;
    Int base = multinomial_mod(K, parts, m);
    std::shuffle(parts.begin(), parts.end(), rng);
    CHECK(multinomial_mod(K, parts, m) == base);
  }
}

TEST_CASE("digit sum is congruent to d modulo p-1") {
  for (u64 p : {3, 5, 7, 11})
    for (u64 d = 0; d < 3000; ++d) REQUIRE(digit_sum(d, p) % (p - 1) == d % (p - 1));
}

TEST_CASE("context validation and modular helpers") {
  CHECK_THROWS(Context::make(4, 1));
  CHECK_THROWS(Context::make(3, 0));
  CHECK_THROWS(Context::make(3, 60));
  Context c = Context::make(3, 3);
  CHECK(c.modulus == 27);
  CHECK(c.reduce(i64(-1)) == 26);
  CHECK(c.mul(c.inv(2), 2) == 1);
  CHECK_THROWS(c.inv(6));
  CHECK(c.symmetric(26) == -1);
  CHECK(is_prime(2));
  CHECK(is_prime(1000000007));
  CHECK(!is_prime(561));
  CHECK(is_prime(18446744073709551557ull));
  CHECK(max_gamma(3) == 39);
}
