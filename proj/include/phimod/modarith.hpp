#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace phimod {

using Int = mpz_class;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Moduli are kept below 2^62 so residues fit a machine word and products fit
// in 128 bits.
constexpr u64 kModulusLimit = u64(1) << 62;

bool is_prime(u64 n);

// Ambient ring data. Exponents of every series live in w = z^(1/scaleD).
// stepH selects the base q = p^stepH of the Phi-series sum w^(q^n); the
// coefficient ring is always Z/p^gamma.
struct Context {
  u64 p = 3;
  unsigned gamma = 1;
  i64 scaleD = 1;
  unsigned stepH = 1;
  u64 q = 3;
  u64 modulus = 3;

  static Context make(u64 p, unsigned gamma, i64 scaleD = 1, unsigned stepH = 1);
  Context with_gamma(unsigned g) const { return make(p, g, scaleD, stepH); }

  u64 reduce(i64 v) const;
  u64 reduce(const Int& v) const;
  u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= modulus ? s - modulus : s; }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + modulus - b; }
  u64 neg(u64 a) const { return a ? modulus - a : 0; }
  u64 mul(u64 a, u64 b) const { return u64((u128)a * b % modulus); }
  u64 pow(u64 a, u64 e) const;
  // Inverse of a unit modulo p^gamma; throws if a is divisible by p.
  u64 inv(u64 a) const;
  // Representative in (-m/2, m/2].
  i64 symmetric(u64 a) const { return a > modulus / 2 ? -i64(modulus - a) : i64(a); }

  bool operator==(const Context& o) const {
    return p == o.p && gamma == o.gamma && scaleD == o.scaleD && stepH == o.stepH;
  }
  bool operator!=(const Context& o) const { return !(*this == o); }
};

u64 ipow(u64 b, unsigned e);  // throws on overflow
Int ipow_big(u64 b, unsigned long e);

unsigned vp(const Int& n, u64 p);
unsigned vp(i64 n, u64 p);
unsigned vp_u(u64 n, u64 p);
u64 digit_sum(u64 d, u64 p);
u64 vp_factorial(u64 d, u64 p);
Int multinomial(unsigned K, const std::vector<unsigned>& parts);
Int multinomial_mod(unsigned K, const std::vector<unsigned>& parts, const Int& modulus);
Int binomial(i64 n, i64 k);  // 0 outside 0 <= k <= n

// Largest gamma with p^gamma below the modulus limit; used for "raw" queries.
unsigned max_gamma(u64 p);

}  // namespace phimod
