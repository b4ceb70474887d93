#include "phimod/modarith.hpp"

#include <numeric>

namespace phimod {

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return u64((u128)a * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 s : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % s == 0) return n == s;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) { d >>= 1; ++r; }
  // These bases are deterministic for all 64-bit n.
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) { comp = false; break; }
    }
    if (comp) return false;
  }
  return true;
}

u64 ipow(u64 b, unsigned e) {
  u64 r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(r, b, &r)) throw Error("integer power overflows 64 bits");
  }
  return r;
}

Int ipow_big(u64 b, unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

Context Context::make(u64 p, unsigned gamma, i64 scaleD, unsigned stepH) {
  if (!is_prime(p)) throw Error("p = " + std::to_string(p) + " is not prime");
  if (gamma < 1) throw Error("gamma must be at least 1");
  if (scaleD < 1) throw Error("scaleD must be at least 1");
  if (stepH < 1) throw Error("stepH must be at least 1");
  Context c;
  c.p = p;
  c.gamma = gamma;
  c.scaleD = scaleD;
  c.stepH = stepH;
  c.q = ipow(p, stepH);
  u64 m = 1;
  for (unsigned i = 0; i < gamma; ++i) {
    if (__builtin_mul_overflow(m, p, &m) || m >= kModulusLimit)
      throw Error("modulus p^gamma exceeds 62 bits");
  }
  c.modulus = m;
  return c;
}

u64 Context::reduce(i64 v) const {
  i64 r = v % i64(modulus);
  return r < 0 ? u64(r + i64(modulus)) : u64(r);
}

u64 Context::reduce(const Int& v) const {
  Int r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), modulus);
  return r.get_ui();
}

u64 Context::pow(u64 a, u64 e) const { return powmod(a, e, modulus); }

u64 Context::inv(u64 a) const {
  if (a % p == 0) throw Error("value is not a unit modulo p^gamma");
  i128 t = 0, nt = 1, r = modulus, nr = a % modulus;
  while (nr) {
    i128 qq = r / nr;
    i128 tmp = t - qq * nt; t = nt; nt = tmp;
    tmp = r - qq * nr; r = nr; nr = tmp;
  }
  if (t < 0) t += modulus;
  return u64(t);
}

unsigned vp(const Int& n, u64 p) {
  if (n == 0) throw Error("valuation of zero undefined");
  Int m = abs(n);
  unsigned e = 0;
  while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
    mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
    ++e;
  }
  return e;
}

unsigned vp(i64 n, u64 p) {
  if (n == 0) throw Error("valuation of zero undefined");
  u64 m = n < 0 ? u64(-(n + 1)) + 1 : u64(n);
  return vp_u(m, p);
}

unsigned vp_u(u64 m, u64 p) {
  if (m == 0) throw Error("valuation of zero undefined");
  unsigned e = 0;
  while (m % p == 0) { m /= p; ++e; }
  return e;
}

u64 digit_sum(u64 d, u64 p) {
  u64 s = 0;
  while (d) { s += d % p; d /= p; }
  return s;
}

u64 vp_factorial(u64 d, u64 p) { return (d - digit_sum(d, p)) / (p - 1); }

Int multinomial(unsigned K, const std::vector<unsigned>& parts) {
  unsigned long sum = std::accumulate(parts.begin(), parts.end(), 0ul);
  if (sum != K) throw Error("parts do not sum to K");
  Int r = 1, b;
  unsigned long rem = K;
  for (unsigned part : parts) {
    mpz_bin_uiui(b.get_mpz_t(), rem, part);
    r *= b;
    rem -= part;
  }
  return r;
}

Int multinomial_mod(unsigned K, const std::vector<unsigned>& parts, const Int& modulus) {
  Int r = multinomial(K, parts);
  return r % modulus;
}

Int binomial(i64 n, i64 k) {
  if (n < 0 || k < 0 || k > n) return 0;
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), u64(n), u64(k));
  return r;
}

unsigned max_gamma(u64 p) {
  unsigned g = 0;
  u64 m = 1;
  while (!__builtin_mul_overflow(m, p, &m) && m < kModulusLimit) ++g;
  return g;
}

}  // namespace phimod
