#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phimod/modarith.hpp"

namespace phimod {

// Sparse Laurent polynomial in w over Z/p^gamma. Terms are sorted by exponent
// and never hold a zero residue, so structural equality is semantic equality.
class LaurentPoly {
 public:
  using Term = std::pair<i64, u64>;

  LaurentPoly() = default;
  explicit LaurentPoly(const Context& ctx) : ctx_(ctx) {}
  static LaurentPoly constant(const Context& ctx, i64 c);
  static LaurentPoly monomial(const Context& ctx, i64 e, u64 c = 1);
  // Takes unsorted terms with possible duplicates and zeros.
  static LaurentPoly from_terms(const Context& ctx, std::vector<Term> terms);

  const Context& ctx() const { return ctx_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  u64 coeff(i64 e) const;
  i64 min_exp() const;  // requires nonzero
  i64 max_exp() const;

  LaurentPoly operator-() const;
  LaurentPoly operator+(const LaurentPoly& o) const;
  LaurentPoly operator-(const LaurentPoly& o) const;
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly& operator+=(const LaurentPoly& o) { return *this = *this + o; }
  LaurentPoly& operator-=(const LaurentPoly& o) { return *this = *this - o; }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }
  LaurentPoly scale(u64 c) const;
  LaurentPoly shift(i64 k) const;
  LaurentPoly pow(u64 n) const;
  // Replaces w by w^k.
  LaurentPoly substitute_power(i64 k) const;
  // Reinterprets coefficients in another context (reducing or lifting the
  // representatives in [0, m)).
  LaurentPoly recast(const Context& c) const;

  bool operator==(const LaurentPoly& o) const { return terms_ == o.terms_; }
  bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

  // e.g. "3 w^2+15 w"; var is the printed variable name.
  std::string str(const std::string& var = "w") const;

 private:
  Context ctx_;
  std::vector<Term> terms_;
  void check(const LaurentPoly& o) const;
};

inline LaurentPoly operator*(u64 c, const LaurentPoly& a) { return a.scale(c); }

i64 add_exp(i64 a, i64 b);
i64 mul_exp(i64 a, i64 b);

// Sum_{k<alpha} w^(scaleD q^k): s_alpha(z) written in w-units.
LaurentPoly frobenius_sum(const Context& ctx, unsigned alpha);
// Sum_{k<alpha} w^(q^k): s_alpha evaluated at w itself.
LaurentPoly frobenius_sum_w(const Context& ctx, unsigned alpha);

// Truncated series: coefficients of w^e for low <= e < order.
struct TruncSeries {
  Context ctx;
  i64 low = 0;
  i64 order = 0;
  std::vector<u64> c;

  TruncSeries() = default;
  TruncSeries(const Context& x, i64 lo, i64 ord)
      : ctx(x), low(lo), order(ord), c(ord > lo ? std::size_t(ord - lo) : 0, 0) {}
  u64 get(i64 e) const { return (e < low || e >= order) ? 0 : c[std::size_t(e - low)]; }
  void set(i64 e, u64 v) { c[std::size_t(e - low)] = v; }
  void addto(i64 e, u64 v) { auto& x = c[std::size_t(e - low)]; x = ctx.add(x, v); }
  bool is_zero() const;
  // Lowest exponent with nonzero coefficient, or order if none.
  i64 valuation() const;
  TruncSeries truncate(i64 T) const;
  TruncSeries operator+(const TruncSeries& o) const;
  TruncSeries operator-(const TruncSeries& o) const;
  TruncSeries operator*(const TruncSeries& o) const;
  TruncSeries mul_laurent(const LaurentPoly& a) const;
};

// Equal up to the smaller of the two orders (and the given bound if >= 0).
bool series_equal(const TruncSeries& a, const TruncSeries& b, i64 upto = -1);

TruncSeries to_series(const LaurentPoly& a, i64 T);

nlohmann::json to_json(const LaurentPoly& a);
LaurentPoly laurent_from_json(const Context& ctx, const nlohmann::json& j);

}  // namespace phimod
