#include "phimod/laurent.hpp"

#include <algorithm>
#include <sstream>

namespace phimod {

i64 add_exp(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("exponent overflow");
  return r;
}

i64 mul_exp(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("exponent overflow");
  return r;
}

LaurentPoly LaurentPoly::constant(const Context& ctx, i64 c) { return monomial(ctx, 0, ctx.reduce(c)); }

LaurentPoly LaurentPoly::monomial(const Context& ctx, i64 e, u64 c) {
  LaurentPoly r(ctx);
  c %= ctx.modulus;
  if (c) r.terms_.push_back({e, c});
  return r;
}

LaurentPoly LaurentPoly::from_terms(const Context& ctx, std::vector<Term> t) {
  std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  LaurentPoly r(ctx);
  for (auto& [e, c] : t) {
    c %= ctx.modulus;
    if (!r.terms_.empty() && r.terms_.back().first == e) {
      r.terms_.back().second = ctx.add(r.terms_.back().second, c);
    } else {
      if (!r.terms_.empty() && r.terms_.back().second == 0) r.terms_.pop_back();
      r.terms_.push_back({e, c});
    }
  }
  if (!r.terms_.empty() && r.terms_.back().second == 0) r.terms_.pop_back();
  return r;
}

void LaurentPoly::check(const LaurentPoly& o) const {
  if (ctx_ != o.ctx_) throw Error("Laurent polynomials from different contexts");
}

u64 LaurentPoly::coeff(i64 e) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                             [](const Term& t, i64 x) { return t.first < x; });
  return (it != terms_.end() && it->first == e) ? it->second : 0;
}

i64 LaurentPoly::min_exp() const {
  if (terms_.empty()) throw Error("min_exp of zero polynomial");
  return terms_.front().first;
}

i64 LaurentPoly::max_exp() const {
  if (terms_.empty()) throw Error("max_exp of zero polynomial");
  return terms_.back().first;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly r(ctx_);
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.second = ctx_.neg(t.second);
  return r;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return o;
  check(o);
  LaurentPoly r(ctx_);
  r.terms_.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
      r.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      u64 c = ctx_.add(terms_[i].second, o.terms_[j].second);
      if (c) r.terms_.push_back({terms_[i].first, c});
      ++i;
      ++j;
    }
  }
  return r;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const { return *this + (-o); }

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  if (terms_.empty() || o.terms_.empty()) return LaurentPoly(terms_.empty() ? ctx_ : o.ctx_);
  check(o);
  i64 lo = add_exp(min_exp(), o.min_exp());
  i64 hi = add_exp(max_exp(), o.max_exp());
  std::size_t work = terms_.size() * o.terms_.size();
  LaurentPoly r(ctx_);
  if (u128(hi - lo) <= 4 * u128(work) + 64) {
    std::vector<u64> acc(std::size_t(hi - lo + 1), 0);
    for (auto& [ea, ca] : terms_)
      for (auto& [eb, cb] : o.terms_) {
        auto& x = acc[std::size_t(ea + eb - lo)];
        x = ctx_.add(x, ctx_.mul(ca, cb));
      }
    for (std::size_t k = 0; k < acc.size(); ++k)
      if (acc[k]) r.terms_.push_back({lo + i64(k), acc[k]});
    return r;
  }
  std::vector<Term> t;
  t.reserve(work);
  for (auto& [ea, ca] : terms_)
    for (auto& [eb, cb] : o.terms_) t.push_back({ea + eb, ctx_.mul(ca, cb)});
  return from_terms(ctx_, std::move(t));
}

LaurentPoly LaurentPoly::scale(u64 c) const {
  c %= ctx_.modulus;
  LaurentPoly r(ctx_);
  if (!c) return r;
  for (auto& [e, x] : terms_) {
    u64 y = ctx_.mul(x, c);
    if (y) r.terms_.push_back({e, y});
  }
  return r;
}

LaurentPoly LaurentPoly::shift(i64 k) const {
  LaurentPoly r = *this;
  for (auto& t : r.terms_) t.first = add_exp(t.first, k);
  return r;
}

LaurentPoly LaurentPoly::pow(u64 n) const {
  LaurentPoly r = constant(ctx_, 1), b = *this;
  while (n) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

LaurentPoly LaurentPoly::substitute_power(i64 k) const {
  if (k < 1) throw Error("substitution exponent must be positive");
  LaurentPoly r = *this;
  for (auto& t : r.terms_) t.first = mul_exp(t.first, k);
  return r;
}

LaurentPoly LaurentPoly::recast(const Context& c) const {
  std::vector<Term> t(terms_.begin(), terms_.end());
  return from_terms(c, std::move(t));
}

std::string LaurentPoly::str(const std::string& var) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    auto [e, c] = *it;
    if (!first) os << "+";
    first = false;
    if (e == 0) {
      os << c;
      continue;
    }
    if (c != 1) os << c << " ";
    os << var;
    if (e != 1) os << "^" << (e < 0 ? "(" + std::to_string(e) + ")" : std::to_string(e));
  }
  return os.str();
}

LaurentPoly frobenius_sum(const Context& ctx, unsigned alpha) {
  std::vector<LaurentPoly::Term> t;
  u64 qk = 1;
  for (unsigned k = 0; k < alpha; ++k) {
    t.push_back({mul_exp(ctx.scaleD, i64(qk)), 1});
    if (k + 1 < alpha && __builtin_mul_overflow(qk, ctx.q, &qk)) throw Error("exponent overflow");
  }
  return LaurentPoly::from_terms(ctx, std::move(t));
}

LaurentPoly frobenius_sum_w(const Context& ctx, unsigned alpha) {
  std::vector<LaurentPoly::Term> t;
  u64 qk = 1;
  for (unsigned k = 0; k < alpha; ++k) {
    t.push_back({i64(qk), 1});
    if (k + 1 < alpha && __builtin_mul_overflow(qk, ctx.q, &qk)) throw Error("exponent overflow");
  }
  return LaurentPoly::from_terms(ctx, std::move(t));
}

bool TruncSeries::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](u64 x) { return x == 0; });
}

i64 TruncSeries::valuation() const {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) return low + i64(i);
  return order;
}

TruncSeries TruncSeries::truncate(i64 T) const {
  TruncSeries r(ctx, low, std::min(order, T));
  for (i64 e = r.low; e < r.order; ++e) r.set(e, get(e));
  return r;
}

TruncSeries TruncSeries::operator+(const TruncSeries& o) const {
  TruncSeries r(ctx, std::min(low, o.low), std::min(order, o.order));
  for (i64 e = r.low; e < r.order; ++e) r.set(e, ctx.add(get(e), o.get(e)));
  return r;
}

TruncSeries TruncSeries::operator-(const TruncSeries& o) const {
  TruncSeries r(ctx, std::min(low, o.low), std::min(order, o.order));
  for (i64 e = r.low; e < r.order; ++e) r.set(e, ctx.sub(get(e), o.get(e)));
  return r;
}

TruncSeries TruncSeries::operator*(const TruncSeries& o) const {
  TruncSeries r(ctx, low + o.low, std::min(order + o.low, o.order + low));
  std::vector<u128> acc(r.c.size(), 0);
  const u128 cap = ~u128(0) >> 2;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c[i]) continue;
    i64 ei = low + i64(i);
    for (std::size_t j = 0; j < o.c.size(); ++j) {
      i64 e = ei + o.low + i64(j);
      if (e >= r.order) break;
      if (!o.c[j]) continue;
      auto& x = acc[std::size_t(e - r.low)];
      x += (u128)c[i] * o.c[j];
      if (x > cap) x %= ctx.modulus;
    }
  }
  for (std::size_t k = 0; k < acc.size(); ++k) r.c[k] = u64(acc[k] % ctx.modulus);
  return r;
}

TruncSeries TruncSeries::mul_laurent(const LaurentPoly& a) const {
  if (a.is_zero()) return TruncSeries(ctx, low, order);
  TruncSeries r(ctx, low + a.min_exp(), order + a.min_exp());
  for (auto& [e, x] : a.terms())
    for (std::size_t i = 0; i < c.size(); ++i) {
      i64 ee = low + i64(i) + e;
      if (ee >= r.order) break;
      if (c[i]) r.addto(ee, ctx.mul(c[i], x));
    }
  return r;
}

bool series_equal(const TruncSeries& a, const TruncSeries& b, i64 upto) {
  i64 T = std::min(a.order, b.order);
  if (upto >= 0) T = std::min(T, upto);
  for (i64 e = std::min(a.low, b.low); e < T; ++e)
    if (a.get(e) != b.get(e)) return false;
  return true;
}

TruncSeries to_series(const LaurentPoly& a, i64 T) {
  i64 lo = 0;
  if (!a.is_zero()) lo = std::min<i64>(0, a.min_exp());
  TruncSeries r(a.ctx(), lo, T);
  for (auto& [e, c] : a.terms())
    if (e < T) r.set(e, c);
  return r;
}

nlohmann::json to_json(const LaurentPoly& a) {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [e, c] : a.terms()) terms.push_back({e, c});
  return {{"scaleD", a.ctx().scaleD}, {"terms", terms}};
}

LaurentPoly laurent_from_json(const Context& ctx, const nlohmann::json& j) {
  if (j.contains("scaleD") && j["scaleD"].get<i64>() != ctx.scaleD)
    throw Error("Laurent polynomial scaleD does not match the context");
  std::vector<LaurentPoly::Term> t;
  for (auto& term : j.at("terms")) {
    i64 e = term.at(0).get<i64>();
    const auto& cj = term.at(1);
    u64 c = cj.is_number_unsigned() ? ctx.reduce(Int(std::to_string(cj.get<u64>())))
                                    : ctx.reduce(cj.get<i64>());
    t.push_back({e, c});
  }
  return LaurentPoly::from_terms(ctx, std::move(t));
}

}  // namespace phimod
