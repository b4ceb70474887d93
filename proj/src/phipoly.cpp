#include "phimod/phipoly.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace phimod {

PhiPoly::PhiPoly(const Context& ctx, unsigned alpha, std::vector<LaurentPoly> coeffs)
    : ctx_(ctx), alpha_(alpha), coeffs_(std::move(coeffs)) {
  for (auto& a : coeffs_)
    if (!a.is_zero() && a.ctx() != ctx_) throw Error("PhiPoly coefficient has a different context");
  for (auto& a : coeffs_)
    if (a.is_zero()) a = LaurentPoly(ctx_);
  trim();
}

PhiPoly PhiPoly::constant(const Context& ctx, unsigned alpha, const LaurentPoly& a) {
  return PhiPoly(ctx, alpha, {a});
}

PhiPoly PhiPoly::phi(const Context& ctx, unsigned alpha) {
  return PhiPoly(ctx, alpha, {LaurentPoly(ctx), LaurentPoly::constant(ctx, 1)});
}

void PhiPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

void PhiPoly::check(const PhiPoly& o) const {
  if (ctx_ != o.ctx_) throw Error("PhiPolys from different contexts");
  if (alpha_ != o.alpha_) throw Error("PhiPolys with different alpha");
}

u64 PhiPoly::degree_bound() const { return ipow(ctx_.q, alpha_ + 1) - 1; }

PhiPoly PhiPoly::operator+(const PhiPoly& o) const {
  check(o);
  PhiPoly r = *this;
  if (r.coeffs_.size() < o.coeffs_.size()) r.coeffs_.resize(o.coeffs_.size(), LaurentPoly(ctx_));
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) r.coeffs_[i] += o.coeffs_[i];
  r.trim();
  return r;
}

PhiPoly PhiPoly::operator-() const {
  PhiPoly r = *this;
  for (auto& a : r.coeffs_) a = -a;
  return r;
}

PhiPoly PhiPoly::operator-(const PhiPoly& o) const { return *this + (-o); }

PhiPoly PhiPoly::operator*(const PhiPoly& o) const {
  check(o);
  PhiPoly r(ctx_, alpha_);
  if (is_zero() || o.is_zero()) return r;
  r.coeffs_.assign(coeffs_.size() + o.coeffs_.size() - 1, LaurentPoly(ctx_));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i].is_zero()) continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
      if (!o.coeffs_[j].is_zero()) r.coeffs_[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  r.trim();
  return r;
}

PhiPoly PhiPoly::scale(const LaurentPoly& a) const {
  PhiPoly r = *this;
  for (auto& c : r.coeffs_) c = c * a;
  r.trim();
  return r;
}

PhiPoly PhiPoly::pow(u64 n) const {
  PhiPoly r = constant(ctx_, alpha_, LaurentPoly::constant(ctx_, 1)), b = *this;
  while (n) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

PhiPoly PhiPoly::recast(const Context& c) const {
  PhiPoly r(c, alpha_);
  for (auto& a : coeffs_) r.coeffs_.push_back(a.recast(c));
  r.trim();
  return r;
}

PhiPoly PhiPoly::with_alpha(unsigned a) const {
  PhiPoly r = *this;
  r.alpha_ = a;
  return r;
}

std::string PhiPoly::str() const {
  const std::string var = ctx_.scaleD == 1 ? "z" : "w";
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const LaurentPoly& a = coeffs_[i];
    if (a.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    std::string phi = i == 0 ? "" : (i == 1 ? "Φ(" + var + ")" : "Φ^" + std::to_string(i) + "(" + var + ")");
    bool mono = a.size() == 1;
    if (i == 0) {
      os << a.str(var);
    } else if (mono && a.terms()[0].first == 0 && a.terms()[0].second == 1) {
      os << phi;
    } else {
      os << (mono ? a.str(var) : "(" + a.str(var) + ")") << " " << phi;
    }
  }
  return os.str();
}

const std::vector<LaurentPoly>& relation_poly(const Context& ctx, unsigned alpha) {
  static std::mutex mu;
  static std::map<std::tuple<u64, unsigned, i64, unsigned, unsigned>, std::vector<LaurentPoly>> cache;
  auto key = std::make_tuple(ctx.p, ctx.gamma, ctx.scaleD, ctx.stepH, alpha);
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const u64 N = ipow(ctx.q, alpha);
  // base polynomial t^q - t + w
  std::vector<LaurentPoly> base(ctx.q + 1, LaurentPoly(ctx));
  base[0] = LaurentPoly::monomial(ctx, 1);
  base[1] = LaurentPoly::constant(ctx, -1);
  base[ctx.q] = LaurentPoly::constant(ctx, 1);
  auto mul = [&](const std::vector<LaurentPoly>& x, const std::vector<LaurentPoly>& y) {
    std::vector<LaurentPoly> r(x.size() + y.size() - 1, LaurentPoly(ctx));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j)
        if (!x[i].is_zero() && !y[j].is_zero()) r[i + j] += x[i] * y[j];
    return r;
  };
  std::vector<LaurentPoly> r{LaurentPoly::constant(ctx, 1)}, b = base;
  for (u64 n = N; n; n >>= 1) {
    if (n & 1) r = mul(r, b);
    if (n > 1) b = mul(b, b);
  }
  std::lock_guard<std::mutex> lk(mu);
  return cache.emplace(key, std::move(r)).first->second;
}

PhiPoly phi_reduce(const PhiPoly& a) {
  const Context& ctx = a.ctx();
  const u64 N = ipow(ctx.q, a.alpha());
  if (ctx.gamma > N) throw Error("relation only valid modulo p^(q^alpha)");
  const std::size_t D = std::size_t(N * ctx.q);
  if (a.coeffs().size() <= D) return a;
  const auto& R = relation_poly(ctx, a.alpha());
  std::vector<LaurentPoly> c = a.coeffs();
  for (std::size_t i = c.size() - 1; i >= D; --i) {
    if (c[i].is_zero()) continue;
    LaurentPoly lead = c[i];
    for (std::size_t j = 0; j < D; ++j)
      if (!R[j].is_zero()) c[i - D + j] -= lead * R[j];
    c[i] = LaurentPoly(ctx);
  }
  return PhiPoly(ctx, a.alpha(), std::move(c));
}

PhiPoly mul_reduce(const PhiPoly& a, const PhiPoly& b) { return phi_reduce(a * b); }

PhiPoly pow_reduce(const PhiPoly& a, u64 n) {
  PhiPoly r = PhiPoly::constant(a.ctx(), a.alpha(), LaurentPoly::constant(a.ctx(), 1)), b = a;
  while (n) {
    if (n & 1) r = mul_reduce(r, b);
    n >>= 1;
    if (n) b = mul_reduce(b, b);
  }
  return r;
}

HCombo phipoly_to_hcombo(const PhiPoly& a) {
  const Context& ctx = a.ctx();
  HCombo r(ctx);
  if (a.is_zero()) return r;
  r.add_free(a.coeffs()[0]);
  for (std::size_t i = 1; i < a.coeffs().size(); ++i) {
    const LaurentPoly& c = a.coeffs()[i];
    if (c.is_zero()) continue;
    const HCombo& h = phi_power_hcombo(ctx, unsigned(i));
    r.add_free(h.free() * c);
    for (auto& [comp, x] : h.terms()) r.add_term(comp, x * c);
  }
  return r;
}

TruncSeries phi_series(const Context& ctx, i64 T) {
  TruncSeries s(ctx, 0, std::max<i64>(T, 0));
  for (i64 e = 1; e < T; e = mul_exp(e, i64(ctx.q))) {
    s.set(e, 1);
    if (e > T / i64(ctx.q)) break;
  }
  return s;
}

TruncSeries phipoly_to_series(const PhiPoly& a, i64 T) {
  const Context& ctx = a.ctx();
  i64 lo = 0;
  for (auto& c : a.coeffs())
    if (!c.is_zero()) lo = std::min(lo, c.min_exp());
  TruncSeries r(ctx, lo, T);
  const i64 L = T - lo;  // order needed for Phi powers
  if (L <= 0) return r;
  std::vector<i64> support;
  for (i64 e = 1; e < L; e *= i64(ctx.q)) {
    support.push_back(e);
    if (e > L / i64(ctx.q)) break;
  }
  std::vector<u64> pw(std::size_t(L), 0), nxt(std::size_t(L), 0);
  pw[0] = 1;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    if (i > 0) {
      std::fill(nxt.begin(), nxt.end(), 0);
      for (i64 e = 0; e < L; ++e) {
        if (!pw[std::size_t(e)]) continue;
        for (i64 s : support) {
          if (e + s >= L) break;
          auto& x = nxt[std::size_t(e + s)];
          x = ctx.add(x, pw[std::size_t(e)]);
        }
      }
      std::swap(pw, nxt);
    }
    const LaurentPoly& c = a.coeffs()[i];
    for (auto& [ce, cv] : c.terms())
      for (i64 e = 0; e + ce < T && e < L; ++e)
        if (pw[std::size_t(e)]) r.addto(e + ce, ctx.mul(cv, pw[std::size_t(e)]));
  }
  return r;
}

TruncSeries phi_derivative_series(const Context& ctx, unsigned beta, i64 T) {
  Context c = ctx.with_gamma(beta + 1);
  TruncSeries s(c, 0, T);
  u64 qn = 1;
  while (i64(qn) - 1 < T) {
    s.set(i64(qn) - 1, qn % c.modulus);
    if (__builtin_mul_overflow(qn, c.q, &qn)) break;
  }
  return s;
}

u64 Extractor::coeff_z(const Int& n) const {
  return combo_coeff(combo_, n * Int(std::to_string(ctx_.scaleD)));
}

u64 Extractor::coeff_z(i64 n) const {
  i64 M;
  if (__builtin_mul_overflow(n, ctx_.scaleD, &M)) return coeff_z(Int(std::to_string(n)));
  return combo_coeff(combo_, M);
}

CoeffResult Extractor::coeff_w(const Int& M) const {
  CoeffResult r;
  r.z_integral = mpz_divisible_ui_p(M.get_mpz_t(), u64(ctx_.scaleD)) != 0;
  r.value = combo_coeff(combo_, M);
  return r;
}

u64 extract_coefficient(const PhiPoly& a, const Int& n) { return Extractor(a).coeff_z(n); }

nlohmann::json context_json(const Context& ctx) {
  return {{"p", ctx.p}, {"gamma", ctx.gamma}, {"scaleD", ctx.scaleD}, {"stepH", ctx.stepH}};
}

std::optional<Context> context_from_json(const nlohmann::json& j) {
  if (!j.contains("context")) return std::nullopt;
  const auto& c = j["context"];
  return Context::make(c.at("p").get<u64>(), c.at("gamma").get<unsigned>(), c.value("scaleD", i64(1)),
                       c.value("stepH", 1u));
}

nlohmann::json to_json(const PhiPoly& a) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (auto& c : a.coeffs()) coeffs.push_back(to_json(c));
  return {{"alpha", a.alpha()}, {"coeffs", coeffs}, {"context", context_json(a.ctx())}};
}

PhiPoly phipoly_from_json(const Context& ctx, const nlohmann::json& j) {
  std::vector<LaurentPoly> coeffs;
  for (auto& c : j.at("coeffs")) coeffs.push_back(laurent_from_json(ctx, c));
  return PhiPoly(ctx, j.at("alpha").get<unsigned>(), std::move(coeffs));
}

}  // namespace phimod
