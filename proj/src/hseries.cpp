#include "phimod/hseries.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <tuple>

namespace phimod {

i64 weight(const Composition& c) {
  i64 w = 0;
  for (i64 b : c) w = add_exp(w, b);
  return w;
}

bool CompLess::operator()(const Composition& a, const Composition& b) const {
  i64 wa = weight(a), wb = weight(b);
  if (wa != wb) return wa < wb;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string comp_str(const Composition& c) {
  if (c.size() == 1) return "H_" + std::to_string(c[0]);
  std::string s = "H_{";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
  return s + "}";
}

bool HCombo::normalized() const {
  for (auto& [c, a] : terms_)
    for (i64 b : c)
      if (u64(b) % ctx_.q == 0) return false;
  return true;
}

LaurentPoly HCombo::coeff(const Composition& c) const {
  auto it = terms_.find(c);
  return it == terms_.end() ? LaurentPoly(ctx_) : it->second;
}

void HCombo::add_term(const Composition& c, const LaurentPoly& a) {
  if (a.is_zero()) return;
  if (c.empty()) {
    free_ += a;
    return;
  }
  auto [it, fresh] = terms_.try_emplace(c, a);
  if (!fresh) {
    it->second += a;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

HCombo HCombo::operator+(const HCombo& o) const {
  HCombo r = *this;
  r.free_ += o.free_;
  for (auto& [c, a] : o.terms_) r.add_term(c, a);
  return r;
}

HCombo HCombo::operator-() const {
  HCombo r(ctx_);
  r.free_ = -free_;
  for (auto& [c, a] : terms_) r.terms_.emplace(c, -a);
  return r;
}

HCombo HCombo::operator-(const HCombo& o) const { return *this + (-o); }

HCombo HCombo::scale(const LaurentPoly& a) const {
  HCombo r(ctx_);
  r.free_ = free_ * a;
  for (auto& [c, x] : terms_) r.add_term(c, x * a);
  return r;
}

HCombo HCombo::scale(u64 k) const {
  HCombo r(ctx_);
  r.free_ = free_.scale(k);
  for (auto& [c, x] : terms_) r.add_term(c, x.scale(k));
  return r;
}

HCombo HCombo::recast(const Context& c) const {
  HCombo r(c);
  r.free_ = free_.recast(c);
  for (auto& [comp, x] : terms_) r.add_term(comp, x.recast(c));
  return r;
}

unsigned HCombo::content_valuation() const {
  unsigned v = ctx_.gamma;
  auto visit = [&](const LaurentPoly& a) {
    for (auto& [e, c] : a.terms()) v = std::min(v, vp_u(c, ctx_.p));
  };
  visit(free_);
  for (auto& [c, a] : terms_) visit(a);
  return v;
}

std::string HCombo::str() const {
  std::string var = ctx_.scaleD == 1 ? "z" : "w";
  std::ostringstream os;
  bool first = true;
  auto put = [&](const LaurentPoly& a, const std::string& h) {
    if (!first) os << " + ";
    first = false;
    bool mono = a.size() == 1;
    bool constant = mono && a.terms()[0].first == 0;
    if (h.empty()) {
      os << (mono ? a.str(var) : "(" + a.str(var) + ")");
    } else if (constant && a.terms()[0].second == 1) {
      os << h;
    } else {
      os << (mono ? a.str(var) : "(" + a.str(var) + ")") << " " << h;
    }
  };
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) put(it->second, comp_str(it->first));
  if (!free_.is_zero()) put(free_, "");
  if (first) return "0";
  return os.str();
}

HCombo expand_phi_power(const Context& ctx, unsigned K, unsigned max_K) {
  if (K < 1) throw Error("expand_phi_power needs K >= 1");
  if (K > max_K) throw Error("K exceeds the expansion cap");
  // binomials C(n,k) mod p^gamma together with their p-adic valuations
  std::vector<std::vector<u64>> bin(K + 1);
  std::vector<std::vector<unsigned>> val(K + 1);
  for (unsigned n = 0; n <= K; ++n) {
    bin[n].resize(n + 1);
    val[n].resize(n + 1);
    for (unsigned k = 0; k <= n; ++k) {
      Int b;
      mpz_bin_uiui(b.get_mpz_t(), n, k);
      bin[n][k] = ctx.reduce(b);
      val[n][k] = vp(b, ctx.p);
    }
  }
  HCombo r(ctx);
  Composition parts;
  auto rec = [&](auto&& self, unsigned rem, u64 coef, unsigned v) -> void {
    if (rem == 0) {
      r.add_term(parts, LaurentPoly::monomial(ctx, 0, coef));
      return;
    }
    for (unsigned b = 1; b <= rem; ++b) {
      unsigned nv = v + val[rem][b];
      if (nv >= ctx.gamma) continue;
      parts.push_back(b);
      self(self, rem - b, ctx.mul(coef, bin[rem][b]), nv);
      parts.pop_back();
    }
  };
  rec(rec, K, 1 % ctx.modulus, 0);
  return r;
}

const HCombo& phi_power_hcombo(const Context& ctx, unsigned K) {
  static std::mutex mu;
  static std::map<std::tuple<u64, unsigned, unsigned, i64, unsigned>, HCombo> cache;
  auto key = std::make_tuple(ctx.p, ctx.stepH, ctx.gamma, ctx.scaleD, K);
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  HCombo h = reduce(expand_phi_power(ctx, K));
  std::lock_guard<std::mutex> lk(mu);
  return cache.emplace(key, std::move(h)).first->second;
}

HCombo reduce(const HCombo& c) {
  const Context& ctx = c.ctx();
  const i64 q = i64(ctx.q);
  HCombo::Map work = c.terms();
  HCombo out(ctx);
  out.add_free(c.free());
  std::size_t steps = 0;
  const std::size_t limit = std::size_t(1) << 32;
  auto add = [&](Composition comp, const LaurentPoly& a) {
    if (a.is_zero()) return;
    if (comp.empty()) {
      out.add_free(a);
      return;
    }
    auto [it, fresh] = work.try_emplace(std::move(comp), a);
    if (!fresh) {
      it->second += a;
      if (it->second.is_zero()) work.erase(it);
    }
  };
  while (!work.empty()) {
    if (++steps > limit) throw Error("reduction did not terminate");
    auto node = work.extract(std::prev(work.end()));
    Composition b = std::move(node.key());
    LaurentPoly a = std::move(node.mapped());
    int h = -1;
    for (int i = int(b.size()) - 1; i >= 0; --i)
      if (b[i] % q == 0) { h = i; break; }
    if (h < 0) {
      out.add_term(b, a);
      continue;
    }
    const int r = int(b.size());
    const i64 bh = b[h], bp = bh / q;
    // shifted index: n_h + 1 ranges over a window; Hou's identities
    Composition c1 = b;
    c1[h] = bp;
    if (r == 1) {
      add(c1, a);
      out.add_free(-a.shift(bp));
    } else if (h == 0) {
      add(c1, a);
      Composition c2(b.begin() + 1, b.end());
      c2[0] = add_exp(bh, b[1]);
      add(c2, -a);
    } else if (h < r - 1) {
      add(c1, a);
      Composition c2 = b;
      c2[h - 1] = add_exp(b[h - 1], bp);
      c2.erase(c2.begin() + h);
      add(c2, a);
      Composition c3 = b;
      c3[h + 1] = add_exp(bh, b[h + 1]);
      c3.erase(c3.begin() + h);
      add(c3, -a);
    } else {
      add(c1, a);
      Composition c2 = b;
      c2[h - 1] = add_exp(b[h - 1], bp);
      c2.pop_back();
      add(c2, a);
      Composition c3(b.begin(), b.end() - 1);
      add(c3, -a.shift(bp));
    }
  }
  return out;
}

std::vector<std::pair<Composition, u64>> stuffle(const Composition& a, const Composition& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::map<Composition, u64>> memo;
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> const std::map<Composition, u64>& {
    auto key = std::make_pair(i, j);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::map<Composition, u64> res;
    if (i == a.size() && j == b.size()) {
      res[{}] = 1;
    } else {
      auto prepend = [&](i64 head, const std::map<Composition, u64>& tail) {
        for (auto& [t, m] : tail) {
          Composition c;
          c.reserve(t.size() + 1);
          c.push_back(head);
          c.insert(c.end(), t.begin(), t.end());
          res[c] += m;
        }
      };
      if (i < a.size()) prepend(a[i], self(self, i + 1, j));
      if (j < b.size()) prepend(b[j], self(self, i, j + 1));
      if (i < a.size() && j < b.size()) prepend(add_exp(a[i], b[j]), self(self, i + 1, j + 1));
    }
    return memo.emplace(key, std::move(res)).first->second;
  };
  const auto& m = rec(rec, 0, 0);
  return {m.begin(), m.end()};
}

HCombo multiply(const HCombo& x, const HCombo& y) {
  if (x.ctx() != y.ctx()) throw Error("combos from different contexts");
  const Context& ctx = x.ctx();
  HCombo r(ctx);
  r.add_free(x.free() * y.free());
  if (!x.free().is_zero())
    for (auto& [c, a] : y.terms()) r.add_term(c, a * x.free());
  if (!y.free().is_zero())
    for (auto& [c, a] : x.terms()) r.add_term(c, a * y.free());
  for (auto& [ca, a] : x.terms())
    for (auto& [cb, b] : y.terms()) {
      LaurentPoly ab = a * b;
      if (ab.is_zero()) continue;
      for (auto& [c, m] : stuffle(ca, cb)) r.add_term(c, ab.scale(m % ctx.modulus));
    }
  return reduce(r);
}

HCombo frobenius(const HCombo& a) {
  const Context& ctx = a.ctx();
  if (ctx.gamma != 1) throw Error("frobenius is defined over F_p");
  const i64 p = i64(ctx.p);
  HCombo r(ctx);
  r.add_free(a.free().substitute_power(p));
  for (auto& [c, x] : a.terms()) {
    Composition pc = c;
    for (auto& b : pc) b = mul_exp(b, p);
    r.add_term(pc, x.substitute_power(p));
  }
  return reduce(r);
}

HCombo power(const HCombo& a, u64 n) {
  const Context& ctx = a.ctx();
  if (n == 0) {
    HCombo one(ctx);
    one.add_free(LaurentPoly::constant(ctx, 1));
    return one;
  }
  if (a.is_zero()) return a;
  unsigned v = a.content_valuation();
  if (u128(v) * n >= ctx.gamma) return HCombo(ctx);
  if (n % ctx.p == 0 && ctx.gamma <= v * ctx.p + 1) {
    // a = p^v a', a^p = p^(vp) a'^p and only a'^p mod p is needed
    Context c1 = ctx.with_gamma(1);
    HCombo reduced(c1);
    u64 pv = ipow(ctx.p, v);
    reduced.add_free(LaurentPoly::from_terms(c1, [&] {
      std::vector<LaurentPoly::Term> t;
      for (auto [e, c] : a.free().terms()) t.push_back({e, c / pv});
      return t;
    }()));
    for (auto& [comp, x] : a.terms()) {
      std::vector<LaurentPoly::Term> t;
      for (auto [e, c] : x.terms()) t.push_back({e, c / pv});
      reduced.add_term(comp, LaurentPoly::from_terms(c1, std::move(t)));
    }
    HCombo f = frobenius(reduced).recast(ctx).scale(ipow(ctx.p, v * unsigned(ctx.p)));
    return power(f, n / ctx.p);
  }
  HCombo r(ctx), b = a;
  bool have = false;
  while (n) {
    if (n & 1) {
      r = have ? multiply(r, b) : b;
      have = true;
    }
    n >>= 1;
    if (n) b = multiply(b, b);
  }
  return r;
}

namespace {

void check_normalized(const Composition& t, u64 q) {
  for (i64 b : t)
    if (b <= 0 || u64(b) % q == 0) throw Error("composition not normalized");
}

}  // namespace

int hterm_coeff(const Composition& t, const Int& M, u64 q) {
  check_normalized(t, q);
  if (M <= 0) return 0;
  if (mpz_fits_slong_p(M.get_mpz_t())) return hterm_coeff(t, i64(M.get_si()), q);
  Int rem = M, qn;
  long prev = -1;
  for (std::size_t k = t.size(); k-- > 0;) {
    if (rem <= 0) return 0;
    long n = long(vp(rem, q));
    if (prev >= 0 && n <= prev) return 0;
    mpz_ui_pow_ui(qn.get_mpz_t(), q, u64(n));
    rem -= Int(std::to_string(t[k])) * qn;
    prev = n;
  }
  return rem == 0 ? 1 : 0;
}

int hterm_coeff(const Composition& t, i64 M, u64 q) {
  check_normalized(t, q);
  i128 rem = M;
  int prev = -1;
  for (std::size_t k = t.size(); k-- > 0;) {
    if (rem <= 0) return 0;
    u64 x = u64(rem);
    int n = 0;
    u64 qn = 1;
    while (x % q == 0) { x /= q; ++n; qn *= q; }
    if (n <= prev) return 0;
    rem -= i128(t[k]) * i128(qn);
    prev = n;
  }
  return rem == 0 ? 1 : 0;
}

u64 combo_coeff(const HCombo& c, i64 M) {
  const Context& ctx = c.ctx();
  u64 s = c.free().coeff(M);
  for (auto& [comp, a] : c.terms())
    for (auto& [e, x] : a.terms()) {
      i128 R = i128(M) - e;
      if (R < 1 || R > i128(INT64_MAX)) {
        if (R > i128(INT64_MAX)) {
          Int big = Int(std::to_string(M)) - Int(std::to_string(e));
          if (hterm_coeff(comp, big, ctx.q)) s = ctx.add(s, x);
        }
        continue;
      }
      if (hterm_coeff(comp, i64(R), ctx.q)) s = ctx.add(s, x);
    }
  return s;
}

u64 combo_coeff(const HCombo& c, const Int& M) {
  if (mpz_fits_slong_p(M.get_mpz_t())) return combo_coeff(c, i64(M.get_si()));
  const Context& ctx = c.ctx();
  u64 s = 0;  // the free part has word-sized exponents
  for (auto& [comp, a] : c.terms())
    for (auto& [e, x] : a.terms()) {
      Int R = M - Int(std::to_string(e));
      if (R >= 1 && hterm_coeff(comp, R, ctx.q)) s = ctx.add(s, x);
    }
  return s;
}

TruncSeries hcombo_to_series(const HCombo& c, i64 T) {
  const Context& ctx = c.ctx();
  i64 lo = 0;
  if (!c.free().is_zero()) lo = std::min(lo, c.free().min_exp());
  for (auto& [comp, a] : c.terms()) lo = std::min(lo, a.min_exp() + weight(comp));
  TruncSeries r(ctx, lo, T);
  for (auto& [e, x] : c.free().terms())
    if (e < T) r.addto(e, x);
  const i64 q = i64(ctx.q);
  for (auto& [comp, a] : c.terms()) {
    i64 bound = T - a.min_exp();  // exponents of H below this matter
    std::vector<i64> exps;
    // choose n_r, n_{r-1}, ... increasing; partial sum from the tail
    auto rec = [&](auto&& self, int k, i64 sum, i64 qmin) -> void {
      if (k < 0) {
        exps.push_back(sum);
        return;
      }
      for (i64 qn = qmin;; qn *= q) {
        i128 s = i128(sum) + i128(comp[k]) * qn;
        if (s >= bound) break;
        self(self, k - 1, i64(s), qn * q);
        if (qn > bound / q) break;
      }
    };
    rec(rec, int(comp.size()) - 1, 0, 1);
    for (i64 h : exps)
      for (auto& [e, x] : a.terms())
        if (h + e < T) r.addto(h + e, x);
  }
  return r;
}

nlohmann::json to_json(const HCombo& c) {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [comp, a] : c.terms()) terms.push_back({{"comp", comp}, {"coeff", to_json(a)}});
  return {{"free", to_json(c.free())}, {"terms", terms}};
}

HCombo hcombo_from_json(const Context& ctx, const nlohmann::json& j) {
  HCombo r(ctx);
  if (j.contains("free")) r.add_free(laurent_from_json(ctx, j["free"]));
  for (auto& t : j.at("terms")) {
    Composition comp = t.at("comp").get<Composition>();
    if (comp.empty() || std::any_of(comp.begin(), comp.end(), [](i64 b) { return b <= 0; }))
      throw Error("compositions must have positive parts");
    r.add_term(comp, laurent_from_json(ctx, t.at("coeff")));
  }
  return r;
}

}  // namespace phimod
