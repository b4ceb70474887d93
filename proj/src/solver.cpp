#include "phimod/solver.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace phimod {

// ---------------------------------------------------------------- equations

u64 FunctionalEquation::degree() const {
  u64 d = 0;
  for (auto& m : monos) d = std::max(d, m.m);
  return d;
}

FunctionalEquation FunctionalEquation::derivative() const {
  FunctionalEquation r = *this;
  r.monos.clear();
  for (auto& m : monos)
    if (m.m > 0) r.monos.push_back({m.c * Int(std::to_string(m.m)), m.e, m.m - 1});
  return r;
}

std::string FunctionalEquation::str() const {
  BivarPoly b;
  for (auto& m : monos) b.add(m.e, m.m, m.c);
  return b.str(scaleD == 1 ? "z" : "w", "F");
}

FunctionalEquation parse_equation(const std::string& text, u64 p, i64 scaleD, unsigned stepH,
                                  std::vector<Int> initial, std::string name) {
  if (!is_prime(p)) throw Error("p must be prime");
  if (scaleD < 1 || stepH < 1) throw Error("scaleD and stepH must be positive");
  PolyExpr e = parse_poly(text, {{"z", scaleD, false}, {"w", 1, false}, {"F", 0, true}});
  FunctionalEquation eq;
  eq.name = std::move(name);
  eq.p = p;
  eq.scaleD = scaleD;
  eq.stepH = stepH;
  eq.initial = std::move(initial);
  BivarPoly ex = e.expand();
  for (auto& [k, c] : ex.monomials()) eq.monos.push_back({c, k.first, k.second});
  if (eq.monos.empty()) throw Error("equation is identically zero");
  return eq;
}

nlohmann::json to_json(const FunctionalEquation& eq) {
  nlohmann::json init = nlohmann::json::array();
  for (auto& c : eq.initial) init.push_back(c.get_str());
  nlohmann::json monos = nlohmann::json::array();
  for (auto& m : eq.monos) monos.push_back({m.c.get_str(), m.e, m.m});
  return {{"name", eq.name}, {"p", eq.p},           {"scaleD", eq.scaleD}, {"stepH", eq.stepH},
          {"equation", eq.str()}, {"monomials", monos}, {"initial_terms", init}};
}

FunctionalEquation equation_from_json(const nlohmann::json& j) {
  std::vector<Int> init;
  if (j.contains("initial_terms"))
    for (auto& c : j["initial_terms"]) init.push_back(c.is_string() ? Int(c.get<std::string>()) : Int(std::to_string(c.get<i64>())));
  u64 p = j.at("p").get<u64>();
  i64 D = j.value("scaleD", i64(1));
  unsigned h = j.value("stepH", 1u);
  std::string name = j.value("name", std::string("custom"));
  if (j.contains("equation") && j["equation"].is_string())
    return parse_equation(j["equation"].get<std::string>(), p, D, h, init, name);
  FunctionalEquation eq;
  eq.name = name;
  eq.p = p;
  eq.scaleD = D;
  eq.stepH = h;
  eq.initial = init;
  for (auto& m : j.at("monomials")) eq.monos.push_back({Int(m.at(0).get<std::string>()), m.at(1).get<i64>(), m.at(2).get<u64>()});
  return eq;
}

// ---------------------------------------------------------- series recursion

namespace {

const char* kNotUnique = "equation does not determine series uniquely at this modulus";

struct ExactRing {
  using V = Int;
  V from(const Int& c) const { return c; }
  bool is_zero(const V& v) const { return v == 0; }
  V add(const V& a, const V& b) const { return a + b; }
  V sub(const V& a, const V& b) const { return a - b; }
  V mul(const V& a, const V& b) const { return a * b; }
  void addmul(V& acc, const V& a, const V& b) const { mpz_addmul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t()); }
  bool unit_ok(const V& v) const { return v != 0; }
  V div(const V& num, const V& lam) const {
    if (!mpz_divisible_p(num.get_mpz_t(), lam.get_mpz_t()))
      throw Error("non-integral coefficient in the exact series recursion");
    Int q;
    mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), lam.get_mpz_t());
    return q;
  }
};

struct ModRing {
  Context ctx;
  using V = u64;
  V from(const Int& c) const { return ctx.reduce(c); }
  bool is_zero(V v) const { return v == 0; }
  V add(V a, V b) const { return ctx.add(a, b); }
  V sub(V a, V b) const { return ctx.sub(a, b); }
  V mul(V a, V b) const { return ctx.mul(a, b); }
  void addmul(V& acc, V a, V b) const { acc = ctx.add(acc, ctx.mul(a, b)); }
  bool unit_ok(V v) const { return v % ctx.p != 0; }
  V div(V num, V lam) const { return ctx.mul(num, ctx.inv(lam)); }
};

struct Reduced {
  std::vector<EqMonomial> monos;  // exponents divided by g
  std::vector<Int> initial;
  i64 g = 1;
};

Reduced stride_reduce(const FunctionalEquation& eq) {
  Reduced r;
  i64 g = 0;
  for (auto& m : eq.monos) {
    if (m.e < 0) throw Error("equation has negative w-exponents; multiply through first");
    if (m.c != 0) g = std::gcd(g, m.e);
  }
  for (std::size_t i = 0; i < eq.initial.size(); ++i)
    if (eq.initial[i] != 0) g = std::gcd(g, i64(i));
  if (g == 0) g = 1;
  r.g = g;
  for (auto& m : eq.monos) r.monos.push_back({m.c, m.e / g, m.m});
  for (std::size_t i = 0; i < eq.initial.size(); i += std::size_t(g)) r.initial.push_back(eq.initial[i]);
  return r;
}

// Coefficients f_0..f_{T-1} of the solution in u = w^g.
template <class R>
std::vector<typename R::V> recurse(const R& ring, const Reduced& eq, i64 T) {
  using V = typename R::V;
  const std::size_t k = eq.initial.size();
  if (k == 0) throw Error("at least one initial term is required");
  u64 deg = 0;
  for (auto& m : eq.monos) deg = std::max(deg, m.m);
  std::vector<V> f;
  for (auto& c : eq.initial) f.push_back(ring.from(c));
  const std::size_t Tn = std::size_t(std::max<i64>(T, i64(k)));

  // P[m][M] = [u^M] F^m, final for M < n.
  std::vector<std::vector<V>> P(deg + 1);
  auto extend_powers = [&](std::size_t n) {  // fills column n for all m
    for (u64 m = 0; m <= deg; ++m) {
      if (P[m].size() <= n) P[m].resize(n + 1, ring.from(0));
      if (m == 0) {
        P[0][n] = ring.from(n == 0 ? 1 : 0);
        continue;
      }
      V acc = ring.from(0);
      for (std::size_t j = 0; j <= n; ++j)
        if (!ring.is_zero(f[j]) && !ring.is_zero(P[m - 1][n - j])) ring.addmul(acc, f[j], P[m - 1][n - j]);
      P[m][n] = acc;
    }
  };
  for (std::size_t n = 0; n < k; ++n) extend_powers(n);

  // coefficients of P as polynomials in F grouped by F-degree
  std::vector<std::vector<std::pair<i64, V>>> byM(deg + 1);
  for (auto& mo : eq.monos) {
    V c = ring.from(mo.c);
    if (!ring.is_zero(c)) byM[mo.m].push_back({mo.e, c});
  }

  // valuation v and leading coefficient of P_F(F) from the initial block
  std::size_t v = k;
  V lam = ring.from(0);
  for (std::size_t N = 0; N < k && v == k; ++N) {
    V acc = ring.from(0);
    for (u64 m = 1; m <= deg; ++m)
      for (auto& [e, c] : byM[m])
        if (i64(N) >= e) ring.addmul(acc, ring.mul(c, ring.from(Int(std::to_string(m)))), P[m - 1][N - std::size_t(e)]);
    if (!ring.is_zero(acc)) {
      v = N;
      lam = acc;
    }
  }
  if (v == k) throw Error(std::string(kNotUnique) + " (supply more initial terms)");
  if (!ring.unit_ok(lam)) throw Error(kNotUnique);

  // [u^N] (F_{<n})^m for N in [n, n+v]; Q[m][N-n]
  auto partials = [&](std::size_t n) {
    std::vector<std::vector<V>> Q(deg + 1, std::vector<V>(v + 1, ring.from(0)));
    for (u64 m = 1; m <= deg; ++m)
      for (std::size_t d = 0; d <= v; ++d) {
        std::size_t N = n + d;
        V acc = ring.from(0);
        for (std::size_t j = 0; j < n && j <= N; ++j) {
          if (ring.is_zero(f[j])) continue;
          std::size_t M = N - j;
          const V& x = M < n ? P[m - 1][M] : Q[m - 1][M - n];
          if (!ring.is_zero(x)) ring.addmul(acc, f[j], x);
        }
        Q[m][d] = acc;
      }
    return Q;
  };
  auto coeff_at = [&](std::size_t n, std::size_t N, const std::vector<std::vector<V>>& Q) {
    V acc = ring.from(0);
    for (u64 m = 0; m <= deg; ++m)
      for (auto& [e, c] : byM[m]) {
        if (i64(N) < e) continue;
        std::size_t M = N - std::size_t(e);
        const V& x = M < n ? P[m][M] : Q[m][M - n];
        if (!ring.is_zero(x)) ring.addmul(acc, c, x);
      }
    return acc;
  };

  // the initial terms must annihilate P up to order k+v
  {
    auto Q = partials(k);
    for (std::size_t N = 0; N < k + v; ++N) {
      V x = coeff_at(k, N, Q);
      if (!ring.is_zero(x)) throw Error("initial terms are inconsistent with the equation");
    }
  }

  for (std::size_t n = k; n < Tn; ++n) {
    auto Q = partials(n);
    V c = coeff_at(n, n + v, Q);
    V fn = ring.sub(ring.from(0), ring.div(c, lam));
    f.push_back(fn);
    extend_powers(n);
  }
  f.resize(std::size_t(T));
  return f;
}

i64 ceil_div(i64 a, i64 b) { return a <= 0 ? 0 : (a + b - 1) / b; }

}  // namespace

std::vector<Int> series_solution_exact(const FunctionalEquation& eq, i64 T) {
  Reduced r = stride_reduce(eq);
  auto f = recurse(ExactRing{}, r, ceil_div(T, r.g));
  std::vector<Int> out(std::size_t(std::max<i64>(T, 0)), 0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (i64(i) * r.g < T) out[std::size_t(i64(i) * r.g)] = f[i];
  return out;
}

TruncSeries series_solution(const FunctionalEquation& eq, const Context& ctx, i64 T) {
  Reduced r = stride_reduce(eq);
  auto f = recurse(ModRing{ctx}, r, ceil_div(T, r.g));
  TruncSeries s(ctx, 0, T);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (i64(i) * r.g < T) s.set(i64(i) * r.g, f[i]);
  return s;
}

TruncSeries series_solution_any(const FunctionalEquation& eq, const Context& ctx, i64 T) {
  try {
    return series_solution(eq, ctx, T);
  } catch (const Error& e) {
    if (std::string(e.what()).rfind(kNotUnique, 0) != 0 || std::string(e.what()).find("initial terms") != std::string::npos)
      throw;
  }
  auto f = series_solution_exact(eq, T);
  TruncSeries s(ctx, 0, T);
  for (i64 i = 0; i < T; ++i) s.set(i, ctx.reduce(f[std::size_t(i)]));
  return s;
}

TruncSeries residual_series(const FunctionalEquation& eq, const TruncSeries& F) {
  const Context& ctx = F.ctx;
  TruncSeries r(ctx, std::min<i64>(0, F.low), F.order);
  TruncSeries pw(ctx, 0, F.order);
  pw.set(0, 1);
  for (u64 m = 0; m <= eq.degree(); ++m) {
    if (m) pw = pw * F;
    for (auto& mo : eq.monos) {
      if (mo.m != m) continue;
      u64 c = ctx.reduce(mo.c);
      for (i64 e = pw.low; e < pw.order; ++e) {
        i64 t = e + mo.e;
        if (t >= r.order) break;
        if (t < r.low) continue;
        u64 x = pw.get(e);
        if (x) r.addto(t, ctx.mul(c, x));
      }
    }
  }
  return r.truncate(std::min(r.order, F.order));
}

PhiPoly evaluate(const FunctionalEquation& eq, const PhiPoly& F) {
  const Context& ctx = F.ctx();
  std::vector<LaurentPoly> coef(eq.degree() + 1, LaurentPoly(ctx));
  for (auto& mo : eq.monos) coef[mo.m] += LaurentPoly::monomial(ctx, mo.e, ctx.reduce(mo.c));
  PhiPoly acc(ctx, F.alpha());
  PhiPoly pw = PhiPoly::constant(ctx, F.alpha(), LaurentPoly::constant(ctx, 1));
  for (std::size_t m = 0; m < coef.size(); ++m) {
    if (m) pw = mul_reduce(pw, F);
    if (!coef[m].is_zero()) acc = acc + pw.scale(coef[m]);
  }
  return phi_reduce(acc);
}

// ---------------------------------------------------------------- base check

bool verify_base(const FunctionalEquation& eq, const PhiPoly& base) {
  const Context& bc = base.ctx();
  if (bc.p != eq.p || bc.scaleD != eq.scaleD || bc.stepH != eq.stepH) return false;
  Context c1 = eq.context(1);
  PhiPoly b = base.recast(c1);
  PhiPoly R = evaluate(eq, b);
  if (!R.is_zero() && !phipoly_to_hcombo(R).is_zero()) return false;
  const i64 k = i64(eq.initial.size());
  TruncSeries s = phipoly_to_series(b, k);
  for (i64 e = s.low; e < 0; ++e)
    if (s.get(e)) return false;
  for (i64 i = 0; i < k; ++i)
    if (s.get(i) != c1.reduce(eq.initial[std::size_t(i)])) return false;
  return true;
}

// ------------------------------------------------------- linear algebra mod p

namespace {

using Poly = std::vector<u64>;  // dense over F_p, low degree first, trimmed

struct Fp {
  u64 p;
  u64 mul(u64 a, u64 b) const { return u64((u128)a * b % p); }
  u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= p ? s - p : s; }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p - b; }
  u64 inv(u64 a) const {
    u64 r = 1, e = p - 2, b = a % p;
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }
  static void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  Poly mulp(const Poly& a, const Poly& b) const {
    if (a.empty() || b.empty()) return {};
    std::vector<u128> acc(a.size() + b.size() - 1, 0);
    const u128 cap = ~u128(0) >> 2;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i]) continue;
      for (std::size_t j = 0; j < b.size(); ++j) {
        acc[i + j] += (u128)a[i] * b[j];
        if (acc[i + j] > cap) acc[i + j] %= p;
      }
    }
    Poly r(acc.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = u64(acc[i] % p);
    trim(r);
    return r;
  }
  Poly subp(Poly a, const Poly& b) const {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = sub(a[i], b[i]);
    trim(a);
    return a;
  }
  // quotient and remainder
  std::pair<Poly, Poly> divmod(Poly a, const Poly& b) const {
    if (b.empty()) throw Error("division by zero polynomial");
    if (a.size() < b.size()) return {{}, a};
    Poly q(a.size() - b.size() + 1, 0);
    u64 li = inv(b.back());
    for (std::size_t top = a.size(); top-- > b.size() - 1;) {
      u64 t = mul(a[top], li);
      std::size_t sh = top - (b.size() - 1);
      q[sh] = t;
      if (t)
        for (std::size_t j = 0; j < b.size(); ++j) a[sh + j] = sub(a[sh + j], mul(t, b[j]));
    }
    trim(q);
    trim(a);
    return {q, a};
  }
  Poly exact_div(const Poly& a, const Poly& b) const {
    auto [q, r] = divmod(a, b);
    if (!r.empty()) throw Error("internal: inexact division in fraction-free elimination");
    return q;
  }
};

Poly to_poly(const LaurentPoly& a, i64 shift) {
  Poly r;
  for (auto& [e, c] : a.terms()) {
    std::size_t i = std::size_t(e + shift);
    if (r.size() <= i) r.resize(i + 1, 0);
    r[i] = c;
  }
  return r;
}

LaurentPoly from_poly(const Context& ctx, const Poly& a, i64 shift) {
  std::vector<LaurentPoly::Term> t;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]) t.push_back({i64(i) - shift, a[i]});
  return LaurentPoly::from_terms(ctx, std::move(t));
}

bool is_monomial(const LaurentPoly& a) { return a.size() == 1; }

LaurentPoly monomial_inverse(const LaurentPoly& a) {
  auto [e, c] = a.terms()[0];
  return LaurentPoly::monomial(a.ctx(), -e, a.ctx().inv(c));
}

struct Bareiss {
  LaurentPoly det;
  std::vector<LaurentPoly> x;
  bool singular = false;
};

// Fraction-free elimination after clearing negative exponents row by row.
Bareiss bareiss(const Context& ctx, const std::vector<std::vector<LaurentPoly>>& M, const std::vector<LaurentPoly>* c,
                bool want_solution) {
  const std::size_t n = M.size();
  Fp F{ctx.p};
  std::vector<std::vector<Poly>> A(n, std::vector<Poly>(n + 1));
  i64 total_shift = 0;
  for (std::size_t i = 0; i < n; ++i) {
    i64 lo = 0;
    bool any = false;
    auto see = [&](const LaurentPoly& a) {
      if (a.is_zero()) return;
      lo = any ? std::min(lo, a.min_exp()) : a.min_exp();
      any = true;
    };
    for (auto& a : M[i]) see(a);
    if (c) see((*c)[i]);
    i64 s = any ? -lo : 0;
    total_shift += s;
    for (std::size_t j = 0; j < n; ++j) A[i][j] = to_poly(M[i][j], s);
    if (c) A[i][n] = to_poly((*c)[i], s);
  }
  Bareiss out;
  int sign = 1;
  Poly prev{1};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    for (std::size_t r = k; r < n; ++r)
      if (!A[r][k].empty() && (piv == n || A[r][k].size() < A[piv][k].size())) piv = r;
    if (piv == n) {
      out.singular = true;
      out.det = LaurentPoly(ctx);
      return out;
    }
    if (piv != k) {
      std::swap(A[piv], A[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) {
        Poly t = F.subp(F.mulp(A[k][k], A[i][j]), F.mulp(A[i][k], A[k][j]));
        A[i][j] = F.exact_div(t, prev);
      }
      A[i][k].clear();
    }
    prev = A[k][k];
  }
  Poly d = A[n - 1][n - 1];
  out.det = from_poly(ctx, d, total_shift);
  if (sign < 0) out.det = -out.det;
  if (!want_solution) return out;
  // y_i = d * x_i, polynomials by Cramer's rule
  std::vector<Poly> y(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Poly t = F.mulp(d, A[ii][n]);
    for (std::size_t j = ii + 1; j < n; ++j) t = F.subp(t, F.mulp(A[ii][j], y[j]));
    y[ii] = F.exact_div(t, A[ii][ii]);
  }
  std::size_t k0 = 0;
  while (d[k0] == 0) ++k0;
  Poly dp(d.begin() + i64(k0), d.end());
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [q, r] = F.divmod(y[i], dp);
    if (!r.empty()) throw Error("non-Laurent solution");
    out.x[i] = from_poly(ctx, q, i64(k0));
  }
  return out;
}

// Gauss-Jordan with monomial pivots only, exact over F_p[w, 1/w].
bool unit_pivot_solve(const Context& ctx, std::vector<std::vector<LaurentPoly>> A, std::vector<LaurentPoly> c,
                      std::vector<LaurentPoly>& x, LaurentPoly& det) {
  const std::size_t n = A.size();
  det = LaurentPoly::constant(ctx, 1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    for (std::size_t r = k; r < n; ++r)
      if (is_monomial(A[r][k])) {
        piv = r;
        break;
      }
    if (piv == n) return false;
    if (piv != k) {
      std::swap(A[piv], A[k]);
      std::swap(c[piv], c[k]);
      det = -det;
    }
    det = det * A[k][k];
    LaurentPoly iv = monomial_inverse(A[k][k]);
    for (std::size_t j = k; j < n; ++j) A[k][j] = A[k][j] * iv;
    c[k] = c[k] * iv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || A[i][k].is_zero()) continue;
      LaurentPoly f = A[i][k];
      for (std::size_t j = k; j < n; ++j)
        if (!A[k][j].is_zero()) A[i][j] -= f * A[k][j];
      c[i] -= f * c[k];
    }
  }
  x = c;
  return true;
}

}  // namespace

LaurentPoly determinant(const std::vector<std::vector<LaurentPoly>>& M) {
  if (M.empty()) throw Error("empty matrix");
  const Context ctx = M[0][0].ctx();
  return bareiss(ctx, M, nullptr, false).det;
}

std::vector<LaurentPoly> linear_solve(const std::vector<std::vector<LaurentPoly>>& M, const std::vector<LaurentPoly>& c,
                                      LaurentPoly* det) {
  const std::size_t n = M.size();
  if (n == 0 || c.size() != n) throw Error("linear_solve: shape mismatch");
  for (auto& row : M)
    if (row.size() != n) throw Error("linear_solve: matrix is not square");
  const Context ctx = c[0].ctx();
  if (ctx.gamma != 1) throw Error("linear_solve works modulo p");

  bool diagonal = true;
  for (std::size_t i = 0; i < n && diagonal; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !M[i][j].is_zero()) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    std::vector<LaurentPoly> x(n);
    LaurentPoly d = LaurentPoly::constant(ctx, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const LaurentPoly& a = M[i][i];
      d = d * a;
      if (a.is_zero()) throw Error("inconsistent or underdetermined");
      if (is_monomial(a)) {
        x[i] = c[i] * monomial_inverse(a);
      } else {
        std::vector<LaurentPoly> ci{c[i]};
        x[i] = bareiss(ctx, {{a}}, &ci, true).x[0];
      }
    }
    if (det) *det = d;
    return x;
  }

  std::vector<LaurentPoly> x;
  LaurentPoly d;
  if (unit_pivot_solve(ctx, M, c, x, d)) {
    if (det) *det = d;
    return x;
  }
  Bareiss b = bareiss(ctx, M, &c, true);
  if (b.singular) throw Error("inconsistent or underdetermined");
  if (det) *det = b.det;
  return b.x;
}

// ------------------------------------------------------------------ lifting

namespace {

bool is_diagonal(const std::vector<std::vector<LaurentPoly>>& M) {
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M.size(); ++j)
      if (i != j && !M[i][j].is_zero()) return false;
  return true;
}

}  // namespace

std::vector<std::vector<LaurentPoly>> lift_matrix(const FunctionalEquation& eq, const PhiPoly& F1) {
  const Context& c1 = F1.ctx();
  const unsigned alpha = F1.alpha();
  const std::size_t N = std::size_t(ipow(c1.q, alpha + 1));
  PhiPoly col = evaluate(eq.derivative(), F1);
  PhiPoly phi = PhiPoly::phi(c1, alpha);
  std::vector<std::vector<LaurentPoly>> M(N, std::vector<LaurentPoly>(N, LaurentPoly(c1)));
  for (std::size_t j = 0; j < N; ++j) {
    if (j) col = phi_reduce(col * phi);
    for (std::size_t k = 0; k < N; ++k) M[k][j] = col.coeff(k);
  }
  return M;
}

PhiPoly lift(const FunctionalEquation& eq, const PhiPoly& current, unsigned beta, LiftStep* log) {
  const Context& ctx = current.ctx();
  if (beta < 1 || ctx.gamma <= beta) throw Error("lift needs a context with gamma > beta >= 1");
  const Context c1 = ctx.with_gamma(1);
  const u64 pb = ipow(ctx.p, beta), pb1 = pb * ctx.p;
  const unsigned alpha = current.alpha();
  const std::size_t N = std::size_t(ipow(ctx.q, alpha + 1));

  PhiPoly R = evaluate(eq, current);
  std::vector<LaurentPoly> rhs(N, LaurentPoly(c1));
  bool divisible = true;
  for (std::size_t k = 0; k < R.coeffs().size(); ++k) {
    std::vector<LaurentPoly::Term> t;
    for (auto& [e, v] : R.coeffs()[k].terms()) {
      u64 r = v % pb1;
      if (r % pb) {
        divisible = false;
        break;
      }
      t.push_back({e, c1.neg(r / pb)});
    }
    if (!divisible) break;
    if (k < N) rhs[k] = LaurentPoly::from_terms(c1, std::move(t));
  }
  if (!divisible) {
    PhiPoly Rb = R.recast(ctx.with_gamma(beta));
    if (!Rb.is_zero() && !phipoly_to_hcombo(Rb).is_zero())
      throw Error("precondition violated: current solution does not satisfy the equation modulo p^" + std::to_string(beta));
    throw LiftFailure(beta, "residual vanishes modulo p^" + std::to_string(beta) +
                                " as a series but not coefficientwise in the Phi-basis");
  }

  auto M = lift_matrix(eq, current.recast(c1));

  LiftStep step;
  step.beta = beta;
  step.rows = step.cols = N;
  step.diagonal = is_diagonal(M);
  std::vector<LaurentPoly> b;
  try {
    b = linear_solve(M, rhs, &step.det);
  } catch (const LiftFailure&) {
    throw;
  } catch (const Error& e) {
    throw LiftFailure(beta, e.what());
  }
  if (log) *log = step;

  std::vector<LaurentPoly> upd(N, LaurentPoly(ctx));
  for (std::size_t i = 0; i < N; ++i) upd[i] = b[i].recast(ctx).scale(pb % ctx.modulus);
  return phi_reduce(current + PhiPoly(ctx, alpha, upd));
}

nlohmann::json LiftReport::to_json() const {
  nlohmann::json steps_j = nlohmann::json::array();
  for (auto& s : steps)
    steps_j.push_back({{"beta", s.beta},
                       {"shape", {s.rows, s.cols}},
                       {"diagonal", s.diagonal},
                       {"det", s.det.ctx().modulus ? s.det.str(solution.ctx().scaleD == 1 ? "z" : "w") : ""}});
  nlohmann::json j = {{"reached_beta", reached_beta}, {"steps", steps_j}, {"certified", certified},
                      {"cert_order", cert_order},     {"failure", failure}};
  j["solution"] = phimod::to_json(solution);
  j["solution_str"] = solution.str();
  return j;
}

LiftReport solve(const FunctionalEquation& eq, const PhiPoly& base, unsigned alpha, const SolveOptions& opt) {
  const Context c1 = eq.context(1);
  const u64 qa = ipow(c1.q, alpha);
  if (qa > 200) throw Error("q^alpha too large for the coefficient ring");
  const unsigned G = opt.gamma.value_or(unsigned(qa));
  if (G < 1 || G > qa) throw Error("target gamma must lie in [1, q^alpha]");
  PhiPoly b1 = base.recast(c1);
  if (b1.alpha() != alpha) {
    if (b1.degree() >= int(ipow(c1.q, alpha + 1))) throw Error("base degree exceeds the Ansatz bound for this alpha");
    b1 = b1.with_alpha(alpha);
  }
  if (!verify_base(eq, b1)) throw Error("base does not satisfy the equation modulo p");

  const Context ctx = eq.context(G);
  LiftReport rep;
  PhiPoly F = b1.recast(ctx);
  rep.reached_beta = 1;
  for (unsigned beta = 1; beta < G; ++beta) {
    LiftStep step;
    try {
      F = lift(eq, F, beta, &step);
    } catch (const LiftFailure& e) {
      rep.failure = e.what();
      rep.solution = F;
      return rep;
    }
    rep.steps.push_back(step);
    rep.reached_beta = beta + 1;
  }
  rep.solution = F;
  if (opt.certify) {
    i64 T = opt.cert_order >= 0 ? opt.cert_order : i64(ipow(c1.p, alpha + 4));
    rep.cert_order = T;
    TruncSeries want = series_solution_any(eq, ctx, T);
    TruncSeries got = phipoly_to_series(F, T);
    rep.certified = series_equal(got, want);
    if (!rep.certified) rep.failure = "certification failed at order " + std::to_string(T);
  }
  return rep;
}

// -------------------------------------------------------------- base search

BaseWindow default_window(const FunctionalEquation& eq, unsigned alpha) {
  Context c = eq.context(1);
  return {-2 * eq.scaleD, i64(ipow(c.q, alpha + 1)) * eq.scaleD};
}

std::optional<PhiPoly> find_base(const FunctionalEquation& eq, unsigned alpha, std::optional<BaseWindow> window) {
  const Context c1 = eq.context(1);
  const BaseWindow W = window.value_or(default_window(eq, alpha));
  if (W.hi < W.lo) return std::nullopt;
  const std::size_t q = std::size_t(c1.q);
  const i64 width = W.hi - W.lo + 1;
  const i64 T = std::max<i64>(4 * width, W.hi + i64(q * q * q) * eq.scaleD) + 64;

  TruncSeries S;
  try {
    S = series_solution_any(eq, c1, T);
  } catch (const Error&) {
    return std::nullopt;
  }
  // Phi^i truncated far enough for every shift in the window
  const i64 L = T - W.lo;
  std::vector<TruncSeries> pw;
  TruncSeries one(c1, 0, L);
  one.set(0, 1);
  pw.push_back(one);
  TruncSeries phi = phi_series(c1, L);
  for (std::size_t i = 1; i < q; ++i) pw.push_back(pw.back() * phi);

  const std::size_t rows = std::size_t(T - W.lo), cols = q * std::size_t(width);
  Fp F{c1.p};
  std::vector<std::vector<u64>> A(rows, std::vector<u64>(cols + 1, 0));
  for (std::size_t i = 0; i < q; ++i)
    for (i64 e = W.lo; e <= W.hi; ++e) {
      std::size_t col = i * std::size_t(width) + std::size_t(e - W.lo);
      for (i64 r = W.lo; r < T; ++r) {
        u64 v = pw[i].get(r - e);
        if (v) A[std::size_t(r - W.lo)][col] = v;
      }
    }
  for (i64 r = W.lo; r < T; ++r) A[std::size_t(r - W.lo)][cols] = S.get(r);

  std::vector<std::size_t> pivcol;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t piv = rows;
    for (std::size_t r = row; r < rows; ++r)
      if (A[r][col]) {
        piv = r;
        break;
      }
    if (piv == rows) continue;
    std::swap(A[piv], A[row]);
    u64 iv = F.inv(A[row][col]);
    for (std::size_t j = col; j <= cols; ++j) A[row][j] = F.mul(A[row][j], iv);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || !A[r][col]) continue;
      u64 f = A[r][col];
      for (std::size_t j = col; j <= cols; ++j)
        if (A[row][j]) A[r][j] = F.sub(A[r][j], F.mul(f, A[row][j]));
    }
    pivcol.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < rows; ++r)
    if (A[r][cols]) return std::nullopt;

  std::vector<std::vector<LaurentPoly::Term>> terms(q);
  for (std::size_t r = 0; r < pivcol.size(); ++r) {
    u64 v = A[r][cols];
    if (!v) continue;
    std::size_t col = pivcol[r];
    terms[col / std::size_t(width)].push_back({W.lo + i64(col % std::size_t(width)), v});
  }

  // substitute Phi -> Phi^(q^alpha) + s_alpha(w)
  PhiPoly X(c1, alpha);
  {
    std::vector<LaurentPoly> xc(std::size_t(ipow(c1.q, alpha)) + 1, LaurentPoly(c1));
    xc.back() = LaurentPoly::constant(c1, 1);
    xc[0] = frobenius_sum_w(c1, alpha);
    X = PhiPoly(c1, alpha, xc);
  }
  PhiPoly acc(c1, alpha), pwX = PhiPoly::constant(c1, alpha, LaurentPoly::constant(c1, 1));
  for (std::size_t i = 0; i < q; ++i) {
    if (i) pwX = pwX * X;
    LaurentPoly a = LaurentPoly::from_terms(c1, terms[i]);
    if (!a.is_zero()) acc = acc + pwX.scale(a);
  }
  acc = phi_reduce(acc);
  if (!verify_base(eq, acc)) return std::nullopt;
  return acc;
}

}  // namespace phimod
