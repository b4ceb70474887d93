#include "phimod/minpoly.hpp"

#include <map>

#include "phimod/phipoly.hpp"

namespace phimod {

namespace {

HCombo leaf_at_phi(const BivarPoly& A, const Context& ctx) {
  HCombo acc(ctx);
  for (auto& [k, c] : A.monomials()) {
    auto [a, b] = k;
    unsigned v = vp(c, ctx.p);
    if (v >= ctx.gamma) continue;
    u64 cr = ctx.reduce(c);
    LaurentPoly za = LaurentPoly::monomial(ctx, a * ctx.scaleD, cr);
    if (b == 0) {
      acc.add_free(za);
      continue;
    }
    // c * Phi^b only needs Phi^b modulo p^(gamma - v_p(c))
    const HCombo& pb = phi_power_hcombo(ctx.with_gamma(ctx.gamma - v), unsigned(b));
    acc = acc + pb.recast(ctx).scale(za);
  }
  return acc;
}

}  // namespace

HCombo evaluate_at_phi(const PolyExpr& A, const Context& ctx) {
  switch (A.kind) {
    case PolyExpr::Kind::Leaf:
      return leaf_at_phi(A.leaf, ctx);
    case PolyExpr::Kind::Sum: {
      HCombo r(ctx);
      for (auto& k : A.kids) r = r + evaluate_at_phi(k, ctx);
      return r;
    }
    case PolyExpr::Kind::Product: {
      HCombo r = evaluate_at_phi(A.kids[0], ctx);
      for (std::size_t i = 1; i < A.kids.size(); ++i) {
        if (r.is_zero()) break;
        r = multiply(r, evaluate_at_phi(A.kids[i], ctx));
      }
      return r;
    }
    case PolyExpr::Kind::Power:
      return power(evaluate_at_phi(A.kids[0], ctx), A.exponent);
  }
  return HCombo(ctx);
}

bool verify_vanishing(const PolyExpr& A, u64 p, unsigned gamma) {
  return evaluate_at_phi(A, Context::make(p, gamma)).is_zero();
}

bool verify_vanishing(const BivarPoly& A, u64 p, unsigned gamma) {
  return verify_vanishing(PolyExpr::make_leaf(A), p, gamma);
}

bool vanishes_to_order(const BivarPoly& A, u64 p, unsigned gamma, i64 T) {
  Context ctx = Context::make(p, gamma);
  std::vector<LaurentPoly> co(A.degree_y() + 1, LaurentPoly(ctx));
  for (auto& [k, c] : A.monomials()) co[k.second] += LaurentPoly::monomial(ctx, k.first, ctx.reduce(c));
  // alpha only matters for reduction, which is not used here
  PhiPoly P(ctx, 0, co);
  return phipoly_to_series(P, T).is_zero();
}

u64 degree_lower_bound(u64 p, unsigned gamma) {
  if (gamma < 1) throw Error("gamma must be at least 1");
  u64 d = 1;
  while (vp_factorial(d, p) < gamma) ++d;
  if (d % p) throw Error("internal: degree bound not divisible by p");
  return d;
}

unsigned family_gamma(u64 p, unsigned delta) { return unsigned((ipow(p, delta) - 1) / (p - 1)); }

PolyExpr compose_min_poly(const std::vector<PolyExpr>& family, u64 p, unsigned gamma) {
  u64 d = degree_lower_bound(p, gamma);
  std::vector<PolyExpr> factors;
  unsigned pos = 0;
  for (u64 x = d; x; x /= p, ++pos) {
    u64 digit = x % p;
    if (!digit) continue;
    if (pos == 0) throw Error("internal: degree bound has a nonzero units digit");
    if (pos > family.size())
      throw Error("family does not cover gamma=" + std::to_string(gamma) + "; the level delta=" + std::to_string(pos) +
                  " member is needed");
    const PolyExpr& A = family[pos - 1];
    if (A.degree_y() != ipow(p, pos)) throw Error("family member " + std::to_string(pos) + " has the wrong t-degree");
    factors.push_back(digit == 1 ? A : PolyExpr::power(A, digit));
  }
  PolyExpr r = PolyExpr::product(factors);
  if (!verify_vanishing(r, p, gamma)) throw Error("composed polynomial does not vanish; family member not verified");
  return r;
}

SearchOutcome search_min_poly(const PolyExpr& A_prev, u64 p, unsigned slack) {
  SearchOutcome out;
  const u64 dprev = A_prev.degree_y();
  unsigned level = 0;
  for (u64 x = dprev; x > 1; x /= p) {
    if (x % p) throw Error("previous member must have t-degree a power of p");
    ++level;
  }
  if (dprev < p) throw Error("previous member must have t-degree at least p");
  const unsigned delta = level + 1;
  out.delta = delta;
  const unsigned g_prev = family_gamma(p, delta - 1), g = family_gamma(p, delta);
  const unsigned s = g - 1;  // (p^delta - p)/(p - 1)
  if (!verify_vanishing(A_prev, p, g_prev))
    throw Error("precondition: previous member does not vanish modulo p^" + std::to_string(g_prev));

  Context ctx = Context::make(p, g), c1 = Context::make(p, 1);
  PolyExpr Ap = PolyExpr::power(A_prev, p);
  HCombo E = evaluate_at_phi(Ap, ctx);
  const u64 ps = ipow(p, s);

  // unknown x_{a,b} multiplies z^a t^b, b < p^delta, a <= zdeg(A_prev^p) + slack
  const i64 amax = Ap.expand().max_x() + i64(slack);
  const u64 bmax = ipow(p, delta);
  std::vector<std::pair<i64, u64>> unknowns;
  for (u64 b = 0; b < bmax; ++b)
    for (i64 a = 0; a <= amax; ++a) unknowns.push_back({a, b});
  out.unknowns = unknowns.size();

  // rows: (composition or free, w-exponent)
  using RowKey = std::pair<Composition, i64>;
  std::map<RowKey, std::size_t> rowid;
  auto row_of = [&](const Composition& c, i64 e) {
    auto [it, fresh] = rowid.try_emplace({c, e}, rowid.size());
    return it->second;
  };
  std::vector<std::map<std::size_t, u64>> cols(unknowns.size());
  std::map<std::size_t, u64> rhs;

  auto scatter = [&](const HCombo& h, std::map<std::size_t, u64>& dst, bool divide) {
    auto put = [&](const Composition& c, const LaurentPoly& a) {
      for (auto& [e, v] : a.terms()) {
        u64 x = v;
        if (divide) {
          if (x % ps) throw Error("precondition: A_prev^p does not vanish modulo p^" + std::to_string(s));
          x = (x / ps) % p;
        } else {
          x %= p;
        }
        if (x) dst[row_of(c, e)] = x;
      }
    };
    put({}, h.free());
    for (auto& [c, a] : h.terms()) put(c, a);
  };
  scatter(E, rhs, true);
  for (std::size_t j = 0; j < unknowns.size(); ++j) {
    auto [a, b] = unknowns[j];
    HCombo h = leaf_at_phi(BivarPoly::monomial(1, a, b), c1);
    scatter(h, cols[j], false);
  }
  const std::size_t R = rowid.size(), C = unknowns.size();
  out.equations = R;

  // dense elimination of [cols | -rhs] over F_p
  auto mul = [&](u64 x, u64 y) { return u64((u128)x * y % p); };
  auto inv = [&](u64 x) {
    u64 r = 1, e = p - 2;
    while (e) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  };
  std::vector<std::vector<u64>> M(R, std::vector<u64>(C + 1, 0));
  for (std::size_t j = 0; j < C; ++j)
    for (auto& [r, v] : cols[j]) M[r][j] = v;
  for (auto& [r, v] : rhs) M[r][C] = (p - v) % p;
  std::vector<std::size_t> piv;
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    std::size_t pr = R;
    for (std::size_t r = row; r < R; ++r)
      if (M[r][col]) {
        pr = r;
        break;
      }
    if (pr == R) continue;
    std::swap(M[pr], M[row]);
    u64 iv = inv(M[row][col]);
    for (std::size_t j = col; j <= C; ++j) M[row][j] = mul(M[row][j], iv);
    for (std::size_t r = 0; r < R; ++r) {
      if (r == row || !M[r][col]) continue;
      u64 f = M[r][col];
      for (std::size_t j = col; j <= C; ++j)
        if (M[row][j]) M[r][j] = (M[r][j] + p - mul(f, M[row][j])) % p;
    }
    piv.push_back(col);
    ++row;
  }
  out.rank = row;
  for (std::size_t r = row; r < R; ++r)
    if (M[r][C]) return out;  // inconsistent: evidence against the conjectured degree

  BivarPoly X;
  for (std::size_t r = 0; r < piv.size(); ++r) {
    u64 v = M[r][C];
    if (!v) continue;
    Int c(std::to_string(v > p / 2 ? i64(v) - i64(p) : i64(v)));
    X.add(unknowns[piv[r]].first, unknowns[piv[r]].second, c * Int(std::to_string(ps)));
  }
  PolyExpr cand = X.is_zero() ? Ap : PolyExpr::sum({Ap, PolyExpr::make_leaf(X)});
  if (!verify_vanishing(cand, p, g)) throw Error("internal: searched polynomial failed verification");
  out.poly = cand;
  return out;
}

}  // namespace phimod
