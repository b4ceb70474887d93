#include "phimod/applications.hpp"

#include <algorithm>
#include <memory>
#include <sstream>
#include <thread>

namespace phimod {

namespace {

using IntSeries = std::vector<Int>;

IntSeries mul_trunc(const IntSeries& a, const IntSeries& b, std::size_t T) {
  IntSeries r(T, 0);
  for (std::size_t i = 0; i < a.size() && i < T; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < T; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

LaurentPoly mono(const Context& c, i64 e, i64 v) { return LaurentPoly::monomial(c, e, c.reduce(v)); }

// coefficient vector with a[Q] = 1, a[0] = s
std::vector<LaurentPoly> linear_in(const Context& c, std::size_t Q, const LaurentPoly& s) {
  std::vector<LaurentPoly> a(Q + 1, LaurentPoly(c));
  a[0] = s;
  a[Q] = a[Q] + LaurentPoly::constant(c, 1);
  return a;
}

PhiPoly frob_linear(const Context& c1, unsigned alpha) {
  std::size_t Q = std::size_t(ipow(c1.q, alpha));
  return PhiPoly(c1, alpha, linear_in(c1, Q, frobenius_sum_w(c1, alpha)));
}

FunctionalEquation from_bivar(const BivarPoly& P, u64 p, i64 D, unsigned h, std::vector<Int> init, std::string name) {
  FunctionalEquation eq;
  eq.name = std::move(name);
  eq.p = p;
  eq.scaleD = D;
  eq.stepH = h;
  eq.initial = std::move(init);
  for (auto& [k, c] : P.monomials()) eq.monos.push_back({c, k.first * D, k.second});
  return eq;
}

void require_p3(const std::string& name, u64 p) {
  if (p != 3) throw Error("builtin " + name + " is defined for p=3 only");
}

std::vector<Int> head(const std::string& oracle, std::size_t n, const BuiltinParams& bp) {
  return oracle_terms(oracle, n - 1, bp);
}

const char* kGessel[5] = {"(1 - 108*z^2)*F^3 - 3*F + 2", "(1 - 108*z^2)*F^3 - (1 + 9*z)*F + z",
                          "(1 - 108*z^2)*F^3 - (1 + 9*z)*F - z",
                          "(1 - 108*z^2)*F^3 + (1 - 108*z^2)*F^2 + 3*z*(1 - 12*z)*F - 4*z^2",
                          "(1 - 108*z^2)*F^3 - F - 8*z"};

}  // namespace

std::vector<std::string> builtin_names() {
  return {"noncrossing", "kreweras",  "fusscatalan", "blossom",  "gessel_f1",
          "gessel_f2",   "gessel_f3", "gessel_f4",   "gessel_f5"};
}

BivarPoly blossom_polynomial(u64 k) {
  if (k < 3 || k % 2 == 0) throw Error("blossom trees need an odd k >= 3");
  const Int K(std::to_string(k));
  const Int half = (K - 1) / 2;  // exact, k odd
  BivarPoly P = BivarPoly::monomial(1, 2, k);
  for (u64 s = 0; s <= (k + 1) / 2; ++s) {
    Int kp = 1, hp = 1;
    for (u64 i = 0; i < k - 2 * s + 1; ++i) kp *= K;
    for (u64 i = 0; i < s; ++i) hp *= half;
    mpq_class c(Int(K + 1) * binomial(i64(k - s + 1), i64(s)) * kp * hp, Int((k - s + 1) * (k - s)));
    c.canonicalize();
    if (c.get_den() != 1) throw Error("internal: blossom coefficient not integral at s=" + std::to_string(s));
    Int ci = c.get_num();
    if (s % 2) ci = -ci;
    P.add(1, s, ci);
  }
  // (-1)^k = -1 for odd k
  Int hk = 1;
  for (u64 i = 0; i + 1 < k; ++i) hk *= half;
  P.add(0, 1, hk);
  P.add(0, 0, -((K + 1) / 2) * hk);
  return P;
}

Builtin builtin(const std::string& name, const BuiltinParams& bp) {
  Builtin b;
  if (name == "noncrossing" || name == "gessel_f4") {
    u64 p = bp.p ? bp.p : 3;
    require_p3(name, p);
    if (name == "noncrossing") {
      b.eq = parse_equation("F^3 + F^2 - 3*z*F + 2*z^2", p, 1, 1, {0, 1}, name);
      b.oracle = "noncrossing";
    } else {
      b.eq = parse_equation(kGessel[3], p, 1, 1, head("gessel_f4", 4, bp), name);
      b.oracle = "gessel_f4";
    }
    b.base = [c1 = b.eq.context(1)](unsigned alpha) {
      LaurentPoly s = frobenius_sum_w(c1, alpha);
      std::size_t Q = std::size_t(ipow(3, alpha));
      std::vector<LaurentPoly> a(2 * Q + 1, LaurentPoly(c1));
      a[0] = s * s + s;
      a[Q] = LaurentPoly::constant(c1, 1) - s;
      a[2 * Q] = LaurentPoly::constant(c1, 1);
      return PhiPoly(c1, alpha, a);
    };
  } else if (name == "kreweras") {
    u64 p = bp.p ? bp.p : 3;
    require_p3(name, p);
    b.eq = parse_equation("64*z^2*F^3 + 16*z*F^2 - (72*z - 1)*F + 54*z - 1", p, 2, 1, {1}, name);
    b.oracle = "kreweras";
    b.base = [c1 = b.eq.context(1)](unsigned alpha) {
      PhiPoly X = frob_linear(c1, alpha);
      return (X * X).scale(mono(c1, -2, 1));
    };
  } else if (name == "fusscatalan") {
    u64 p = bp.p ? bp.p : 3;
    if (!is_prime(p)) throw Error("p must be prime");
    if (bp.h < 1) throw Error("h must be positive");
    u64 q = ipow(p, bp.h);
    b.eq = parse_equation("z*F^" + std::to_string(q) + " - F + 1", p, i64(q - 1), bp.h, {1}, name);
    b.oracle = "fusscatalan";
    b.base = [c1 = b.eq.context(1)](unsigned alpha) { return frob_linear(c1, alpha).scale(mono(c1, -1, 1)); };
  } else if (name == "blossom") {
    u64 p = bp.p ? bp.p : 3;
    if (!is_prime(p) || p == 2) throw Error("blossom trees need an odd prime p");
    u64 k = bp.k ? bp.k : p;
    if (k % 2 == 0) throw Error("blossom trees are defined for odd k only");
    if (k % p == 1) throw Error("blossom equation does not determine the series when k = 1 mod p");
    b.eq = from_bivar(blossom_polynomial(k), p, i64(p - 1), 1, {Int(std::to_string((k + 1) / 2))}, name);
    b.oracle = "blossom";
    b.base = [c1 = b.eq.context(1), k, p](unsigned alpha) {
      if (k != p) throw Error("no closed-form base for blossom with k != p; use find_base");
      PhiPoly X = frob_linear(c1, alpha);
      return (X * X).scale(mono(c1, -2, i64((p + 1) / 2)));
    };
  } else if (name.rfind("gessel_f", 0) == 0 && name.size() == 9 && name[8] >= '1' && name[8] <= '5') {
    u64 p = bp.p ? bp.p : 3;
    require_p3(name, p);
    int i = name[8] - '1';
    b.eq = parse_equation(kGessel[i], p, 1, 1, head(name, 4, bp), name);
    b.oracle = name;
    b.base = [c1 = b.eq.context(1), i](unsigned alpha) {
      PhiPoly one = PhiPoly::constant(c1, alpha, LaurentPoly::constant(c1, 1));
      switch (i) {
        case 0: return one;
        case 1: return frob_linear(c1, alpha);
        case 2: return one - frob_linear(c1, alpha);
        default: return frob_linear(c1, alpha) + one;
      }
    };
  } else {
    throw Error("unknown builtin '" + name + "'");
  }
  return b;
}

// ------------------------------------------------------------------ oracles

Int noncrossing_sum(u64 n) {
  if (n == 0) return 0;
  if (n == 1) return 1;
  const i64 m = i64(n);
  Int s = 0;
  for (i64 i = m - 2; i <= 2 * m - 4; ++i) s += binomial(3 * m - 3, m + i + 1) * binomial(i, m - 2);
  if (!mpz_divisible_ui_p(s.get_mpz_t(), n - 1)) throw Error("internal: N_n sum not divisible by n-1");
  return s / Int(std::to_string(n - 1));
}

Int kreweras_number(u64 n) {
  const i64 m = i64(n);
  Int num = binomial(3 * m, m);
  mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), 2 * n);
  Int den = Int(std::to_string(n + 1)) * Int(std::to_string(2 * n + 1));
  if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t())) throw Error("internal: K_n not integral");
  return num / den;
}

Int fuss_catalan(u64 n, u64 k) {
  if (n == 0) throw Error("F(n;k) needs n >= 1");
  Int c = binomial(i64(k * n), i64(n - 1));
  if (!mpz_divisible_ui_p(c.get_mpz_t(), n)) throw Error("internal: F(n;k) not integral");
  return c / Int(std::to_string(n));
}

Int blossom_number(u64 n, u64 k) {
  if (n == 0) return Int(std::to_string((k + 1) / 2));
  Int num = Int(std::to_string(k + 1)) * binomial(i64(k * n), i64(n - 1));
  Int den = Int(std::to_string(n)) * Int(std::to_string((k - 1) * n + 2));
  if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t())) throw Error("internal: B(n;k) not integral");
  return num / den;
}

Int gessel_h(i64 j, i64 k, i64 l, u64 n) {
  // binomials vanish outside 0 <= b <= a, except C(m, m) = 1 for every m
  auto C = [](i64 a, i64 b) -> Int { return a == b ? Int(1) : binomial(a, b); };
  const i64 m = i64(n);
  Int s = 0;
  for (i64 i = m - l; i <= 2 * m + j - k; ++i) s += C(3 * m + j, m + i + k) * C(i, m - l);
  return s;
}

SequenceOracle make_oracle(const std::string& name, const BuiltinParams& bp) {
  SequenceOracle o;
  o.name = name;
  if (name == "noncrossing") {
    o.provenance = "series recursion (integer)";
    auto cache = std::make_shared<std::vector<Int>>();
    auto eq = std::make_shared<FunctionalEquation>(builtin("noncrossing").eq);
    o.term = [cache, eq](u64 n) {
      if (n >= cache->size()) *cache = series_solution_exact(*eq, i64(std::max<u64>(2 * n + 2, 64)));
      return (*cache)[n];
    };
  } else if (name == "noncrossing_sum") {
    o.provenance = "closed form (binomial sum)";
    o.term = noncrossing_sum;
  } else if (name == "kreweras") {
    o.provenance = "closed form";
    o.term = kreweras_number;
  } else if (name == "fusscatalan" || name == "fusscatalan_T") {
    u64 k = ipow(bp.p ? bp.p : 3, bp.h);
    bool with_one = name == "fusscatalan";
    o.provenance = "closed form";
    o.term = [k, with_one](u64 n) { return n == 0 ? Int(with_one ? 1 : 0) : fuss_catalan(n, k); };
  } else if (name == "blossom") {
    u64 k = bp.k ? bp.k : (bp.p ? bp.p : 3);
    o.provenance = "closed form";
    o.term = [k](u64 n) { return blossom_number(n, k); };
  } else if (name.rfind("gessel_f", 0) == 0 && name.size() == 9) {
    static const i64 jkl[5][3] = {{1, 1, 0}, {0, 1, 0}, {0, 0, 0}, {-1, 1, 1}, {0, 1, 1}};
    int i = name[8] - '1';
    if (i < 0 || i > 4) throw Error("unknown oracle '" + name + "'");
    const i64 j = jkl[i][0], k = jkl[i][1], l = jkl[i][2];
    const i64 start = k - j - l;
    o.provenance = "closed form (binomial sum)";
    o.term = [j, k, l, start, i](u64 n) {
      if (i64(n) < start) return Int(0);
      Int v = gessel_h(j, k, l, n);
      // the printed f2 equation is solved by sum (-1)^(n-1) f2(n) z^n
      if (i == 1 && n % 2 == 0) v = -v;
      return v;
    };
  } else {
    throw Error("unknown oracle '" + name + "'");
  }
  return o;
}

std::vector<Int> oracle_terms(const std::string& name, u64 N, const BuiltinParams& bp) {
  if (name == "noncrossing") return series_solution_exact(builtin("noncrossing").eq, i64(N + 1));
  SequenceOracle o = make_oracle(name, bp);
  std::vector<Int> r;
  r.reserve(N + 1);
  for (u64 n = 0; n <= N; ++n) r.push_back(o.term(n));
  return r;
}

// --------------------------------------------------------- displayed forms

namespace {

LaurentPoly lp(const Context& c, std::initializer_list<std::pair<i64, i64>> t) {
  std::vector<LaurentPoly::Term> r;
  for (auto& [e, v] : t) r.push_back({e, c.reduce(v)});
  return LaurentPoly::from_terms(c, r);
}

}  // namespace

PhiPoly noncrossing_mod27() {
  Context c = Context::make(3, 3);
  return PhiPoly(c, 1,
                 {lp(c, {{3, 18}, {2, 1}, {1, 1}}), lp(c, {{3, 18}, {2, 12}}), lp(c, {{2, 3}, {1, 15}}),
                  lp(c, {{2, 9}, {1, 5}, {0, 13}}), lp(c, {{2, 9}, {1, 6}, {0, 24}}), lp(c, {{1, 15}, {0, 6}}),
                  lp(c, {{1, 18}, {0, 4}}), lp(c, {{1, 18}, {0, 21}}), lp(c, {{0, 12}})});
}

PhiPoly kreweras_mod27() {
  Context c = Context::make(3, 3, 2);
  std::vector<LaurentPoly> a(9, LaurentPoly(c));
  a[0] = lp(c, {{0, 1}});
  a[2] = lp(c, {{0, 12}});
  a[3] = lp(c, {{-1, 11}});
  a[4] = lp(c, {{-2, 6}});
  a[5] = lp(c, {{-1, 15}});
  a[6] = lp(c, {{-2, 1}});
  a[8] = lp(c, {{-2, 3}});
  return PhiPoly(c, 1, a);
}

PhiPoly fusscatalan_mod_p2(u64 p) {
  Context c = Context::make(p, 2, i64(p - 1));
  std::vector<LaurentPoly> a(p + 1, LaurentPoly(c));
  a[p] = lp(c, {{-1, 1}});
  return PhiPoly(c, 1, a);
}

PhiPoly blossom_mod_p2(u64 p) {
  if (p % 2 == 0) throw Error("blossom needs an odd prime");
  Context c = Context::make(p, 2, i64(p - 1));
  std::vector<LaurentPoly> a(p + 2, LaurentPoly(c));
  a[1] = lp(c, {{-1, i64(p + 1)}});
  a[2] = lp(c, {{-2, -i64((p + 1) / 2)}});
  a[p + 1] = lp(c, {{-2, 1}});
  return PhiPoly(c, 1, a);
}

// ----------------------------------------------------------- classification

std::vector<Int> ResidueTable::select(u64 r) const {
  std::vector<Int> out;
  for (std::size_t i = 0; i < n.size(); ++i)
    if (residue[i] == r) out.push_back(n[i]);
  return out;
}

std::string ResidueTable::to_csv() const {
  std::ostringstream os;
  os << "n,residue\n";
  for (std::size_t i = 0; i < n.size(); ++i) os << n[i].get_str() << ',' << residue[i] << '\n';
  return os.str();
}

nlohmann::json ResidueTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < n.size(); ++i) {
    nlohmann::json idx = n[i].fits_ulong_p() ? nlohmann::json(n[i].get_ui()) : nlohmann::json(n[i].get_str());
    rows.push_back({idx, residue[i]});
  }
  return {{"modulus", modulus}, {"source", source}, {"rows", rows}};
}

namespace {

void check_modulus(const PhiPoly& s, u64 modulus) {
  if (modulus < 2 || s.ctx().modulus % modulus) throw Error("modulus must divide the solution's modulus");
}

}  // namespace

namespace {

// Residues of z^0..z^N. The truncated series is cheap for a dense range; the
// H-basis route costs one extraction per n but no memory in N.
std::vector<u64> dense_residues(const PhiPoly& solution, u64 N, u64 modulus, unsigned threads, Route route) {
  const i64 D = solution.ctx().scaleD;
  if (route == Route::Auto) route = (N + 1) * u64(D) <= (u64(1) << 22) ? Route::Series : Route::Extract;
  std::vector<u64> res(N + 1);
  if (route == Route::Series) {
    TruncSeries s = phipoly_to_series(solution, i64(N + 1) * D);
    for (u64 n = 0; n <= N; ++n) res[n] = s.get(i64(n) * D) % modulus;
    return res;
  }
  Extractor ex(solution);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<u64>(threads, N + 1));
  auto work = [&](unsigned id) {
    for (u64 n = id; n <= N; n += threads) res[n] = ex.coeff_z(i64(n)) % modulus;
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work, i);
    for (auto& th : pool) th.join();
  }
  return res;
}

}  // namespace

ResidueTable classify(const PhiPoly& solution, u64 N, u64 modulus, unsigned threads, Route route) {
  check_modulus(solution, modulus);
  ResidueTable t;
  t.modulus = modulus;
  t.source = "phipoly";
  t.residue = dense_residues(solution, N, modulus, threads, route);
  t.n.reserve(N + 1);
  for (u64 n = 0; n <= N; ++n) t.n.push_back(Int(std::to_string(n)));
  return t;
}

ResidueTable classify(const PhiPoly& solution, const std::vector<Int>& ns, u64 modulus) {
  check_modulus(solution, modulus);
  Extractor ex(solution);
  ResidueTable t;
  t.modulus = modulus;
  t.source = "phipoly";
  t.n = ns;
  for (auto& n : ns) t.residue.push_back(ex.coeff_z(n) % modulus);
  return t;
}

ResidueTable classify(const std::vector<Int>& terms, u64 modulus) {
  ResidueTable t;
  t.modulus = modulus;
  t.source = "oracle";
  const Int m(std::to_string(modulus));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Int r = terms[i] % m;
    if (r < 0) r += m;
    t.n.push_back(Int(std::to_string(i)));
    t.residue.push_back(r.get_ui());
  }
  return t;
}

nlohmann::json OracleCheck::to_json() const {
  nlohmann::json j = {{"ok", ok}};
  if (mismatch) j["mismatch"] = {{"n", *mismatch}, {"got", got}, {"want", want}};
  return j;
}

OracleCheck verify_against_oracle(const PhiPoly& solution, const SequenceOracle& oracle, u64 N, u64 modulus,
                                  u64 n_from, Route route) {
  check_modulus(solution, modulus);
  const std::vector<u64> res = dense_residues(solution, N, modulus, 1, route);
  const Int m(std::to_string(modulus));
  OracleCheck r;
  for (u64 n = n_from; n <= N; ++n) {
    u64 got = res[n];
    Int w = oracle.term(n) % m;
    if (w < 0) w += m;
    if (got != w.get_ui()) {
      r.ok = false;
      r.mismatch = n;
      r.got = got;
      r.want = w.get_ui();
      return r;
    }
  }
  return r;
}

// ----------------------------------------------------------------- appendix

AppendixCheck verify_appendix(u64 k, i64 T) {
  if (k < 3 || k % 2 == 0) throw Error("verify_appendix needs an odd k >= 3");
  if (T < 1) throw Error("order must be positive");
  const std::size_t n = std::size_t(T);
  AppendixCheck r;

  // T_k = z (1 + T_k)^k; each pass fixes one more coefficient
  IntSeries t(n, 0);
  for (std::size_t it = 0; it < n; ++it) {
    IntSeries one_t = t;
    one_t[0] += 1;
    IntSeries pw(n, 0);
    pw[0] = 1;
    for (u64 i = 0; i < k; ++i) pw = mul_trunc(pw, one_t, n);
    IntSeries next(n, 0);
    for (std::size_t i = 1; i < n; ++i) next[i] = pw[i - 1];
    t = next;
  }
  r.fuss = true;
  for (std::size_t i = 1; i < n; ++i)
    if (t[i] != fuss_catalan(i, k)) r.fuss = false;

  // closed form: B = (1 + T)(k - (k-1)/2 (1 + T))
  IntSeries X = t;
  X[0] += 1;
  const Int K(std::to_string(k)), half((k - 1) / 2);
  IntSeries Y(n);
  for (std::size_t i = 0; i < n; ++i) Y[i] = -half * X[i];
  Y[0] += K;
  IntSeries B = mul_trunc(X, Y, n);
  r.lemma = true;
  for (std::size_t i = 0; i < n; ++i)
    if (B[i] != blossom_number(i, k)) r.lemma = false;

  // the blossom equation evaluated at B, exactly
  BivarPoly P = blossom_polynomial(k);
  std::vector<IntSeries> pw{IntSeries(n, 0)};
  pw[0][0] = 1;
  for (u64 m = 1; m <= P.degree_y(); ++m) pw.push_back(mul_trunc(pw.back(), B, n));
  IntSeries R(n, 0);
  for (auto& [key, c] : P.monomials()) {
    auto [a, m] = key;
    for (std::size_t i = 0; i + std::size_t(a) < n; ++i) R[i + std::size_t(a)] += c * pw[m][i];
  }
  r.equation = std::all_of(R.begin(), R.end(), [](const Int& v) { return v == 0; });
  return r;
}

}  // namespace phimod
