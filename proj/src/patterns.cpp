#include "phimod/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace phimod {

struct PatternExpr {
  enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg };
  Op op = Op::Num;
  Int num;
  std::size_t var = 0;
  std::shared_ptr<const PatternExpr> a, b;
};

namespace {

using ExprP = std::shared_ptr<const PatternExpr>;

ExprP node(PatternExpr::Op op, ExprP a, ExprP b = nullptr) {
  auto e = std::make_shared<PatternExpr>();
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

struct Parser {
  const std::string& s;
  std::size_t i = 0;
  u64 p;
  std::vector<std::string>& vars;
  Int literal_sum = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw Error("pattern parse error at position " + std::to_string(i) + " in '" + s + "': " + why);
  }
  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  ExprP sum() {
    ExprP l = prod();
    for (;;) {
      if (eat('+'))
        l = node(PatternExpr::Op::Add, l, prod());
      else if (peek_minus())
        l = node(PatternExpr::Op::Sub, l, prod());
      else
        return l;
    }
  }
  bool peek_minus() {
    ws();
    // "-" but not the start of a comparison like ">=" (never begins with '-')
    if (i < s.size() && s[i] == '-') {
      ++i;
      return true;
    }
    return false;
  }
  ExprP prod() {
    ExprP l = unary();
    for (;;) {
      if (eat('*'))
        l = node(PatternExpr::Op::Mul, l, unary());
      else if (eat('/'))
        l = node(PatternExpr::Op::Div, l, unary());
      else
        return l;
    }
  }
  ExprP unary() {
    if (eat('-')) return node(PatternExpr::Op::Neg, unary());
    ExprP base = atom();
    if (eat('^')) return node(PatternExpr::Op::Pow, base, unary());
    return base;
  }
  ExprP atom() {
    ws();
    if (i >= s.size()) fail("unexpected end");
    if (eat('(')) {
      ExprP e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (eat('{')) {  // tolerate TeX-style grouping in exponents
      ExprP e = sum();
      if (!eat('}')) fail("expected '}'");
      return e;
    }
    auto e = std::make_shared<PatternExpr>();
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      e->num = Int(s.substr(i, j - i));
      literal_sum += e->num;
      i = j;
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(s[i]))) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      std::string name = s.substr(i, j - i);
      i = j;
      if (name == "p") {
        e->num = Int(std::to_string(p));
        literal_sum += e->num;
        return e;
      }
      if (name == "n") fail("'n' is reserved");
      auto it = std::find(vars.begin(), vars.end(), name);
      e->op = PatternExpr::Op::Var;
      e->var = std::size_t(it - vars.begin());
      if (it == vars.end()) vars.push_back(name);
      return e;
    }
    fail(std::string("unexpected character '") + s[i] + "'");
  }
};

std::optional<Int> eval(const PatternExpr& e, const std::vector<i64>& v) {
  using Op = PatternExpr::Op;
  switch (e.op) {
    case Op::Num:
      return e.num;
    case Op::Var:
      return Int(std::to_string(v[e.var]));
    case Op::Neg: {
      auto a = eval(*e.a, v);
      if (!a) return a;
      return Int(-*a);
    }
    default:
      break;
  }
  auto a = eval(*e.a, v), b = eval(*e.b, v);
  if (!a || !b) return std::nullopt;
  switch (e.op) {
    case Op::Add:
      return Int(*a + *b);
    case Op::Sub:
      return Int(*a - *b);
    case Op::Mul:
      return Int(*a * *b);
    case Op::Div:
      if (*b == 0 || !mpz_divisible_p(a->get_mpz_t(), b->get_mpz_t())) return std::nullopt;
      return Int(*a / *b);
    case Op::Pow: {
      if (*b < 0 || !b->fits_ulong_p() || *b > 4096) return std::nullopt;
      Int r;
      mpz_pow_ui(r.get_mpz_t(), a->get_mpz_t(), b->get_ui());
      return r;
    }
    default:
      return std::nullopt;
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Pattern::Pattern(const std::string& n_expr, const std::string& where, u64 p) : p_(p) {
  text_ = "n = " + n_expr + (where.empty() ? "" : " where " + where);
  Parser ps{n_expr, 0, p, vars_};
  expr_ = ps.sum();
  ps.ws();
  if (ps.i != n_expr.size()) ps.fail("trailing input");
  Int lits = ps.literal_sum;

  for (const std::string& clause : split(where, ',')) {
    if (clause.find_first_not_of(" \t") == std::string::npos) continue;
    // a chain a > b >= c ...
    std::vector<ExprP> terms;
    std::vector<bool> strict;
    std::size_t pos = 0;
    std::string rest = clause;
    while (true) {
      std::size_t k = rest.find('>', pos);
      std::string piece = rest.substr(0, k);
      Parser pp{piece, 0, p, vars_};
      terms.push_back(pp.sum());
      pp.ws();
      if (pp.i != piece.size()) pp.fail("trailing input in constraint");
      if (k == std::string::npos) break;
      bool ge = k + 1 < rest.size() && rest[k + 1] == '=';
      strict.push_back(!ge);
      rest = rest.substr(k + (ge ? 2 : 1));
    }
    if (terms.size() < 2) throw Error("constraint '" + clause + "' has no comparison");
    for (std::size_t t = 0; t + 1 < terms.size(); ++t) cmps_.push_back({terms[t], terms[t + 1], strict[t]});
  }
  scale_ = lits + 2;
}

std::vector<Int> Pattern::enumerate(const Int& N) const {
  std::set<Int> out;
  std::vector<i64> val(vars_.size(), 0);
  // every term c*b^i with b >= 2 is bounded by (N+1) times the literal mass
  Int bound = (N + 1) * scale_;
  i64 E = i64(mpz_sizeinbase(bound.get_mpz_t(), 2)) + 1;

  // constraints become checkable once their last variable is assigned
  std::vector<std::vector<std::size_t>> ready(vars_.size() + 1);
  std::function<std::size_t(const PatternExpr&)> maxvar = [&](const PatternExpr& e) -> std::size_t {
    if (e.op == PatternExpr::Op::Var) return e.var + 1;
    std::size_t m = 0;
    if (e.a) m = std::max(m, maxvar(*e.a));
    if (e.b) m = std::max(m, maxvar(*e.b));
    return m;
  };
  for (std::size_t c = 0; c < cmps_.size(); ++c)
    ready[std::max(maxvar(*cmps_[c].lhs), maxvar(*cmps_[c].rhs))].push_back(c);
  auto ok = [&](std::size_t level) {
    for (std::size_t c : ready[level]) {
      auto l = eval(*cmps_[c].lhs, val), r = eval(*cmps_[c].rhs, val);
      if (!l || !r) return false;
      if (cmps_[c].strict ? !(*l > *r) : !(*l >= *r)) return false;
    }
    return true;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == vars_.size()) {
      auto v = eval(*expr_, val);
      if (v && *v >= 0 && *v <= N) out.insert(*v);
      return;
    }
    for (i64 x = 0; x <= E; ++x) {
      val[k] = x;
      if (ok(k + 1)) rec(k + 1);
    }
  };
  if (ok(0)) rec(0);
  return {out.begin(), out.end()};
}

// ----------------------------------------------------------------- manifests

namespace {

Int eval_const(const std::string& s, u64 p) {
  std::vector<std::string> vars;
  Parser ps{s, 0, p, vars};
  ExprP e = ps.sum();
  ps.ws();
  if (ps.i != s.size()) ps.fail("trailing input");
  if (!vars.empty()) throw Error("constant expression '" + s + "' has variables");
  auto v = eval(*e, {});
  if (!v) throw Error("constant expression '" + s + "' is not an integer");
  return *v;
}

Int json_int(const nlohmann::json& j, u64 p) {
  if (j.is_number_integer()) return Int(std::to_string(j.get<i64>()));
  return eval_const(j.get<std::string>(), p);
}

u64 reduce_mod(const Int& v, u64 m) {
  Int mm(std::to_string(m));
  Int r = v % mm;
  if (r < 0) r += mm;
  return r.get_ui();
}

void compositions(u64 rem, u64 p, std::vector<unsigned>& cur, std::vector<std::vector<unsigned>>& out) {
  if (rem == 0) {
    out.push_back(cur);
    return;
  }
  for (u64 a = 1; a <= rem; ++a) {
    if (a % p == 0) continue;
    cur.push_back(unsigned(a));
    compositions(rem - a, p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<u64> manifest_primes(const nlohmann::json& j) {
  if (j.contains("primes")) return j["primes"].get<std::vector<u64>>();
  return {j.at("p").get<u64>()};
}

Manifest load_manifest(const nlohmann::json& j, u64 p) {
  auto primes = manifest_primes(j);
  if (std::find(primes.begin(), primes.end(), p) == primes.end())
    throw Error("manifest does not cover p=" + std::to_string(p));
  Manifest m;
  m.name = j.value("name", std::string());
  m.sequence = j.at("sequence").get<std::string>();
  m.p = p;
  Int mod = json_int(j.at("modulus"), p);
  if (mod < 2 || !mod.fits_ulong_p()) throw Error("bad manifest modulus");
  m.modulus = mod.get_ui();
  m.n_min = j.value("n_min", u64(0));
  if (j.contains("otherwise")) m.otherwise = reduce_mod(json_int(j["otherwise"], p), m.modulus);
  if (j.contains("never"))
    for (auto& v : j["never"]) m.never.push_back(v.get<u64>());
  for (auto& it : j.at("items")) {
    ManifestItem item;
    item.label = it.value("label", std::string());
    if (it.contains("multinomial")) {
      // n = (a_1 p^i_1 + ... + a_r p^i_r - minus)/divisor, sum a = total,
      // parts prime to p, r >= min_parts; residue total!/(a_1! ... a_r!)
      auto& mj = it["multinomial"];
      u64 total = json_int(mj.at("sum"), p).get_ui();
      std::string minus = mj.at("minus").is_string() ? mj["minus"].get<std::string>() : std::to_string(mj["minus"].get<i64>());
      std::string div = mj.at("divisor").is_string() ? mj["divisor"].get<std::string>() : std::to_string(mj["divisor"].get<i64>());
      std::size_t rmin = mj.value("min_parts", std::size_t(1));
      std::vector<std::vector<unsigned>> comps;
      std::vector<unsigned> cur;
      compositions(total, p, cur, comps);
      for (auto& a : comps) {
        if (a.size() < rmin) continue;
        std::string e = "(", w;
        for (std::size_t t = 0; t < a.size(); ++t) {
          std::string v = "i" + std::to_string(t + 1);
          e += (t ? "+" : "") + std::to_string(a[t]) + "*p^" + v;
          w += v + (t + 1 < a.size() ? ">" : ">=0");
        }
        e += "-(" + minus + "))/(" + div + ")";
        item.entries.push_back({Pattern(e, w, p), reduce_mod(multinomial(unsigned(total), a), m.modulus)});
      }
    } else {
      u64 r = reduce_mod(json_int(it.at("residue"), p), m.modulus);
      for (auto& pj : it.at("patterns")) {
        std::string n = pj.is_string() ? pj.get<std::string>()
                        : pj.at("n").is_string() ? pj["n"].get<std::string>()
                                                  : std::to_string(pj["n"].get<i64>());
        std::string w = pj.is_object() ? pj.value("where", std::string()) : std::string();
        item.entries.push_back({Pattern(n, w, p), r});
      }
    }
    m.items.push_back(std::move(item));
  }
  return m;
}

Manifest load_manifest_file(const std::string& path, u64 p) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("manifest " + path + ": " + e.what());
  }
  return load_manifest(j, p);
}

nlohmann::json ManifestReport::to_json() const {
  return {{"sound", sound}, {"never_ok", never_ok}, {"complete", complete}, {"generated", generated}, {"problems", problems}};
}

ManifestReport check_manifest(const Manifest& m, const std::vector<u64>& residues) {
  ManifestReport rep;
  if (residues.empty()) return rep;
  const u64 N = residues.size() - 1;
  const Int NN(std::to_string(N));
  auto note = [&](const std::string& s) {
    if (rep.problems.size() < 20) rep.problems.push_back(s);
  };
  std::map<u64, std::pair<u64, std::string>> claimed;  // n -> (residue, where from)
  for (auto& item : m.items)
    for (auto& e : item.entries)
      for (const Int& v : e.pattern.enumerate(NN)) {
        u64 n = v.get_ui();
        if (n < m.n_min) continue;
        ++rep.generated;
        auto [it, fresh] = claimed.try_emplace(n, e.residue, item.label);
        if (!fresh && it->second.first != e.residue) {
          rep.sound = false;
          note("n=" + std::to_string(n) + " claimed by " + it->second.second + " and " + item.label +
               " with different residues");
        }
        if (residues[n] % m.modulus != e.residue) {
          rep.sound = false;
          note(item.label + ": n=" + std::to_string(n) + " (" + e.pattern.text() + ") has residue " +
               std::to_string(residues[n] % m.modulus) + ", expected " + std::to_string(e.residue));
        }
      }
  for (u64 n = m.n_min; n <= N; ++n) {
    u64 r = residues[n] % m.modulus;
    if (std::find(m.never.begin(), m.never.end(), r) != m.never.end()) {
      rep.never_ok = false;
      note("n=" + std::to_string(n) + " has excluded residue " + std::to_string(r));
    }
    if (m.otherwise && !claimed.count(n) && r != *m.otherwise) {
      rep.complete = false;
      note("n=" + std::to_string(n) + " matches no item but has residue " + std::to_string(r));
    }
  }
  return rep;
}

}  // namespace phimod
