#include "phimod/polyexpr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace phimod {

BivarPoly BivarPoly::constant(const Int& c) { return monomial(c, 0, 0); }

BivarPoly BivarPoly::monomial(const Int& c, i64 a, u64 b) {
  BivarPoly r;
  r.add(a, b, c);
  return r;
}

void BivarPoly::add(i64 a, u64 b, const Int& c) {
  if (c == 0) return;
  auto [it, fresh] = m_.try_emplace({a, b}, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) m_.erase(it);
  }
}

u64 BivarPoly::degree_y() const {
  u64 d = 0;
  for (auto& [k, c] : m_) d = std::max(d, k.second);
  return d;
}

i64 BivarPoly::min_x() const {
  i64 r = 0;
  bool first = true;
  for (auto& [k, c] : m_) {
    r = first ? k.first : std::min(r, k.first);
    first = false;
  }
  return r;
}

i64 BivarPoly::max_x() const {
  i64 r = 0;
  for (auto& [k, c] : m_) r = std::max(r, k.first);
  return r;
}

bool BivarPoly::monic_in_y() const {
  u64 d = degree_y();
  int n = 0;
  for (auto& [k, c] : m_)
    if (k.second == d) {
      if (k.first != 0 || c != 1) return false;
      ++n;
    }
  return n == 1;
}

Int BivarPoly::coeff(i64 a, u64 b) const {
  auto it = m_.find({a, b});
  return it == m_.end() ? Int(0) : it->second;
}

BivarPoly BivarPoly::operator+(const BivarPoly& o) const {
  BivarPoly r = *this;
  for (auto& [k, c] : o.m_) r.add(k.first, k.second, c);
  return r;
}

BivarPoly BivarPoly::operator-() const {
  BivarPoly r = *this;
  for (auto& [k, c] : r.m_) c = -c;
  return r;
}

BivarPoly BivarPoly::operator-(const BivarPoly& o) const { return *this + (-o); }

BivarPoly BivarPoly::operator*(const BivarPoly& o) const {
  BivarPoly r;
  for (auto& [k1, c1] : m_)
    for (auto& [k2, c2] : o.m_) r.add(k1.first + k2.first, k1.second + k2.second, c1 * c2);
  return r;
}

BivarPoly BivarPoly::pow(u64 n) const {
  BivarPoly r = constant(1), b = *this;
  while (n) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

std::string BivarPoly::str(const std::string& x, const std::string& y) const {
  if (m_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  std::vector<std::pair<Key, Int>> order(m_.begin(), m_.end());
  // highest power of the unknown first
  std::stable_sort(order.begin(), order.end(), [](const auto& u, const auto& v) {
    return u.first.second != v.first.second ? u.first.second > v.first.second : u.first.first > v.first.first;
  });
  for (auto it = order.begin(); it != order.end(); ++it) {
    auto [a, b] = it->first;
    Int c = it->second;
    bool neg = c < 0;
    Int ac = abs(c);
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    std::vector<std::string> f;
    if (ac != 1 || (a == 0 && b == 0)) f.push_back(ac.get_str());
    if (a) f.push_back(a == 1 ? x : x + "^" + std::to_string(a));
    if (b) f.push_back(b == 1 ? y : y + "^" + std::to_string(b));
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "*" : "") << f[i];
  }
  return os.str();
}

nlohmann::json to_json(const BivarPoly& a) {
  nlohmann::json m = nlohmann::json::array();
  for (auto& [k, c] : a.monomials()) {
    nlohmann::json cj;
    if (mpz_fits_slong_p(c.get_mpz_t()))
      cj = c.get_si();
    else
      cj = c.get_str();
    m.push_back({cj, k.first, k.second});
  }
  return {{"monomials", m}};
}

BivarPoly bivar_from_json(const nlohmann::json& j) {
  BivarPoly r;
  for (auto& m : j.at("monomials")) {
    Int c = m.at(0).is_string() ? Int(m.at(0).get<std::string>()) : Int(std::to_string(m.at(0).get<i64>()));
    r.add(m.at(1).get<i64>(), m.at(2).get<u64>(), c);
  }
  return r;
}

PolyExpr PolyExpr::make_leaf(BivarPoly p) {
  PolyExpr e;
  e.leaf = std::move(p);
  return e;
}

PolyExpr PolyExpr::sum(std::vector<PolyExpr> kids) {
  if (kids.size() == 1) return kids[0];
  PolyExpr e;
  e.kind = Kind::Sum;
  e.kids = std::move(kids);
  return e;
}

PolyExpr PolyExpr::product(std::vector<PolyExpr> kids) {
  if (kids.size() == 1) return kids[0];
  PolyExpr e;
  e.kind = Kind::Product;
  e.kids = std::move(kids);
  return e;
}

PolyExpr PolyExpr::power(PolyExpr base, u64 n) {
  PolyExpr e;
  e.kind = Kind::Power;
  e.kids.push_back(std::move(base));
  e.exponent = n;
  return e;
}

BivarPoly PolyExpr::expand() const {
  switch (kind) {
    case Kind::Leaf:
      return leaf;
    case Kind::Sum: {
      BivarPoly r;
      for (auto& k : kids) r = r + k.expand();
      return r;
    }
    case Kind::Product: {
      BivarPoly r = BivarPoly::constant(1);
      for (auto& k : kids) r = r * k.expand();
      return r;
    }
    case Kind::Power:
      return kids[0].expand().pow(exponent);
  }
  return {};
}

u64 PolyExpr::degree_y() const {
  switch (kind) {
    case Kind::Leaf:
      return leaf.degree_y();
    case Kind::Sum: {
      u64 d = 0;
      for (auto& k : kids) d = std::max(d, k.degree_y());
      return d;
    }
    case Kind::Product: {
      u64 d = 0;
      for (auto& k : kids) d += k.degree_y();
      return d;
    }
    case Kind::Power:
      return kids[0].degree_y() * exponent;
  }
  return 0;
}

bool PolyExpr::monic_in_y() const { return expand().monic_in_y(); }

std::string PolyExpr::str(const std::string& x, const std::string& y) const {
  switch (kind) {
    case Kind::Leaf:
      return leaf.str(x, y);
    case Kind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        std::string t = kids[i].str(x, y);
        if (i && !t.empty() && t[0] == '-')
          s += " - " + t.substr(1);
        else
          s += (i ? " + " : "") + t;
      }
      return s;
    }
    case Kind::Product: {
      std::string s;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i == 0 && kids[0].kind == Kind::Leaf && kids[0].leaf == BivarPoly::constant(-1)) {
          s = "-";
          continue;
        }
        std::string t = kids[i].str(x, y);
        bool wrap = kids[i].kind == Kind::Sum || (kids[i].kind == Kind::Leaf && kids[i].leaf.monomials().size() > 1);
        s += (i && s != "-" ? "*" : "") + (wrap ? "(" + t + ")" : t);
      }
      return s;
    }
    case Kind::Power: {
      const PolyExpr& b = kids[0];
      bool wrap = b.kind != Kind::Leaf || b.leaf.monomials().size() > 1 || b.leaf.coeff(0, 0) != 0;
      std::string t = b.str(x, y);
      return (wrap ? "(" + t + ")" : t) + "^" + std::to_string(exponent);
    }
  }
  return {};
}

namespace {

class Parser {
 public:
  Parser(const std::string& s, const std::vector<ParseVar>& vars) : s_(s), vars_(vars) {}

  PolyExpr run() {
    for (const char* bad : {"'", "diff", "D(", "d/d"})
      if (s_.find(bad) != std::string::npos)
        throw Error("derivative terms are not supported; only algebraic equations P(z, F) = 0 are accepted");
    PolyExpr e = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  const std::string& s_;
  const std::vector<ParseVar>& vars_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw Error("parse error at position " + std::to_string(i_) + ": " + what + " in \"" + s_ + "\"");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  // expr := term (('+'|'-') term)*
  PolyExpr expr() {
    std::vector<PolyExpr> parts;
    bool neg = false;
    if (eat('-')) neg = true;
    else eat('+');
    parts.push_back(signed_term(neg));
    for (;;) {
      if (eat('+')) parts.push_back(signed_term(false));
      else if (eat('-')) parts.push_back(signed_term(true));
      else break;
    }
    return PolyExpr::sum(std::move(parts));
  }

  PolyExpr signed_term(bool neg) {
    PolyExpr t = term();
    if (!neg) return t;
    if (t.kind == PolyExpr::Kind::Leaf) return PolyExpr::make_leaf(-t.leaf);
    if (t.kind == PolyExpr::Kind::Product && t.kids[0].kind == PolyExpr::Kind::Leaf) {
      t.kids[0].leaf = -t.kids[0].leaf;
      return t;
    }
    return PolyExpr::product({PolyExpr::make_leaf(BivarPoly::constant(-1)), std::move(t)});
  }

  // term := factor ('*' factor)*
  PolyExpr term() {
    std::vector<PolyExpr> fs{factor()};
    while (eat('*')) fs.push_back(factor());
    // fold adjacent leaves so that "9*(t^2-t+z)" stays a single product
    std::vector<PolyExpr> out;
    BivarPoly acc = BivarPoly::constant(1);
    bool have_leaf = false;
    for (auto& f : fs) {
      if (f.kind == PolyExpr::Kind::Leaf && f.leaf.monomials().size() <= 1) {
        acc = acc * f.leaf;
        have_leaf = true;
      } else {
        out.push_back(std::move(f));
      }
    }
    if (out.empty()) return PolyExpr::make_leaf(acc);
    if (have_leaf) out.insert(out.begin(), PolyExpr::make_leaf(acc));
    if (out.size() == 1) return out[0];
    bool all_leaves = true;
    for (auto& o : out) all_leaves = all_leaves && o.kind == PolyExpr::Kind::Leaf;
    if (all_leaves) {
      BivarPoly p = BivarPoly::constant(1);
      for (auto& o : out) p = p * o.leaf;
      return PolyExpr::make_leaf(p);
    }
    return PolyExpr::product(std::move(out));
  }

  // factor := primary ('^' integer)?
  PolyExpr factor() {
    PolyExpr base = primary();
    if (eat('^')) {
      skip();
      bool paren = eat('(');
      Int n = integer();
      if (paren && !eat(')')) fail("expected ')'");
      if (n < 0 || !mpz_fits_ulong_p(n.get_mpz_t())) fail("exponent must be a nonnegative integer");
      u64 e = n.get_ui();
      if (base.kind == PolyExpr::Kind::Leaf && base.leaf.monomials().size() <= 1) return PolyExpr::make_leaf(base.leaf.pow(e));
      return PolyExpr::power(std::move(base), e);
    }
    return base;
  }

  PolyExpr primary() {
    skip();
    if (eat('(')) {
      PolyExpr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
      return PolyExpr::make_leaf(BivarPoly::constant(integer()));
    if (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      std::string name = s_.substr(i_, j - i_);
      for (auto& v : vars_)
        if (v.name == name) {
          i_ = j;
          return PolyExpr::make_leaf(v.is_y ? BivarPoly::monomial(1, 0, 1) : BivarPoly::monomial(1, v.xpow, 0));
        }
      fail("unknown symbol '" + name + "'");
    }
    fail("expected a number, a variable or '('");
  }

  Int integer() {
    skip();
    std::size_t j = i_;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
    if (j == i_) fail("expected an integer");
    Int r(s_.substr(i_, j - i_));
    i_ = j;
    return r;
  }
};

}  // namespace

PolyExpr parse_poly(const std::string& text, const std::vector<ParseVar>& vars) {
  return Parser(text, vars).run();
}

}  // namespace phimod
