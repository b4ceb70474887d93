#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phimod/modarith.hpp"

namespace phimod {

// Integer polynomial in x (the series variable) and y (the unknown), stored as
// (x-degree, y-degree) -> coefficient with no zero entries.
class BivarPoly {
 public:
  using Key = std::pair<i64, u64>;
  BivarPoly() = default;
  static BivarPoly constant(const Int& c);
  static BivarPoly monomial(const Int& c, i64 a, u64 b);

  const std::map<Key, Int>& monomials() const { return m_; }
  bool is_zero() const { return m_.empty(); }
  u64 degree_y() const;
  i64 min_x() const;
  i64 max_x() const;
  bool monic_in_y() const;
  Int coeff(i64 a, u64 b) const;
  void add(i64 a, u64 b, const Int& c);

  BivarPoly operator+(const BivarPoly& o) const;
  BivarPoly operator-(const BivarPoly& o) const;
  BivarPoly operator-() const;
  BivarPoly operator*(const BivarPoly& o) const;
  BivarPoly pow(u64 n) const;
  bool operator==(const BivarPoly& o) const { return m_ == o.m_; }

  // e.g. "t^3 - t + z" with the given variable names
  std::string str(const std::string& x = "z", const std::string& y = "t") const;

 private:
  std::map<Key, Int> m_;
};

nlohmann::json to_json(const BivarPoly& a);
BivarPoly bivar_from_json(const nlohmann::json& j);

// Expression tree over BivarPoly leaves; keeps products and powers unexpanded
// so that large powers can be evaluated structurally.
struct PolyExpr {
  enum class Kind { Leaf, Sum, Product, Power };
  Kind kind = Kind::Leaf;
  BivarPoly leaf;
  std::vector<PolyExpr> kids;  // Sum and Product operands, Power base
  u64 exponent = 0;

  static PolyExpr make_leaf(BivarPoly p);
  static PolyExpr sum(std::vector<PolyExpr> kids);
  static PolyExpr product(std::vector<PolyExpr> kids);
  static PolyExpr power(PolyExpr base, u64 n);

  BivarPoly expand() const;
  u64 degree_y() const;
  bool monic_in_y() const;
  std::string str(const std::string& x = "z", const std::string& y = "t") const;
};

// Variable binding for the parser: a name maps to x^xpow (y = false) or to y.
struct ParseVar {
  std::string name;
  i64 xpow = 1;
  bool is_y = false;
};

// Parses integers, the bound variables, + - * ^ and parentheses.
// Derivative notation (F', D(F), diff) is rejected with a clear message.
PolyExpr parse_poly(const std::string& text, const std::vector<ParseVar>& vars);

}  // namespace phimod
