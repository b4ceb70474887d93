#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "phimod/laurent.hpp"

namespace phimod {

// Index (b_1,...,b_r) of H_{b_1..b_r}(w) = sum over n_1 > ... > n_r >= 0 of
// w^(b_1 q^n_1 + ... + b_r q^n_r).
using Composition = std::vector<i64>;

i64 weight(const Composition& c);

// Canonical order: weight, then length, then lexicographic.
struct CompLess {
  bool operator()(const Composition& a, const Composition& b) const;
};

std::string comp_str(const Composition& c);

class HCombo {
 public:
  using Map = std::map<Composition, LaurentPoly, CompLess>;

  HCombo() = default;
  explicit HCombo(const Context& ctx) : ctx_(ctx), free_(ctx) {}

  const Context& ctx() const { return ctx_; }
  const LaurentPoly& free() const { return free_; }
  const Map& terms() const { return terms_; }
  // True iff no part of any stored composition is divisible by q.
  bool normalized() const;
  bool is_zero() const { return free_.is_zero() && terms_.empty(); }
  LaurentPoly coeff(const Composition& c) const;

  void add_free(const LaurentPoly& a) { free_ += a; }
  void add_term(const Composition& c, const LaurentPoly& a);

  HCombo operator+(const HCombo& o) const;
  HCombo operator-(const HCombo& o) const;
  HCombo operator-() const;
  HCombo scale(const LaurentPoly& a) const;
  HCombo scale(u64 c) const;
  HCombo recast(const Context& c) const;

  bool operator==(const HCombo& o) const { return free_ == o.free_ && terms_ == o.terms_; }
  bool operator!=(const HCombo& o) const { return !(*this == o); }

  // Smallest p-adic valuation over all stored coefficients (gamma if zero).
  unsigned content_valuation() const;

  // Terms in descending canonical order, free part last.
  std::string str() const;

 private:
  Context ctx_;
  LaurentPoly free_;
  Map terms_;
};

// Multinomial expansion of Phi^K over compositions of K, skipping terms whose
// coefficient vanishes modulo p^gamma. Not normalized.
HCombo expand_phi_power(const Context& ctx, unsigned K, unsigned max_K = 64);
// reduce(expand_phi_power(ctx, K)), memoized per (q, K, modulus).
const HCombo& phi_power_hcombo(const Context& ctx, unsigned K);

// Hou rewriting to the normal form where no part is divisible by q.
HCombo reduce(const HCombo& c);

// Quasi-shuffle product of the compositions with multiplicities.
std::vector<std::pair<Composition, u64>> stuffle(const Composition& a, const Composition& b);
// Product of two combos, reduced.
HCombo multiply(const HCombo& a, const HCombo& b);
HCombo power(const HCombo& a, u64 n);
// Frobenius image of a combo over F_p: c(w) H_a -> c(w^p) H_{p a}, reduced.
HCombo frobenius(const HCombo& a);

// 1 iff M = a_1 q^n_1 + ... + a_r q^n_r with n_1 > ... > n_r >= 0.
int hterm_coeff(const Composition& t, const Int& M, u64 q);
int hterm_coeff(const Composition& t, i64 M, u64 q);
// Coefficient of w^M in a normalized combo.
u64 combo_coeff(const HCombo& c, const Int& M);
u64 combo_coeff(const HCombo& c, i64 M);

TruncSeries hcombo_to_series(const HCombo& c, i64 T);

nlohmann::json to_json(const HCombo& c);
HCombo hcombo_from_json(const Context& ctx, const nlohmann::json& j);

}  // namespace phimod
