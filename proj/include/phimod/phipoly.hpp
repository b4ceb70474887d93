#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phimod/hseries.hpp"

namespace phimod {

// Polynomial sum a_i(w) Phi(w)^i with Laurent coefficients; alpha fixes the
// Ansatz level whose degree bound after reduction is q^(alpha+1) - 1.
class PhiPoly {
 public:
  PhiPoly() = default;
  PhiPoly(const Context& ctx, unsigned alpha) : ctx_(ctx), alpha_(alpha) {}
  PhiPoly(const Context& ctx, unsigned alpha, std::vector<LaurentPoly> coeffs);
  static PhiPoly constant(const Context& ctx, unsigned alpha, const LaurentPoly& a);
  static PhiPoly phi(const Context& ctx, unsigned alpha);  // the single term Phi

  const Context& ctx() const { return ctx_; }
  unsigned alpha() const { return alpha_; }
  const std::vector<LaurentPoly>& coeffs() const { return coeffs_; }
  LaurentPoly coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : LaurentPoly(ctx_); }
  int degree() const { return int(coeffs_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return coeffs_.empty(); }
  u64 degree_bound() const;  // q^(alpha+1) - 1

  PhiPoly operator+(const PhiPoly& o) const;
  PhiPoly operator-(const PhiPoly& o) const;
  PhiPoly operator-() const;
  PhiPoly operator*(const PhiPoly& o) const;
  PhiPoly scale(const LaurentPoly& a) const;
  PhiPoly pow(u64 n) const;  // not reduced
  // Replace the coefficient ring (representatives in [0, m) carried over).
  PhiPoly recast(const Context& c) const;
  PhiPoly with_alpha(unsigned a) const;

  bool operator==(const PhiPoly& o) const { return alpha_ == o.alpha_ && coeffs_ == o.coeffs_; }
  bool operator!=(const PhiPoly& o) const { return !(*this == o); }

  // Display in the style "(3 z^2+15 z) Φ^2(z)".
  std::string str() const;

 private:
  Context ctx_;
  unsigned alpha_ = 0;
  std::vector<LaurentPoly> coeffs_;
  void trim();
  void check(const PhiPoly& o) const;
};

// Coefficients of the relation (t^q - t + w)^(q^alpha), lowest degree first.
const std::vector<LaurentPoly>& relation_poly(const Context& ctx, unsigned alpha);
PhiPoly phi_reduce(const PhiPoly& a);
// Product followed by reduction; keeps intermediate degrees small.
PhiPoly mul_reduce(const PhiPoly& a, const PhiPoly& b);
PhiPoly pow_reduce(const PhiPoly& a, u64 n);

HCombo phipoly_to_hcombo(const PhiPoly& a);
TruncSeries phipoly_to_series(const PhiPoly& a, i64 T);
// Derivative of the Phi-series modulo p^(beta+1), truncated at T.
TruncSeries phi_derivative_series(const Context& ctx, unsigned beta, i64 T);
// Truncated Phi-series itself.
TruncSeries phi_series(const Context& ctx, i64 T);

// Result of a coefficient query in z-units.
struct CoeffResult {
  bool z_integral = true;
  u64 value = 0;
};

// Coefficient extraction with the H-combination built once.
class Extractor {
 public:
  explicit Extractor(const PhiPoly& a) : ctx_(a.ctx()), combo_(phipoly_to_hcombo(a)) {}
  explicit Extractor(HCombo c) : ctx_(c.ctx()), combo_(std::move(c)) {}
  const HCombo& combo() const { return combo_; }
  // Coefficient of z^n (w-exponent n * scaleD).
  u64 coeff_z(const Int& n) const;
  u64 coeff_z(i64 n) const;
  // Coefficient at w-exponent M; reports when M is not a multiple of scaleD.
  CoeffResult coeff_w(const Int& M) const;

 private:
  Context ctx_;
  HCombo combo_;
};

u64 extract_coefficient(const PhiPoly& a, const Int& n);

nlohmann::json to_json(const PhiPoly& a);
PhiPoly phipoly_from_json(const Context& ctx, const nlohmann::json& j);
// Reads context fields stored alongside a serialized PhiPoly.
std::optional<Context> context_from_json(const nlohmann::json& j);
nlohmann::json context_json(const Context& ctx);

}  // namespace phimod
