#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phimod/phipoly.hpp"
#include "phimod/polyexpr.hpp"

namespace phimod {

// One monomial c * w^e * F^m of P(w, F); e is in w-units.
struct EqMonomial {
  Int c;
  i64 e = 0;
  u64 m = 0;
};

struct FunctionalEquation {
  std::string name;
  u64 p = 3;
  i64 scaleD = 1;
  unsigned stepH = 1;
  std::vector<EqMonomial> monos;
  std::vector<Int> initial;  // leading coefficients of F in w-units

  u64 degree() const;
  FunctionalEquation derivative() const;  // dP/dF
  Context context(unsigned gamma) const { return Context::make(p, gamma, scaleD, stepH); }
  std::string str() const;
};

// Builds an equation from the DSL. "z" stands for w^scaleD, "w" for w itself
// and "F" for the unknown.
FunctionalEquation parse_equation(const std::string& text, u64 p, i64 scaleD = 1, unsigned stepH = 1,
                                  std::vector<Int> initial = {}, std::string name = "custom");

nlohmann::json to_json(const FunctionalEquation& eq);
FunctionalEquation equation_from_json(const nlohmann::json& j);

// Exact integer coefficients [w^0..w^(T-1)] of the unique solution.
std::vector<Int> series_solution_exact(const FunctionalEquation& eq, i64 T);
// The same modulo ctx.modulus. Throws when the recursion step is not a unit.
TruncSeries series_solution(const FunctionalEquation& eq, const Context& ctx, i64 T);
// Exact solution reduced mod ctx.modulus when the modular recursion is not
// invertible (the division by a non-unit is done over Z first).
TruncSeries series_solution_any(const FunctionalEquation& eq, const Context& ctx, i64 T);

// P(w, F) for a truncated series F.
TruncSeries residual_series(const FunctionalEquation& eq, const TruncSeries& F);
// P(w, F) for a PhiPoly F, reduced.
PhiPoly evaluate(const FunctionalEquation& eq, const PhiPoly& F);

bool verify_base(const FunctionalEquation& eq, const PhiPoly& base);

struct LiftStep {
  unsigned beta = 0;
  std::size_t rows = 0, cols = 0;
  bool diagonal = false;
  LaurentPoly det;  // mod p; empty when the diagonal shortcut was taken
};

struct LiftReport {
  PhiPoly solution;
  unsigned reached_beta = 0;
  std::vector<LiftStep> steps;
  std::string failure;
  bool certified = false;
  i64 cert_order = 0;
  nlohmann::json to_json() const;
};

// Thrown when the coefficient comparison system at some beta has no Laurent
// solution; this is a property of the method, not a proof of nonexistence.
struct LiftFailure : Error {
  unsigned beta;
  LiftFailure(unsigned b, const std::string& why)
      : Error("lift failed at beta=" + std::to_string(b) + ": " + why), beta(b) {}
};

// Coefficient matrix of the lifting system: column j holds the Phi-coefficients
// of P_F(F1) * Phi^j reduced mod p, for j < q^(alpha+1).
std::vector<std::vector<LaurentPoly>> lift_matrix(const FunctionalEquation& eq, const PhiPoly& F1);

// One lifting step: current satisfies eq mod p^beta and lives in a context of
// gamma > beta. Returns the solution mod p^(beta+1) in the same context.
PhiPoly lift(const FunctionalEquation& eq, const PhiPoly& current, unsigned beta, LiftStep* log = nullptr);

struct SolveOptions {
  std::optional<unsigned> gamma;  // default q^alpha
  i64 cert_order = -1;            // default p^(alpha+4), in w-units
  bool certify = true;
};

LiftReport solve(const FunctionalEquation& eq, const PhiPoly& base, unsigned alpha, const SolveOptions& opt = {});

// Solves M x = c over F_p(w). Entries are Laurent polynomials mod p.
std::vector<LaurentPoly> linear_solve(const std::vector<std::vector<LaurentPoly>>& M,
                                      const std::vector<LaurentPoly>& c, LaurentPoly* det = nullptr);
// Determinant up to a monomial factor from row normalization is not wanted,
// so this returns the exact determinant over F_p[w, 1/w].
LaurentPoly determinant(const std::vector<std::vector<LaurentPoly>>& M);

struct BaseWindow {
  i64 lo = 0, hi = 0;
};
// Default window [-2 D, q^(alpha+1) D].
BaseWindow default_window(const FunctionalEquation& eq, unsigned alpha);
std::optional<PhiPoly> find_base(const FunctionalEquation& eq, unsigned alpha, std::optional<BaseWindow> window = {});

}  // namespace phimod
