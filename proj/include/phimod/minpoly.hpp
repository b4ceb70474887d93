#pragma once

#include <optional>
#include <vector>

#include "phimod/hseries.hpp"
#include "phimod/polyexpr.hpp"

namespace phimod {

// A(w, Phi(w)) as a normalized H-combination modulo p^gamma.
HCombo evaluate_at_phi(const PolyExpr& A, const Context& ctx);

// Exact test of A(z, Phi(z)) = 0 mod p^gamma through the H-basis.
bool verify_vanishing(const PolyExpr& A, u64 p, unsigned gamma);
bool verify_vanishing(const BivarPoly& A, u64 p, unsigned gamma);
// Truncated cross-check: the series A(z, Phi(z)) vanishes below z^T.
bool vanishes_to_order(const BivarPoly& A, u64 p, unsigned gamma, i64 T);

// Least d with v_p(d!) >= gamma.
u64 degree_lower_bound(u64 p, unsigned gamma);

// Modulus exponent (p^delta - 1)/(p - 1) covered by the level-delta member.
unsigned family_gamma(u64 p, unsigned delta);

// family[i] is the level i+1 member (t-degree p^(i+1)).
PolyExpr compose_min_poly(const std::vector<PolyExpr>& family, u64 p, unsigned gamma);

struct SearchOutcome {
  std::optional<PolyExpr> poly;
  unsigned delta = 0;
  std::size_t unknowns = 0, equations = 0, rank = 0;
};

// Level delta member from the level delta-1 member by solving the F_p system
// for the perturbation p^s X(z, t), s = (p^delta - p)/(p - 1).
SearchOutcome search_min_poly(const PolyExpr& A_prev, u64 p, unsigned slack = 2);

}  // namespace phimod
