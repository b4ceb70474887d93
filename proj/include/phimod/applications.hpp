#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phimod/polyexpr.hpp"
#include "phimod/solver.hpp"

namespace phimod {

struct BuiltinParams {
  u64 p = 0;       // 0: the builtin's default prime
  unsigned h = 1;  // Fuss-Catalan step, k = p^h
  u64 k = 0;       // blossom arity, 0: k = p
};

struct Builtin {
  FunctionalEquation eq;
  // Base solution mod p at Ansatz level alpha, in eq.context(1).
  std::function<PhiPoly(unsigned alpha)> base;
  std::string oracle;  // name accepted by make_oracle for the equation's series
};

std::vector<std::string> builtin_names();
Builtin builtin(const std::string& name, const BuiltinParams& bp = {});

// Coefficients of the blossom equation in z (x) and B (y).
BivarPoly blossom_polynomial(u64 k);

struct SequenceOracle {
  std::string name;
  std::string provenance;
  std::function<Int(u64)> term;
};

// Names: noncrossing, noncrossing_sum, kreweras, fusscatalan, fusscatalan_T,
// blossom, gessel_f1..gessel_f5 (f2 sign-twisted, see README).
SequenceOracle make_oracle(const std::string& name, const BuiltinParams& bp = {});
std::vector<Int> oracle_terms(const std::string& name, u64 N, const BuiltinParams& bp = {});

Int noncrossing_sum(u64 n);
Int kreweras_number(u64 n);
Int fuss_catalan(u64 n, u64 k);  // n >= 1
Int blossom_number(u64 n, u64 k);  // n = 0 gives (k+1)/2
Int gessel_h(i64 j, i64 k, i64 l, u64 n);

// Solutions displayed in closed form, as PhiPolys in w-units.
PhiPoly noncrossing_mod27();       // sum_{n>=1} N_n z^n mod 27
PhiPoly kreweras_mod27();          // K(z) mod 27, w = z^(1/2)
PhiPoly fusscatalan_mod_p2(u64 p);  // sum_{n>=1} F(n;p) z^n mod p^2
PhiPoly blossom_mod_p2(u64 p);      // B_p(z) mod p^2

struct ResidueTable {
  u64 modulus = 0;
  std::string source;
  std::vector<Int> n;
  std::vector<u64> residue;

  std::vector<Int> select(u64 r) const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// How dense coefficient ranges are computed: a truncated series, one H-basis
// extraction per n, or Auto (series unless the range is very long).
enum class Route { Auto, Series, Extract };

// Residues of the coefficients of z^0..z^N. threads = 0 picks the hardware
// count; it only matters for the extraction route.
ResidueTable classify(const PhiPoly& solution, u64 N, u64 modulus, unsigned threads = 1, Route route = Route::Auto);
// Residues at the given (possibly huge) indices only.
ResidueTable classify(const PhiPoly& solution, const std::vector<Int>& ns, u64 modulus);
ResidueTable classify(const std::vector<Int>& terms, u64 modulus);

struct OracleCheck {
  bool ok = true;
  std::optional<u64> mismatch;
  u64 got = 0, want = 0;
  nlohmann::json to_json() const;
};

OracleCheck verify_against_oracle(const PhiPoly& solution, const SequenceOracle& oracle, u64 N, u64 modulus,
                                  u64 n_from = 0, Route route = Route::Auto);

struct AppendixCheck {
  bool lemma = false;     // (1+T)(k - (k-1)/2 (1+T)) equals the closed form
  bool fuss = false;      // T_k coefficients are F(n;k)
  bool equation = false;  // the blossom equation vanishes to order T
  bool ok() const { return lemma && fuss && equation; }
};
AppendixCheck verify_appendix(u64 k, i64 T);

}  // namespace phimod
