#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phimod/modarith.hpp"

namespace phimod {

// Digit-pattern templates such as
//   n = (3^i1 + 3^i2 - 2)/2   where  i1 - 2 > i2 >= 0
// The symbol p stands for the prime; every other identifier is a
// non-negative integer variable. Division must be exact for a value to count.
struct PatternExpr;

class Pattern {
 public:
  Pattern() = default;
  Pattern(const std::string& n_expr, const std::string& where, u64 p);

  const std::string& text() const { return text_; }
  const std::vector<std::string>& vars() const { return vars_; }
  // All distinct values 0 <= n <= N, ascending.
  std::vector<Int> enumerate(const Int& N) const;

 private:
  std::string text_;
  u64 p_ = 0;
  std::vector<std::string> vars_;
  std::shared_ptr<const PatternExpr> expr_;
  struct Cmp {
    std::shared_ptr<const PatternExpr> lhs, rhs;
    bool strict;
  };
  std::vector<Cmp> cmps_;
  Int scale_ = 1;
};

struct ManifestEntry {
  Pattern pattern;
  u64 residue = 0;  // reduced modulo the manifest modulus
};

struct ManifestItem {
  std::string label;
  std::vector<ManifestEntry> entries;
};

struct Manifest {
  std::string name, sequence;
  u64 p = 0, modulus = 0;
  u64 n_min = 0;
  std::vector<ManifestItem> items;
  std::optional<u64> otherwise;  // residue of n matched by no item
  std::vector<u64> never;
};

// A manifest file may list several primes; p selects one of them.
Manifest load_manifest(const nlohmann::json& j, u64 p);
Manifest load_manifest_file(const std::string& path, u64 p);
std::vector<u64> manifest_primes(const nlohmann::json& j);

struct ManifestReport {
  bool sound = true;     // generated n carry the stated residue
  bool never_ok = true;  // excluded residues do not occur
  bool complete = true;  // n matched by no item have the "otherwise" residue
  std::size_t generated = 0;
  std::vector<std::string> problems;  // first few, for diagnostics
  nlohmann::json to_json() const;
};

// residues[n] for 0 <= n <= N.
ManifestReport check_manifest(const Manifest& m, const std::vector<u64>& residues);

}  // namespace phimod
