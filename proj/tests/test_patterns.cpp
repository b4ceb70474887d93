#include <doctest.h>

#include <random>
#include <set>

#include "phimod/applications.hpp"
#include "phimod/patterns.hpp"

using namespace phimod;

namespace {

std::vector<Int> ints(std::initializer_list<long> v) {
  std::vector<Int> r;
  for (long x : v) r.push_back(Int(x));
  return r;
}

std::string manifest(const std::string& f) { return std::string(PHIMOD_DATA_DIR) + "/manifests/" + f; }

std::vector<u64> residues(const std::vector<Int>& terms, u64 m) { return classify(terms, m).residue; }

}  // namespace

TEST_CASE("pattern enumeration") {
  CHECK(Pattern("3^i", "i>=0", 3).enumerate(100) == ints({1, 3, 9, 27, 81}));
  CHECK(Pattern("(3^i1+3^i2-2)/2", "i1>i2>=0", 3).enumerate(20) == ints({1, 4, 5, 13, 14, 17}));
  CHECK(Pattern("7", "", 3).enumerate(100) == ints({7}));
  CHECK(Pattern("7", "", 3).enumerate(6).empty());
  CHECK(Pattern("(p^i-1)/(p-1)", "i>=1", 5).enumerate(200) == ints({1, 6, 31, 156}));
  // shifted chains: i1-2 > i2 means a gap of at least two
  CHECK(Pattern("3^i1+3^i2", "i1-2>i2>=1", 3).enumerate(300) == ints({84, 246, 252}));
  CHECK(Pattern("3^{i}", "i >= 2", 3).enumerate(30) == ints({9, 27}));
  CHECK_THROWS_WITH(Pattern("3^i +", "", 3), doctest::Contains("parse error"));
  CHECK_THROWS_WITH(Pattern("3^i", "i", 3), doctest::Contains("no comparison"));
  CHECK_THROWS(Pattern("3^n", "", 3));
}

TEST_CASE("pattern enumeration agrees with brute force") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    u64 p = std::vector<u64>{2, 3, 5}[rng() % 3];
    int c1 = int(rng() % 4) + 1, c2 = int(rng() % 4) + 1, gap = int(rng() % 3), lo = int(rng() % 2);
    int off = int(rng() % 3);
    std::string e = "(" + std::to_string(c1) + "*p^a+" + std::to_string(c2) + "*p^b+" + std::to_string(off) + ")/" +
                    std::to_string(p == 2 ? 1 : 2);
    std::string w = "a-" + std::to_string(gap) + ">b>=" + std::to_string(lo);
    const u64 N = 3000;
    std::set<u64> want;
    for (u64 a = 0; a < 20; ++a)
      for (u64 b = lo; b < 20; ++b) {
        if (!(i64(a) - gap > i64(b))) continue;
        Int v = Int(c1) * ipow_big(p, a) + Int(c2) * ipow_big(p, b) + off;
        Int d = p == 2 ? 1 : 2;
        if (v % d != 0) continue;
        v /= d;
        if (v <= N) want.insert(v.get_ui());
      }
    std::vector<Int> got = Pattern(e, w, p).enumerate(N);
    std::vector<Int> wv;
    for (u64 x : want) wv.push_back(Int(std::to_string(x)));
    CAPTURE(e);
    CAPTURE(w);
    CHECK(got == wv);
  }
}

TEST_CASE("manifest loading") {
  Manifest m = load_manifest_file(manifest("noncrossing_mod27.json"), 3);
  CHECK(m.modulus == 27);
  CHECK(m.items.size() == 16);
  CHECK(m.never.size() == 10);
  Manifest b = load_manifest_file(manifest("blossom_mod_p2.json"), 5);
  CHECK(b.modulus == 25);
  CHECK(b.items[1].entries[0].residue == 3);
  // (iv) for p=5: compositions of 6 with parts prime to 5 and at least two parts
  CHECK(b.items[3].entries.size() == 29);
  CHECK_THROWS_WITH(load_manifest_file(manifest("noncrossing_mod27.json"), 5), doctest::Contains("p=5"));
  CHECK_THROWS(load_manifest_file(manifest("missing.json"), 3));
  nlohmann::json bad = {{"sequence", "x"}, {"p", 3}, {"modulus", 9}, {"items", {{{"residue", 1}, {"patterns", {"3^"}}}}}};
  CHECK_THROWS(load_manifest(bad, 3));
}

TEST_CASE("manifest checks against oracle residues") {
  {
    Manifest m = load_manifest_file(manifest("noncrossing_mod3.json"), 3);
    ManifestReport r = check_manifest(m, residues(oracle_terms("noncrossing", 729), 3));
    CHECK(r.sound);
    CHECK(r.complete);
  }
  {
    // printed with i >= 1, which leaves out K_0 = 1
    Manifest m = load_manifest_file(manifest("kreweras_mod3.json"), 3);
    ManifestReport r = check_manifest(m, residues(oracle_terms("kreweras", 729), 3));
    CHECK(r.sound);
    CHECK_FALSE(r.complete);
    CHECK(r.problems == std::vector<std::string>{"n=0 matches no item but has residue 1"});
    m.n_min = 1;
    CHECK(check_manifest(m, residues(oracle_terms("kreweras", 729), 3)).complete);
  }
  {
    // four printed families disagree with N_n; every other family is sound
    Manifest m = load_manifest_file(manifest("noncrossing_mod27.json"), 3);
    auto res = residues(oracle_terms("noncrossing", 729), 27);
    ManifestReport r = check_manifest(m, res);
    CHECK_FALSE(r.sound);
    CHECK(r.never_ok);
    CHECK(r.generated > 300);
    std::set<std::string> unsound;
    for (auto& item : m.items)
      for (auto& e : item.entries)
        for (const Int& n : e.pattern.enumerate(729))
          if (res[n.get_ui()] != e.residue) unsound.insert(item.label + " " + e.pattern.text());
    CHECK(unsound == std::set<std::string>{"(iii) n = 2*3^i+1 where i>=1", "(iii) n = 3^i+2 where i>=1",
                                           "(ix) n = 2*3^i1+3^i2+1 where i1-1>i2>=1",
                                           "(ix) n = 3^i1+2*3^i2+1 where i1-1>i2>=1"});
  }
  {
    Manifest m = load_manifest_file(manifest("kreweras_mod27.json"), 3);
    ManifestReport r = check_manifest(m, residues(oracle_terms("kreweras", 729), 27));
    CHECK(r.sound);
    CHECK(r.never_ok);
  }
  for (u64 p : {3, 5, 7}) {
    Manifest m = load_manifest_file(manifest("fusscatalan_mod_p2.json"), p);
    ManifestReport r = check_manifest(m, residues(oracle_terms("fusscatalan", 300, {p, 1, 0}), p * p));
    CHECK(r.sound);
    CHECK(r.complete);
  }
  // negative control: shifting every residue breaks soundness
  Manifest m = load_manifest_file(manifest("noncrossing_mod3.json"), 3);
  auto res = residues(oracle_terms("noncrossing", 100), 3);
  for (auto& x : res) x = (x + 1) % 3;
  ManifestReport r = check_manifest(m, res);
  CHECK_FALSE(r.sound);
  CHECK_FALSE(r.problems.empty());
}
