#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "phimod/applications.hpp"
#include "phimod/minpoly.hpp"
#include "phimod/patterns.hpp"

using namespace phimod;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kMismatch = 1, kLiftFailure = 2, kBadInput = 3 };

struct BadInput : Error {
  using Error::Error;
};

struct Globals {
  u64 p = 3;
  std::optional<unsigned> gamma, alpha;
  i64 scaleD = 1;
  unsigned stepH = 1;
  std::string format = "text";
  std::string out;
};

// gamma, or q^alpha when only alpha is given
unsigned pick_gamma(const Globals& g, unsigned fallback) {
  if (g.gamma && g.alpha) throw BadInput("give either --gamma or --alpha, not both");
  if (g.gamma) return *g.gamma;
  if (g.alpha) return unsigned(ipow(ipow(g.p, g.stepH), *g.alpha));
  return fallback;
}

Context make_ctx(const Globals& g, unsigned fallback) { return Context::make(g.p, pick_gamma(g, fallback), g.scaleD, g.stepH); }

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw BadInput("cannot write " + g.out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw BadInput("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw BadInput(path + ": " + e.what());
  }
}

Int parse_index(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw BadInput("index must be a non-negative decimal integer: " + s);
  return Int(s);
}

// Reads a PhiPoly (with stored context) or an HCombo.
HCombo read_target(const std::string& path, const Globals& g) {
  json j = read_json(path);
  auto ctx = context_from_json(j);
  if (j.contains("coeffs")) {
    if (!ctx) throw BadInput(path + ": missing context");
    return phipoly_to_hcombo(phipoly_from_json(*ctx, j));
  }
  HCombo c = hcombo_from_json(ctx ? *ctx : make_ctx(g, 1), j);
  return reduce(c);
}

PhiPoly read_phipoly(const std::string& path) {
  json j = read_json(path);
  auto ctx = context_from_json(j);
  if (!ctx || !j.contains("coeffs")) throw BadInput(path + ": not a PhiPoly file");
  return phipoly_from_json(*ctx, j);
}

u64 check_modulus(u64 m, const Context& ctx) {
  if (m == 0) return ctx.modulus;
  if (ctx.modulus % m != 0) throw BadInput("modulus must divide " + std::to_string(ctx.modulus));
  return m;
}

std::vector<Int> parse_ints(const std::string& s) {
  std::vector<Int> r;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    if (!tok.empty()) r.push_back(Int(tok));
  }
  return r;
}

std::vector<ParseVar> zt_vars() { return {{"z", 1, false}, {"t", 0, true}}; }

struct EquationSpec {
  std::string builtin, eq, initial, name = "custom";
  u64 k = 0;
};

// Builtin equation and its mod-p base at level alpha; custom equations get a
// searched base.
std::pair<FunctionalEquation, std::optional<PhiPoly>> load_equation(const EquationSpec& s, const Globals& g,
                                                                     unsigned alpha, std::string* oracle = nullptr) {
  if (!s.builtin.empty() && !s.eq.empty()) throw BadInput("give either --builtin or --eq");
  if (!s.builtin.empty()) {
    Builtin b = builtin(s.builtin, {g.p, g.stepH, s.k});
    if (oracle) *oracle = b.oracle;
    return {b.eq, b.base(alpha)};
  }
  if (s.eq.empty()) throw BadInput("an equation is required (--builtin or --eq)");
  FunctionalEquation eq = parse_equation(s.eq, g.p, g.scaleD, g.stepH, parse_ints(s.initial), s.name);
  return {eq, find_base(eq, alpha)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequences modulo prime powers via the Phi-series"};
  app.set_help_flag("--help", "Print help");
  app.require_subcommand(1);

  Globals g;
  auto globals = [&](CLI::App* s) {
    s->fallthrough();
    s->add_option("-p,--prime", g.p, "Prime");
    s->add_option("--gamma", g.gamma, "Modulus exponent");
    s->add_option("--alpha", g.alpha, "Ansatz level (modulus p^(p^alpha))");
    s->add_option("--scale-d", g.scaleD, "z = w^D");
    s->add_option("-h,--step-h", g.stepH, "Base q = p^h");
    s->add_option("--format", g.format, "text | json | csv")->check(CLI::IsMember({"text", "json", "csv"}));
    s->add_option("--out", g.out, "Output path");
  };

  // expand-phi
  auto* ex = app.add_subcommand("expand-phi", "Reduced H-expansion of Phi^K");
  unsigned K = 1;
  ex->add_option("-K", K, "Power")->required();
  globals(ex);

  // reduce-h
  auto* rh = app.add_subcommand("reduce-h", "Normal form of one H-series");
  std::string comp_s;
  rh->add_option("--comp", comp_s, "Composition, e.g. 3,1")->required();
  globals(rh);

  // coeff
  auto* co = app.add_subcommand("coeff", "Coefficient of z^n");
  std::optional<unsigned> phi_power;
  std::string file, n_s;
  u64 modulus = 0;
  bool raw = false;
  co->add_option("--phi-power", phi_power, "Use Phi^K");
  co->add_option("--file", file, "PhiPoly or HCombo JSON");
  co->add_option("-n", n_s, "Exponent (decimal, any size)")->required();
  co->add_option("--modulus", modulus, "Reduce further modulo a divisor");
  co->add_flag("--raw", raw, "Integer coefficient (largest supported modulus)");
  globals(co);

  // solve
  auto* so = app.add_subcommand("solve", "Ansatz lifting");
  EquationSpec spec;
  i64 cert_order = -1;
  bool no_cert = false;
  std::string report_path;
  so->add_option("--builtin", spec.builtin, "Builtin equation");
  so->add_option("--eq", spec.eq, "Equation in z and F");
  so->add_option("--initial", spec.initial, "Leading coefficients of F, comma separated");
  so->add_option("-k", spec.k, "Blossom arity");
  so->add_option("--cert-order", cert_order, "Certification order in w-units");
  so->add_flag("--no-certify", no_cert);
  so->add_option("--report", report_path, "Also write the lift report here");
  globals(so);

  // classify
  auto* cl = app.add_subcommand("classify", "Residue table");
  u64 N = 0;
  std::optional<u64> residue;
  bool csv = false;
  unsigned threads = 1;
  std::string manifest_path;
  cl->add_option("--file", file, "PhiPoly JSON")->required();
  cl->add_option("-N", N, "Largest n")->required();
  cl->add_option("--modulus", modulus);
  cl->add_option("--residue", residue, "Keep only this residue");
  cl->add_flag("--csv", csv);
  cl->add_option("--threads", threads, "Worker threads, 0 = all");
  cl->add_option("--manifest", manifest_path, "Check a pattern manifest instead");
  bool extract = false;
  cl->add_flag("--extract", extract, "One H-basis extraction per n instead of a truncated series");
  globals(cl);

  // verify
  auto* ve = app.add_subcommand("verify", "Compare a solution with its integer oracle");
  std::string oracle_name;
  u64 vN = 0, n_from = 0;
  ve->add_option("--builtin", spec.builtin, "Solve this builtin, then compare");
  ve->add_option("-k", spec.k, "Blossom arity");
  ve->add_option("--file", file, "PhiPoly JSON");
  ve->add_option("--oracle", oracle_name, "Oracle name (defaults to the builtin's)");
  ve->add_option("-N", vN, "Largest n")->required();
  ve->add_option("--from", n_from, "Smallest n");
  ve->add_option("--modulus", modulus);
  ve->add_flag("--extract", extract, "One H-basis extraction per n instead of a truncated series");
  globals(ve);

  // minpoly
  auto* mp = app.add_subcommand("minpoly", "Polynomials vanishing at Phi");
  mp->require_subcommand(1);
  mp->fallthrough();
  std::string poly_s;
  auto* mv = mp->add_subcommand("verify", "Exact vanishing test");
  mv->add_option("--poly", poly_s, "Polynomial in z and t")->required();
  globals(mv);
  auto* ms = mp->add_subcommand("search", "Next family member from a given one");
  unsigned slack = 2;
  ms->add_option("--poly", poly_s, "Previous member in z and t")->required();
  ms->add_option("--slack", slack, "Extra z-degree in the support");
  globals(ms);
  auto* mb = mp->add_subcommand("bound", "Degree lower bound");
  globals(mb);

  // appendix-check
  auto* ap = app.add_subcommand("appendix-check", "Blossom identities over the integers");
  u64 ak = 3;
  i64 order = 40;
  ap->add_option("-k", ak, "Odd arity");
  ap->add_option("-T,--order", order, "Series order");
  globals(ap);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? kOk : kBadInput;
  }

  const bool as_json = g.format == "json";
  try {
    if (*ex) {
      Context ctx = make_ctx(g, 1);
      HCombo c = reduce(expand_phi_power(ctx, K));
      if (as_json) {
        json j = to_json(c);
        j["context"] = context_json(ctx);
        emit(g, j.dump(2));
      } else {
        emit(g, c.str());
      }
      return kOk;
    }

    if (*rh) {
      Context ctx = make_ctx(g, 1);
      Composition comp;
      for (const Int& b : parse_ints(comp_s)) {
        if (b <= 0) throw BadInput("parts must be positive");
        comp.push_back(b.get_si());
      }
      if (comp.empty()) throw BadInput("empty composition");
      HCombo h(ctx);
      h.add_term(comp, LaurentPoly::monomial(ctx, 0, 1));
      HCombo r = reduce(h);
      if (as_json) {
        json j = to_json(r);
        j["context"] = context_json(ctx);
        emit(g, j.dump(2));
      } else {
        emit(g, r.str());
      }
      return kOk;
    }

    if (*co) {
      if (phi_power.has_value() == !file.empty()) throw BadInput("give exactly one of --phi-power and --file");
      const Int n = parse_index(n_s);
      HCombo target;
      if (phi_power) {
        if (*phi_power < 1) throw BadInput("--phi-power needs K >= 1");
        Context ctx = make_ctx(g, raw ? max_gamma(g.p) : 1);
        target = phi_power_hcombo(ctx, *phi_power);
      } else {
        target = read_target(file, g);
      }
      const u64 m = check_modulus(modulus, target.ctx());
      const u64 v = Extractor(target).coeff_z(n) % m;
      if (as_json)
        emit(g, json{{"n", n.get_str()}, {"modulus", m}, {"coefficient", v}}.dump());
      else
        emit(g, std::to_string(v));
      return kOk;
    }

    if (*so) {
      const unsigned alpha = g.alpha.value_or(1);
      auto [eq, base] = load_equation(spec, g, alpha);
      if (!base) {
        std::cerr << "no solution mod p of the Ansatz shape at alpha=" << alpha << "\n";
        return kLiftFailure;
      }
      SolveOptions opt;
      opt.gamma = g.gamma;
      opt.cert_order = cert_order;
      opt.certify = !no_cert;
      LiftReport rep = solve(eq, *base, alpha, opt);
      if (!report_path.empty()) {
        std::ofstream f(report_path);
        f << rep.to_json().dump(2) << "\n";
      }
      if (!rep.failure.empty()) {
        std::cerr << rep.failure << "\n";
        if (as_json) std::cout << rep.to_json().dump(2) << "\n";
        return rep.reached_beta < rep.solution.ctx().gamma ? kLiftFailure : kMismatch;
      }
      if (!g.out.empty()) {
        std::ofstream f(g.out);
        if (!f) throw BadInput("cannot write " + g.out);
        f << to_json(rep.solution).dump(2) << "\n";
      }
      if (as_json) {
        std::cout << rep.to_json().dump(2) << "\n";
      } else {
        const Context& c = rep.solution.ctx();
        std::cout << eq.name << " mod " << c.modulus << " (alpha " << alpha << ")";
        if (rep.certified) std::cout << ", certified to w^" << rep.cert_order;
        std::cout << ":\n" << rep.solution.str() << "\n";
      }
      return kOk;
    }

    if (*cl) {
      PhiPoly sol = read_phipoly(file);
      const u64 m = check_modulus(modulus, sol.ctx());
      ResidueTable t = classify(sol, N, m, threads, extract ? Route::Extract : Route::Auto);
      if (!manifest_path.empty()) {
        Manifest man = load_manifest_file(manifest_path, sol.ctx().p);
        if (man.modulus != m) throw BadInput("manifest modulus is " + std::to_string(man.modulus));
        ManifestReport r = check_manifest(man, t.residue);
        if (as_json) {
          emit(g, r.to_json().dump(2));
        } else {
          std::ostringstream os;
          os << "sound: " << (r.sound ? "yes" : "no") << "; never: " << (r.never_ok ? "yes" : "no")
             << "; complete: " << (r.complete ? "yes" : "no") << "; generated " << r.generated << "\n";
          for (auto& pr : r.problems) os << "  " << pr << "\n";
          emit(g, os.str());
        }
        return r.sound && r.never_ok ? kOk : kMismatch;
      }
      if (residue) {
        ResidueTable f;
        f.modulus = t.modulus;
        f.source = t.source;
        for (std::size_t i = 0; i < t.n.size(); ++i)
          if (t.residue[i] == *residue % m) {
            f.n.push_back(t.n[i]);
            f.residue.push_back(t.residue[i]);
          }
        t = std::move(f);
      }
      if (csv || g.format == "csv")
        emit(g, t.to_csv());
      else if (as_json)
        emit(g, t.to_json().dump());
      else {
        std::ostringstream os;
        for (std::size_t i = 0; i < t.n.size(); ++i) os << t.n[i].get_str() << " " << t.residue[i] << "\n";
        emit(g, os.str());
      }
      return kOk;
    }

    if (*ve) {
      PhiPoly sol;
      std::string oname = oracle_name;
      BuiltinParams bp{g.p, g.stepH, spec.k};
      if (!file.empty()) {
        sol = read_phipoly(file);
        bp.p = sol.ctx().p;
      } else {
        const unsigned alpha = g.alpha.value_or(1);
        std::string bo;
        auto [eq, base] = load_equation(spec, g, alpha, &bo);
        if (oname.empty()) oname = bo;
        SolveOptions opt;
        opt.gamma = g.gamma;
        LiftReport rep = solve(eq, *base, alpha, opt);
        if (!rep.failure.empty()) {
          std::cerr << rep.failure << "\n";
          return kLiftFailure;
        }
        sol = rep.solution;
        bp.p = eq.p;
      }
      if (oname.empty()) throw BadInput("--oracle is required with --file");
      const u64 m = check_modulus(modulus, sol.ctx());
      OracleCheck r = verify_against_oracle(sol, make_oracle(oname, bp), vN, m, n_from, extract ? Route::Extract : Route::Auto);
      if (as_json)
        emit(g, r.to_json().dump());
      else if (r.ok)
        emit(g, "OK");
      else
        emit(g, "MISMATCH at n=" + std::to_string(*r.mismatch) + ": got " + std::to_string(r.got) + ", want " +
                    std::to_string(r.want) + " (mod " + std::to_string(m) + ")");
      return r.ok ? kOk : kMismatch;
    }

    if (*mv) {
      const unsigned gamma = pick_gamma(g, 1);
      PolyExpr A = parse_poly(poly_s, zt_vars());
      const bool ok = verify_vanishing(A, g.p, gamma);
      const u64 deg = A.degree_y(), lb = degree_lower_bound(g.p, gamma);
      if (as_json)
        emit(g, json{{"vanishes", ok}, {"degree", deg}, {"lower_bound", lb}, {"gamma", gamma}}.dump());
      else
        emit(g, std::string("vanishes: ") + (ok ? "true" : "false") + "; degree " + std::to_string(deg) +
                    "; lower bound " + std::to_string(lb));
      return ok ? kOk : kMismatch;
    }

    if (*ms) {
      PolyExpr A = parse_poly(poly_s, zt_vars());
      SearchOutcome s = search_min_poly(A, g.p, slack);
      json j = {{"found", s.poly.has_value()},
                {"delta", s.delta},
                {"unknowns", s.unknowns},
                {"equations", s.equations},
                {"rank", s.rank}};
      if (s.poly) j["poly"] = s.poly->str();
      if (as_json) {
        emit(g, j.dump());
      } else {
        std::ostringstream os;
        os << (s.poly ? "found: " + s.poly->str() : std::string("not found")) << "; delta " << s.delta << "; unknowns "
           << s.unknowns << "; equations " << s.equations << "; rank " << s.rank;
        emit(g, os.str());
      }
      return kOk;
    }

    if (*mb) {
      const unsigned gamma = pick_gamma(g, 1);
      emit(g, std::to_string(degree_lower_bound(g.p, gamma)));
      return kOk;
    }

    if (*ap) {
      AppendixCheck r = verify_appendix(ak, order);
      auto yn = [](bool b) { return b ? "ok" : "FAIL"; };
      if (as_json)
        emit(g, json{{"lemma", r.lemma}, {"fuss", r.fuss}, {"equation", r.equation}}.dump());
      else
        emit(g, std::string("lemma: ") + yn(r.lemma) + "; fuss: " + yn(r.fuss) + "; equation: " + yn(r.equation));
      return r.ok() ? kOk : kMismatch;
    }
  } catch (const LiftFailure& e) {
    std::cerr << e.what() << "\n";
    return kLiftFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
