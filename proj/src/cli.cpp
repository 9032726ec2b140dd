#include "tauforge/cli.hpp"

#include "tauforge/derive.hpp"
#include "tauforge/geometry.hpp"
#include "tauforge/operator.hpp"
#include "tauforge/oracle.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace tauforge::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string system = "e7";
  std::string format = "json";
  std::string output;
  std::string op = "auto";
  int jobs = 0;
};

struct Outcome {
  nlohmann::json config;
  nlohmann::json result;
  bool pass = true;
};

std::vector<Rational> parse_nus(const std::vector<std::string>& raw) {
  std::vector<Rational> out;
  for (const auto& s : raw) out.push_back(parse_rational(s));
  return out;
}

std::vector<std::string> rational_strings(const std::vector<Rational>& qs) {
  std::vector<std::string> out;
  for (const auto& q : qs) out.push_back(to_string(q));
  return out;
}

/// "auto" picks the transcribed tables for E7 and the derived operator otherwise.
AlgebraicOperator select_operator(const Common& c, const RootSystem& sys) {
  std::string which = c.op;
  if (which == "auto") which = sys.kind == SystemKind::E7 ? "transcribed" : "derived";
  if (which == "transcribed" || which == "adjudicated") {
    if (sys.kind != SystemKind::E7) throw UsageError("bundled tables exist for E7 only; use --operator derived");
    return which == "transcribed" ? e7_operator() : e7_operator_adjudicated();
  }
  if (which == "derived") return derive_operator(sys);
  AlgebraicOperator op = load_operator_file(which);
  if (op.system() != sys.kind) throw UsageError("operator file is for system " + std::string(to_string(op.system())));
  return op;
}

nlohmann::json violations_json(const std::vector<Violation>& vs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : vs) out.push_back({{"entry", v.entry}, {"law", v.law}, {"detail", v.detail}});
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void render(const nlohmann::json& j, const std::string& indent, std::string& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured() && !v.empty()) {
        out += indent + k + ":\n";
        render(v, indent + "  ", out);
      } else {
        out += indent + k + ": " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
      }
    }
  } else if (j.is_array()) {
    bool flat = std::none_of(j.begin(), j.end(), [](const nlohmann::json& e) { return e.is_structured(); });
    if (flat) {
      out += indent + j.dump() + "\n";
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += indent + "- [" + std::to_string(i) + "]\n";
      render(j[i], indent + "  ", out);
    }
  } else {
    out += indent + (j.is_string() ? j.get<std::string>() : j.dump()) + "\n";
  }
}

}  // namespace

std::string render_text(const nlohmann::json& report) {
  std::string out;
  render(report, "", out);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tauforge: algebraic-form verification toolkit for trigonometric root-system Hamiltonians"};
  app.require_subcommand(1);
  Common common;
  Outcome outcome;
  std::function<Outcome()> action;

  auto add_common = [&](CLI::App* sub, bool with_operator) {
    sub->add_option("--system", common.system, "e7 | a1 | a2 | g2")->capture_default_str();
    sub->add_option("--format", common.format, "json | text")->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    sub->add_option("--output", common.output, "write the report to this file");
    sub->add_option("--jobs", common.jobs, "worker threads (0 = all available)");
    if (with_operator)
      sub->add_option("--operator", common.op, "auto | transcribed | adjudicated | derived | <path>")
          ->capture_default_str();
  };

  // orbits
  int weight = 0;
  bool elements = false;
  auto* orbits = app.add_subcommand("orbits", "Weyl orbits of the fundamental weights");
  add_common(orbits, false);
  orbits->add_option("--weight", weight, "only this weight (1-based)");
  orbits->add_flag("--elements", elements, "include exact orbit coordinates");
  orbits->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      Outcome o;
      o.config = {{"system", common.system}, {"weight", weight}, {"elements", elements}};
      nlohmann::json rows = nlohmann::json::array();
      std::vector<std::size_t> sizes;
      std::vector<std::string> lens;
      for (std::size_t a = 1; a <= sys.rank; ++a) {
        if (weight != 0 && static_cast<std::size_t>(weight) != a) continue;
        WeylOrbit orb = weyl_orbit(sys, a);
        sizes.push_back(orb.size());
        lens.push_back(to_string(sys.weight_lengths_sq[a - 1]));
        for (const auto& e : orb.elements)
          if (sys.metric_dot(e, e) != sys.weight_lengths_sq[a - 1]) o.pass = false;
        if (elements) rows.push_back(orbit_to_json(sys, a, orb));
      }
      o.result = {{"sizes", sizes}, {"lengths_sq", lens},
                  {"rho_sq_over_nu_sq", to_string(deformed_weyl_vector(sys).rho_sq_over_nu_sq)}};
      if (elements) o.result["orbits"] = rows;
      return o;
    };
  });

  // tau-eval
  std::vector<double> ypoint;
  double beta = 1.0;
  auto* tau_eval = app.add_subcommand("tau-eval", "Evaluate the tau invariants at a point y");
  add_common(tau_eval, false);
  tau_eval->add_option("--y", ypoint, "chart coordinates y_1..y_rank")->required()->delimiter(',');
  tau_eval->add_option("--beta", beta, "beta > 0")->capture_default_str();
  tau_eval->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      if (ypoint.size() != sys.rank) throw UsageError("--y needs " + std::to_string(sys.rank) + " values");
      SamplePoint p{ypoint, beta};
      auto f = numeric_frame<double>(orbit_kernel(sys.kind), p, false);
      Outcome o;
      o.config = {{"system", common.system}, {"y", ypoint}, {"beta", beta}};
      nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
      for (const auto& t : f.tau) {
        re.push_back(t.re);
        im.push_back(t.im);
      }
      o.result = {{"tau_re", re}, {"tau_im", im}, {"clearance", clearance(sys, p)}};
      return o;
    };
  });

  // verify-ground-state
  GroundStateConfig gs;
  double gs_tol = 1e-8;
  auto* vgs = app.add_subcommand("verify-ground-state", "Check H Psi_0 = E0 Psi_0 at clearance samples");
  add_common(vgs, false);
  vgs->add_option("--samples", gs.samples)->capture_default_str();
  vgs->add_option("--seed", gs.seed)->capture_default_str();
  vgs->add_option("--tol", gs_tol)->capture_default_str();
  vgs->add_option("--nu", gs.nu_list)->delimiter(',');
  vgs->add_option("--beta", gs.beta_list)->delimiter(',');
  vgs->add_flag("--high-precision", gs.high_precision);
  vgs->add_option("--digits", gs.digits, "high-precision digits (default: TAUFORGE_PRECISION or 100)");
  vgs->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      GroundStateReport rep = verify_ground_state(sys, gs);
      Outcome o;
      o.config = {{"system", common.system}, {"samples", gs.samples}, {"seed", gs.seed}, {"tol", gs_tol},
                  {"nu_list", gs.nu_list}, {"beta_list", gs.beta_list},
                  {"precision", gs.high_precision ? nlohmann::json(gs.digits) : nlohmann::json("double")}};
      o.result = {{"max_residual", rep.max_residual}, {"evaluations", rep.evaluations},
                  {"rho_sq_over_nu_sq", to_string(rep.rho_sq_over_nu_sq)},
                  {"E0_over_beta2_nu2", to_string(rep.rho_sq_over_nu_sq / 8)}};
      o.pass = rep.max_residual < gs_tol;
      return o;
    };
  });

  // verify-tables
  VerifyConfig vt;
  std::vector<std::string> vt_nus;
  auto* vtab = app.add_subcommand("verify-tables", "Compare every operator entry with the chain-rule oracle");
  add_common(vtab, true);
  vtab->add_option("--samples", vt.samples)->capture_default_str();
  vtab->add_option("--seed", vt.seed)->capture_default_str();
  vtab->add_option("--tol", vt.tol)->capture_default_str();
  vtab->add_option("--nu", vt_nus, "rational nu values (default 0,1/2,5/2)")->delimiter(',');
  vtab->add_option("--beta", vt.beta_list)->delimiter(',');
  vtab->add_flag("--high-precision", vt.high_precision);
  vtab->add_option("--digits", vt.digits);
  vtab->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      AlgebraicOperator op = select_operator(common, sys);
      if (!vt_nus.empty()) vt.nu_list = parse_nus(vt_nus);
      VerificationReport rep = verify_tables(op, sys, vt);
      Outcome o;
      o.config = {{"system", common.system}, {"operator", common.op}};
      o.result = report_to_json(rep);
      o.result["audit"] = violations_json(op.audit_log);
      o.pass = rep.all_pass();
      return o;
    };
  });

  // flag-check
  long flag_n = 3;
  auto* flag = app.add_subcommand("flag-check", "Weighted-degree bounds and constructive flag preservation");
  add_common(flag, true);
  flag->add_option("--n", flag_n, "constructive check on P_n")->capture_default_str();
  flag->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      AlgebraicOperator op = select_operator(common, sys);
      FlagReport fr = flag_degree_check(op);
      Outcome o;
      o.config = {{"system", common.system}, {"operator", common.op}, {"n", flag_n}};
      nlohmann::json viol = nlohmann::json::array();
      for (const auto& v : fr.violations)
        viol.push_back({{"entry", v.entry}, {"exp", v.monomial}, {"degree", v.degree}, {"bound", v.bound}});
      FlagBasis basis = enumerate_flag_basis(sys, op.charvec(), flag_n);
      std::string escape;
      try {
        flag_matrix(op, basis, Rational(1, 2));
      } catch (const FlagEscape& e) {
        escape = e.what();
      }
      o.result = {{"violations", viol}, {"basis_dim", basis.dim()}, {"constructive_pass", escape.empty()},
                  {"escape", escape}, {"audit", violations_json(op.audit_log)}};
      o.pass = fr.passed() && escape.empty();
      return o;
    };
  });

  // spectrum
  long spec_n = 1;
  std::vector<std::string> spec_nus{"0"};
  auto* spec = app.add_subcommand("spectrum", "Eigenvalues of the operator on P_n");
  add_common(spec, true);
  spec->add_option("--n", spec_n)->capture_default_str();
  spec->add_option("--nu", spec_nus, "one nu, or >= 3 values for an exact affine fit")->delimiter(',');
  spec->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      AlgebraicOperator op = select_operator(common, sys);
      auto nus = parse_nus(spec_nus);
      Outcome o;
      o.config = {{"system", common.system}, {"operator", common.op}, {"n", spec_n},
                  {"nu_list", rational_strings(nus)}};
      if (nus.size() == 1) {
        SpectrumResult r = spectrum(op, sys, spec_n, nus[0]);
        nlohmann::json ev = nlohmann::json::array();
        for (std::size_t k = 0; k < r.size(); ++k) {
          if (r.path == SpectrumPath::Triangular)
            ev.push_back({{"exp", r.basis.monomials[k]}, {"eigenvalue", to_string(r.exact[k])}});
          else
            ev.push_back({{"index", k}, {"eigenvalue", r.numeric[k]}});
        }
        o.result = {{"path", std::string(to_string(r.path))}, {"dim", r.size()}, {"eigenvalues", ev}};
      } else {
        SymbolicSpectrum s = spectrum_in_nu(op, sys, spec_n, nus);
        nlohmann::json ev = nlohmann::json::array();
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
          ev.push_back({{"exp", s.basis.monomials[k]}, {"c0", to_string(s.eigenvalues[k].c0)},
                        {"c1", to_string(s.eigenvalues[k].c1)}});
        o.result = {{"dim", s.basis.dim()}, {"eigenvalues", ev},
                    {"max_fit_residual", to_string(s.max_fit_residual)}};
        o.pass = s.max_fit_residual == 0;
      }
      return o;
    };
  });

  // flatness
  FlatnessConfig fc;
  double flat_tol = -1;
  auto* flat = app.add_subcommand("flatness", "Riemann tensor of the metric A_ij(tau)");
  add_common(flat, true);
  flat->add_option("--points", fc.points)->capture_default_str();
  flat->add_option("--seed", fc.seed)->capture_default_str();
  flat->add_option("--tol", flat_tol, "default 1e-6 (double) or 1e-30 (high precision)");
  flat->add_flag("--high-precision", fc.high_precision);
  flat->add_option("--digits", fc.digits);
  flat->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      AlgebraicOperator op = select_operator(common, sys);
      if (flat_tol < 0) flat_tol = fc.high_precision ? 1e-30 : 1e-6;
      FlatnessReport rep = flatness(op, fc);
      Outcome o;
      o.config = {{"system", common.system}, {"operator", common.op}, {"tol", flat_tol}};
      o.result = flatness_to_json(rep);
      o.pass = rep.max_normalized < flat_tol;
      return o;
    };
  });

  // invariance
  long inv_n = 6;
  std::size_t trials = 3;
  std::uint64_t inv_seed = 2024;
  auto* inv = app.add_subcommand("invariance", "Weighted-projective substitution on P_n (E7)");
  add_common(inv, false);
  inv->add_option("--n", inv_n)->capture_default_str();
  inv->add_option("--trials", trials)->capture_default_str();
  inv->add_option("--seed", inv_seed)->capture_default_str();
  inv->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      std::mt19937_64 rng(inv_seed);
      Outcome o;
      o.config = {{"system", common.system}, {"n", inv_n}, {"trials", trials}, {"seed", inv_seed}};
      nlohmann::json runs = nlohmann::json::array();
      for (std::size_t t = 0; t < trials; ++t) {
        ProjectiveParams params = random_projective_params(rng);
        InvarianceReport r = weighted_projective_check(params, sys, inv_n);
        std::vector<std::string> ps;
        for (Rational* q : params.all()) ps.push_back(to_string(*q));
        runs.push_back({{"params", ps}, {"dim", r.dim}, {"within_flag", r.within_flag},
                        {"escapes", r.escapes}, {"grade_preserving", r.grade_preserving},
                        {"unit_triangular", r.unit_triangular}, {"determinant", to_string(r.determinant)},
                        {"invertible", r.invertible}});
        o.pass = o.pass && r.within_flag && r.invertible && r.unit_triangular;
      }
      o.result = {{"trials", runs}};
      return o;
    };
  });

  // fit
  FitConfig fit_cfg;
  std::vector<std::string> fit_entries_arg{"failing"};
  std::string fit_write;
  auto* fit = app.add_subcommand("fit", "Refit operator entries from high-precision oracle values");
  add_common(fit, true);
  fit->add_option("--entries", fit_entries_arg, "entry ids, 'failing' or 'all'")->delimiter(',');
  fit->add_option("--samples", fit_cfg.samples, "0 = twice the largest basis plus 16")->capture_default_str();
  fit->add_option("--seed", fit_cfg.seed)->capture_default_str();
  fit->add_option("--digits", fit_cfg.digits);
  fit->add_option("--write", fit_write, "write the corrected operator file here");
  fit->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      AlgebraicOperator op = select_operator(common, sys);
      std::vector<EntryId> ids;
      nlohmann::json screen;
      if (fit_entries_arg.size() == 1 && fit_entries_arg[0] == "all") {
        ids = all_entries(op.rank());
      } else if (fit_entries_arg.size() == 1 && fit_entries_arg[0] == "failing") {
        VerificationReport rep = verify_tables(op, sys, VerifyConfig{});
        for (const auto& name : rep.failing()) ids.push_back(parse_entry(name, op.rank()));
        screen = report_to_json(rep);
      } else {
        for (const auto& name : fit_entries_arg) ids.push_back(parse_entry(name, op.rank()));
      }
      Outcome o;
      o.config = {{"system", common.system}, {"operator", common.op}, {"entries", fit_entries_arg},
                  {"samples", fit_cfg.samples}, {"seed", fit_cfg.seed}, {"digits", fit_cfg.digits},
                  {"max_den", fit_cfg.max_den}};
      std::vector<FitResult> fits = ids.empty() ? std::vector<FitResult>{} : fit_entries(sys, op.charvec(), ids, fit_cfg);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& f : fits) {
        nlohmann::json row = fit_to_json(f, op.charvec());
        const MultiPoly& before = entry_poly(op, parse_entry(f.entry, op.rank()));
        row["changed"] = !(before == f.poly);
        row["stored_text"] = to_text(before, op.charvec());
        rows.push_back(row);
        o.pass = o.pass && f.ok();
      }
      o.result = {{"fits", rows}};
      if (!screen.is_null()) o.result["screen"] = screen;
      AlgebraicOperator fixed = adjudicate(op, fits);
      o.result["checksum"] = operator_checksum(fixed);
      o.result["audit_after"] = violations_json(fixed.audit_log);
      if (!fit_write.empty()) write_file(fit_write, operator_to_text(fixed));
      return o;
    };
  });

  // derive
  std::string derive_write;
  auto* der = app.add_subcommand("derive", "Derive the algebraic form for a rank <= 2 system");
  add_common(der, false);
  der->add_option("--write", derive_write, "write the derived operator file here");
  der->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      AlgebraicOperator op = derive_operator(sys);
      Outcome o;
      o.config = {{"system", common.system}};
      nlohmann::json entries = nlohmann::json::object();
      for (const auto& id : all_entries(op.rank()))
        entries[entry_name(id.is_a, id.i, id.j)] = to_text(entry_poly(op, id), op.charvec());
      o.result = {{"entries", entries},
                  {"audit", violations_json(op.audit_log)}, {"flag_pass", flag_degree_check(op).passed()}};
      o.pass = op.audit_log.empty() && flag_degree_check(op).passed();
      if (!derive_write.empty()) write_file(derive_write, operator_to_text(op));
      return o;
    };
  });

  // export
  std::string what = "operator";
  long exp_n = 2;
  std::string exp_nu = "0";
  std::string exp_write;
  auto* exp = app.add_subcommand("export", "Export the operator file, a flag matrix or an orbit");
  add_common(exp, true);
  exp->add_option("--what", what, "operator | matrix | matrix-csv | orbit")
      ->check(CLI::IsMember({"operator", "matrix", "matrix-csv", "orbit"}))
      ->capture_default_str();
  exp->add_option("--n", exp_n)->capture_default_str();
  exp->add_option("--nu", exp_nu)->capture_default_str();
  exp->add_option("--weight", weight, "orbit to export (1-based)");
  exp->add_option("--write", exp_write, "write the exported artifact here instead of embedding it in the report");
  exp->callback([&] {
    action = [&] {
      RootSystem sys = build_system(parse_system_kind(common.system));
      Outcome o;
      o.config = {{"system", common.system}, {"operator", common.op}, {"what", what}, {"n", exp_n},
                  {"nu", exp_nu}, {"weight", weight}};
      std::string text;
      nlohmann::json payload;
      if (what == "orbit") {
        if (weight < 1) throw UsageError("--weight is required for --what orbit");
        payload = orbit_to_json(sys, static_cast<std::size_t>(weight), weyl_orbit(sys, static_cast<std::size_t>(weight)));
        text = payload.dump(1) + "\n";
      } else {
        AlgebraicOperator op = select_operator(common, sys);
        if (what == "operator") {
          text = operator_to_text(op);
          payload = operator_to_json(op);
        } else {
          FlagBasis basis = enumerate_flag_basis(sys, op.charvec(), exp_n);
          RationalMatrix m = flag_matrix(op, basis, parse_rational(exp_nu));
          payload = matrix_to_json(m, basis);
          text = what == "matrix-csv" ? matrix_to_csv(m) : payload.dump(1) + "\n";
          if (what == "matrix-csv") payload = text;
        }
      }
      if (!exp_write.empty()) {
        write_file(exp_write, text);
        o.result = {{"written", exp_write}};
      } else {
        o.result = {{"artifact", payload}};
      }
      return o;
    };
  });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (common.jobs > 0) omp_set_num_threads(common.jobs);
  if (common.format != "json" && common.format != "text") {
    err << "error: --format must be json or text\n";
    return kExitUsage;
  }
  std::string command = app.get_subcommands().front()->get_name();
  try {
    outcome = action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }

  outcome.config["jobs"] = common.jobs;
  outcome.config["format"] = common.format;
  nlohmann::json report = {{"schema_version", kSchemaVersion},
                           {"command", command},
                           {"config", outcome.config},
                           {"result", outcome.result},
                           {"pass", outcome.pass}};
  std::string text = common.format == "json" ? report.dump(2) + "\n" : render_text(report);
  if (common.output.empty()) {
    out << text;
  } else {
    write_file(common.output, text);
  }
  return outcome.pass ? kExitPass : kExitFail;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace tauforge::cli
