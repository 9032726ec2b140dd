// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is 0 only when every criterion passes.

#include "tauforge/derive.hpp"
#include "tauforge/geometry.hpp"
#include "tauforge/operator.hpp"
#include "tauforge/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace tauforge;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

const RootSystem& e7() {
  static const RootSystem sys = build_system(SystemKind::E7);
  return sys;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s.empty() ? "-" : s;
}

Outcome orbit_table() {
  const std::vector<std::size_t> sizes{56, 126, 576, 756, 2016, 4032, 10080};
  const std::vector<Rational> lens{Rational(3, 2), 2, Rational(7, 2), 4, 6, Rational(15, 2), 12};
  const RootSystem& sys = e7();
  bool ok = sys.weight_lengths_sq == lens;
  std::ostringstream d;
  d << "sizes";
  for (std::size_t a = 1; a <= 7; ++a) {
    WeylOrbit orb = weyl_orbit(sys, a);
    d << ' ' << orb.size();
    ok = ok && orb.size() == sizes[a - 1];
    for (const auto& w : orb.elements) ok = ok && sys.metric_dot(w, w) == lens[a - 1];
  }
  return {ok, d.str()};
}

Outcome ground_state() {
  GroundStateReport r = verify_ground_state(e7(), GroundStateConfig{});
  const OrbitKernel& kern = orbit_kernel(SystemKind::E7);
  double e0_dev = 0;
  for (double beta : {1.0, 2.0})
    for (double nu : {0.5, 1.7, 3.0}) {
      double want = 399.0 / 4 * beta * beta * nu * nu;
      e0_dev = std::max(e0_dev, relative_residual(ground_state_energy<double>(kern, beta, nu), want));
    }
  bool ok = r.max_residual < 1e-8 && r.evaluations == 600 && r.rho_sq_over_nu_sq == 798 && e0_dev < 1e-15;
  return {ok, "max residual " + sci(r.max_residual) + " over " + std::to_string(r.evaluations) +
                  " evaluations, rho^2/nu^2 = " + to_string(r.rho_sq_over_nu_sq)};
}

Outcome table_verification() {
  const RootSystem& sys = e7();
  AlgebraicOperator op = e7_operator();
  VerifyConfig dbl;
  VerifyConfig hp;
  hp.high_precision = true;
  hp.tol = 1e-30;
  VerificationReport rd = verify_tables(op, sys, dbl);
  VerificationReport rh = verify_tables(op, sys, hp);
  if (rd.all_pass() && rh.all_pass()) return {true, "all 35 entries match (double and high precision)"};

  std::set<std::string> failing;
  for (const auto& e : rd.failing()) failing.insert(e);
  for (const auto& e : rh.failing()) failing.insert(e);
  std::vector<EntryId> ids;
  for (const auto& e : failing) ids.push_back(parse_entry(e, 7));
  std::vector<FitResult> fits = fit_entries(sys, op.charvec(), ids, FitConfig{});
  double worst = 0;
  bool fits_ok = true;
  for (const auto& f : fits) {
    worst = std::max(worst, f.refit_residual);
    fits_ok = fits_ok && f.ok();
  }
  AlgebraicOperator fixed = adjudicate(op, fits);
  bool closes = verify_tables(fixed, sys, dbl).all_pass() && verify_tables(fixed, sys, hp).all_pass();
  bool bundled = fixed == e7_operator_adjudicated();
  std::vector<std::string> names(failing.begin(), failing.end());
  return {fits_ok && closes,
          "discrepant " + join(names) + "; fitted with max refit residual " + sci(worst) +
              (closes ? "; corrected operator passes double and high precision" : "; corrected operator still fails") +
              (bundled ? "; equals bundled adjudicated file" : "; differs from bundled adjudicated file")};
}

void point_zero_on(const AlgebraicOperator& op, std::vector<std::string>& bad) {
  const RootSystem& sys = e7();
  std::vector<Rational> zero;
  for (std::size_t a = 1; a <= 7; ++a) zero.push_back(Rational(static_cast<long>(weyl_orbit(sys, a).size())));
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = i; j < 7; ++j)
      if (evaluate(op.a(i, j), zero, Rational(0)) != 0) bad.push_back(entry_name(true, i, j));
    if (evaluate(op.b(i), zero, Rational(0)) != -sys.weight_lengths_sq[i] * zero[i]) bad.push_back(entry_name(false, i));
  }
}

Outcome point_zero() {
  std::vector<std::string> bad_t, bad_f;
  point_zero_on(e7_operator(), bad_t);
  point_zero_on(e7_operator_adjudicated(), bad_f);
  Rational b1 = evaluate(e7_operator_adjudicated().b(0), std::vector<Rational>{56, 126, 576, 756, 2016, 4032, 10080},
                         Rational(0));
  return {bad_f.empty(), "adjudicated violations " + join(bad_f) + ", B1 -> " + to_string(b1) +
                      "; transcribed violations " + join(bad_t)};
}

Outcome flag_preservation() {
  AlgebraicOperator op = e7_operator();
  FlagReport fr = flag_degree_check(op);
  FlagBasis basis = enumerate_flag_basis(e7(), op.charvec(), 3);
  bool constructive = true;
  for (const auto& m : basis.monomials) {
    MultiPoly img = apply(op, MultiPoly::monomial(7, m));
    if (weighted_degree(img, op.charvec()) > 3) constructive = false;
  }
  bool adj = flag_degree_check(e7_operator_adjudicated()).passed();
  return {fr.passed() && constructive && adj,
          std::to_string(fr.violations.size()) + " degree violations, h(P3) in P3 over " + std::to_string(basis.dim()) +
              " basis monomials: " + (constructive ? "yes" : "no") + "; adjudicated bounds " + (adj ? "hold" : "fail")};
}

std::vector<std::string> structure_violations(const AlgebraicOperator& op) {
  const RootSystem& sys = e7();
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = i; j < 7; ++j) {
      Monomial m(7, 0);
      m[i] += 1;
      m[j] += 1;
      Rational want = -sys.metric_dot(sys.fundamental_weights[i], sys.fundamental_weights[j]);
      if (!(op.a(i, j).coefficient(m) == NuLinear(want))) bad.push_back(entry_name(true, i, j));
    }
    Monomial mi(7, 0);
    mi[i] = 1;
    if (!(op.b(i).nu_part(0) == MultiPoly::monomial(7, mi, NuLinear(-sys.weight_lengths_sq[i]))))
      bad.push_back(entry_name(false, i));
  }
  return bad;
}

Outcome structure_laws() {
  auto bad_f = structure_violations(e7_operator_adjudicated());
  auto bad_t = structure_violations(e7_operator());
  return {bad_f.empty(), "adjudicated violations " + join(bad_f) + "; transcribed violations " + join(bad_t)};
}

Outcome spectrum_check() {
  AlgebraicOperator op = e7_operator();
  const std::vector<Rational> nus{Rational(0), Rational(1, 2), Rational(5, 2)};
  bool ok = true;
  std::ostringstream d;
  for (long n = 1; n <= 3; ++n) {
    SymbolicSpectrum s = spectrum_in_nu(op, e7(), n, nus);
    ok = ok && s.max_fit_residual == 0;
    std::vector<Rational> got, want;
    for (std::size_t k = 0; k < s.basis.dim(); ++k) {
      got.push_back(s.eigenvalues[k].c0);
      want.push_back(-s.basis.weights[k].norm_sq());
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    ok = ok && got == want;
    d << "P" << n << " dim " << s.basis.dim() << " fit residual " << to_string(s.max_fit_residual) << "; ";
    if (n == 1) {
      std::vector<NuLinear> ev = s.eigenvalues;
      bool p1 = ev.size() == 2 && ev[0] == NuLinear() && ev[1] == NuLinear(Rational(-3, 2), Rational(27, 2));
      ok = ok && p1;
      d << "P1 = {0, -3/2(1-9nu)}: " << (p1 ? "yes" : "no") << "; ";
    }
  }
  SymbolicSpectrum adj = spectrum_in_nu(e7_operator_adjudicated(), e7(), 1, nus);
  d << "adjudicated P1 slope " << to_string(adj.eigenvalues[1].c1);
  return {ok, d.str()};
}

Outcome flatness_check() {
  AlgebraicOperator op = e7_operator_adjudicated();
  FlatnessConfig dbl;
  FlatnessConfig hp;
  hp.high_precision = true;
  FlatnessReport rd = flatness(op, dbl), rh = flatness(op, hp);
  AlgebraicOperator bad = op;
  bad.a(0, 0).add_term(Monomial{2, 0, 0, 0, 0, 0, 0}, NuLinear(Rational(-1, 2)));
  FlatnessReport rb = flatness(bad, dbl);
  FlatnessReport rt = flatness(e7_operator(), dbl);
  bool ok = rd.points.size() == 10 && rd.max_normalized < 1e-6 && rh.max_normalized < 1e-30 &&
            rb.max_normalized > 1e-3;
  return {ok, "double " + sci(rd.max_normalized) + ", high precision " + sci(rh.max_normalized) + ", fault " +
                  sci(rb.max_normalized) + " (transcribed tables " + sci(rt.max_normalized) + ")"};
}

Outcome hidden_invariance() {
  std::mt19937_64 rng(2024);
  bool ok = true;
  std::ostringstream d;
  for (int t = 0; t < 3; ++t) {
    InvarianceReport r = weighted_projective_check(random_projective_params(rng), e7(), 6);
    ok = ok && r.within_flag && r.unit_triangular;
    d << "set " << t + 1 << ": within P6 " << (r.within_flag ? "yes" : "no") << ", grade preserving "
      << (r.grade_preserving ? "yes" : "no") << ", invertible " << (r.invertible ? "yes" : "no")
      << ", unit triangular " << (r.unit_triangular ? "yes" : "no") << "; ";
  }
  d << "dim P6 = " << enumerate_flag_basis(e7(), e7_operator().charvec(), 6).dim();
  return {ok, d.str()};
}

Outcome methodology_closure() {
  RootSystem a1 = build_system(SystemKind::A1);
  AlgebraicOperator op = derive_operator(a1);
  bool a1_ok = op.a(0, 0) == parse_poly("2 - 1/2*t1^2", 1) && op.b(0) == parse_poly("-(1/2)*(1+2*nu)*t1", 1);
  bool ok = a1_ok;
  std::string d = std::string("A1 closed form ") + (a1_ok ? "exact" : "differs");
  for (auto k : {SystemKind::A2, SystemKind::G2}) {
    RootSystem sys = build_system(k);
    VerifyConfig cfg;
    cfg.samples = 20;
    cfg.tol = 1e-10;
    VerificationReport r = verify_tables(derive_operator(sys), sys, cfg);
    double worst = 0;
    for (const auto& e : r.entries) worst = std::max(worst, e.max_rel_residual);
    ok = ok && r.all_pass();
    d += std::string("; ") + std::string(to_string(k)) + " max residual " + sci(worst);
  }
  return {ok, d};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "orbit table", 5, orbit_table},
      {2, "ground state", 30, ground_state},
      {3, "table verification", 300, table_verification},
      {4, "point-zero identity", 1, point_zero},
      {5, "flag preservation", 60, flag_preservation},
      {6, "structure laws", 1, structure_laws},
      {7, "spectrum", 60, spectrum_check},
      {8, "flatness", 120, flatness_check},
      {9, "hidden invariance", 120, hidden_invariance},
      {10, "methodology closure", 60, methodology_closure},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < c.budget_s;
    bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %-20s %8.2fs (limit %gs) %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                o.detail.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
