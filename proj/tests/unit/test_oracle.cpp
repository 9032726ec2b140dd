#include "doctest.h"

#include "tauforge/oracle.hpp"

#include <cmath>
#include <set>

using namespace tauforge;

namespace {

const RootSystem& sys_of(SystemKind k) {
  static const RootSystem e7 = build_system(SystemKind::E7), a1 = build_system(SystemKind::A1),
                          a2 = build_system(SystemKind::A2), g2 = build_system(SystemKind::G2);
  switch (k) {
    case SystemKind::E7: return e7;
    case SystemKind::A1: return a1;
    case SystemKind::A2: return a2;
    default: return g2;
  }
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("relative residual") {
  CHECK(relative_residual(0.0, 0.0) == 0.0);
  CHECK(relative_residual(1e-12, 0.0) == doctest::Approx(1e-12));
  CHECK(relative_residual(200.0, 202.0) == doctest::Approx(2.0 / 202.0));
  CHECK(relative_residual(-3.0, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("samples are reproducible and respect clearance") {
  const RootSystem& sys = sys_of(SystemKind::E7);
  auto s1 = draw_samples(sys, 30, 42, 1.0), s2 = draw_samples(sys, 30, 42, 1.0), s3 = draw_samples(sys, 30, 43, 1.0);
  REQUIRE(s1.size() == 30);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].y == s2[i].y);
    CHECK(clearance(sys, s1[i]) >= kClearance);
  }
  CHECK(s1[0].y != s3[0].y);
  // a prefix does not depend on the count
  auto s4 = draw_samples(sys, 5, 42, 1.0);
  CHECK(s4[4].y == s1[4].y);
  SamplePoint origin{std::vector<double>(7, 0.0), 1.0};
  CHECK(clearance(sys, origin) == 0.0);
  CHECK_THROWS_AS(numeric_frame<double>(orbit_kernel(SystemKind::E7), origin), ClearanceViolation);
}

TEST_CASE("alcove center keeps every root away from its walls") {
  for (auto k : {SystemKind::E7, SystemKind::G2, SystemKind::A2}) {
    const RootSystem& sys = sys_of(k);
    SamplePoint c{alcove_center(sys, 1.0), 1.0};
    CHECK(clearance(sys, c) > 0.1);
    for (const auto& p : draw_alcove_samples(sys, 5, 3, 1.0, 0.05)) CHECK(clearance(sys, p) >= kClearance);
  }
}

TEST_CASE("power-table kernel agrees with direct cosine sums") {
  for (auto k : {SystemKind::E7, SystemKind::G2, SystemKind::A1}) {
    const RootSystem& sys = sys_of(k);
    const OrbitKernel& kern = orbit_kernel(k);
    for (const auto& p : draw_samples(sys, 5, 1, 1.3)) {
      auto f = numeric_frame<double>(kern, p);
      auto direct = tau_direct<double>(sys, p);
      CHECK(f.max_imag_ratio < 1e-12);
      for (std::size_t a = 0; a < sys.rank; ++a) {
        CHECK(relative_residual(f.tau[a].re, direct[a]) < 1e-12);
        CHECK(f.tau[a].im == 0.0);
      }
    }
  }
  PrecisionScope scope(60);
  const RootSystem& sys = sys_of(SystemKind::E7);
  for (const auto& p : draw_samples(sys, 2, 9, 1.0)) {
    auto f = numeric_frame<HighReal>(orbit_kernel(SystemKind::E7), p);
    auto direct = tau_direct<HighReal>(sys, p);
    for (std::size_t a = 0; a < 7; ++a) CHECK(abs(f.tau[a].re - direct[a]) < HighReal("1e-50") * abs(direct[a]));
  }
}

TEST_CASE("A2 tau are complex conjugate pairs") {
  const RootSystem& sys = sys_of(SystemKind::A2);
  const OrbitKernel& kern = orbit_kernel(SystemKind::A2);
  CHECK_FALSE(kern.real_tau);
  for (const auto& p : draw_samples(sys, 5, 2, 1.0)) {
    auto f = numeric_frame<double>(kern, p);
    CHECK(std::abs(f.tau[0].re - f.tau[1].re) < 1e-12);
    CHECK(std::abs(f.tau[0].im + f.tau[1].im) < 1e-12);
  }
}

TEST_CASE("analytic derivatives agree with finite differences of tau") {
  const RootSystem& sys = sys_of(SystemKind::E7);
  const OrbitKernel& kern = orbit_kernel(SystemKind::E7);
  const double h = 1e-4;
  for (const auto& p : draw_samples(sys, 3, 17, 1.0)) {
    auto f = numeric_frame<double>(kern, p);
    auto t0 = tau_direct<double>(sys, p);
    std::vector<double> lap(7, 0.0);
    for (std::size_t k = 0; k < 7; ++k) {
      SamplePoint up = p, dn = p;
      up.y[k] += h;
      dn.y[k] -= h;
      auto tu = tau_direct<double>(sys, up), td = tau_direct<double>(sys, dn);
      for (std::size_t a = 0; a < 7; ++a) {
        double d1 = (tu[a] - td[a]) / (2 * h);
        CHECK(relative_residual(f.jac[a * 7 + k].re, d1) < 1e-6 * std::max(1.0, std::abs(t0[a])));
        lap[a] += kern.metric[k].get_d() * (tu[a] - 2 * t0[a] + td[a]) / (h * h);
      }
    }
    for (std::size_t a = 0; a < 7; ++a)
      CHECK(std::abs(f.lap_tau[a].re - lap[a]) < 1e-4 * std::max(1.0, std::abs(f.lap_tau[a].re)));
  }
}

TEST_CASE("A1 oracle reproduces the closed form") {
  const RootSystem& sys = sys_of(SystemKind::A1);
  const OrbitKernel& kern = orbit_kernel(SystemKind::A1);
  for (double beta : {1.0, 2.5}) {
    for (const auto& p : draw_samples(sys, 10, 4, beta)) {
      auto f = numeric_frame<double>(kern, p);
      auto o = chain_rule_oracle(kern, f);
      double t = f.tau[0].re;
      CHECK(relative_residual(o.at(0, 0).re, 2 - t * t / 2) < 1e-12);
      for (double nu : {0.0, 0.5, 2.5}) {
        CHECK(relative_residual(o.b(0, nu).re, -0.5 * (1 + 2 * nu) * t) < 1e-12);
        CHECK(relative_residual(oracle_b_at(kern, f, 0, nu).re, -0.5 * (1 + 2 * nu) * t) < 1e-12);
      }
    }
  }
}

TEST_CASE("B at y = 0 equals -|w_i|^2 |Omega_i|") {
  const RootSystem& sys = sys_of(SystemKind::E7);
  const OrbitKernel& kern = orbit_kernel(SystemKind::E7);
  for (double beta : {1.0, 2.0}) {
    SamplePoint origin{std::vector<double>(7, 0.0), beta};
    auto f = numeric_frame<double>(kern, origin, false);
    for (std::size_t a = 0; a < 7; ++a) {
      double expected = -sys.weight_lengths_sq[a].get_d() * double(weyl_orbit(sys, a + 1).size());
      CHECK(relative_residual(f.lap_tau[a].re / (beta * beta), expected) < 1e-12);
    }
  }
  CHECK(-sys.weight_lengths_sq[0] * 56 == -84);
}

TEST_CASE("oracle A is symmetric and B is affine in nu") {
  const OrbitKernel& kern = orbit_kernel(SystemKind::E7);
  for (const auto& p : draw_samples(sys_of(SystemKind::E7), 3, 8, 1.0)) {
    auto f = numeric_frame<double>(kern, p);
    auto o = chain_rule_oracle(kern, f);
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t j = 0; j < 7; ++j) CHECK(o.at(i, j).re == o.at(j, i).re);
      for (double nu : {0.3, 1.7}) CHECK(relative_residual(o.b(i, nu).re, oracle_b_at(kern, f, i, nu).re) < 1e-10);
    }
  }
}

TEST_CASE("ground state") {
  const RootSystem& sys = sys_of(SystemKind::E7);
  const OrbitKernel& kern = orbit_kernel(SystemKind::E7);
  CHECK(kern.rho_sq_over_nu_sq == 798);
  CHECK(ground_state_energy<double>(kern, 2.0, 1.0) == doctest::Approx(4.0 * 399 / 4));
  GroundStateConfig cfg;
  cfg.samples = 20;
  GroundStateReport r = verify_ground_state(sys, cfg);
  CHECK(r.max_residual < 1e-8);
  CHECK(r.evaluations == 20 * 3 * 2);
  CHECK(r.rho_sq_over_nu_sq == 798);

  // a wrong coupling constant in the potential breaks the identity
  auto f = numeric_frame<double>(kern, draw_samples(sys, 1, 5, 1.0)[0]);
  double nu = 1.7;
  double r_ok = ground_state_residual(kern, f, nu);
  f.inv_sin_sq_sum *= 1.01;
  CHECK(r_ok < 1e-8);
  CHECK(ground_state_residual(kern, f, nu) > 1e-4);
}

TEST_CASE("serial and parallel frames are identical") {
  const OrbitKernel& kern = orbit_kernel(SystemKind::E7);
  auto pts = draw_samples(sys_of(SystemKind::E7), 16, 21, 1.0);
  auto par = numeric_frames<double>(kern, pts), ser = serial::numeric_frames<double>(kern, pts);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    for (std::size_t a = 0; a < 7; ++a) CHECK(par[i].tau[a].re == ser[i].tau[a].re);
    for (std::size_t k = 0; k < par[i].jac.size(); ++k) CHECK(par[i].jac[k].re == ser[i].jac[k].re);
    CHECK(par[i].lap_logpsi == ser[i].lap_logpsi);
  }
}

TEST_CASE("table verification singles out A17 and the B entries") {
  const RootSystem& sys = sys_of(SystemKind::E7);
  VerifyConfig cfg;
  cfg.samples = 10;
  VerificationReport t = verify_tables(e7_operator(), sys, cfg);
  CHECK(t.entries.size() == 35);
  CHECK(t.failing() == std::vector<std::string>{"A17", "B1", "B2", "B3", "B4", "B5", "B6", "B7"});
  CHECK(t.symmetry_residual == 0.0);
  CHECK(t.nu_linearity_residual < 1e-10);
  VerificationReport f = verify_tables(e7_operator_adjudicated(), sys, cfg);
  CHECK(f.all_pass());
  for (const auto& e : f.entries) CHECK(e.max_rel_residual < 1e-9);
  CHECK_THROWS_AS(verify_tables(e7_operator(), sys_of(SystemKind::G2), cfg), std::invalid_argument);
}

TEST_CASE("fitter recovers entries from oracle values") {
  const RootSystem& sys = sys_of(SystemKind::E7);
  AlgebraicOperator op = e7_operator();
  FitConfig cfg;
  cfg.digits = 60;
  auto fits = fit_entries(sys, op.charvec(), {parse_entry("A11", 7), parse_entry("B1", 7), parse_entry("B2", 7)}, cfg);
  REQUIRE(fits.size() == 3);
  for (const auto& f : fits) {
    CHECK_MESSAGE(f.ok(), f.entry);
    CHECK(f.unreconstructed.empty());
    CHECK(f.refit_residual < 1e-30);
  }
  CHECK(fits[0].poly == op.a(0, 0));
  // the nu-part comes out at -2 times the tabulated one
  CHECK(fits[1].poly == parse_poly("-3/2*t1 - 27*nu*t1", 7));
  CHECK(fits[2].poly == parse_poly("-2*t2 - 252*nu - 34*nu*t2", 7));

  AlgebraicOperator fixed = adjudicate(op, fits);
  CHECK(fixed.provenance == "fitted");
  CHECK(fixed.b(0) == fits[1].poly);
  CHECK(fixed.a(0, 6) == op.a(0, 6));
}

}  // TEST_SUITE

TEST_SUITE("fit-regression") {

TEST_CASE("fitter reproduces the bundled adjudicated operator") {
  const RootSystem sys = build_system(SystemKind::E7);
  AlgebraicOperator op = e7_operator();
  std::vector<EntryId> ids;
  for (const char* name : {"A17", "B1", "B2", "B3", "B4", "B5", "B6", "B7"}) ids.push_back(parse_entry(name, 7));
  auto fits = fit_entries(sys, op.charvec(), ids, FitConfig{});
  for (const auto& f : fits) CHECK_MESSAGE(f.ok(), f.entry);
  AlgebraicOperator fixed = adjudicate(op, fits);
  CHECK(fixed == e7_operator_adjudicated());
  CHECK(operator_checksum(fixed) == operator_checksum(e7_operator_adjudicated()));
}

}  // TEST_SUITE
