#include "doctest.h"

#include "tauforge/operator.hpp"

#include <algorithm>
#include <random>

using namespace tauforge;

namespace {

const RootSystem& e7() {
  static const RootSystem sys = build_system(SystemKind::E7);
  return sys;
}

MultiPoly P(const char* text) { return parse_poly(text, 7); }

/// Monomials with sum alpha_i p_i <= n by nested enumeration.
std::size_t brute_force_flag_dim(const CharVector& cv, long n) {
  std::size_t count = 0;
  std::vector<long> p(cv.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, long used) -> void {
    if (i == cv.size()) {
      ++count;
      return;
    }
    for (long k = 0; used + k * long(cv.alpha[i]) <= n; ++k) self(self, i + 1, used + k * long(cv.alpha[i]));
  };
  rec(rec, 0, 0);
  return count;
}

}  // namespace

TEST_SUITE("operator") {

TEST_CASE("bundled tables") {
  AlgebraicOperator op = e7_operator();
  CHECK(op.provenance == "transcribed");
  CHECK(op.charvec().alpha == std::vector<unsigned>{1, 2, 2, 2, 3, 3, 4});
  CHECK(op.a(0, 0) == P("168 + 24*t2 + 2*t4 - 3/2*t1^2"));
  CHECK(op.b(6).coefficient(Monomial(7, 0)) == NuLinear(0, 36288));
  CHECK(op.b(6).coefficient(Monomial{0, 1, 0, 0, 0, 0, 0}) == NuLinear(0, 9024));
  CHECK(op.b(0) == P("-3/2*(1-9*nu)*t1"));
  CHECK(op.a(2, 5) == op.a(5, 2));
}

TEST_CASE("leading-term law against weight inner products") {
  AlgebraicOperator op = e7_operator_adjudicated();
  const RootSystem& sys = e7();
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = i; j < 7; ++j) {
      Monomial m(7, 0);
      m[i] += 1;
      m[j] += 1;
      Rational dot = sys.metric_dot(sys.fundamental_weights[i], sys.fundamental_weights[j]);
      CHECK_MESSAGE(op.a(i, j).coefficient(m) == NuLinear(-dot), entry_name(true, i, j));
      CHECK(op.a(i, j).nu_free());
    }
    Monomial mi(7, 0);
    mi[i] = 1;
    CHECK(op.b(i).nu_part(0) == MultiPoly::monomial(7, mi, NuLinear(-sys.weight_lengths_sq[i])));
  }
  CHECK(op.a(0, 1).coefficient(Monomial{1, 1, 0, 0, 0, 0, 0}) == NuLinear(-1));
}

TEST_CASE("audit reports the transcription slip and nothing else") {
  AlgebraicOperator op = e7_operator();
  REQUIRE(op.audit_log.size() == 1);
  CHECK(op.audit_log[0].entry == "A17");
  CHECK(op.audit_log[0].law == "leading-term");
  CHECK(e7_operator_adjudicated().audit_log.empty());
}

TEST_CASE("adjudicated operator differs from the tables only in A17 and B1..B7") {
  AlgebraicOperator t = e7_operator(), f = e7_operator_adjudicated();
  CHECK(f.provenance == "fitted");
  std::vector<std::string> changed;
  for (const auto& id : all_entries(7))
    if (!(entry_poly(t, id) == entry_poly(f, id))) changed.push_back(entry_name(id.is_a, id.i, id.j));
  CHECK(changed == std::vector<std::string>{"A17", "B1", "B2", "B3", "B4", "B5", "B6", "B7"});
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(f.b(i).nu_part(0) == t.b(i).nu_part(0));
    CHECK(f.b(i).nu_part(1) == t.b(i).nu_part(1) * NuLinear(Rational(-2)));
  }
}

TEST_CASE("serialization round trips and checksum") {
  AlgebraicOperator op = e7_operator();
  nlohmann::json j = nlohmann::json::parse(operator_to_text(op));
  CHECK(operator_from_json(j) == op);
  CHECK(j["checksum"] == operator_checksum(op));
  j["B"][0][0]["num"] = "-5";
  CHECK_THROWS_AS(operator_from_json(j), std::runtime_error);
  CHECK(parse_entry("A17", 7).j == 6);
  CHECK(entry_name(false, 2) == "B3");
  CHECK_THROWS(parse_entry("A81", 7));
}

TEST_CASE("apply on low monomials") {
  AlgebraicOperator op = e7_operator();
  CHECK(apply(op, MultiPoly::constant(7, Rational(1))).is_zero());
  CHECK(apply(op, P("t1")) == P("-3/2*(1-9*nu)*t1"));
  CHECK(apply(op, P("t2")) == P("126*nu - (2-17*nu)*t2"));
}

TEST_CASE("apply is linear") {
  AlgebraicOperator op = e7_operator();
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(-6, 6);
  const std::vector<const char*> pool{"t1", "t2*t3", "t1^2*t4", "t7", "t5 - t6", "t1^3"};
  for (int trial = 0; trial < 10; ++trial) {
    MultiPoly f = P(pool[trial % pool.size()]), g = P(pool[(trial + 2) % pool.size()]);
    NuLinear a(Rational(c(rng)) / 3), b(Rational(c(rng)) / 2);
    CHECK(apply(op, f * a + g * b) == apply(op, f) * a + apply(op, g) * b);
  }
}

TEST_CASE("flag degree bounds") {
  CHECK(flag_degree_check(e7_operator()).passed());
  CHECK(flag_degree_check(e7_operator_adjudicated()).passed());
  AlgebraicOperator bad = e7_operator();
  bad.a(0, 1) += P("t7");
  FlagReport r = flag_degree_check(bad);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].entry == "A12");
  CHECK(r.violations[0].degree == 4);
  CHECK(r.violations[0].bound == 3);
}

TEST_CASE("flag basis") {
  const CharVector cv = e7_operator().charvec();
  FlagBasis b2 = enumerate_flag_basis(e7(), cv, 2);
  std::vector<Monomial> got = b2.monomials, want{{0, 0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0, 0}, {2, 0, 0, 0, 0, 0, 0},
                                                 {0, 1, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0, 0}, {0, 0, 0, 1, 0, 0, 0}};
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  CHECK(got == want);
  for (long n = 0; n <= 8; ++n) CHECK(enumerate_flag_basis(e7(), cv, n).dim() == brute_force_flag_dim(cv, n));
  FlagBasis b6 = enumerate_flag_basis(e7(), cv, 6);
  CHECK(std::is_sorted(b6.grades.begin(), b6.grades.end()));
  for (std::size_t k = 0; k < b6.dim(); ++k) CHECK(b6.index_of(b6.monomials[k]) == k);
  CHECK_FALSE(b6.index_of(Monomial{0, 0, 0, 0, 0, 0, 2}).has_value());
}

TEST_CASE("flag matrices") {
  AlgebraicOperator op = e7_operator();
  FlagBasis b1 = enumerate_flag_basis(e7(), op.charvec(), 1);
  Rational nu(2, 3);
  RationalMatrix m = flag_matrix(op, b1, nu);
  REQUIRE(m.rows == 2);
  CHECK(m(0, 0) == 0);
  CHECK(m(0, 1) == 0);
  CHECK(m(1, 0) == 0);
  CHECK(m(1, 1) == -Rational(3, 2) * (1 - 9 * nu));

  FlagBasis b2 = enumerate_flag_basis(e7(), op.charvec(), 2);
  RationalMatrix m0 = flag_matrix(op, b2, Rational(0));
  std::size_t k = *b2.index_of(Monomial{2, 0, 0, 0, 0, 0, 0});
  CHECK(m0(k, k) == -6);

  FlagBasis b4 = enumerate_flag_basis(e7(), op.charvec(), 4);
  for (Rational v : {Rational(0), Rational(1, 2), Rational(5, 2)})
    CHECK(flag_matrix(op, b4, v) == serial::flag_matrix(op, b4, v));

  AlgebraicOperator bad = e7_operator();
  bad.b(0) += P("t7");
  CHECK_THROWS_AS(flag_matrix(bad, b2, Rational(0)), FlagEscape);
}

TEST_CASE("spectrum") {
  AlgebraicOperator op = e7_operator();
  SpectrumResult s1 = spectrum(op, e7(), 1, Rational(0));
  REQUIRE(s1.path == SpectrumPath::Triangular);
  std::vector<Rational> ev = s1.exact;
  std::sort(ev.begin(), ev.end());
  CHECK(ev == std::vector<Rational>{Rational(-3, 2), Rational(0)});

  for (long n = 2; n <= 4; ++n) {
    SpectrumResult s = spectrum(op, e7(), n, Rational(0));
    REQUIRE(s.path == SpectrumPath::Triangular);
    std::vector<Rational> got = s.exact, want;
    for (const auto& w : s.basis.weights) want.push_back(-w.norm_sq());
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }
  SpectrumResult s2 = spectrum(op, e7(), 2, Rational(0));
  CHECK(s2.exact[*s2.basis.index_of(Monomial{0, 1, 0, 0, 0, 0, 0})] == -2);

  SymbolicSpectrum sym = spectrum_in_nu(op, e7(), 3, {Rational(0), Rational(1, 2), Rational(5, 2)});
  CHECK(sym.max_fit_residual == 0);
  for (std::size_t k = 0; k < sym.basis.dim(); ++k) {
    if (sym.basis.grades[k] == 0) CHECK(sym.eigenvalues[k] == NuLinear());
    if (sym.basis.monomials[k] == Monomial{1, 0, 0, 0, 0, 0, 0})
      CHECK(sym.eigenvalues[k] == NuLinear(Rational(-3, 2), Rational(27, 2)));
  }
}

TEST_CASE("weighted-projective substitution") {
  const RootSystem& sys = e7();
  ProjectiveParams zero;
  InvarianceReport id = weighted_projective_check(zero, sys, 4);
  CHECK(id.within_flag);
  CHECK(id.unit_triangular);
  CHECK(id.determinant == 1);
  for (std::size_t r = 0; r < id.dim; ++r)
    for (std::size_t c = 0; c < id.dim; ++c) CHECK(id.matrix(r, c) == (r == c ? 1 : 0));

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    ProjectiveParams p = random_projective_params(rng);
    CHECK(e7_projective_images(p)[0] == MultiPoly::variable(7, 0));
    InvarianceReport r = weighted_projective_check(p, sys, 4);
    CHECK(r.within_flag);
    CHECK(r.escapes.empty());
    CHECK(r.grade_preserving);
    CHECK(r.invertible);
    CHECK(r.determinant == determinant(r.matrix));

    // without same-grade mixing the induced map is unit triangular
    p.b21 = p.b22 = p.b31 = p.b32 = p.b41 = p.b42 = p.c5 = p.c6 = 0;
    InvarianceReport u = weighted_projective_check(p, sys, 4);
    CHECK(u.unit_triangular);
    CHECK(u.determinant == 1);
  }
}

TEST_CASE("exact determinant") {
  RationalMatrix m(3, 3);
  m(0, 0) = 2, m(0, 1) = 1, m(1, 0) = 4, m(1, 1) = 3, m(2, 2) = Rational(1, 2);
  CHECK(determinant(m) == 1);
  RationalMatrix s(2, 2);
  s(0, 1) = 1, s(1, 0) = 1;
  CHECK(determinant(s) == -1);
}

TEST_CASE("unit triangularity up to ordering") {
  RationalMatrix m(3, 3);
  m(0, 0) = m(1, 1) = m(2, 2) = 1;
  m(0, 2) = 5;  // lower-left after swapping 0 and 2
  m(1, 0) = Rational(1, 2);
  CHECK(unit_triangular_up_to_order(m));
  m(2, 1) = 1;  // closes the cycle 0 <- 2 <- 1 <- 0
  CHECK_FALSE(unit_triangular_up_to_order(m));
  RationalMatrix d(2, 2);
  d(0, 0) = 1, d(1, 1) = 2;
  CHECK_FALSE(unit_triangular_up_to_order(d));
}

}  // TEST_SUITE
