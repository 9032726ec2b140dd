#include "doctest.h"

#include "tauforge/exactpoly.hpp"

#include <random>

using namespace tauforge;

namespace {

const CharVector kE7{{1, 2, 2, 2, 3, 3, 4}};

MultiPoly random_poly(std::mt19937_64& rng, std::size_t rank, int terms, unsigned max_exp) {
  std::uniform_int_distribution<int> coef(-9, 9), den(1, 4);
  std::uniform_int_distribution<unsigned> ex(0, max_exp);
  MultiPoly p(rank);
  for (int t = 0; t < terms; ++t) {
    Monomial m(rank);
    for (auto& e : m) e = ex(rng);
    p.add_term(m, NuLinear(Rational(coef(rng)) / den(rng)));
  }
  return p;
}

}  // namespace

TEST_SUITE("exactpoly") {

TEST_CASE("parse, print and arithmetic on table entries") {
  MultiPoly a11 = parse_poly("168 + 24*t2 + 2*t4 - 3/2*t1^2", 7);
  MultiPoly rest = a11 + parse_poly("3/2*t1^2", 7);
  CHECK(rest == parse_poly("168+24*t2+2*t4", 7));
  CHECK(partial_derivative(a11, 1) == MultiPoly::constant(7, Rational(24)));
  CHECK(partial_derivative(a11, 0) == parse_poly("-3*t1", 7));
  CHECK(parse_poly(to_text(a11, kE7), 7) == a11);
  CHECK(parse_poly("126*nu - (2-17*nu)*t2", 7) == parse_poly("126*nu - 2*t2 + 17*nu*t2", 7));
  CHECK_THROWS_AS(parse_poly("nu*nu", 7), NuDegreeOverflow);
  CHECK_THROWS_AS(parse_poly("t8", 7), std::invalid_argument);
  CHECK_THROWS_AS(parse_poly("2 +* t1", 7), std::invalid_argument);
}

TEST_CASE("weighted degree") {
  CHECK(weighted_degree(parse_poly("t2^4", 7), kE7) == 8);
  CHECK(weighted_degree(parse_poly("t1*t2 + t7", 7), kE7) == 4);
  CHECK(weighted_degree(MultiPoly(7), kE7) == kZeroPolyDegree);
}

TEST_CASE("point-zero value of the first table row") {
  const std::vector<Rational> zero{56, 126, 576, 756, 2016, 4032, 10080};
  MultiPoly b1 = parse_poly("-3/2*t1 + 27/2*nu*t1", 7);
  CHECK(evaluate(b1, zero, Rational(0)) == -84);
  CHECK(evaluate(b1, zero, Rational(0)) == -Rational(3, 2) * 56);
}

TEST_CASE("weighted degree is additive and evaluation is a homomorphism") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pt(-5, 5);
  for (int trial = 0; trial < 40; ++trial) {
    MultiPoly p = random_poly(rng, 7, 4, 2), q = random_poly(rng, 7, 3, 2);
    if (p.is_zero() || q.is_zero()) continue;
    CHECK(weighted_degree(p * q, kE7) == weighted_degree(p, kE7) + weighted_degree(q, kE7));
    std::vector<Rational> x(7);
    for (auto& v : x) v = Rational(pt(rng)) / 3;
    Rational nu(1, 7);
    CHECK(evaluate(p * q, x, nu) == evaluate(p, x, nu) * evaluate(q, x, nu));
    CHECK(evaluate(p + q, x, nu) == evaluate(p, x, nu) + evaluate(q, x, nu));
    CHECK(arith(p, q, ArithOp::Sub) == p - q);
    CHECK(pow(p, 2) == p * p);
  }
}

TEST_CASE("floating evaluation agrees with exact evaluation") {
  MultiPoly p = parse_poly("1536*t2^4 - 80*t1*t2^2 + 27/2*nu*t1 - 3", 7);
  std::vector<Rational> xq{Rational(1, 3), Rational(-5, 4), 2, 0, 1, 1, Rational(1, 2)};
  std::vector<double> xd;
  for (const auto& q : xq) xd.push_back(q.get_d());
  double exact = evaluate(p, xq, Rational(5, 2)).get_d();
  CHECK(evaluate<double>(p, xd, 2.5) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("substitution") {
  auto t = [](std::size_t i) { return MultiPoly::variable(7, i - 1); };
  std::vector<MultiPoly> id;
  for (std::size_t i = 1; i <= 7; ++i) id.push_back(t(i));
  MultiPoly p = parse_poly("3*t1*t7 - t2^2 + 5", 7);
  CHECK(substitute(p, id) == p);

  Rational a2(3, 5);
  std::vector<MultiPoly> img = id;
  img[1] = t(2) + NuLinear(a2) * pow(t(1), 2);
  CHECK(substitute(t(2), img) == parse_poly("t2 + 3/5*t1^2", 7));

  img[6] = t(7) + NuLinear(Rational(2)) * pow(t(1), 4) + t(2) * t(3) + t(1) * t(6);
  for (unsigned n = 1; n <= 3; ++n) CHECK(weighted_degree(substitute(pow(t(7), n), img), kE7) == 4 * long(n));
  CHECK_THROWS_AS(substitute(p, std::vector<MultiPoly>(3, MultiPoly(7))), std::invalid_argument);
  std::vector<MultiPoly> with_nu = id;
  with_nu[0] = parse_poly("nu*t1", 7);
  CHECK_THROWS(substitute(p, with_nu));
}

TEST_CASE("json round trip and canonical order") {
  MultiPoly p = parse_poly("-72576*nu - 12*t7 + 1296*nu*t1^2 + 7/2", 7);
  CHECK(poly_from_json(to_json(p, kE7), 7) == p);
  auto order = canonical_order(p, kE7);
  REQUIRE(order.size() == 3);
  CHECK(order.front() == Monomial(7, 0));
  CHECK(kE7.degree(order[1]) <= kE7.degree(order[2]));
}

TEST_CASE("nu parts") {
  MultiPoly p = parse_poly("126*nu - (2-17*nu)*t2", 7);
  CHECK(p.nu_part(0) == parse_poly("-2*t2", 7));
  CHECK(p.nu_part(1) == parse_poly("126 + 17*t2", 7));
  CHECK(p.at_nu(Rational(2)) == parse_poly("252 + 32*t2", 7));
  CHECK_FALSE(p.nu_free());
  CHECK_THROWS_AS(p * p, NuDegreeOverflow);
}

}  // TEST_SUITE
