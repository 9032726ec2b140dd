#pragma once

#include "tauforge/numeric.hpp"
#include "tauforge/rational.hpp"

#include "json.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tauforge {

/// Raised when a product would leave the space of nu-linear coefficients.
class NuDegreeOverflow : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// c0 + c1 * nu
struct NuLinear {
  Rational c0 = 0;
  Rational c1 = 0;

  NuLinear() = default;
  NuLinear(Rational constant) : c0(std::move(constant)) {}  // NOLINT(google-explicit-constructor)
  NuLinear(Rational constant, Rational slope) : c0(std::move(constant)), c1(std::move(slope)) {}

  bool is_zero() const { return c0 == 0 && c1 == 0; }
  bool nu_free() const { return c1 == 0; }
  Rational at(const Rational& nu) const { return c0 + c1 * nu; }

  NuLinear& operator+=(const NuLinear& o);
  NuLinear& operator-=(const NuLinear& o);
  friend NuLinear operator+(NuLinear a, const NuLinear& b) { return a += b; }
  friend NuLinear operator-(NuLinear a, const NuLinear& b) { return a -= b; }
  NuLinear operator-() const { return {-c0, -c1}; }
  /// Throws NuDegreeOverflow when both factors depend on nu.
  friend NuLinear operator*(const NuLinear& a, const NuLinear& b);
  friend bool operator==(const NuLinear& a, const NuLinear& b) { return a.c0 == b.c0 && a.c1 == b.c1; }
};

using Monomial = std::vector<unsigned>;

struct CharVector {
  std::vector<unsigned> alpha;

  std::size_t size() const { return alpha.size(); }
  long degree(const Monomial& m) const;
};

inline constexpr long kZeroPolyDegree = std::numeric_limits<long>::min();

/// Sparse polynomial in tau_1..tau_rank with nu-linear rational coefficients.
class MultiPoly {
 public:
  using Terms = std::map<Monomial, NuLinear>;

  explicit MultiPoly(std::size_t rank = 0) : rank_(rank) {}

  static MultiPoly constant(std::size_t rank, const NuLinear& c);
  /// tau_{index+1}
  static MultiPoly variable(std::size_t rank, std::size_t index);
  static MultiPoly monomial(std::size_t rank, const Monomial& m, const NuLinear& c = Rational(1));

  std::size_t rank() const { return rank_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool nu_free() const;

  /// Adds c * m, dropping the entry if it cancels.
  void add_term(const Monomial& m, const NuLinear& c);
  NuLinear coefficient(const Monomial& m) const;

  /// Coefficient polynomial of nu^k (k = 0, 1).
  MultiPoly nu_part(int k) const;
  MultiPoly at_nu(const Rational& nu) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const NuLinear& s);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const NuLinear& s) { return a *= s; }
  friend MultiPoly operator*(const NuLinear& s, MultiPoly a) { return a *= s; }
  MultiPoly operator-() const;
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.rank_ == b.rank_ && a.terms_ == b.terms_;
  }

 private:
  void check_rank(const MultiPoly& o) const;
  std::size_t rank_;
  Terms terms_;
};

enum class ArithOp { Add, Sub, Mul };
MultiPoly arith(const MultiPoly& p, const MultiPoly& q, ArithOp op);

MultiPoly pow(const MultiPoly& p, unsigned k);

/// d/d tau_{index+1}
MultiPoly partial_derivative(const MultiPoly& p, std::size_t index);

/// Max weighted degree over terms; kZeroPolyDegree for the zero polynomial.
long weighted_degree(const MultiPoly& p, const CharVector& cv);

/// Exact evaluation.
Rational evaluate(const MultiPoly& p, std::span<const Rational> point, const Rational& nu);

/// Floating evaluation with compensated accumulation (double or HighReal).
template <class Real>
Real evaluate(const MultiPoly& p, std::span<const Real> point, const Real& nu) {
  if (point.size() != p.rank()) throw std::invalid_argument("evaluate: point length != rank");
  std::vector<std::vector<Real>> powers(p.rank(), std::vector<Real>{Real(1)});
  CompensatedSum<Real> acc;
  for (const auto& [m, c] : p.terms()) {
    Real term = from_rational<Real>(c.c0);
    if (c.c1 != 0) term += from_rational<Real>(c.c1) * nu;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      auto& pw = powers[i];
      while (pw.size() <= m[i]) pw.push_back(pw.back() * point[i]);
      term *= pw[m[i]];
    }
    acc.add(term);
  }
  return acc.value();
}

/// Replaces tau_i by images[i]; images must be nu-free and share p's rank.
MultiPoly substitute(const MultiPoly& p, const std::vector<MultiPoly>& images);

/// Monomials ordered by weighted degree, then lexicographically.
std::vector<Monomial> canonical_order(const MultiPoly& p, const CharVector& cv);

/// Term list {"num","den","nu_pow","exp"} in canonical order.
nlohmann::json to_json(const MultiPoly& p, const CharVector& cv);
MultiPoly poly_from_json(const nlohmann::json& j, std::size_t rank);

/// Human-readable form, e.g. "168 + 24*t2 - 3/2*t1^2 + 27/2*nu*t1".
std::string to_text(const MultiPoly& p, const CharVector& cv);

/// Parses expressions over t1..tN and nu with + - * ^ and parentheses, e.g.
/// "126*nu - (2-17*nu)*t2". Throws std::invalid_argument on syntax errors and
/// NuDegreeOverflow when the result is not nu-linear.
MultiPoly parse_poly(std::string_view text, std::size_t rank);

}  // namespace tauforge
