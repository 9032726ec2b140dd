#pragma once

#include "tauforge/operator.hpp"
#include "tauforge/rootsys.hpp"

#include <map>
#include <stdexcept>

namespace tauforge {

/// Formal sum of exponentials: sum_mu c_mu e^{i beta (mu . y)}.
struct ExpSum {
  std::map<RVec, Rational> terms;

  /// Adds c e^mu, dropping the entry if it cancels.
  void add(const RVec& mu, const Rational& c);
  bool empty() const { return terms.empty(); }
  Rational coefficient(const RVec& mu) const;
  friend bool operator==(const ExpSum& a, const ExpSum& b) { return a.terms == b.terms; }
};

ExpSum exp_product(const ExpSum& s, const ExpSum& t);

/// m_lambda: sum of e^mu over the Weyl orbit of lambda.
ExpSum orbit_sum(const RootSystem& sys, const RVec& lambda);

/// The exponential sum of tau^p.
ExpSum tau_power_exp(const RootSystem& sys, const Monomial& p);

/// Rewrites Weyl-invariant exponential sums as polynomials in the tau variables.
/// Reductions are memoized by dominant weight.
class OrbitReducer {
 public:
  explicit OrbitReducer(const RootSystem& sys);

  /// m_lambda = tau^p(lambda) - (lower orbit sums), lambda = sum_i p_i w_i dominant.
  /// Throws std::invalid_argument when lambda is not a non-negative integer weight combination.
  const MultiPoly& orbit_sum_to_tau(const RVec& lambda);

  /// Throws std::logic_error when s is not Weyl invariant.
  MultiPoly decompose(const ExpSum& s);

  std::size_t memo_size() const { return memo_.size(); }

 private:
  const RootSystem& sys_;
  std::vector<ExpSum> tau_exp_;
  std::map<RVec, MultiPoly> memo_;
};

/// Exact algebraic form of the gauge-rotated Hamiltonian for a system of rank <= 2.
AlgebraicOperator derive_operator(const RootSystem& sys);

}  // namespace tauforge
