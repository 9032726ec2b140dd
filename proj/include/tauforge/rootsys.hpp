#pragma once

#include "tauforge/rational.hpp"

#include "json.hpp"

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace tauforge {

/// Exact vector in the ambient space of a root system.
class RVec {
 public:
  RVec() = default;
  explicit RVec(std::size_t dim) : c_(dim, Rational(0)) {}
  RVec(std::initializer_list<Rational> coords) : c_(coords) {}
  explicit RVec(std::vector<Rational> coords) : c_(std::move(coords)) {}

  std::size_t dim() const { return c_.size(); }
  const Rational& operator[](std::size_t i) const { return c_[i]; }
  Rational& operator[](std::size_t i) { return c_[i]; }
  const std::vector<Rational>& coords() const { return c_; }

  bool is_zero() const;
  Rational dot(const RVec& other) const;
  Rational norm_sq() const { return dot(*this); }

  RVec& operator+=(const RVec& o);
  RVec& operator-=(const RVec& o);
  RVec& operator*=(const Rational& s);
  friend RVec operator+(RVec a, const RVec& b) { return a += b; }
  friend RVec operator-(RVec a, const RVec& b) { return a -= b; }
  friend RVec operator*(const Rational& s, RVec a) { return a *= s; }
  RVec operator-() const;

  friend bool operator==(const RVec& a, const RVec& b) { return a.c_ == b.c_; }
  friend bool operator<(const RVec& a, const RVec& b);

  /// "(1/2, -1/2, 0, ...)"
  std::string str() const;
  std::vector<std::string> coord_strings() const;

 private:
  std::vector<Rational> c_;
};

enum class SystemKind { E7, A1, A2, G2 };

std::string_view to_string(SystemKind kind);
/// Case-insensitive; throws std::invalid_argument for unsupported names.
SystemKind parse_system_kind(std::string_view name);

struct RootSystem {
  SystemKind kind = SystemKind::E7;
  std::size_t ambient_dim = 0;
  std::size_t rank = 0;
  std::vector<RVec> positive_roots;
  std::vector<RVec> simple_roots;
  /// Ordered as the tau variables; lie in the physical subspace.
  std::vector<RVec> fundamental_weights;
  std::vector<Rational> weight_lengths_sq;
  /// Orthogonal basis u_k of the physical subspace; y_k = u_k . x.
  std::vector<RVec> chart;
  /// g_k = |u_k|^2, so the Laplacian reads sum_k g_k d^2/dy_k^2.
  std::vector<Rational> metric_weights;

  /// Orthogonal projection onto the physical subspace.
  RVec project(const RVec& v) const;
  /// Coefficients c_k with v . x = sum_k c_k y_k for v in the physical subspace.
  std::vector<Rational> chart_coords(const RVec& v) const;
  /// sum_k g_k a_k b_k over chart coordinates.
  Rational metric_dot(const RVec& a, const RVec& b) const;
  /// Expansion of a root-lattice vector in simple roots (may be non-integral for weights).
  std::vector<Rational> simple_root_coords(const RVec& v) const;
  /// p with v = sum_i p_i w_i.
  std::vector<Rational> weight_coords(const RVec& v) const;
};

RootSystem build_system(SystemKind kind);

/// s_root(v) = v - 2 (root.v)/(root.root) root; throws std::invalid_argument for a zero root.
RVec reflect(const RVec& v, const RVec& root);

struct WeylOrbit {
  RVec generator;
  /// Sorted lexicographically.
  std::vector<RVec> elements;
  std::size_t size() const { return elements.size(); }
  bool contains(const RVec& v) const;
};

/// weight_index is 1-based as in tau_1 ... tau_rank.
WeylOrbit weyl_orbit(const RootSystem& sys, std::size_t weight_index);
WeylOrbit weyl_orbit_of(const RootSystem& sys, const RVec& generator);

struct DeformedWeylVector {
  /// Sum of positive roots; rho = nu * root_sum for a single coupling nu.
  RVec root_sum;
  Rational rho_sq_over_nu_sq;
};

DeformedWeylVector deformed_weyl_vector(const RootSystem& sys);

RVec dominant_representative(const RootSystem& sys, RVec v);
bool is_dominant(const RootSystem& sys, const RVec& v);

/// lambda >= mu in dominance order: lambda - mu is a non-negative integer combination of simple roots.
bool dominates(const RootSystem& sys, const RVec& lambda, const RVec& mu);

nlohmann::json orbit_to_json(const RootSystem& sys, std::size_t weight_index, const WeylOrbit& orbit);

}  // namespace tauforge
