#pragma once

#include "tauforge/operator.hpp"
#include "tauforge/oracle.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tauforge {

class SingularMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contravariant metric A_ij(tau) with its inverse and exact first and second partials.
template <class Real>
struct MetricFrame {
  std::size_t rank = 0;
  std::vector<Real> tau;
  /// row-major rank x rank
  std::vector<Real> a;
  std::vector<Real> a_inv;
  /// d_k A_ij at [(k * rank + i) * rank + j]
  std::vector<Real> da;
  /// d_k d_l A_ij at [((k * rank + l) * rank + i) * rank + j]
  std::vector<Real> dda;
  double condition = 0;
  /// max |A A_inv - I|
  double inverse_error = 0;
};

/// Evaluates A and its partials at tau; throws SingularMetric if A cannot be inverted.
/// With scales s the frame is expressed in the coordinates tau_i / s_i (curvature vanishing is
/// unaffected; the components become comparable in size).
template <class Real>
MetricFrame<Real> metric_at(const AlgebraicOperator& op, const std::vector<Real>& tau,
                            const std::vector<Real>& scales = {});

template <class Real>
struct CurvatureResult {
  /// max |R^i_jkl| / (1 + max |Gamma|^2)
  Real riemann_max_normalized;
  Real riemann_max;
  Real christoffel_max;
  /// max |R^i_jkl + R^i_klj + R^i_ljk|, normalized like the Riemann maximum
  Real bianchi_max_normalized;
};

template <class Real>
CurvatureResult<Real> riemann_at(const MetricFrame<Real>& frame);

namespace serial {
/// Plain triple-loop assembly used as the reference for the parallel version.
template <class Real>
CurvatureResult<Real> riemann_at(const MetricFrame<Real>& frame);
}  // namespace serial

struct FlatnessConfig {
  std::size_t points = 10;
  std::uint64_t seed = 11;
  bool high_precision = false;
  unsigned digits = 100;
  /// points are drawn around the alcove center, where A is best conditioned
  double radius = 0.05;
  double min_clearance = kClearance;
  /// express the metric in tau_i / sqrt|A_ii| at each point
  bool rescale = true;
};

struct FlatnessPoint {
  std::size_t index = 0;
  double condition = 0;
  double riemann_max_normalized = 0;
  double bianchi_max_normalized = 0;
};

struct FlatnessReport {
  FlatnessConfig config;
  std::vector<FlatnessPoint> points;
  double max_normalized = 0;
};

/// Curvature at tau(y) images of clearance samples.
FlatnessReport flatness(const AlgebraicOperator& op, const FlatnessConfig& cfg);

nlohmann::json flatness_to_json(const FlatnessReport& r);

}  // namespace tauforge
