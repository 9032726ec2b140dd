#pragma once

#include "tauforge/numeric.hpp"
#include "tauforge/operator.hpp"
#include "tauforge/rootsys.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tauforge {

/// Raised when a point is too close to a root hyperplane.
class ClearanceViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when the imaginary part of an orbit sum that should be real does not cancel.
class CancellationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kClearance = 1e-3;

/// y in chart coordinates, beta > 0. Coordinates are stored as doubles and promoted exactly.
struct SamplePoint {
  std::vector<double> y;
  double beta = 1.0;
};

struct SampleBox {
  double lo = 0.05;
  double hi = 0.35;
};

/// min over positive roots of |sin(beta (alpha.y)/2)|.
double clearance(const RootSystem& sys, const SamplePoint& p);

/// Sample i is drawn from its own engine seeded with (seed, i), rejection-resampled for clearance,
/// so the set does not depend on thread count.
std::vector<SamplePoint> draw_samples(const RootSystem& sys, std::size_t count, std::uint64_t seed, double beta,
                                      SampleBox box = {}, double min_clearance = kClearance);

/// Chart coordinates of the point where every simple root takes the angle 2 pi / h (h = highest root
/// height + 1), the point of the fundamental alcove farthest from all walls.
std::vector<double> alcove_center(const RootSystem& sys, double beta);

/// Points y = alcove_center + uniform[-radius, radius]^rank with clearance; same seeding rule as draw_samples.
std::vector<SamplePoint> draw_alcove_samples(const RootSystem& sys, std::size_t count, std::uint64_t seed,
                                             double beta, double radius, double min_clearance = kClearance);

/// Orbit data in integer form: theta(w) = (beta/L) sum_k exps[k] y_k.
struct OrbitKernel {
  SystemKind kind = SystemKind::E7;
  std::size_t rank = 0;
  long denom = 1;
  std::vector<Rational> metric;
  /// per tau variable: orbit elements as integer exponent rows (row-major, rank per element)
  std::vector<std::vector<long>> exps;
  std::vector<Rational> weight_lengths_sq;
  /// positive roots: chart coordinates and squared lengths
  std::vector<std::vector<Rational>> root_coords;
  std::vector<Rational> root_lengths_sq;
  /// every orbit is closed under negation, so the tau are real
  bool real_tau = true;
  Rational rho_sq_over_nu_sq;
};

/// Built once per system and cached.
const OrbitKernel& orbit_kernel(SystemKind kind);

template <class Real>
struct NumericFrame {
  Real beta;
  std::vector<Cplx<Real>> tau;
  /// jac[i * rank + k] = d tau_i / d y_k
  std::vector<Cplx<Real>> jac;
  /// D tau_i = sum_k g_k d^2 tau_i / d y_k^2
  std::vector<Cplx<Real>> lap_tau;
  /// d_k (log Psi_0 / nu)
  std::vector<Real> grad_logpsi;
  /// D (log Psi_0 / nu)
  Real lap_logpsi;
  /// sum_alpha |alpha|^2 / sin^2(beta alpha.y / 2)
  Real inv_sin_sq_sum;
  /// max_a |Im tau_a| / |Omega_a|
  double max_imag_ratio = 0;
};

/// Builds the frame for one point. Throws ClearanceViolation, CancellationFailure.
/// With with_roots = false only the tau part is computed and clearance is not required.
template <class Real>
NumericFrame<Real> numeric_frame(const OrbitKernel& kernel, const SamplePoint& p, bool with_roots = true);

/// Frames for many points; OpenMP over points.
template <class Real>
std::vector<NumericFrame<Real>> numeric_frames(const OrbitKernel& kernel, const std::vector<SamplePoint>& pts);

namespace serial {
template <class Real>
std::vector<NumericFrame<Real>> numeric_frames(const OrbitKernel& kernel, const std::vector<SamplePoint>& pts);
}

/// tau_a(y) by direct cosine sums (reference for the power-table kernel; real orbit sums only).
template <class Real>
std::vector<Real> tau_direct(const RootSystem& sys, const SamplePoint& p);

/// The tau values of a frame; requires real orbit sums.
std::vector<double> tau_numeric(const RootSystem& sys, const SamplePoint& p);

/// Chain-rule values of the algebraic operator at one point: A (rank x rank, full) and B = b0 + nu b1.
template <class Real>
struct OracleValues {
  std::size_t rank = 0;
  std::vector<Cplx<Real>> a;
  std::vector<Cplx<Real>> b0;
  std::vector<Cplx<Real>> b1;
  const Cplx<Real>& at(std::size_t i, std::size_t j) const { return a[i * rank + j]; }
  Cplx<Real> b(std::size_t i, const Real& nu) const { return b0[i] + nu * b1[i]; }
};

template <class Real>
OracleValues<Real> chain_rule_oracle(const OrbitKernel& kernel, const NumericFrame<Real>& f);

/// B_i at nu computed with log Psi_0 = nu * log Delta directly (not through b0/b1).
template <class Real>
Cplx<Real> oracle_b_at(const OrbitKernel& kernel, const NumericFrame<Real>& f, std::size_t i, const Real& nu);

/// E0 = beta^2 nu^2 rho^2 / 8.
template <class Real>
Real ground_state_energy(const OrbitKernel& kernel, const Real& beta, const Real& nu);

/// |H Psi_0 / Psi_0 - E0| / (E0 + 1).
template <class Real>
Real ground_state_residual(const OrbitKernel& kernel, const NumericFrame<Real>& f, const Real& nu);

template <class Real>
Cplx<Real> evaluate_complex(const MultiPoly& p, std::span<const Cplx<Real>> tau, const Real& nu);

struct VerifyConfig {
  std::size_t samples = 50;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  std::vector<Rational> nu_list{Rational(0), Rational(1, 2), Rational(5, 2)};
  std::vector<double> beta_list{1.0};
  bool high_precision = false;
  unsigned digits = kDefaultPrecisionDigits;
  SampleBox box;
};

struct EntryResidual {
  std::string entry;
  double max_rel_residual = 0;
  bool pass = false;
};

struct VerificationReport {
  VerifyConfig config;
  std::vector<EntryResidual> entries;
  /// max relative deviation of the numeric B from the affine interpolant through the first two nus
  double nu_linearity_residual = 0;
  /// max relative asymmetry |A_ij - A_ji|
  double symmetry_residual = 0;
  std::size_t sample_count = 0;

  bool all_pass() const;
  std::vector<std::string> failing() const;
};

/// |x - y| / max(1, |x|, |y|)
double relative_residual(double x, double y);

VerificationReport verify_tables(const AlgebraicOperator& op, const RootSystem& sys, const VerifyConfig& cfg);

nlohmann::json report_to_json(const VerificationReport& r);

struct GroundStateConfig {
  std::size_t samples = 100;
  std::uint64_t seed = 42;
  std::vector<double> nu_list{0.5, 1.7, 3.0};
  std::vector<double> beta_list{1.0, 2.0};
  bool high_precision = false;
  unsigned digits = kDefaultPrecisionDigits;
  SampleBox box;
};

struct GroundStateReport {
  GroundStateConfig config;
  double max_residual = 0;
  std::size_t evaluations = 0;
  Rational rho_sq_over_nu_sq;
};

GroundStateReport verify_ground_state(const RootSystem& sys, const GroundStateConfig& cfg);

struct FitConfig {
  /// 0 selects 2 * (largest basis) + 16
  std::size_t samples = 0;
  std::uint64_t seed = 7;
  unsigned digits = kDefaultPrecisionDigits;
  SampleBox box{-1.5, 1.5};
  unsigned long max_den = 4;
};

struct FitResult {
  std::string entry;
  MultiPoly poly;
  std::size_t basis_size = 0;
  std::size_t samples = 0;
  /// coefficients whose nearest small-denominator rational was not close enough
  std::vector<std::string> unreconstructed;
  /// max relative deviation between the reconstructed polynomial and the oracle values
  double refit_residual = 0;
  double diag_ratio = 0;
  bool ok() const { return unreconstructed.empty() && refit_residual < 1e-30; }
};

/// Fits the listed entries from high-precision oracle values on one shared sample set.
/// Requires real orbit sums (E7, A1, G2).
std::vector<FitResult> fit_entries(const RootSystem& sys, const CharVector& cv, const std::vector<EntryId>& ids,
                                   const FitConfig& cfg);

/// Replaces the listed entries of op by fitted polynomials; provenance becomes "fitted".
AlgebraicOperator adjudicate(const AlgebraicOperator& op, const std::vector<FitResult>& fits);

nlohmann::json fit_to_json(const FitResult& r, const CharVector& cv);

}  // namespace tauforge
