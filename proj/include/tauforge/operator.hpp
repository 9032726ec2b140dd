#pragma once

#include "tauforge/exactpoly.hpp"
#include "tauforge/rootsys.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <string>
#include <vector>

namespace tauforge {

/// A stored-data law that an operator entry fails.
struct Violation {
  std::string entry;   // "A17", "B3"
  std::string law;     // "flag-degree", "leading-term", "nu0-law", ...
  std::string detail;
};

/// h = sum_{i,j} A_ij d_i d_j + sum_i B_i d_i with A symmetric.
class AlgebraicOperator {
 public:
  AlgebraicOperator() = default;
  AlgebraicOperator(SystemKind system, CharVector cv);

  SystemKind system() const { return system_; }
  std::size_t rank() const { return cv_.size(); }
  const CharVector& charvec() const { return cv_; }

  /// Symmetric access; 0-based indices.
  const MultiPoly& a(std::size_t i, std::size_t j) const;
  MultiPoly& a(std::size_t i, std::size_t j);
  const MultiPoly& b(std::size_t i) const { return b_.at(i); }
  MultiPoly& b(std::size_t i) { return b_.at(i); }

  /// "transcribed", "fitted" or "derived".
  std::string provenance = "transcribed";
  /// Violations found by audit() when the operator was loaded.
  std::vector<Violation> audit_log;

  friend bool operator==(const AlgebraicOperator& x, const AlgebraicOperator& y) {
    return x.system_ == y.system_ && x.cv_.alpha == y.cv_.alpha && x.upper_ == y.upper_ && x.b_ == y.b_;
  }

 private:
  std::size_t packed(std::size_t i, std::size_t j) const;
  SystemKind system_ = SystemKind::E7;
  CharVector cv_;
  std::vector<MultiPoly> upper_;
  std::vector<MultiPoly> b_;
};

/// Entry ids "A11".."A77", "B1".."B7" (1-based).
std::string entry_name(bool is_a, std::size_t i, std::size_t j = 0);
struct EntryId {
  bool is_a = true;
  std::size_t i = 0;  // 0-based
  std::size_t j = 0;
};
EntryId parse_entry(std::string_view name, std::size_t rank);
std::vector<EntryId> all_entries(std::size_t rank);
const MultiPoly& entry_poly(const AlgebraicOperator& op, const EntryId& id);
MultiPoly& entry_poly(AlgebraicOperator& op, const EntryId& id);

CharVector characteristic_vector(SystemKind kind);

/// Checks stored-data laws: flag degree bounds, the -(w_i.w_j) leading coefficients,
/// B_i(nu=0) = -d_i^2 tau_i, and nu-freeness of A. Reports, never repairs.
std::vector<Violation> audit(const AlgebraicOperator& op, const RootSystem& sys);

/// The bundled operator tables (checksum verified, audit_log filled).
AlgebraicOperator e7_operator();
/// The bundled operator with oracle-adjudicated corrections applied.
AlgebraicOperator e7_operator_adjudicated();

nlohmann::json operator_to_json(const AlgebraicOperator& op);
/// Stable, diff-friendly text layout (one term per line).
std::string operator_to_text(const AlgebraicOperator& op);
/// Throws std::runtime_error when the checksum does not match the content.
AlgebraicOperator operator_from_json(const nlohmann::json& j);
AlgebraicOperator load_operator_file(const std::string& path);
std::string operator_checksum(const AlgebraicOperator& op);

/// Sum_{i,j} A_ij d_i d_j f + sum_i B_i d_i f.
MultiPoly apply(const AlgebraicOperator& op, const MultiPoly& f);

struct FlagViolation {
  std::string entry;
  Monomial monomial;
  long degree = 0;
  long bound = 0;
};

struct FlagReport {
  std::vector<FlagViolation> violations;
  bool passed() const { return violations.empty(); }
};

FlagReport flag_degree_check(const AlgebraicOperator& op);

struct FlagBasis {
  long n = 0;
  CharVector cv;
  std::vector<Monomial> monomials;
  /// lambda(p) = sum_i p_i w_i
  std::vector<RVec> weights;
  std::vector<long> grades;

  /// (monomial, position) sorted by monomial, for index_of
  std::vector<std::pair<Monomial, std::size_t>> sorted_;

  std::size_t dim() const { return monomials.size(); }
  std::optional<std::size_t> index_of(const Monomial& m) const;
};

/// Monomials with weighted degree <= n, graded, ordered by ascending dominance within a grade
/// (lexicographic tie-break).
FlagBasis enumerate_flag_basis(const RootSystem& sys, const CharVector& cv, long n);

struct RationalMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> data;

  RationalMatrix() = default;
  RationalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Rational(0)) {}
  Rational& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  friend bool operator==(const RationalMatrix& x, const RationalMatrix& y) {
    return x.rows == y.rows && x.cols == y.cols && x.data == y.data;
  }
};

/// Raised when apply() leaves P_n.
class FlagEscape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column p holds the coefficients of h(tau^p) at the given nu. OpenMP over columns.
RationalMatrix flag_matrix(const AlgebraicOperator& op, const FlagBasis& basis, const Rational& nu);

namespace serial {
RationalMatrix flag_matrix(const AlgebraicOperator& op, const FlagBasis& basis, const Rational& nu);
}

std::string matrix_to_csv(const RationalMatrix& m);
nlohmann::json matrix_to_json(const RationalMatrix& m, const FlagBasis& basis);

enum class SpectrumPath { Triangular, BlockTriangular, NumericBlocks };
std::string_view to_string(SpectrumPath path);

struct SpectrumResult {
  FlagBasis basis;
  Rational nu;
  SpectrumPath path = SpectrumPath::Triangular;
  /// Exact eigenvalue per basis monomial (empty on the numeric path).
  std::vector<Rational> exact;
  /// Eigenvalues as doubles, one per basis monomial (always filled).
  std::vector<double> numeric;
  std::size_t size() const { return numeric.size(); }
};

SpectrumResult spectrum(const AlgebraicOperator& op, const RootSystem& sys, long n, const Rational& nu);

struct SymbolicSpectrum {
  FlagBasis basis;
  std::vector<Rational> nus;
  /// eigenvalue(nu) = c0 + c1 nu per basis monomial
  std::vector<NuLinear> eigenvalues;
  /// max |fitted - exact| over all nus; exactly zero when eigenvalues are affine in nu
  Rational max_fit_residual;
  bool exact = true;
};

/// Spectrum at >= 3 rational nu values with an exact affine fit per eigenvalue.
SymbolicSpectrum spectrum_in_nu(const AlgebraicOperator& op, const RootSystem& sys, long n,
                                const std::vector<Rational>& nus);

/// Parameters of the grading-preserving substitution of the E7 tau variables.
/// The quadratic part of the tau_7 image carries six independent coefficients d7[0..5]
/// for tau_2^2, tau_3^2, tau_4^2, tau_2 tau_3, tau_2 tau_4, tau_3 tau_4.
struct ProjectiveParams {
  Rational a2, b21, b22;
  Rational a3, b31, b32;
  Rational a4, b41, b42;
  Rational a5, b51, b52, b53, c5;
  Rational a6, b61, b62, b63, c6;
  Rational a7, b71, b72, b73, c71, c72;
  Rational d7[6];

  std::vector<Rational*> all();
};

/// Random rationals p/q with |p| <= 9, 1 <= q <= 5.
template <class Rng>
ProjectiveParams random_projective_params(Rng& rng);

std::vector<MultiPoly> e7_projective_images(const ProjectiveParams& params);

struct InvarianceReport {
  long n = 0;
  std::size_t dim = 0;
  /// images of basis monomials with a term of weighted degree > n
  std::vector<std::string> escapes;
  bool within_flag = false;
  /// every image is weighted-homogeneous of its source grade
  bool grade_preserving = false;
  /// unit diagonal and triangular under some ordering of the basis
  bool unit_triangular = false;
  Rational determinant;
  bool invertible = false;
  RationalMatrix matrix;
};

InvarianceReport weighted_projective_check(const ProjectiveParams& params, const RootSystem& sys, long n);

/// True when m has unit diagonal and becomes triangular after a simultaneous row and column permutation.
bool unit_triangular_up_to_order(const RationalMatrix& m);

/// Determinant by exact elimination.
Rational determinant(RationalMatrix m);

}  // namespace tauforge

#include "tauforge/operator_random.ipp"
