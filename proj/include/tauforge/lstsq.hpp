#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tauforge {

/// Dense row-major matrix for least-squares work.
template <class Real>
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Real> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Real(0)) {}
  Real& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Real& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

class IllConditioned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Real>
struct LstsqResult {
  std::vector<Real> x;
  /// Euclidean norm of A x - b.
  Real residual_norm = 0;
  /// max |R_kk| / min |R_kk| after column scaling; a cheap conditioning indicator.
  Real diag_ratio = 0;
};

/// min ||A x - b|| by Householder QR with unit-norm column scaling.
/// Throws IllConditioned when a scaled pivot falls below rank_tol.
template <class Real>
LstsqResult<Real> lstsq(DenseMatrix<Real> a, std::vector<Real> b, const Real& rank_tol) {
  using std::abs;
  using std::sqrt;
  const std::size_t m = a.rows, n = a.cols;
  if (b.size() != m) throw std::invalid_argument("lstsq: rhs length != rows");
  if (m < n) throw std::invalid_argument("lstsq: underdetermined system");

  std::vector<Real> scale(n);
  for (std::size_t c = 0; c < n; ++c) {
    Real s = 0;
    for (std::size_t r = 0; r < m; ++r) s += a(r, c) * a(r, c);
    s = sqrt(s);
    if (s == 0) throw IllConditioned("lstsq: zero column " + std::to_string(c));
    scale[c] = s;
    for (std::size_t r = 0; r < m; ++r) a(r, c) /= s;
  }

  std::vector<Real> v(m);
  for (std::size_t k = 0; k < n; ++k) {
    Real norm = 0;
    for (std::size_t r = k; r < m; ++r) norm += a(r, k) * a(r, k);
    norm = sqrt(norm);
    if (norm <= rank_tol) throw IllConditioned("lstsq: rank deficient at column " + std::to_string(k));
    Real alpha = a(k, k) > 0 ? Real(-norm) : norm;
    for (std::size_t r = k; r < m; ++r) v[r] = a(r, k);
    v[k] -= alpha;
    Real vnorm2 = 0;
    for (std::size_t r = k; r < m; ++r) vnorm2 += v[r] * v[r];
    if (vnorm2 != 0) {
      for (std::size_t c = k; c < n; ++c) {
        Real d = 0;
        for (std::size_t r = k; r < m; ++r) d += v[r] * a(r, c);
        d = 2 * d / vnorm2;
        for (std::size_t r = k; r < m; ++r) a(r, c) -= d * v[r];
      }
      Real d = 0;
      for (std::size_t r = k; r < m; ++r) d += v[r] * b[r];
      d = 2 * d / vnorm2;
      for (std::size_t r = k; r < m; ++r) b[r] -= d * v[r];
    }
  }

  LstsqResult<Real> out;
  out.x.assign(n, Real(0));
  Real dmax = 0, dmin = abs(a(0, 0));
  for (std::size_t k = n; k-- > 0;) {
    Real s = b[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= a(k, c) * out.x[c];
    out.x[k] = s / a(k, k);
    Real d = abs(a(k, k));
    if (d > dmax) dmax = d;
    if (d < dmin) dmin = d;
  }
  for (std::size_t c = 0; c < n; ++c) out.x[c] /= scale[c];
  Real rn = 0;
  for (std::size_t r = n; r < m; ++r) rn += b[r] * b[r];
  out.residual_norm = sqrt(rn);
  out.diag_ratio = dmax / dmin;
  return out;
}

}  // namespace tauforge
