#include "tauforge/geometry.hpp"

#include "tauforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace tauforge {

namespace {

template <class Real>
Real abs_of(const Real& x) {
  using std::abs;
  return abs(x);
}

template <class Real>
std::vector<Real> invert(std::vector<Real> m, std::size_t n) {
  std::vector<Real> inv(n * n, Real(0));
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  Real scale = 0;
  for (const auto& v : m) scale = std::max(scale, abs_of(v));
  if (scale == 0) throw SingularMetric("metric vanishes at this point");
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs_of(m[r * n + c]) > abs_of(m[piv * n + c])) piv = r;
    if (abs_of(m[piv * n + c]) <= scale * Real(1e-300)) throw SingularMetric("metric is numerically singular");
    if (piv != c)
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(m[piv * n + k], m[c * n + k]);
        std::swap(inv[piv * n + k], inv[c * n + k]);
      }
    Real d = m[c * n + c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r * n + c] == 0) continue;
      Real f = m[r * n + c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r * n + k] -= f * m[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

template <class Real>
Real inf_norm(const std::vector<Real>& m, std::size_t n) {
  Real best = 0;
  for (std::size_t r = 0; r < n; ++r) {
    Real s = 0;
    for (std::size_t c = 0; c < n; ++c) s += abs_of(m[r * n + c]);
    best = std::max(best, s);
  }
  return best;
}

/// out = x * y for n x n row-major blocks.
template <class Real>
void matmul(const Real* x, const Real* y, Real* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Real s = 0;
      for (std::size_t k = 0; k < n; ++k) s += x[i * n + k] * y[k * n + j];
      out[i * n + j] = s;
    }
}

/// d_k d_l g for one (k, l) pair: g dA_k g dA_l g + g dA_l g dA_k g - g ddA_kl g.
template <class Real>
void second_partial(const MetricFrame<Real>& f, const std::vector<Real>& g_dA, std::size_t k, std::size_t l,
                    Real* out) {
  const std::size_t n = f.rank, nn = n * n;
  std::vector<Real> t1(nn), t2(nn), t3(nn), t4(nn);
  const Real* gk = &g_dA[k * nn];
  const Real* gl = &g_dA[l * nn];
  matmul(gk, gl, t1.data(), n);
  matmul(t1.data(), f.a_inv.data(), t2.data(), n);
  matmul(gl, gk, t1.data(), n);
  matmul(t1.data(), f.a_inv.data(), t3.data(), n);
  matmul(f.a_inv.data(), &f.dda[(k * n + l) * nn], t1.data(), n);
  matmul(t1.data(), f.a_inv.data(), t4.data(), n);
  for (std::size_t q = 0; q < nn; ++q) out[q] = t2[q] + t3[q] - t4[q];
}

template <class Real>
CurvatureResult<Real> assemble(const MetricFrame<Real>& f, bool parallel) {
  const std::size_t n = f.rank, nn = n * n;
  CurvatureResult<Real> res;
  if (n < 2) {
    res.riemann_max_normalized = res.riemann_max = res.christoffel_max = res.bianchi_max_normalized = 0;
    return res;
  }
  // g_dA[k] = g (d_k A); dg[k] = -g (d_k A) g
  std::vector<Real> g_dA(n * nn), dg(n * nn);
  for (std::size_t k = 0; k < n; ++k) {
    matmul(f.a_inv.data(), &f.da[k * nn], &g_dA[k * nn], n);
    matmul(&g_dA[k * nn], f.a_inv.data(), &dg[k * nn], n);
    for (std::size_t q = 0; q < nn; ++q) dg[k * nn + q] = -dg[k * nn + q];
  }
  std::vector<Real> ddg(nn * nn);
  const long pairs = static_cast<long>(nn);
  if (parallel) {
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (long p = 0; p < pairs; ++p) {
      try {
        second_partial(f, g_dA, static_cast<std::size_t>(p) / n, static_cast<std::size_t>(p) % n,
                       &ddg[static_cast<std::size_t>(p) * nn]);
      } catch (...) {
#pragma omp critical(tauforge_riemann_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (long p = 0; p < pairs; ++p)
      second_partial(f, g_dA, static_cast<std::size_t>(p) / n, static_cast<std::size_t>(p) % n,
                     &ddg[static_cast<std::size_t>(p) * nn]);
  }
  auto DG = [&](std::size_t k, std::size_t i, std::size_t j) -> const Real& { return dg[k * nn + i * n + j]; };
  auto DDG = [&](std::size_t k, std::size_t l, std::size_t i, std::size_t j) -> const Real& {
    return ddg[(k * n + l) * nn + i * n + j];
  };
  auto idx3 = [n](std::size_t a, std::size_t b, std::size_t c) { return (a * n + b) * n + c; };

  // C_mkl = d_k g_ml + d_l g_mk - d_m g_kl;  Gamma^i_kl = 1/2 A^im C_mkl
  std::vector<Real> cs(n * nn), gamma(n * nn, Real(0));
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) cs[idx3(m, k, l)] = DG(k, m, l) + DG(l, m, k) - DG(m, k, l);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        Real s = 0;
        for (std::size_t m = 0; m < n; ++m) s += f.a[i * n + m] * cs[idx3(m, k, l)];
        gamma[idx3(i, k, l)] = s / 2;
      }
  // d_j Gamma^i_kl = 1/2 (d_j A^im) C_mkl + 1/2 A^im d_j C_mkl
  std::vector<Real> dgamma(nn * nn, Real(0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          Real s = 0;
          for (std::size_t m = 0; m < n; ++m) {
            Real dc = DDG(j, k, m, l) + DDG(j, l, m, k) - DDG(j, m, k, l);
            s += f.da[j * nn + i * n + m] * cs[idx3(m, k, l)] + f.a[i * n + m] * dc;
          }
          dgamma[(j * n + i) * nn + k * n + l] = s / 2;
        }
  auto DGam = [&](std::size_t j, std::size_t i, std::size_t k, std::size_t l) -> const Real& {
    return dgamma[(j * n + i) * nn + k * n + l];
  };
  // R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj
  std::vector<Real> riem(nn * nn);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          Real s = DGam(k, i, l, j) - DGam(l, i, k, j);
          for (std::size_t m = 0; m < n; ++m)
            s += gamma[idx3(i, k, m)] * gamma[idx3(m, l, j)] - gamma[idx3(i, l, m)] * gamma[idx3(m, k, j)];
          riem[((i * n + j) * n + k) * n + l] = s;
        }
  auto R = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) -> const Real& {
    return riem[((i * n + j) * n + k) * n + l];
  };
  Real rmax = 0, gmax = 0, bmax = 0;
  for (const auto& v : riem) rmax = std::max(rmax, abs_of(v));
  for (const auto& v : gamma) gmax = std::max(gmax, abs_of(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          bmax = std::max(bmax, abs_of(Real(R(i, j, k, l) + R(i, k, l, j) + R(i, l, j, k))));
  Real norm = 1 + gmax * gmax;
  res.riemann_max = rmax;
  res.christoffel_max = gmax;
  res.riemann_max_normalized = rmax / norm;
  res.bianchi_max_normalized = bmax / norm;
  return res;
}

}  // namespace

template <class Real>
MetricFrame<Real> metric_at(const AlgebraicOperator& op, const std::vector<Real>& tau,
                            const std::vector<Real>& scales) {
  const std::size_t n = op.rank(), nn = n * n;
  if (tau.size() != n) throw std::invalid_argument("metric_at: point length != rank");
  if (!scales.empty() && scales.size() != n) throw std::invalid_argument("metric_at: scales length != rank");
  auto s = [&](std::size_t i) { return scales.empty() ? Real(1) : scales[i]; };
  MetricFrame<Real> f;
  f.rank = n;
  for (std::size_t i = 0; i < n; ++i) f.tau.push_back(tau[i] / s(i));
  f.a.assign(nn, Real(0));
  f.da.assign(n * nn, Real(0));
  f.dda.assign(nn * nn, Real(0));
  std::span<const Real> pt(tau);
  const Real zero = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const MultiPoly& p = op.a(i, j);
      // in x_i = tau_i / s_i: A^ij -> A^ij / (s_i s_j), d/dx_k = s_k d/dtau_k
      const Real sij = s(i) * s(j);
      Real v = evaluate<Real>(p, pt, zero) / sij;
      f.a[i * n + j] = f.a[j * n + i] = v;
      for (std::size_t k = 0; k < n; ++k) {
        MultiPoly dk = partial_derivative(p, k);
        if (dk.is_zero()) continue;
        Real dv = evaluate<Real>(dk, pt, zero) * s(k) / sij;
        f.da[k * nn + i * n + j] = f.da[k * nn + j * n + i] = dv;
        for (std::size_t l = 0; l < n; ++l) {
          MultiPoly dkl = partial_derivative(dk, l);
          if (dkl.is_zero()) continue;
          Real ddv = evaluate<Real>(dkl, pt, zero) * s(k) * s(l) / sij;
          f.dda[(k * n + l) * nn + i * n + j] = f.dda[(k * n + l) * nn + j * n + i] = ddv;
        }
      }
    }
  f.a_inv = invert(f.a, n);
  f.condition = to_double(Real(inf_norm(f.a, n) * inf_norm(f.a_inv, n)));
  std::vector<Real> prod(nn);
  matmul(f.a.data(), f.a_inv.data(), prod.data(), n);
  Real err = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) err = std::max(err, abs_of(Real(prod[i * n + j] - (i == j ? 1 : 0))));
  f.inverse_error = to_double(err);
  return f;
}

template <class Real>
CurvatureResult<Real> riemann_at(const MetricFrame<Real>& frame) {
  return assemble(frame, true);
}

namespace serial {
template <class Real>
CurvatureResult<Real> riemann_at(const MetricFrame<Real>& frame) {
  return assemble(frame, false);
}
}  // namespace serial

namespace {

template <class Real>
void flatness_impl(const AlgebraicOperator& op, const FlatnessConfig& cfg, FlatnessReport& rep) {
  RootSystem sys = build_system(op.system());
  const OrbitKernel& kernel = orbit_kernel(sys.kind);
  if (!kernel.real_tau) throw std::invalid_argument("flatness check needs real tau values");
  auto pts = draw_alcove_samples(sys, cfg.points, cfg.seed, 1.0, cfg.radius, cfg.min_clearance);
  const Real zero = 0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    auto frame = numeric_frame<Real>(kernel, pts[p], false);
    std::vector<Real> tau;
    for (const auto& t : frame.tau) tau.push_back(t.re);
    std::vector<Real> scales;
    if (cfg.rescale) {
      std::span<const Real> pt(tau);
      for (std::size_t i = 0; i < tau.size(); ++i) {
        using std::abs;
        using std::sqrt;
        scales.push_back(sqrt(abs(evaluate<Real>(op.a(i, i), pt, zero))));
      }
    }
    auto mf = metric_at<Real>(op, tau, scales);
    auto curv = riemann_at<Real>(mf);
    FlatnessPoint fp;
    fp.index = p;
    fp.condition = mf.condition;
    fp.riemann_max_normalized = to_double(curv.riemann_max_normalized);
    fp.bianchi_max_normalized = to_double(curv.bianchi_max_normalized);
    rep.max_normalized = std::max(rep.max_normalized, fp.riemann_max_normalized);
    rep.points.push_back(fp);
  }
}

}  // namespace

FlatnessReport flatness(const AlgebraicOperator& op, const FlatnessConfig& cfg) {
  FlatnessReport rep;
  rep.config = cfg;
  if (cfg.high_precision) {
    PrecisionScope scope(cfg.digits);
    flatness_impl<HighReal>(op, cfg, rep);
  } else {
    flatness_impl<double>(op, cfg, rep);
  }
  return rep;
}

nlohmann::json flatness_to_json(const FlatnessReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"point_seed", r.config.seed},
                   {"index", p.index},
                   {"cond_A", p.condition},
                   {"riemann_max_normalized", p.riemann_max_normalized},
                   {"bianchi_max_normalized", p.bianchi_max_normalized}});
  return {{"precision", r.config.high_precision ? nlohmann::json(r.config.digits) : nlohmann::json("double")},
          {"seed", r.config.seed},
          {"points", pts},
          {"max_normalized", r.max_normalized}};
}

template MetricFrame<double> metric_at<double>(const AlgebraicOperator&, const std::vector<double>&,
                                               const std::vector<double>&);
template MetricFrame<HighReal> metric_at<HighReal>(const AlgebraicOperator&, const std::vector<HighReal>&,
                                                   const std::vector<HighReal>&);
template CurvatureResult<double> riemann_at<double>(const MetricFrame<double>&);
template CurvatureResult<HighReal> riemann_at<HighReal>(const MetricFrame<HighReal>&);
template CurvatureResult<double> serial::riemann_at<double>(const MetricFrame<double>&);
template CurvatureResult<HighReal> serial::riemann_at<HighReal>(const MetricFrame<HighReal>&);

}  // namespace tauforge
