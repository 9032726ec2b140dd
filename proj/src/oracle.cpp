#include "tauforge/oracle.hpp"

#include "tauforge/lstsq.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>

namespace tauforge {

namespace {

long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

OrbitKernel build_kernel(SystemKind kind) {
  RootSystem sys = build_system(kind);
  OrbitKernel k;
  k.kind = kind;
  k.rank = sys.rank;
  k.metric = sys.metric_weights;
  k.weight_lengths_sq = sys.weight_lengths_sq;
  k.rho_sq_over_nu_sq = deformed_weyl_vector(sys).rho_sq_over_nu_sq;
  for (const auto& root : sys.positive_roots) {
    k.root_coords.push_back(sys.chart_coords(root));
    k.root_lengths_sq.push_back(root.norm_sq());
  }
  std::vector<std::vector<std::vector<Rational>>> coords(sys.rank);
  for (std::size_t a = 0; a < sys.rank; ++a) {
    WeylOrbit orbit = weyl_orbit(sys, a + 1);
    for (const auto& w : orbit.elements) {
      if (!orbit.contains(-w)) k.real_tau = false;
      coords[a].push_back(sys.chart_coords(w));
      for (const auto& c : coords[a].back()) k.denom = lcm_long(k.denom, c.get_den().get_si());
    }
  }
  k.exps.resize(sys.rank);
  for (std::size_t a = 0; a < sys.rank; ++a)
    for (const auto& row : coords[a])
      for (const auto& c : row) {
        Rational scaled = c * k.denom;
        k.exps[a].push_back(scaled.get_num().get_si());
      }
  return k;
}

template <class Real>
Real real_of(const Rational& q) {
  return from_rational<Real>(q);
}

template <class Real>
Real abs_of(const Real& x) {
  using std::abs;
  return abs(x);
}

}  // namespace

const OrbitKernel& orbit_kernel(SystemKind kind) {
  static std::mutex mu;
  static std::map<SystemKind, std::unique_ptr<OrbitKernel>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[kind];
  if (!slot) slot = std::make_unique<OrbitKernel>(build_kernel(kind));
  return *slot;
}

double clearance(const RootSystem& sys, const SamplePoint& p) {
  const OrbitKernel& k = orbit_kernel(sys.kind);
  if (p.y.size() != k.rank) throw std::invalid_argument("sample point has wrong dimension");
  double best = 1.0;
  for (const auto& c : k.root_coords) {
    double t = 0;
    for (std::size_t i = 0; i < k.rank; ++i) t += c[i].get_d() * p.y[i];
    best = std::min(best, std::abs(std::sin(p.beta * t / 2)));
  }
  return best;
}

std::vector<SamplePoint> draw_samples(const RootSystem& sys, std::size_t count, std::uint64_t seed, double beta,
                                      SampleBox box, double min_clearance) {
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  std::vector<SamplePoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> dist(box.lo, box.hi);
    SamplePoint p;
    p.beta = beta;
    bool found = false;
    for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
      p.y.assign(sys.rank, 0.0);
      for (auto& v : p.y) v = dist(rng);
      found = clearance(sys, p) > min_clearance;
    }
    if (!found) throw ClearanceViolation("no clearance sample found in the requested box");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> alcove_center(const RootSystem& sys, double beta) {
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  // x with alpha_i . x = 1 for every simple root
  RVec x(sys.ambient_dim);
  for (std::size_t i = 0; i < sys.rank; ++i)
    x += (Rational(2) / sys.simple_roots[i].norm_sq()) * sys.fundamental_weights[i];
  Rational top = 0;
  for (const auto& root : sys.positive_roots) top = std::max(top, Rational(root.dot(x)));
  const double angle = 2 * M_PI / Rational(top + 1).get_d() / beta;
  std::vector<double> y;
  for (const auto& u : sys.chart) y.push_back(u.dot(x).get_d() * angle);
  return y;
}

std::vector<SamplePoint> draw_alcove_samples(const RootSystem& sys, std::size_t count, std::uint64_t seed,
                                             double beta, double radius, double min_clearance) {
  const std::vector<double> center = alcove_center(sys, beta);
  std::vector<SamplePoint> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> dist(-radius, radius);
    SamplePoint p;
    p.beta = beta;
    bool found = false;
    for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
      p.y = center;
      for (auto& v : p.y) v += dist(rng);
      found = clearance(sys, p) > min_clearance;
    }
    if (!found) throw ClearanceViolation("no clearance sample found near the alcove center");
    out.push_back(std::move(p));
  }
  return out;
}

template <class Real>
NumericFrame<Real> numeric_frame(const OrbitKernel& kernel, const SamplePoint& p, bool with_roots) {
  using std::cos;
  using std::sin;
  const std::size_t r = kernel.rank;
  if (p.y.size() != r) throw std::invalid_argument("sample point has wrong dimension");
  NumericFrame<Real> f;
  f.beta = Real(p.beta);
  std::vector<Real> y(r), g(r);
  for (std::size_t k = 0; k < r; ++k) {
    y[k] = Real(p.y[k]);
    g[k] = real_of<Real>(kernel.metric[k]);
  }

  f.grad_logpsi.assign(r, Real(0));
  f.inv_sin_sq_sum = 0;
  const Real half_beta = f.beta / 2;
  for (std::size_t a = 0; with_roots && a < kernel.root_coords.size(); ++a) {
    Real theta = 0;
    for (std::size_t k = 0; k < r; ++k)
      if (kernel.root_coords[a][k] != 0) theta += real_of<Real>(kernel.root_coords[a][k]) * y[k];
    theta *= half_beta;
    Real s = sin(theta), c = cos(theta);
    if (abs_of(s) <= Real(kClearance)) throw ClearanceViolation("sample point violates root clearance");
    Real cot = c / s;
    for (std::size_t k = 0; k < r; ++k)
      if (kernel.root_coords[a][k] != 0) f.grad_logpsi[k] += half_beta * real_of<Real>(kernel.root_coords[a][k]) * cot;
    f.inv_sin_sq_sum += real_of<Real>(kernel.root_lengths_sq[a]) / (s * s);
  }
  f.lap_logpsi = -(half_beta * half_beta) * f.inv_sin_sq_sum;

  // Power tables of z_k = exp(i beta y_k / L).
  std::vector<long> max_exp(r, 0);
  for (const auto& rows : kernel.exps)
    for (std::size_t e = 0; e < rows.size(); ++e) max_exp[e % r] = std::max(max_exp[e % r], std::labs(rows[e]));
  std::vector<std::vector<Cplx<Real>>> pw(r);
  const Real step_scale = f.beta / Real(kernel.denom);
  for (std::size_t k = 0; k < r; ++k) {
    Real ang = step_scale * y[k];
    Cplx<Real> z{cos(ang), sin(ang)};
    pw[k].push_back(Cplx<Real>{Real(1), Real(0)});
    for (long n = 1; n <= max_exp[k]; ++n) pw[k].push_back(pw[k].back() * z);
  }

  f.tau.assign(r, Cplx<Real>{});
  f.jac.assign(r * r, Cplx<Real>{});
  f.lap_tau.assign(r, Cplx<Real>{});
  for (std::size_t a = 0; a < r; ++a) {
    const auto& rows = kernel.exps[a];
    const std::size_t size = rows.size() / r;
    Cplx<Real> sum{};
    std::vector<Cplx<Real>> dsum(r);
    for (std::size_t e = 0; e < size; ++e) {
      const long* n = &rows[e * r];
      Cplx<Real> ex{Real(1), Real(0)};
      for (std::size_t k = 0; k < r; ++k) {
        if (n[k] > 0)
          ex = ex * pw[k][n[k]];
        else if (n[k] < 0)
          ex = ex * pw[k][-n[k]].conj();
      }
      sum += ex;
      for (std::size_t k = 0; k < r; ++k)
        if (n[k] != 0) dsum[k] += Real(n[k]) * ex;
    }
    f.tau[a] = sum;
    // d/dy_k exp(i theta) = i (beta/L) n_k exp(i theta)
    for (std::size_t k = 0; k < r; ++k) f.jac[a * r + k] = Cplx<Real>{-step_scale * dsum[k].im, step_scale * dsum[k].re};
    // every orbit element has |w|^2 = d_a^2, so D exp(i theta) = -beta^2 d_a^2 exp(i theta)
    f.lap_tau[a] = (-(f.beta * f.beta) * real_of<Real>(kernel.weight_lengths_sq[a])) * sum;
    double ratio = to_double(abs_of(Real(sum.im))) / static_cast<double>(size);
    f.max_imag_ratio = std::max(f.max_imag_ratio, ratio);
  }
  if (kernel.real_tau) {
    if (f.max_imag_ratio > 1e-10)
      throw CancellationFailure("imaginary part of an orbit sum did not cancel (ratio " +
                                format_real(f.max_imag_ratio) + ")");
    for (auto& v : f.tau) v.im = 0;
    for (auto& v : f.jac) v.im = 0;
    for (auto& v : f.lap_tau) v.im = 0;
  }
  return f;
}

template <class Real>
std::vector<NumericFrame<Real>> numeric_frames(const OrbitKernel& kernel, const std::vector<SamplePoint>& pts) {
  std::vector<NumericFrame<Real>> out(pts.size());
  std::exception_ptr error;
  const long n = static_cast<long>(pts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = numeric_frame<Real>(kernel, pts[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(tauforge_frames_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

namespace serial {
template <class Real>
std::vector<NumericFrame<Real>> numeric_frames(const OrbitKernel& kernel, const std::vector<SamplePoint>& pts) {
  std::vector<NumericFrame<Real>> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(numeric_frame<Real>(kernel, p));
  return out;
}
}  // namespace serial

namespace {

/// Chart coordinates of every orbit element, per tau variable; computed once per system.
const std::vector<std::vector<std::vector<Rational>>>& orbit_chart_coords(const RootSystem& sys) {
  static std::mutex mu;
  static std::map<SystemKind, std::vector<std::vector<std::vector<Rational>>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(sys.kind);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<std::vector<Rational>>> coords;
  for (std::size_t a = 1; a <= sys.rank; ++a) {
    std::vector<std::vector<Rational>> rows;
    for (const auto& w : weyl_orbit(sys, a).elements) rows.push_back(sys.chart_coords(w));
    coords.push_back(std::move(rows));
  }
  return cache.emplace(sys.kind, std::move(coords)).first->second;
}

}  // namespace

template <class Real>
std::vector<Real> tau_direct(const RootSystem& sys, const SamplePoint& p) {
  using std::cos;
  using std::sin;
  using std::abs;
  if (p.y.size() != sys.rank) throw std::invalid_argument("sample point has wrong dimension");
  const auto& coords = orbit_chart_coords(sys);
  std::vector<Real> out;
  for (std::size_t a = 0; a < sys.rank; ++a) {
    const auto& orbit = coords[a];
    Real re = 0, im = 0;
    for (const auto& c : orbit) {
      Real theta = 0;
      for (std::size_t k = 0; k < sys.rank; ++k) theta += from_rational<Real>(c[k]) * Real(p.y[k]);
      theta *= Real(p.beta);
      re += cos(theta);
      im += sin(theta);
    }
    if (to_double(Real(abs(im))) > 1e-10 * static_cast<double>(orbit.size()))
      throw CancellationFailure("orbit sum is not real for this system");
    out.push_back(re);
  }
  return out;
}

std::vector<double> tau_numeric(const RootSystem& sys, const SamplePoint& p) {
  const OrbitKernel& k = orbit_kernel(sys.kind);
  if (!k.real_tau) throw std::invalid_argument("tau values of this system are complex");
  auto f = numeric_frame<double>(k, p, false);
  std::vector<double> out;
  for (const auto& t : f.tau) out.push_back(t.re);
  return out;
}

template <class Real>
OracleValues<Real> chain_rule_oracle(const OrbitKernel& kernel, const NumericFrame<Real>& f) {
  const std::size_t r = kernel.rank;
  OracleValues<Real> v;
  v.rank = r;
  v.a.assign(r * r, Cplx<Real>{});
  v.b0.assign(r, Cplx<Real>{});
  v.b1.assign(r, Cplx<Real>{});
  const Real inv_b2 = Real(1) / (f.beta * f.beta);
  std::vector<Real> g(r);
  for (std::size_t k = 0; k < r; ++k) g[k] = real_of<Real>(kernel.metric[k]);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      Cplx<Real> s{};
      for (std::size_t k = 0; k < r; ++k) s += g[k] * (f.jac[i * r + k] * f.jac[j * r + k]);
      v.a[i * r + j] = inv_b2 * s;
    }
  for (std::size_t i = 0; i < r; ++i) {
    v.b0[i] = inv_b2 * f.lap_tau[i];
    Cplx<Real> s{};
    for (std::size_t k = 0; k < r; ++k) s += (g[k] * f.grad_logpsi[k]) * f.jac[i * r + k];
    v.b1[i] = (2 * inv_b2) * s;
  }
  return v;
}

template <class Real>
Cplx<Real> oracle_b_at(const OrbitKernel& kernel, const NumericFrame<Real>& f, std::size_t i, const Real& nu) {
  const std::size_t r = kernel.rank;
  Cplx<Real> s = f.lap_tau[i];
  for (std::size_t k = 0; k < r; ++k) {
    Real grad = nu * f.grad_logpsi[k];
    s += (2 * real_of<Real>(kernel.metric[k]) * grad) * f.jac[i * r + k];
  }
  return (Real(1) / (f.beta * f.beta)) * s;
}

template <class Real>
Real ground_state_energy(const OrbitKernel& kernel, const Real& beta, const Real& nu) {
  return beta * beta * nu * nu * real_of<Real>(kernel.rho_sq_over_nu_sq) / 8;
}

template <class Real>
Real ground_state_residual(const OrbitKernel& kernel, const NumericFrame<Real>& f, const Real& nu) {
  const std::size_t r = kernel.rank;
  Real grad_sq = 0;
  for (std::size_t k = 0; k < r; ++k) grad_sq += real_of<Real>(kernel.metric[k]) * f.grad_logpsi[k] * f.grad_logpsi[k];
  Real potential = nu * (nu - 1) * f.beta * f.beta / 8 * f.inv_sin_sq_sum;
  Real h_over_psi = -(nu * f.lap_logpsi + nu * nu * grad_sq) / 2 + potential;
  Real e0 = ground_state_energy<Real>(kernel, f.beta, nu);
  return abs_of(Real(h_over_psi - e0)) / (e0 + 1);
}

template <class Real>
Cplx<Real> evaluate_complex(const MultiPoly& p, std::span<const Cplx<Real>> tau, const Real& nu) {
  if (tau.size() != p.rank()) throw std::invalid_argument("evaluate: point length != rank");
  std::vector<std::vector<Cplx<Real>>> powers(p.rank(), std::vector<Cplx<Real>>{Cplx<Real>{Real(1), Real(0)}});
  Cplx<Real> acc{};
  for (const auto& [m, c] : p.terms()) {
    Real coef = from_rational<Real>(c.c0);
    if (c.c1 != 0) coef += from_rational<Real>(c.c1) * nu;
    Cplx<Real> term{coef, Real(0)};
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      auto& pw = powers[i];
      while (pw.size() <= m[i]) pw.push_back(pw.back() * tau[i]);
      term = term * pw[m[i]];
    }
    acc += term;
  }
  return acc;
}

double relative_residual(double x, double y) {
  return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

namespace {

template <class Real>
Real rel_residual(const Cplx<Real>& x, const Cplx<Real>& y) {
  Real d = (x - y).abs();
  Real s = std::max({Real(1), x.abs(), y.abs()});
  return d / s;
}

template <class Real>
void verify_impl(const AlgebraicOperator& op, const RootSystem& sys, const VerifyConfig& cfg,
                 VerificationReport& rep) {
  const OrbitKernel& kernel = orbit_kernel(sys.kind);
  const auto ids = all_entries(op.rank());
  std::vector<double> worst(ids.size(), 0.0);
  std::vector<Real> nus;
  for (const auto& q : cfg.nu_list) nus.push_back(from_rational<Real>(q));

  for (std::size_t bi = 0; bi < cfg.beta_list.size(); ++bi) {
    auto pts = draw_samples(sys, cfg.samples, cfg.seed + 1000003ULL * bi, cfg.beta_list[bi], cfg.box);
    auto frames = numeric_frames<Real>(kernel, pts);
    const long n = static_cast<long>(frames.size());
    std::vector<std::vector<double>> per(frames.size());
    std::vector<double> lin(frames.size(), 0.0), sym(frames.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long s = 0; s < n; ++s) {
      const auto& f = frames[static_cast<std::size_t>(s)];
      auto vals = chain_rule_oracle<Real>(kernel, f);
      std::span<const Cplx<Real>> tau(f.tau);
      auto& row = per[static_cast<std::size_t>(s)];
      row.assign(ids.size(), 0.0);
      for (std::size_t e = 0; e < ids.size(); ++e) {
        const auto& id = ids[e];
        if (id.is_a) {
          Cplx<Real> tab = evaluate_complex<Real>(op.a(id.i, id.j), tau, Real(0));
          row[e] = to_double(rel_residual<Real>(vals.at(id.i, id.j), tab));
          sym[static_cast<std::size_t>(s)] =
              std::max(sym[static_cast<std::size_t>(s)], to_double(rel_residual<Real>(vals.at(id.i, id.j), vals.at(id.j, id.i))));
        } else {
          std::vector<Cplx<Real>> bnum;
          for (const auto& nu : nus) {
            bnum.push_back(oracle_b_at<Real>(kernel, f, id.i, nu));
            Cplx<Real> tab = evaluate_complex<Real>(op.b(id.i), tau, nu);
            row[e] = std::max(row[e], to_double(rel_residual<Real>(bnum.back(), tab)));
          }
          if (nus.size() >= 3) {
            Real t = (nus[2] - nus[0]) / (nus[1] - nus[0]);
            Cplx<Real> interp = bnum[0] + t * (bnum[1] - bnum[0]);
            lin[static_cast<std::size_t>(s)] =
                std::max(lin[static_cast<std::size_t>(s)], to_double(rel_residual<Real>(interp, bnum[2])));
          }
        }
      }
    }
    for (std::size_t s = 0; s < frames.size(); ++s) {
      for (std::size_t e = 0; e < ids.size(); ++e) worst[e] = std::max(worst[e], per[s][e]);
      rep.nu_linearity_residual = std::max(rep.nu_linearity_residual, lin[s]);
      rep.symmetry_residual = std::max(rep.symmetry_residual, sym[s]);
    }
    rep.sample_count += frames.size();
  }
  for (std::size_t e = 0; e < ids.size(); ++e)
    rep.entries.push_back({entry_name(ids[e].is_a, ids[e].i, ids[e].j), worst[e], worst[e] < cfg.tol});
}

}  // namespace

bool VerificationReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const EntryResidual& e) { return e.pass; });
}

std::vector<std::string> VerificationReport::failing() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (!e.pass) out.push_back(e.entry);
  return out;
}

VerificationReport verify_tables(const AlgebraicOperator& op, const RootSystem& sys, const VerifyConfig& cfg) {
  if (op.system() != sys.kind) throw std::invalid_argument("operator and root system differ");
  if (cfg.nu_list.size() < 2) throw std::invalid_argument("verify_tables needs at least two nu values");
  VerificationReport rep;
  rep.config = cfg;
  if (cfg.high_precision) {
    PrecisionScope scope(cfg.digits);
    verify_impl<HighReal>(op, sys, cfg, rep);
  } else {
    verify_impl<double>(op, sys, cfg, rep);
  }
  return rep;
}

nlohmann::json report_to_json(const VerificationReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"entry", e.entry}, {"max_rel_residual", e.max_rel_residual}, {"pass", e.pass},
                       {"samples", r.sample_count}});
  std::vector<std::string> nus;
  for (const auto& q : r.config.nu_list) nus.push_back(to_string(q));
  return {{"seed", r.config.seed},
          {"samples", r.config.samples},
          {"tol", r.config.tol},
          {"nu_list", nus},
          {"beta_list", r.config.beta_list},
          {"precision", r.config.high_precision ? nlohmann::json(r.config.digits) : nlohmann::json("double")},
          {"sample_box", {r.config.box.lo, r.config.box.hi}},
          {"entries", entries},
          {"nu_linearity_residual", r.nu_linearity_residual},
          {"symmetry_residual", r.symmetry_residual},
          {"failing", r.failing()},
          {"all_pass", r.all_pass()}};
}

namespace {

template <class Real>
void ground_state_impl(const RootSystem& sys, const GroundStateConfig& cfg, GroundStateReport& rep) {
  const OrbitKernel& kernel = orbit_kernel(sys.kind);
  for (std::size_t bi = 0; bi < cfg.beta_list.size(); ++bi) {
    auto pts = draw_samples(sys, cfg.samples, cfg.seed + 1000003ULL * bi, cfg.beta_list[bi], cfg.box);
    auto frames = numeric_frames<Real>(kernel, pts);
    for (const auto& f : frames)
      for (double nu : cfg.nu_list) {
        rep.max_residual = std::max(rep.max_residual, to_double(ground_state_residual<Real>(kernel, f, Real(nu))));
        ++rep.evaluations;
      }
  }
}

}  // namespace

GroundStateReport verify_ground_state(const RootSystem& sys, const GroundStateConfig& cfg) {
  GroundStateReport rep;
  rep.config = cfg;
  rep.rho_sq_over_nu_sq = deformed_weyl_vector(sys).rho_sq_over_nu_sq;
  if (cfg.high_precision) {
    PrecisionScope scope(cfg.digits);
    ground_state_impl<HighReal>(sys, cfg, rep);
  } else {
    ground_state_impl<double>(sys, cfg, rep);
  }
  return rep;
}

namespace {

std::vector<Monomial> monomials_up_to(const CharVector& cv, long bound) {
  std::vector<Monomial> out;
  Monomial m(cv.size(), 0);
  auto rec = [&](auto&& self, std::size_t k, long used) -> void {
    if (k == cv.size()) {
      out.push_back(m);
      return;
    }
    for (unsigned p = 0; used + static_cast<long>(p * cv.alpha[k]) <= bound; ++p) {
      m[k] = p;
      self(self, k + 1, used + static_cast<long>(p * cv.alpha[k]));
    }
    m[k] = 0;
  };
  rec(rec, 0, 0);
  return out;
}

Rational to_rational(const HighReal& x) {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), x.backend().data());
  return q;
}

struct PartFit {
  std::vector<Rational> coeffs;
  std::vector<std::string> unreconstructed;
  double diag_ratio = 0;
};

PartFit fit_part(const std::vector<Monomial>& basis, const std::vector<std::vector<std::vector<HighReal>>>& powers,
                 const std::vector<HighReal>& target, const FitConfig& cfg, const std::string& label) {
  const std::size_t m = target.size(), n = basis.size();
  DenseMatrix<HighReal> a(m, n);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t c = 0; c < n; ++c) {
      HighReal v = 1;
      for (std::size_t i = 0; i < basis[c].size(); ++i)
        if (basis[c][i]) v *= powers[s][i][basis[c][i]];
      a(s, c) = v;
    }
  HighReal tol = pow(HighReal(10), -static_cast<int>(cfg.digits / 2));
  auto sol = lstsq<HighReal>(std::move(a), target, tol);
  PartFit out;
  out.diag_ratio = to_double(sol.diag_ratio);
  HighReal accept = pow(HighReal(10), -static_cast<int>(cfg.digits / 3));
  for (std::size_t c = 0; c < n; ++c) {
    Rational raw = to_rational(sol.x[c]);
    Rational rec = best_rational(raw, cfg.max_den);
    HighReal diff = abs(sol.x[c] - from_rational<HighReal>(rec));
    if (diff > accept * std::max(HighReal(1), HighReal(abs(sol.x[c])))) {
      out.unreconstructed.push_back(label + " coefficient of exponent " + nlohmann::json(basis[c]).dump() + " = " +
                                    format_real(sol.x[c]));
      rec = best_rational(raw, 1000000000000UL);
    }
    out.coeffs.push_back(rec);
  }
  return out;
}

}  // namespace

std::vector<FitResult> fit_entries(const RootSystem& sys, const CharVector& cv, const std::vector<EntryId>& ids,
                                   const FitConfig& cfg) {
  const OrbitKernel& kernel = orbit_kernel(sys.kind);
  if (!kernel.real_tau) throw std::invalid_argument("fitting needs real tau values; not available for this system");
  if (cv.size() != sys.rank) throw std::invalid_argument("characteristic vector length != rank");
  PrecisionScope scope(cfg.digits);

  std::vector<std::vector<Monomial>> bases;
  std::size_t largest = 0;
  for (const auto& id : ids) {
    long bound = id.is_a ? cv.alpha[id.i] + cv.alpha[id.j] : cv.alpha[id.i];
    bases.push_back(monomials_up_to(cv, bound));
    largest = std::max(largest, bases.back().size());
  }
  const std::size_t count = cfg.samples ? cfg.samples : 2 * largest + 16;
  if (count < 2 * largest) throw std::invalid_argument("fit needs at least twice as many samples as basis monomials");

  auto pts = draw_samples(sys, count, cfg.seed, 1.0, cfg.box);
  auto frames = numeric_frames<HighReal>(kernel, pts);
  std::vector<OracleValues<HighReal>> vals;
  for (const auto& f : frames) vals.push_back(chain_rule_oracle<HighReal>(kernel, f));

  long max_deg = 0;
  for (const auto& b : bases)
    for (const auto& m : b)
      for (unsigned e : m) max_deg = std::max<long>(max_deg, e);
  std::vector<std::vector<std::vector<HighReal>>> powers(count);
  for (std::size_t s = 0; s < count; ++s) {
    powers[s].resize(sys.rank);
    for (std::size_t i = 0; i < sys.rank; ++i) {
      powers[s][i].push_back(HighReal(1));
      for (long d = 1; d <= max_deg; ++d) powers[s][i].push_back(powers[s][i].back() * frames[s].tau[i].re);
    }
  }

  std::vector<FitResult> results(ids.size());
  std::exception_ptr error;
  const long ne = static_cast<long>(ids.size());
#pragma omp parallel for schedule(dynamic)
  for (long e = 0; e < ne; ++e) {
    try {
      const auto& id = ids[static_cast<std::size_t>(e)];
      const auto& basis = bases[static_cast<std::size_t>(e)];
      FitResult& res = results[static_cast<std::size_t>(e)];
      res.entry = entry_name(id.is_a, id.i, id.j);
      res.basis_size = basis.size();
      res.samples = count;
      res.poly = MultiPoly(sys.rank);
      std::vector<HighReal> t0(count), t1(count);
      for (std::size_t s = 0; s < count; ++s) {
        t0[s] = id.is_a ? vals[s].at(id.i, id.j).re : vals[s].b0[id.i].re;
        if (!id.is_a) t1[s] = vals[s].b1[id.i].re;
      }
      PartFit p0 = fit_part(basis, powers, t0, cfg, "nu^0");
      res.diag_ratio = p0.diag_ratio;
      res.unreconstructed = p0.unreconstructed;
      for (std::size_t c = 0; c < basis.size(); ++c) res.poly.add_term(basis[c], NuLinear(p0.coeffs[c]));
      if (!id.is_a) {
        PartFit p1 = fit_part(basis, powers, t1, cfg, "nu^1");
        res.diag_ratio = std::max(res.diag_ratio, p1.diag_ratio);
        res.unreconstructed.insert(res.unreconstructed.end(), p1.unreconstructed.begin(), p1.unreconstructed.end());
        for (std::size_t c = 0; c < basis.size(); ++c) res.poly.add_term(basis[c], NuLinear(Rational(0), p1.coeffs[c]));
      }
      MultiPoly part0 = res.poly.nu_part(0), part1 = res.poly.nu_part(1);
      HighReal worst = 0;
      for (std::size_t s = 0; s < count; ++s) {
        std::vector<HighReal> tau;
        for (const auto& t : frames[s].tau) tau.push_back(t.re);
        std::span<const HighReal> pt(tau);
        HighReal v0 = evaluate<HighReal>(part0, pt, HighReal(0));
        worst = std::max(worst, HighReal(abs(v0 - t0[s]) / std::max(HighReal(1), HighReal(abs(t0[s])))));
        if (!id.is_a) {
          HighReal v1 = evaluate<HighReal>(part1, pt, HighReal(0));
          worst = std::max(worst, HighReal(abs(v1 - t1[s]) / std::max(HighReal(1), HighReal(abs(t1[s])))));
        }
      }
      res.refit_residual = to_double(worst);
    } catch (...) {
#pragma omp critical(tauforge_fit_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return results;
}

AlgebraicOperator adjudicate(const AlgebraicOperator& op, const std::vector<FitResult>& fits) {
  AlgebraicOperator out = op;
  for (const auto& f : fits) entry_poly(out, parse_entry(f.entry, op.rank())) = f.poly;
  out.provenance = "fitted";
  out.audit_log = audit(out, build_system(out.system()));
  return out;
}

nlohmann::json fit_to_json(const FitResult& r, const CharVector& cv) {
  return {{"entry", r.entry},
          {"poly", to_json(r.poly, cv)},
          {"text", to_text(r.poly, cv)},
          {"basis_size", r.basis_size},
          {"samples", r.samples},
          {"unreconstructed", r.unreconstructed},
          {"refit_residual", r.refit_residual},
          {"diag_ratio", r.diag_ratio},
          {"ok", r.ok()}};
}

#define TAUFORGE_INSTANTIATE(Real)                                                                              \
  template NumericFrame<Real> numeric_frame<Real>(const OrbitKernel&, const SamplePoint&, bool);                 \
  template std::vector<NumericFrame<Real>> numeric_frames<Real>(const OrbitKernel&,                           \
                                                                const std::vector<SamplePoint>&);             \
  template std::vector<NumericFrame<Real>> serial::numeric_frames<Real>(const OrbitKernel&,                   \
                                                                        const std::vector<SamplePoint>&);     \
  template std::vector<Real> tau_direct<Real>(const RootSystem&, const SamplePoint&);                         \
  template OracleValues<Real> chain_rule_oracle<Real>(const OrbitKernel&, const NumericFrame<Real>&);         \
  template Cplx<Real> oracle_b_at<Real>(const OrbitKernel&, const NumericFrame<Real>&, std::size_t,           \
                                        const Real&);                                                         \
  template Real ground_state_energy<Real>(const OrbitKernel&, const Real&, const Real&);                      \
  template Real ground_state_residual<Real>(const OrbitKernel&, const NumericFrame<Real>&, const Real&);      \
  template Cplx<Real> evaluate_complex<Real>(const MultiPoly&, std::span<const Cplx<Real>>, const Real&);

TAUFORGE_INSTANTIATE(double)
TAUFORGE_INSTANTIATE(HighReal)

}  // namespace tauforge
