#include "tauforge/derive.hpp"

namespace tauforge {

void ExpSum::add(const RVec& mu, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms.try_emplace(mu, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms.erase(it);
}

Rational ExpSum::coefficient(const RVec& mu) const {
  auto it = terms.find(mu);
  return it == terms.end() ? Rational(0) : it->second;
}

ExpSum exp_product(const ExpSum& s, const ExpSum& t) {
  ExpSum out;
  for (const auto& [mu, a] : s.terms)
    for (const auto& [nu, b] : t.terms) out.add(mu + nu, a * b);
  return out;
}

ExpSum orbit_sum(const RootSystem& sys, const RVec& lambda) {
  ExpSum out;
  for (const auto& mu : weyl_orbit_of(sys, lambda).elements) out.add(mu, 1);
  return out;
}

ExpSum tau_power_exp(const RootSystem& sys, const Monomial& p) {
  if (p.size() != sys.rank) throw std::invalid_argument("monomial length != rank");
  ExpSum out;
  out.add(RVec(sys.ambient_dim), 1);
  for (std::size_t i = 0; i < sys.rank; ++i) {
    if (p[i] == 0) continue;
    ExpSum t = orbit_sum(sys, sys.fundamental_weights[i]);
    for (unsigned k = 0; k < p[i]; ++k) out = exp_product(out, t);
  }
  return out;
}

OrbitReducer::OrbitReducer(const RootSystem& sys) : sys_(sys) {
  for (const auto& w : sys.fundamental_weights) tau_exp_.push_back(orbit_sum(sys, w));
}

const MultiPoly& OrbitReducer::orbit_sum_to_tau(const RVec& lambda) {
  if (auto it = memo_.find(lambda); it != memo_.end()) return it->second;
  if (!is_dominant(sys_, lambda)) throw std::invalid_argument("orbit_sum_to_tau: weight is not dominant");
  std::vector<Rational> p = sys_.weight_coords(lambda);
  Monomial mono(sys_.rank, 0);
  for (std::size_t i = 0; i < sys_.rank; ++i) {
    if (p[i].get_den() != 1 || p[i] < 0)
      throw std::invalid_argument("orbit_sum_to_tau: weight is not a non-negative integer combination");
    mono[i] = static_cast<unsigned>(p[i].get_num().get_ui());
  }
  MultiPoly result = MultiPoly::monomial(sys_.rank, mono);
  if (!lambda.is_zero()) {
    ExpSum power;
    power.add(RVec(sys_.ambient_dim), 1);
    for (std::size_t i = 0; i < sys_.rank; ++i)
      for (unsigned k = 0; k < mono[i]; ++k) power = exp_product(power, tau_exp_[i]);
    if (power.coefficient(lambda) != 1) throw std::logic_error("leading orbit sum does not have unit coefficient");
    for (const auto& mu : weyl_orbit_of(sys_, lambda).elements) power.add(mu, -1);
    result -= decompose(power);
  }
  return memo_.emplace(lambda, std::move(result)).first->second;
}

MultiPoly OrbitReducer::decompose(const ExpSum& s) {
  MultiPoly out(sys_.rank);
  ExpSum rest = s;
  for (const auto& [mu, c] : s.terms) {
    if (!is_dominant(sys_, mu)) continue;
    for (const auto& e : weyl_orbit_of(sys_, mu).elements) rest.add(e, -c);
    out += orbit_sum_to_tau(mu) * NuLinear(c);
  }
  if (!rest.empty()) throw std::logic_error("exponential sum is not Weyl invariant");
  return out;
}

AlgebraicOperator derive_operator(const RootSystem& sys) {
  if (sys.rank > 2) throw std::invalid_argument("derive_operator supports rank <= 2 only");
  AlgebraicOperator op(sys.kind, characteristic_vector(sys.kind));
  op.provenance = "derived";
  OrbitReducer red(sys);
  std::vector<std::vector<RVec>> orbits;
  for (std::size_t i = 1; i <= sys.rank; ++i) orbits.push_back(weyl_orbit(sys, i).elements);

  // A_ij = -sum_{u in Omega_i, v in Omega_j} (u.v) e^{u+v}
  for (std::size_t i = 0; i < sys.rank; ++i)
    for (std::size_t j = i; j < sys.rank; ++j) {
      ExpSum s;
      for (const auto& u : orbits[i])
        for (const auto& v : orbits[j]) s.add(u + v, -u.dot(v));
      op.a(i, j) = red.decompose(s);
    }

  for (std::size_t i = 0; i < sys.rank; ++i) {
    ExpSum s0;
    for (const auto& u : orbits[i]) s0.add(u, -u.norm_sq());
    // nu part: each root pairs u with s_alpha(u) = u - k alpha; the cot factor then leaves the
    // finite sum (alpha.u) sum_{j=1..k} (e^{u-(j-1)alpha} + e^{u-j alpha}).
    ExpSum s1;
    for (const auto& alpha : sys.positive_roots) {
      const Rational len = alpha.norm_sq();
      for (const auto& u : orbits[i]) {
        Rational pair = alpha.dot(u);
        if (pair <= 0) continue;
        Rational kq = 2 * pair / len;
        if (kq.get_den() != 1) throw std::logic_error("non-integral root string");
        const long k = kq.get_num().get_si();
        for (long j = 1; j <= k; ++j) {
          s1.add(u - Rational(j - 1) * alpha, -pair);
          s1.add(u - Rational(j) * alpha, -pair);
        }
      }
    }
    MultiPoly b = red.decompose(s0);
    MultiPoly b1 = red.decompose(s1);
    for (const auto& [m, c] : b1.terms()) b.add_term(m, NuLinear(Rational(0), c.c0));
    op.b(i) = b;
  }
  op.audit_log = audit(op, sys);
  return op;
}

}  // namespace tauforge
