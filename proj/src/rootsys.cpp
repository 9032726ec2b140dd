#include "tauforge/rootsys.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tauforge {

bool RVec::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational& q) { return q == 0; });
}

Rational RVec::dot(const RVec& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("RVec::dot: dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * other.c_[i];
  return s;
}

RVec& RVec::operator+=(const RVec& o) {
  if (o.dim() != dim()) throw std::invalid_argument("RVec: dimension mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

RVec& RVec::operator-=(const RVec& o) {
  if (o.dim() != dim()) throw std::invalid_argument("RVec: dimension mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

RVec& RVec::operator*=(const Rational& s) {
  for (auto& q : c_) q *= s;
  return *this;
}

RVec RVec::operator-() const {
  RVec r = *this;
  for (auto& q : r.c_) q = -q;
  return r;
}

bool operator<(const RVec& a, const RVec& b) {
  return std::lexicographical_compare(a.c_.begin(), a.c_.end(), b.c_.begin(), b.c_.end(),
                                      [](const Rational& x, const Rational& y) { return cmp(x, y) < 0; });
}

std::string RVec::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << to_string(c_[i]);
  os << ')';
  return os.str();
}

std::vector<std::string> RVec::coord_strings() const {
  std::vector<std::string> out;
  out.reserve(c_.size());
  for (const auto& q : c_) out.push_back(to_string(q));
  return out;
}

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::E7: return "E7";
    case SystemKind::A1: return "A1";
    case SystemKind::A2: return "A2";
    case SystemKind::G2: return "G2";
  }
  return "?";
}

SystemKind parse_system_kind(std::string_view name) {
  std::string up(name);
  for (auto& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (up == "E7") return SystemKind::E7;
  if (up == "A1") return SystemKind::A1;
  if (up == "A2") return SystemKind::A2;
  if (up == "G2") return SystemKind::G2;
  throw std::invalid_argument("unsupported root system: " + std::string(name));
}

RVec RootSystem::project(const RVec& v) const {
  RVec out(ambient_dim);
  for (std::size_t k = 0; k < chart.size(); ++k) out += (v.dot(chart[k]) / metric_weights[k]) * chart[k];
  return out;
}

std::vector<Rational> RootSystem::chart_coords(const RVec& v) const {
  std::vector<Rational> c(chart.size());
  for (std::size_t k = 0; k < chart.size(); ++k) c[k] = v.dot(chart[k]) / metric_weights[k];
  return c;
}

Rational RootSystem::metric_dot(const RVec& a, const RVec& b) const {
  auto ca = chart_coords(a), cb = chart_coords(b);
  Rational s = 0;
  for (std::size_t k = 0; k < ca.size(); ++k) s += metric_weights[k] * ca[k] * cb[k];
  return s;
}

std::vector<Rational> RootSystem::simple_root_coords(const RVec& v) const {
  std::vector<Rational> c(rank);
  for (std::size_t j = 0; j < rank; ++j)
    c[j] = 2 * v.dot(fundamental_weights[j]) / simple_roots[j].norm_sq();
  return c;
}

std::vector<Rational> RootSystem::weight_coords(const RVec& v) const {
  std::vector<Rational> p(rank);
  for (std::size_t i = 0; i < rank; ++i) p[i] = 2 * v.dot(simple_roots[i]) / simple_roots[i].norm_sq();
  return p;
}

RVec reflect(const RVec& v, const RVec& root) {
  Rational rr = root.norm_sq();
  if (rr == 0) throw std::invalid_argument("reflect: zero root");
  Rational c = 2 * root.dot(v) / rr;
  if (c == 0) return v;
  RVec out = v;
  for (std::size_t i = 0; i < out.dim(); ++i) out[i] -= c * root[i];
  return out;
}

namespace {

RVec unit(std::size_t dim, std::size_t i) {
  RVec v(dim);
  v[i] = 1;
  return v;
}

using RMatrix = std::vector<std::vector<Rational>>;

RMatrix invert(RMatrix m) {
  const std::size_t n = m.size();
  RMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) throw std::logic_error("singular Cartan-type matrix");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    Rational d = m[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational f = m[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

struct RawSystem {
  std::size_t ambient_dim;
  std::vector<RVec> roots;  // one representative per +- pair
  std::vector<RVec> chart;
  RVec regular;             // strictly nonzero on every root
  std::vector<RVec> given_weights;  // empty: computed as the dual basis
};

RawSystem raw_e7() {
  RawSystem raw;
  raw.ambient_dim = 8;
  const Rational half(1, 2);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      raw.roots.push_back(unit(8, i) + unit(8, j));
      raw.roots.push_back(unit(8, i) - unit(8, j));
    }
  raw.roots.push_back(unit(8, 6) - unit(8, 7));
  for (unsigned mask = 0; mask < 64; ++mask) {
    if (__builtin_popcount(mask) % 2 == 0) continue;
    RVec v(8);
    for (std::size_t j = 0; j < 6; ++j) v[j] = (mask >> j & 1u) ? -half : half;
    v[6] = half;
    v[7] = -half;
    raw.roots.push_back(v);
  }
  for (std::size_t k = 0; k < 6; ++k) raw.chart.push_back(unit(8, k));
  raw.chart.push_back(unit(8, 6) - unit(8, 7));

  auto e = [](std::size_t i) { return unit(8, i - 1); };
  const std::vector<RVec> table = {
      e(6) - e(7),
      Rational(-2) * e(7),
      half * (e(1) + e(2) + e(3) + e(4) + e(5) + e(6)) - Rational(2) * e(7),
      e(5) + e(6) - Rational(2) * e(7),
      Rational(-1, 2) * (e(1) - e(2) - e(3) - e(4) - e(5) - e(6)) - Rational(3) * e(7),
      e(4) + e(5) + e(6) - Rational(3) * e(7),
      e(3) + e(4) + e(5) + e(6) - Rational(4) * e(7),
  };
  const RVec ortho = e(7) + e(8);
  for (const auto& w : table) raw.given_weights.push_back(w - (w.dot(ortho) / 2) * ortho);
  raw.regular = RVec(8);
  for (const auto& w : raw.given_weights) raw.regular += w;
  return raw;
}

RawSystem raw_a1() {
  RawSystem raw;
  raw.ambient_dim = 2;
  raw.roots = {unit(2, 0) - unit(2, 1)};
  raw.chart = {unit(2, 0) - unit(2, 1)};
  raw.regular = RVec{Rational(1), Rational(0)};
  return raw;
}

RawSystem raw_a2() {
  RawSystem raw;
  raw.ambient_dim = 3;
  auto e = [](std::size_t i) { return unit(3, i); };
  raw.roots = {e(0) - e(1), e(1) - e(2), e(0) - e(2)};
  raw.chart = {e(0) - e(1), e(0) + e(1) - Rational(2) * e(2)};
  raw.regular = RVec{Rational(2), Rational(1), Rational(0)};
  return raw;
}

RawSystem raw_g2() {
  RawSystem raw;
  raw.ambient_dim = 3;
  auto e = [](std::size_t i) { return unit(3, i); };
  raw.roots = {e(0) - e(1),
               e(1) - e(2),
               e(0) - e(2),
               Rational(2) * e(0) - e(1) - e(2),
               Rational(2) * e(1) - e(0) - e(2),
               Rational(2) * e(2) - e(0) - e(1)};
  raw.chart = {e(0) - e(1), e(0) + e(1) - Rational(2) * e(2)};
  raw.regular = RVec{Rational(3), Rational(1), Rational(0)};
  return raw;
}

void validate(const RootSystem& sys, std::size_t expected_positive) {
  auto fail = [&](const std::string& what) {
    throw std::logic_error(std::string(to_string(sys.kind)) + " validation failed: " + what);
  };
  if (sys.positive_roots.size() != expected_positive) fail("positive root count");
  if (sys.simple_roots.size() != sys.rank) fail("simple root count");
  for (const auto& a : sys.positive_roots) {
    if (!(sys.project(a) == a)) fail("root outside the physical subspace " + a.str());
    for (const auto& c : sys.simple_root_coords(a))
      if (c < 0 || c.get_den() != 1) fail("root not a non-negative integer combination " + a.str());
  }
  for (std::size_t i = 0; i < sys.rank; ++i) {
    const auto& w = sys.fundamental_weights[i];
    if (!(sys.project(w) == w)) fail("weight outside the physical subspace");
    auto p = sys.weight_coords(w);
    for (std::size_t j = 0; j < sys.rank; ++j)
      if (p[j] != (i == j ? 1 : 0)) fail("weights are not dual to the simple coroots");
    if (sys.metric_dot(w, w) != w.norm_sq()) fail("chart metric disagrees with the ambient metric");
  }
}

}  // namespace

RootSystem build_system(SystemKind kind) {
  RawSystem raw;
  std::size_t expected = 0;
  switch (kind) {
    case SystemKind::E7: raw = raw_e7(); expected = 63; break;
    case SystemKind::A1: raw = raw_a1(); expected = 1; break;
    case SystemKind::A2: raw = raw_a2(); expected = 3; break;
    case SystemKind::G2: raw = raw_g2(); expected = 6; break;
  }

  RootSystem sys;
  sys.kind = kind;
  sys.ambient_dim = raw.ambient_dim;
  sys.rank = raw.chart.size();
  sys.chart = raw.chart;
  for (const auto& u : sys.chart) sys.metric_weights.push_back(u.norm_sq());

  for (const auto& a : raw.roots) {
    Rational s = a.dot(raw.regular);
    if (s == 0) throw std::logic_error("regular vector is singular");
    sys.positive_roots.push_back(s > 0 ? a : -a);
  }
  std::sort(sys.positive_roots.begin(), sys.positive_roots.end());

  std::set<RVec> sums;
  for (std::size_t i = 0; i < sys.positive_roots.size(); ++i)
    for (std::size_t j = i + 1; j < sys.positive_roots.size(); ++j)
      sums.insert(sys.positive_roots[i] + sys.positive_roots[j]);
  std::vector<RVec> simple;
  for (const auto& a : sys.positive_roots)
    if (!sums.count(a)) simple.push_back(a);
  if (simple.size() != sys.rank) throw std::logic_error("simple root extraction failed");

  if (!raw.given_weights.empty()) {
    // Order simple roots so that simple root i is dual to given weight i.
    sys.fundamental_weights = raw.given_weights;
    for (const auto& w : sys.fundamental_weights) {
      auto it = std::find_if(simple.begin(), simple.end(), [&](const RVec& a) { return 2 * a.dot(w) / a.norm_sq() == 1; });
      if (it == simple.end()) throw std::logic_error("given weight is not fundamental");
      sys.simple_roots.push_back(*it);
    }
  } else {
    sys.simple_roots = simple;
    const std::size_t r = sys.rank;
    RMatrix gd(r, std::vector<Rational>(r));
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t j = 0; j < r; ++j)
        gd[k][j] = 2 * simple[k].dot(simple[j]) / simple[j].norm_sq();
    RMatrix m = invert(gd);
    for (std::size_t i = 0; i < r; ++i) {
      RVec w(sys.ambient_dim);
      for (std::size_t k = 0; k < r; ++k) w += m[i][k] * simple[k];
      sys.fundamental_weights.push_back(w);
    }
    // tau ordering: by orbit size, then by length.
    std::vector<std::size_t> order(r);
    for (std::size_t i = 0; i < r; ++i) order[i] = i;
    std::vector<std::size_t> sizes(r);
    for (std::size_t i = 0; i < r; ++i) sizes[i] = weyl_orbit_of(sys, sys.fundamental_weights[i]).size();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (sizes[a] != sizes[b]) return sizes[a] < sizes[b];
      return sys.fundamental_weights[a].norm_sq() < sys.fundamental_weights[b].norm_sq();
    });
    std::vector<RVec> w2, s2;
    for (auto i : order) {
      w2.push_back(sys.fundamental_weights[i]);
      s2.push_back(sys.simple_roots[i]);
    }
    sys.fundamental_weights = w2;
    sys.simple_roots = s2;
  }
  for (const auto& w : sys.fundamental_weights) sys.weight_lengths_sq.push_back(sys.metric_dot(w, w));
  validate(sys, expected);
  return sys;
}

bool WeylOrbit::contains(const RVec& v) const { return std::binary_search(elements.begin(), elements.end(), v); }

namespace {

using IVec = std::vector<std::int64_t>;

// Integer BFS on coordinates scaled by the common denominator; empty when a pairing is not integral.
std::optional<std::vector<RVec>> integer_orbit(const RootSystem& sys, const RVec& generator) {
  mpz_class scale = 1;
  auto absorb = [&](const RVec& v) {
    for (const auto& q : v.coords()) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), q.get_den_mpz_t());
  };
  absorb(generator);
  for (const auto& a : sys.simple_roots) absorb(a);
  if (!scale.fits_slong_p()) return std::nullopt;
  auto to_int = [&](const RVec& v) -> std::optional<IVec> {
    IVec out;
    for (const auto& q : v.coords()) {
      mpz_class z = q.get_num() * (scale / q.get_den());
      if (!z.fits_slong_p()) return std::nullopt;
      out.push_back(z.get_si());
    }
    return out;
  };
  auto dot = [](const IVec& x, const IVec& y) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  std::vector<IVec> roots;
  std::vector<std::int64_t> norms;
  for (const auto& a : sys.simple_roots) {
    auto ia = to_int(a);
    if (!ia) return std::nullopt;
    norms.push_back(dot(*ia, *ia));
    roots.push_back(std::move(*ia));
  }
  auto g = to_int(generator);
  if (!g) return std::nullopt;
  std::set<IVec> seen{*g};
  std::deque<IVec> frontier{*g};
  while (!frontier.empty()) {
    IVec v = std::move(frontier.front());
    frontier.pop_front();
    for (std::size_t j = 0; j < roots.size(); ++j) {
      std::int64_t twice = 2 * dot(v, roots[j]);
      if (twice % norms[j] != 0) return std::nullopt;
      std::int64_t k = twice / norms[j];
      if (k == 0) continue;
      IVec r = v;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= k * roots[j][i];
      if (seen.insert(r).second) frontier.push_back(std::move(r));
    }
  }
  std::vector<RVec> out;
  out.reserve(seen.size());
  for (const auto& v : seen) {
    std::vector<Rational> c;
    for (auto x : v) {
      Rational q(mpz_class(static_cast<long>(x)), scale);
      q.canonicalize();
      c.push_back(std::move(q));
    }
    out.emplace_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

WeylOrbit weyl_orbit_of(const RootSystem& sys, const RVec& generator) {
  if (auto fast = integer_orbit(sys, generator)) {
    WeylOrbit orbit;
    orbit.generator = generator;
    orbit.elements = std::move(*fast);
    return orbit;
  }
  std::set<RVec> seen{generator};
  std::deque<RVec> frontier{generator};
  while (!frontier.empty()) {
    RVec v = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& a : sys.simple_roots) {
      RVec r = reflect(v, a);
      if (seen.insert(r).second) frontier.push_back(std::move(r));
    }
  }
  WeylOrbit orbit;
  orbit.generator = generator;
  orbit.elements.assign(seen.begin(), seen.end());
  return orbit;
}

WeylOrbit weyl_orbit(const RootSystem& sys, std::size_t weight_index) {
  if (weight_index < 1 || weight_index > sys.rank)
    throw std::out_of_range("weight index must lie in 1.." + std::to_string(sys.rank));
  return weyl_orbit_of(sys, sys.fundamental_weights[weight_index - 1]);
}

DeformedWeylVector deformed_weyl_vector(const RootSystem& sys) {
  DeformedWeylVector out{RVec(sys.ambient_dim), 0};
  for (const auto& a : sys.positive_roots) out.root_sum += a;
  out.rho_sq_over_nu_sq = sys.metric_dot(out.root_sum, out.root_sum);
  return out;
}

bool is_dominant(const RootSystem& sys, const RVec& v) {
  return std::all_of(sys.simple_roots.begin(), sys.simple_roots.end(),
                     [&](const RVec& a) { return a.dot(v) >= 0; });
}

RVec dominant_representative(const RootSystem& sys, RVec v) {
  bool moved = true;
  while (moved) {
    moved = false;
    for (const auto& a : sys.simple_roots) {
      if (a.dot(v) < 0) {
        v = reflect(v, a);
        moved = true;
      }
    }
  }
  return v;
}

bool dominates(const RootSystem& sys, const RVec& lambda, const RVec& mu) {
  for (const auto& c : sys.simple_root_coords(lambda - mu))
    if (c < 0 || c.get_den() != 1) return false;
  return true;
}

nlohmann::json orbit_to_json(const RootSystem& sys, std::size_t weight_index, const WeylOrbit& orbit) {
  nlohmann::json elems = nlohmann::json::array();
  for (const auto& v : orbit.elements) elems.push_back(v.coord_strings());
  return {{"system", std::string(to_string(sys.kind))},
          {"weight_index", weight_index},
          {"size", orbit.size()},
          {"length_sq", to_string(sys.weight_lengths_sq.at(weight_index - 1))},
          {"elements", elems}};
}

}  // namespace tauforge
