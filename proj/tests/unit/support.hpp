#pragma once

#include "tauforge/rootsys.hpp"

#include <set>
#include <vector>

namespace testsupport {

using tauforge::Rational;
using tauforge::RVec;

/// E8 roots with r7 + r8 = 0, enumerated directly: the E7 root system in the ambient R^8.
inline std::vector<RVec> e7_roots_by_enumeration() {
  std::vector<RVec> out;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      for (int si : {-1, 1})
        for (int sj : {-1, 1}) {
          RVec v(8);
          v[i] = si;
          v[j] = sj;
          if (v[6] + v[7] == 0) out.push_back(v);
        }
  for (int mask = 0; mask < 256; ++mask) {
    if (__builtin_popcount(mask) % 2 != 0) continue;
    RVec v(8);
    for (int k = 0; k < 8; ++k) v[k] = Rational((mask >> k) & 1 ? -1 : 1, 2);
    if (v[6] + v[7] == 0) out.push_back(v);
  }
  return out;
}

inline RVec reflect_by_hand(const RVec& v, const RVec& a) {
  Rational k = 2 * v.dot(a) / a.dot(a);
  RVec out = v;
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] -= k * a[i];
  return out;
}

/// Orbit closure under reflections in the given roots (breadth first).
inline std::set<RVec> orbit_by_closure(const RVec& start, const std::vector<RVec>& roots) {
  std::set<RVec> seen{start};
  std::vector<RVec> frontier{start};
  while (!frontier.empty()) {
    std::vector<RVec> next;
    for (const auto& v : frontier)
      for (const auto& a : roots) {
        RVec w = reflect_by_hand(v, a);
        if (seen.insert(w).second) next.push_back(w);
      }
    frontier.swap(next);
  }
  return seen;
}

}  // namespace testsupport
