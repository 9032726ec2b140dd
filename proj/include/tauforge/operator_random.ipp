#pragma once

#include <random>

namespace tauforge {

template <class Rng>
ProjectiveParams random_projective_params(Rng& rng) {
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 5);
  ProjectiveParams p;
  for (Rational* q : p.all()) {
    *q = Rational(num(rng), den(rng));
    q->canonicalize();
  }
  return p;
}

}  // namespace tauforge
