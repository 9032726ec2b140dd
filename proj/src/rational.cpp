#include "tauforge/rational.hpp"

#include <stdexcept>

namespace tauforge {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto dot = s.find('.');
  try {
    if (dot != std::string::npos) {
      if (s.find_first_of("/eE") != std::string::npos)
        throw std::invalid_argument("unsupported rational literal: " + s);
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      std::size_t frac = s.size() - dot - 1;
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
      Rational q(mpz_class(digits.empty() || digits == "-" ? "0" : digits), den);
      q.canonicalize();
      return q;
    }
    Rational q(s);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad rational literal: " + s);
  }
}

Rational best_rational(const Rational& x, unsigned long max_den) {
  // Convergents h/k of the continued fraction of x, then the best semiconvergent.
  mpz_class p = x.get_num(), q = x.get_den();
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  while (q != 0) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    mpz_class k2 = a * k1 + k0;
    if (k2 > max_den) {
      mpz_class t = (mpz_class(max_den) - k0) / k1;
      Rational semi(t * h1 + h0, t * k1 + k0), conv(h1, k1);
      semi.canonicalize();
      conv.canonicalize();
      return abs(semi - x) < abs(conv - x) ? semi : conv;
    }
    mpz_class h2 = a * h1 + h0;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    mpz_class r = p - a * q;
    p = q;
    q = r;
  }
  Rational r(h1, k1);
  r.canonicalize();
  return r;
}

}  // namespace tauforge
