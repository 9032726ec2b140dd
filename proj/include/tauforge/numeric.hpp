#pragma once

#include "tauforge/rational.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>

namespace tauforge {

/// Software high-precision real. Precision is process-wide and set through PrecisionScope.
using HighReal = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionDigits = 100;
inline constexpr unsigned kMinPrecisionDigits = 50;

/// Reads TAUFORGE_PRECISION, falling back to kDefaultPrecisionDigits.
unsigned precision_from_env();

/// Sets the HighReal working precision (decimal digits) and restores the old value on exit.
/// Must not be created inside a parallel region.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

template <class Real>
Real from_rational(const Rational& q);

template <>
inline double from_rational<double>(const Rational& q) {
  return q.get_d();
}

template <>
inline HighReal from_rational<HighReal>(const Rational& q) {
  return HighReal(q.get_mpq_t());
}

inline double to_double(double x) { return x; }
inline double to_double(const HighReal& x) { return x.convert_to<double>(); }

/// Shortest text for a double that round-trips; high precision values print 40 digits.
std::string format_real(double x);
std::string format_real(const HighReal& x);

/// Neumaier compensated summation.
template <class Real>
class CompensatedSum {
 public:
  void add(const Real& v) {
    Real t = sum_ + v;
    if (abs_value(sum_) >= abs_value(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

 private:
  static Real abs_value(const Real& x) {
    using std::abs;
    return abs(x);
  }
  Real sum_ = 0;
  Real comp_ = 0;
};

/// Minimal complex number usable with HighReal (std::complex is unspecified for it).
template <class Real>
struct Cplx {
  Real re = 0;
  Real im = 0;
  friend Cplx operator*(const Cplx& a, const Cplx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cplx operator*(const Real& s, const Cplx& a) { return {s * a.re, s * a.im}; }
  friend Cplx operator+(const Cplx& a, const Cplx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cplx operator-(const Cplx& a, const Cplx& b) { return {a.re - b.re, a.im - b.im}; }
  Cplx& operator+=(const Cplx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Cplx conj() const { return {re, -im}; }
  Real abs() const {
    using std::sqrt;
    return sqrt(re * re + im * im);
  }
};

}  // namespace tauforge
