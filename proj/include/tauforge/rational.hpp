#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tauforge {

using Rational = mpq_class;

/// Canonical text form: "3/2", "-5", "0".
std::string to_string(const Rational& q);

/// Parses "p", "p/q" or a finite decimal such as "0.25"; throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Best rational approximation with denominator <= max_den (continued fractions).
Rational best_rational(const Rational& x, unsigned long max_den);

}  // namespace tauforge
