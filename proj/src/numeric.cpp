#include "tauforge/numeric.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>

namespace tauforge {

unsigned precision_from_env() {
  const char* env = std::getenv("TAUFORGE_PRECISION");
  if (env == nullptr || *env == '\0') return kDefaultPrecisionDigits;
  unsigned digits = 0;
  auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), digits);
  if (ec != std::errc() || *ptr != '\0' || digits < kMinPrecisionDigits)
    throw std::invalid_argument("TAUFORGE_PRECISION must be an integer >= 50");
  return digits;
}

PrecisionScope::PrecisionScope(unsigned digits) : saved_(HighReal::default_precision()) {
  if (digits < kMinPrecisionDigits)
    throw std::invalid_argument("high precision mode needs at least 50 digits");
  HighReal::default_precision(digits);
}

PrecisionScope::~PrecisionScope() { HighReal::default_precision(saved_); }

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string format_real(const HighReal& x) { return x.str(40, std::ios_base::scientific); }

}  // namespace tauforge
