#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace noma::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// 2^r - 1 without cancellation for small r.
inline double rate_demand(double rate) { return std::expm1(rate * std::numbers::ln2); }

// mantissa * 2^exponent, splitting off the integral power so that a large
// exponent does not overflow before a small mantissa pulls it back.
inline double scale_pow2(double mantissa, double exponent) {
    if (mantissa == 0.0) return 0.0;
    if (exponent > 1e6) return kInf;
    const double whole = std::floor(exponent);
    return std::ldexp(mantissa * std::exp2(exponent - whole), static_cast<int>(whole));
}

}  // namespace noma::detail
