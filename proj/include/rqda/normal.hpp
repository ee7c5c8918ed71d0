#ifndef RQDA_NORMAL_HPP
#define RQDA_NORMAL_HPP

#include <cmath>
#include <numbers>
#include <string>

#include "rqda/error.hpp"

namespace rqda {

/// Standard normal cdf. Evaluated through erfc so both tails keep full
/// relative precision.
inline double norm_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

namespace detail {

// Wichura's AS 241 (PPND16) rational approximations, valid for 0 < u < 1.
inline double ppnd16(double u) noexcept {
  const double q = u - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? u : 1.0 - u));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((2.04426310338993978564e-15 * r + 1.4212687085130955896e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + 0.014875361290850615025) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

// Lower-half quantile (u <= 0.5) with one Halley step against norm_cdf.
inline double lower_quantile(double u) noexcept {
  double x = ppnd16(u);
  if (x == 0.0) {
    return x;
  }
  const double e = norm_cdf(x) - u;
  const double t = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - t / (1.0 + 0.5 * x * t);
}

} // namespace detail

/// Standard normal quantile, the inverse of norm_cdf on (0, 1).
///
/// The upper half is obtained by reflection so the Halley refinement always
/// runs where norm_cdf has full relative precision; the result is exactly odd
/// around u = 0.5.
inline double inv_norm_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("inv_norm_cdf: argument must lie in (0, 1), got " + std::to_string(u));
  }
  if (u > 0.5) {
    return -detail::lower_quantile(1.0 - u);
  }
  return detail::lower_quantile(u);
}

} // namespace rqda

#endif // RQDA_NORMAL_HPP
