#pragma once

// Scalar standard-Gaussian primitives: density, distribution function,
// quantile function and Owen's T-function.

#include <array>
#include <cmath>
#include <numbers>

#include "owenext/errors.hpp"

namespace owenext {

namespace detail {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kSqrt2Pi = 2.50662827463100050241576528481;
inline constexpr double kInvTwoPi = 1.0 / (2.0 * std::numbers::pi);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], found by
/// Newton iteration on the three-term Legendre recurrence.
template <std::size_t N>
std::array<std::array<double, 2>, N> make_gauss_legendre() {
  std::array<std::array<double, 2>, N> rule{};
  const std::size_t half = (N + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(N) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= N; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[i] = {-x, w};
    rule[N - 1 - i] = {x, w};
  }
  return rule;
}

inline const std::array<std::array<double, 2>, 24>& gauss_legendre_24() {
  static const auto rule = make_gauss_legendre<24>();
  return rule;
}

inline double std_cdf_unchecked(double x) noexcept {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

// Wichura's AS 241 (PPND16), about 1e-16 relative accuracy.
inline double ppnd16(double p) noexcept {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
              0.24178072517745061177) * r + 1.27045825245236838258) * r +
            3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734) /
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
              0.0151986665636164571966) * r + 0.14810397642748007459) * r +
            0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              0.0012426609473880784386) * r + 0.026532189526576123093) * r +
            0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772) /
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
              1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
            0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

/// Quantile without domain checks; p is assumed to lie in (0, 1).
inline double std_inv_cdf_unchecked(double p) noexcept {
  // Refine in the smaller tail so that cdf(x) - p keeps relative accuracy.
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;
  double x = ppnd16(tail);
  if (tail > 1e-300) {
    for (int it = 0; it < 2; ++it) {
      const double err = std_cdf_unchecked(x) - tail;
      const double u = err * kSqrt2Pi * std::exp(0.5 * x * x);
      x -= u / (1.0 + 0.5 * x * u);
    }
  }
  return upper ? -x : x;
}

// T(h, a) for h >= 0 and 0 <= a <= 1 by 24-point Gauss-Legendre on [0, a].
inline double owen_t_core(double h, double a) noexcept {
  if (a == 0.0) return 0.0;
  const double hh = -0.5 * h * h;
  double sum = 0.0;
  for (const auto& [node, weight] : gauss_legendre_24()) {
    const double x = 0.5 * a * (node + 1.0);
    const double one_x2 = 1.0 + x * x;
    sum += weight * std::exp(hh * one_x2) / one_x2;
  }
  return 0.5 * a * sum * kInvTwoPi;
}

}  // namespace detail

/// Standard normal density.
inline double phi(double x) {
  if (!std::isfinite(x)) throw DomainError("phi: argument must be finite");
  return detail::kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Standard normal distribution function. Accepts +/-infinity.
inline double cdf(double x) {
  if (std::isnan(x)) throw DomainError("cdf: argument is NaN");
  return detail::std_cdf_unchecked(x);
}

/// Standard normal quantile function on the open interval (0, 1).
inline double inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("inv_cdf: probability must lie in (0, 1)");
  return detail::std_inv_cdf_unchecked(p);
}

/// Owen's T-function, T(h, a) = (1/2pi) int_0^a exp(-h^2 (1 + x^2) / 2) / (1 + x^2) dx.
///
/// Even in h and odd in a. For |a| > 1 the integral is mapped onto [0, 1/|a|]
/// through T(h, a) + T(ah, 1/a) = (Phi(h) + Phi(ah)) / 2 - Phi(h) Phi(ah), h >= 0.
inline double owen_t(double h, double a) {
  if (!std::isfinite(h) || !std::isfinite(a)) {
    throw DomainError("owen_t: arguments must be finite");
  }
  const double sign = a < 0.0 ? -1.0 : 1.0;
  h = std::abs(h);
  a = std::abs(a);
  if (a <= 1.0) return sign * detail::owen_t_core(h, a);

  const double ah = a * h;
  const double ph = detail::std_cdf_unchecked(h);
  const double qh = detail::std_cdf_unchecked(-h);
  const double pah = detail::std_cdf_unchecked(ah);
  const double qah = detail::std_cdf_unchecked(-ah);
  const double value = 0.5 * (ph * qah + pah * qh) - detail::owen_t_core(ah, 1.0 / a);
  return sign * value;
}

}  // namespace owenext
