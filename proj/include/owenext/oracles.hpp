#pragma once

// Independent reference engines used to check the closed forms: Gauss-Hermite
// quadrature, adaptive Gauss-Kronrod quadrature and plain Monte Carlo. None of
// these go through the multivariate CDF code path.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "owenext/errors.hpp"
#include "owenext/gauss_scalar.hpp"
#include "owenext/identity_params.hpp"
#include "owenext/mvn_cdf.hpp"
#include "owenext/random.hpp"

namespace owenext::oracles {

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial) : std::runtime_error(what), partial_(partial) {}
  double partial_estimate() const noexcept { return partial_; }

 private:
  double partial_;
};

/// Gauss-Hermite rule for weight exp(-t^2), nodes in descending order.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes by Newton iteration on the orthonormal Hermite recurrence. The
/// starting point for the k-th largest root is the WKB estimate
/// x = sqrt(2n+1) cos(t), t - sin(2t)/2 = pi (4k - 1) / (2 (2n + 1)).
inline HermiteRule compute_hermite_rule(std::size_t n) {
  if (n == 0) throw DomainError("Gauss-Hermite: order must be positive");
  HermiteRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const double nd = static_cast<double>(n);
  const double nu = 2.0 * nd + 1.0;
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double target = std::numbers::pi * (4.0 * static_cast<double>(i + 1) - 1.0) / (2.0 * nu);
    double t = std::cbrt(1.5 * target);
    for (int it = 0; it < 50; ++it) {
      const double g = t - 0.5 * std::sin(2.0 * t) - target;
      const double dg = 2.0 * std::sin(t) * std::sin(t);
      if (dg <= 0.0) break;
      const double dt = g / dg;
      t = std::clamp(t - dt, 1e-12, std::numbers::pi / 2.0);
      if (std::abs(dt) < 1e-15) break;
    }
    double z = (n % 2 == 1 && i + 1 == half) ? 0.0 : std::sqrt(nu) * std::cos(t);

    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw std::runtime_error("Gauss-Hermite: Newton iteration did not converge");
    if (i > 0 && !(z < rule.nodes[i - 1])) throw std::runtime_error("Gauss-Hermite: root ordering lost");
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

inline const HermiteRule& hermite_rule(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, HermiteRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_hermite_rule(n)).first;
  return it->second;
}

/// Left-hand side of the scalar-latent identity by Gauss-Hermite quadrature
/// after x = mu + sigma sqrt(2) t.
inline double lemma2_lhs_quadrature(const Lemma2Params& p, std::size_t order) {
  p.validate();
  if (order < 20 || order > 400) throw DomainError("lemma2_lhs_quadrature: order must lie in [20, 400]");
  const HermiteRule& rule = hermite_rule(order);
  const double scale = std::sqrt(2.0 * p.sigma2);
  double sum = 0.0;
  for (std::size_t i = 0; i < order; ++i) {
    const double x = p.mu + scale * rule.nodes[i];
    double prod = rule.weights[i];
    for (std::size_t r = 0; r < p.dim() && prod > 0.0; ++r) prod *= cdf((x - p.m[r]) / p.v[r]);
    sum += prod;
  }
  return sum / std::sqrt(std::numbers::pi);
}

namespace detail {

inline McEstimate summarize(double sum, double sum_sq, std::size_t draws) {
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

// x = mean + L z with z standard normal.
inline void draw_gaussian(RandomStream& rng, std::span<const double> mean, const SquareMatrix& chol,
                          std::vector<double>& z, std::vector<double>& x) {
  const std::size_t n = mean.size();
  for (double& zi : z) zi = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double s = mean[i];
    for (std::size_t j = 0; j <= i; ++j) s += chol(i, j) * z[j];
    x[i] = s;
  }
}

}  // namespace detail

/// Monte Carlo average of prod_r Phi((x_r - m_r) / v_r) over x ~ N(mu, Sigma).
inline McEstimate lemma3_lhs_mc(const Lemma3Params& p, std::size_t draws, std::uint64_t seed) {
  p.validate();
  if (draws < 10000) throw DomainError("lemma3_lhs_mc: at least 1e4 draws required");
  const std::size_t n = p.dim();
  RandomStream rng(seed);
  std::vector<double> z(n), x(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    detail::draw_gaussian(rng, p.mu, p.sigma.chol(), z, x);
    double prod = 1.0;
    for (std::size_t r = 0; r < n; ++r) prod *= cdf((x[r] - p.m[r]) / p.v[r]);
    sum += prod;
    sum_sq += prod * prod;
  }
  return detail::summarize(sum, sum_sq, draws);
}

/// Crude Monte Carlo of P(Z <= upper), Z ~ N(mean, cov).
inline McEstimate mvn_mc(const MvnQuery& q, std::size_t draws, std::uint64_t seed) {
  owenext::detail::validate(q);
  if (draws < 2) throw DomainError("mvn_mc: at least two draws required");
  const std::size_t n = q.cov.dim();
  RandomStream rng(seed);
  std::vector<double> z(n), x(n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < draws; ++k) {
    detail::draw_gaussian(rng, q.mean, q.cov.chol(), z, x);
    bool inside = true;
    for (std::size_t i = 0; i < n && inside; ++i) inside = x[i] <= q.upper[i];
    hits += inside ? 1 : 0;
  }
  const double h = static_cast<double>(hits);
  return detail::summarize(h, h, draws);
}

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct KronrodResult {
  double value;
  double error;
};

inline KronrodResult kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * fsum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * fsum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double b, double tol,
                            KronrodResult whole, int depth, bool& failed) {
  if (whole.error <= tol || b - a <= 1e-15 * std::max(1.0, std::abs(a))) return whole.value;
  if (depth >= 60) {
    failed = true;
    return whole.value;
  }
  const double mid = 0.5 * (a + b);
  const KronrodResult left = kronrod15(f, a, mid);
  const KronrodResult right = kronrod15(f, mid, b);
  return adaptive_step(f, a, mid, 0.5 * tol, left, depth + 1, failed) +
         adaptive_step(f, mid, b, 0.5 * tol, right, depth + 1, failed);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration of f over finite [a, b] until
/// the per-panel error estimates sum below tol.
inline double adaptive_quad_1d(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("adaptive_quad_1d: limits must be finite");
  if (!(tol >= 1e-13)) throw DomainError("adaptive_quad_1d: tolerance must be at least 1e-13");
  if (a == b) return 0.0;
  if (b < a) return -adaptive_quad_1d(f, b, a, tol);
  bool failed = false;
  const double value = detail::adaptive_step(f, a, b, tol, detail::kronrod15(f, a, b), 0, failed);
  if (failed) throw QuadratureError("adaptive_quad_1d: maximum subdivision depth exceeded", value);
  return value;
}

/// Owen's T from its defining integral, on geometric panels [0,1], [1,4],
/// [4,16], ... so that long ranges of a still resolve the peak at 0.
inline double owen_t_quadrature(double h, double a, double tol = 1e-13) {
  if (!std::isfinite(h) || !std::isfinite(a)) throw DomainError("owen_t_quadrature: arguments must be finite");
  if (a < 0.0) return -owen_t_quadrature(h, -a, tol);
  const double hh = -0.5 * h * h;
  auto integrand = [hh](double x) {
    const double one_x2 = 1.0 + x * x;
    return std::exp(hh * one_x2) / one_x2;
  };
  double sum = 0.0;
  double lo = 0.0;
  double hi = std::min(a, 1.0);
  while (lo < a) {
    sum += adaptive_quad_1d(integrand, lo, hi, tol);
    lo = hi;
    hi = std::min(a, 4.0 * hi);
  }
  return sum / (2.0 * std::numbers::pi);
}

/// Standard bivariate normal CDF as int_{-inf}^{h} phi(x) Phi((k - rho x)/sqrt(1 - rho^2)) dx.
inline double bivariate_cdf_quadrature(double h, double k, double rho, double tol = 1e-13) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("bivariate_cdf_quadrature: |rho| must be < 1");
  const double root = std::sqrt(1.0 - rho * rho);
  auto integrand = [=](double x) { return phi(x) * cdf((k - rho * x) / root); };
  constexpr double kCut = 40.0;
  const double upper = std::min(h, kCut);
  if (upper <= -kCut) return 0.0;
  // Split at 0 so both panels see the bulk of the density.
  if (upper > 0.0) return adaptive_quad_1d(integrand, -kCut, 0.0, tol) + adaptive_quad_1d(integrand, 0.0, upper, tol);
  return adaptive_quad_1d(integrand, -kCut, upper, tol);
}

}  // namespace owenext::oracles
