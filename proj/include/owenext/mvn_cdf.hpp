#pragma once

// Multivariate normal distribution function F_N(x | m, V) = P(Z <= x),
// Z ~ N(m, V). One and two dimensions are evaluated exactly; three and more
// go through Genz's sequential-conditioning transform and a randomly
// shifted rank-1 (Korobov) lattice rule with sin^2 periodization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "owenext/errors.hpp"
#include "owenext/gauss_scalar.hpp"
#include "owenext/pd_matrix.hpp"
#include "owenext/random.hpp"

namespace owenext {

enum class MvnMethod { univariate, bivariate_owen, qmc_genz };

inline std::string_view to_string(MvnMethod m) noexcept {
  switch (m) {
    case MvnMethod::univariate: return "univariate";
    case MvnMethod::bivariate_owen: return "bivariate_owen";
    case MvnMethod::qmc_genz: return "qmc_genz";
  }
  return "unknown";
}

struct MvnQuery {
  std::vector<double> upper;  // entries may be +infinity
  std::vector<double> mean;
  PdMatrix cov;
  double accuracy = 1e-6;
  std::size_t max_points = 131071;  // lattice size cap per randomization
  std::size_t randomizations = 12;
  std::uint64_t seed = 0;
  bool force_qmc = false;  // skip the exact low-dimensional paths
};

struct MvnEstimate {
  double value = 0.0;
  /// 3x the standard error across randomizations; 0 for exact paths.
  double err_estimate = 0.0;
  MvnMethod method = MvnMethod::univariate;
  /// Total integrand evaluations (0 for exact paths).
  std::size_t evaluations = 0;
  bool accuracy_met = true;
};

inline constexpr double kBivariateRhoLimit = 1.0 - 1e-12;

/// P(Z1 <= h, Z2 <= k) for a standard bivariate normal with correlation rho,
/// built from Owen's T-function.
inline double bivariate_cdf(double h, double k, double rho) {
  if (std::isnan(h) || std::isnan(k) || std::isnan(rho)) throw DomainError("bivariate_cdf: NaN argument");
  if (!(std::abs(rho) <= kBivariateRhoLimit)) {
    throw DomainError("bivariate_cdf: |rho| too close to 1; use the degenerate reduction");
  }
  if (h == -std::numeric_limits<double>::infinity() || k == -std::numeric_limits<double>::infinity()) return 0.0;
  if (h == std::numeric_limits<double>::infinity()) return cdf(k);
  if (k == std::numeric_limits<double>::infinity()) return cdf(h);

  const double root = std::sqrt((1.0 - rho) * (1.0 + rho));
  if (h == 0.0 && k == 0.0) return 0.25 + std::asin(rho) * detail::kInvTwoPi;

  // Term T(x, (y - rho x) / (x root)) with its x -> 0+ limit sign(y)/4.
  auto owen_term = [&](double x, double y) {
    if (x == 0.0) return y > 0.0 ? 0.25 : (y < 0.0 ? -0.25 : 0.0);
    return owen_t(x, (y - rho * x) / (x * root));
  };
  // Zero arguments are treated as 0+, consistent with owen_term above.
  const double hs = h == 0.0 ? 1.0 : h;
  const double ks = k == 0.0 ? 1.0 : k;
  const double delta = hs * ks < 0.0 ? 0.5 : 0.0;
  const double value = 0.5 * (cdf(h) + cdf(k)) - owen_term(h, k) - owen_term(k, h) - delta;
  return std::clamp(value, 0.0, 1.0);
}

namespace detail {

inline constexpr std::size_t kLatticeSizes[] = {1009,  2003,   4001,   8009,   16007,  32003,
                                                64007, 131071, 262139, 524287, 1048573};

inline std::vector<std::size_t> lattice_schedule(std::size_t max_points) {
  std::vector<std::size_t> sizes;
  for (std::size_t n : kLatticeSizes)
    if (n <= max_points) sizes.push_back(n);
  if (sizes.empty()) sizes.push_back(std::max<std::size_t>(max_points, 1));
  return sizes;
}

/// Korobov generating vector z = (1, a, a^2, ...) mod n. The multiplier a is
/// the best of 64 candidates spread along the golden-ratio sequence
/// frac(k / phi) * n, scored by the weighted P_2 lattice criterion with
/// product weights 0.8^j. Results are cached per (dims, n).
inline std::vector<std::uint64_t> korobov_vector(std::size_t dims, std::uint64_t n) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::uint64_t>, std::vector<std::uint64_t>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({dims, n}); it != cache.end()) return it->second;
  }

  auto powers = [&](std::uint64_t a) {
    std::vector<std::uint64_t> z(dims);
    z[0] = 1 % n;
    for (std::size_t j = 1; j < dims; ++j) z[j] = (z[j - 1] * a) % n;
    return z;
  };

  std::vector<double> gamma(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    gamma[j] = 2.0 * std::numbers::pi * std::numbers::pi * std::pow(0.8, static_cast<double>(j));
  }
  const double inv_golden = std::numbers::phi - 1.0;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::uint64_t best_a = 1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int c = 1; c <= 64 && dims > 1; ++c) {
    const double frac = std::fmod(c * inv_golden, 1.0);
    const auto a = static_cast<std::uint64_t>(std::llround(frac * static_cast<double>(n)));
    if (a < 2 || a >= n) continue;
    const auto z = powers(a);
    double score = 0.0;
    for (std::uint64_t k = 0; k < n && score < best_score * static_cast<double>(n); ++k) {
      double prod = 1.0;
      for (std::size_t j = 0; j < dims; ++j) {
        const double x = static_cast<double>((k * z[j]) % n) * inv_n;
        prod *= 1.0 + gamma[j] * (x * x - x + 1.0 / 6.0);
      }
      score += prod;
    }
    score *= inv_n;
    if (score < best_score) {
      best_score = score;
      best_a = a;
    }
  }

  auto z = powers(best_a);
  std::lock_guard lock(mutex);
  cache.emplace(std::pair{dims, n}, z);
  return z;
}

/// Genz's integrand over the unit cube for P(L y <= b), y standard normal.
class GenzIntegrand {
 public:
  GenzIntegrand(std::vector<double> bounds, const SquareMatrix& chol)
      : b_(std::move(bounds)), l_(chol), y_(b_.size()) {}

  std::size_t dims() const noexcept { return b_.size() - 1; }

  double operator()(std::span<const double> w) noexcept {
    const std::size_t n = b_.size();
    double e = std_cdf_unchecked(b_[0] / l_(0, 0));
    double f = e;
    for (std::size_t i = 1; i < n && f > 0.0; ++i) {
      const double p = std::clamp(w[i - 1] * e, 1e-300, 1.0 - 0x1.0p-53);
      y_[i - 1] = ppnd16(p);
      double s = 0.0;
      for (std::size_t j = 0; j < i; ++j) s += l_(i, j) * y_[j];
      e = std_cdf_unchecked((b_[i] - s) / l_(i, i));
      f *= e;
    }
    return f;
  }

 private:
  std::vector<double> b_;
  const SquareMatrix& l_;
  std::vector<double> y_;
};

inline MvnEstimate genz_qmc(std::span<const double> bounds, const PdMatrix& cov, const MvnQuery& q) {
  const std::size_t n = bounds.size();
  // Ascending marginal probability first.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> width(n);
  for (std::size_t i = 0; i < n; ++i) width[i] = std_cdf_unchecked(bounds[i] / std::sqrt(cov(i, i)));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return width[a] < width[b]; });

  const PdMatrix permuted = cov.submatrix(order);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = bounds[order[i]];
  GenzIntegrand integrand(b, permuted.chol());
  const std::size_t dims = integrand.dims();

  MvnEstimate est;
  est.method = MvnMethod::qmc_genz;
  if (dims == 0) {
    std::vector<double> none;
    est.value = integrand(none);
    return est;
  }

  const std::size_t shifts = std::max<std::size_t>(q.randomizations, 2);
  std::vector<std::vector<double>> shift(shifts, std::vector<double>(dims));
  for (std::size_t s = 0; s < shifts; ++s) {
    RandomStream rs(substream_seed(q.seed, s));
    for (double& x : shift[s]) x = rs.uniform();
  }

  std::vector<double> w(dims);
  std::vector<double> shift_means(shifts);
  for (std::size_t points : lattice_schedule(q.max_points)) {
    const auto z = korobov_vector(dims, points);
    const double inv_n = 1.0 / static_cast<double>(points);
    for (std::size_t s = 0; s < shifts; ++s) {
      // z[0] == 1, so every shift is equivalent to one whose first coordinate
      // lies in [0, 1/n). Each shift gets its own stratum of that interval.
      std::vector<double> offset = shift[s];
      offset[0] = (static_cast<double>(s) + shift[s][0]) * inv_n / static_cast<double>(shifts);
      double sum = 0.0;
      for (std::uint64_t i = 0; i < points; ++i) {
        // Sidi sin^2 periodization. Flattens the endpoint cusps that the
        // quantile function leaves in the integrand.
        double jac = 1.0;
        for (std::size_t j = 0; j < dims; ++j) {
          double x = static_cast<double>((i * z[j]) % points) * inv_n + offset[j];
          if (x >= 1.0) x -= 1.0;
          const double angle = 2.0 * std::numbers::pi * x;
          jac *= 1.0 - std::cos(angle);
          w[j] = x - std::sin(angle) * kInvTwoPi;
        }
        sum += jac * integrand(w);
      }
      shift_means[s] = sum * inv_n;
    }
    est.evaluations += points * shifts;

    double mean = 0.0;
    for (double m : shift_means) mean += m;
    mean /= static_cast<double>(shifts);
    double var = 0.0;
    for (double m : shift_means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(shifts - 1);
    est.value = std::clamp(mean, 0.0, 1.0);
    est.err_estimate = 3.0 * std::sqrt(var / static_cast<double>(shifts));
    est.accuracy_met = est.err_estimate <= q.accuracy;
    if (est.accuracy_met) break;
  }
  return est;
}

inline void validate(const MvnQuery& q) {
  const std::size_t n = q.cov.dim();
  if (q.upper.size() != n || q.mean.size() != n) {
    throw DomainError("MvnQuery: upper, mean and cov dimensions disagree");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(q.mean[i])) throw DomainError("MvnQuery: mean entries must be finite");
    if (std::isnan(q.upper[i]) || q.upper[i] == -std::numeric_limits<double>::infinity()) {
      throw DomainError("MvnQuery: upper entries must be finite or +infinity");
    }
  }
  if (!(q.accuracy > 0.0 && q.accuracy <= 0.1)) throw DomainError("MvnQuery: accuracy must lie in (0, 0.1]");
  if (q.max_points == 0) throw DomainError("MvnQuery: max_points must be positive");
}

}  // namespace detail

/// F_N(upper | mean, cov). Coordinates with upper = +inf are marginalized
/// out first. When the QMC budget runs out before the requested accuracy the
/// estimate is still returned, with accuracy_met = false.
inline MvnEstimate cdf(const MvnQuery& q) {
  detail::validate(q);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < q.upper.size(); ++i)
    if (std::isfinite(q.upper[i])) keep.push_back(i);

  if (keep.empty()) return MvnEstimate{1.0, 0.0, MvnMethod::univariate, 0, true};

  const PdMatrix cov = keep.size() == q.cov.dim() ? q.cov : q.cov.submatrix(keep);
  std::vector<double> bounds(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) bounds[i] = q.upper[keep[i]] - q.mean[keep[i]];

  if (!q.force_qmc) {
    if (keep.size() == 1) {
      return MvnEstimate{cdf(bounds[0] / std::sqrt(cov(0, 0))), 0.0, MvnMethod::univariate, 0, true};
    }
    if (keep.size() == 2) {
      const double s1 = std::sqrt(cov(0, 0));
      const double s2 = std::sqrt(cov(1, 1));
      const double rho = cov(0, 1) / (s1 * s2);
      if (std::abs(rho) <= kBivariateRhoLimit) {
        return MvnEstimate{bivariate_cdf(bounds[0] / s1, bounds[1] / s2, rho), 0.0, MvnMethod::bivariate_owen, 0,
                           true};
      }
    }
  }
  return detail::genz_qmc(bounds, cov, q);
}

}  // namespace owenext
