#pragma once

// Multivariate Bernoulli distribution on {-1, +1}^N induced by a latent
// Gaussian f ~ N(mu, Sigma) and conditionally independent probit trials
// P(Y_r = y_r | f) = Phi(y_r f_r). Its pmf is the orthant probability
//
//   pi(y) = F_N(0 | -I_y mu, I_y Sigma I_y + I) = F_N(I_y mu | 0, I + I_y Sigma I_y).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include "owenext/errors.hpp"
#include "owenext/gauss_scalar.hpp"
#include "owenext/mvn_cdf.hpp"
#include "owenext/pd_matrix.hpp"
#include "owenext/random.hpp"

namespace owenext {

/// A point of {-1, +1}^N.
class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::vector<int> signs) : signs_(std::move(signs)) {
    for (int s : signs_)
      if (s != 1 && s != -1) throw DomainError("SignVector: entries must be -1 or +1");
  }
  SignVector(std::initializer_list<int> signs) : SignVector(std::vector<int>(signs)) {}

  /// Support point number `index` of {-1,+1}^dim; bit r set means y_r = -1.
  static SignVector from_index(std::size_t dim, std::uint64_t index) {
    std::vector<int> s(dim);
    for (std::size_t r = 0; r < dim; ++r) s[r] = ((index >> r) & 1U) ? -1 : 1;
    return SignVector(std::move(s));
  }

  std::uint64_t index() const noexcept {
    std::uint64_t k = 0;
    for (std::size_t r = 0; r < signs_.size(); ++r)
      if (signs_[r] < 0) k |= std::uint64_t{1} << r;
    return k;
  }

  std::size_t size() const noexcept { return signs_.size(); }
  int operator[](std::size_t r) const noexcept { return signs_[r]; }
  std::span<const int> values() const noexcept { return signs_; }

  SignVector negated() const {
    std::vector<int> s(signs_);
    for (int& x : s) x = -x;
    return SignVector(std::move(s));
  }

  friend bool operator==(const SignVector&, const SignVector&) = default;

 private:
  std::vector<int> signs_;
};

class ProbitBernoulli {
 public:
  ProbitBernoulli(std::vector<double> mu, PdMatrix sigma) : mu_(std::move(mu)), sigma_(std::move(sigma)) {
    if (mu_.size() != sigma_.dim()) throw DomainError("ProbitBernoulli: mu and sigma dimensions disagree");
    for (double x : mu_)
      if (!std::isfinite(x)) throw DomainError("ProbitBernoulli: mu must be finite");
  }

  std::size_t dim() const noexcept { return mu_.size(); }
  const std::vector<double>& mu() const noexcept { return mu_; }
  const PdMatrix& sigma() const noexcept { return sigma_; }

 private:
  std::vector<double> mu_;
  PdMatrix sigma_;
};

namespace detail {

inline void check_support(const ProbitBernoulli& d, const SignVector& y) {
  if (y.size() != d.dim()) throw DomainError("sign vector length does not match the distribution");
}

/// I + I_y Sigma I_y.
inline PdMatrix flipped_cov(const ProbitBernoulli& d, const SignVector& y) {
  const std::size_t n = d.dim();
  SquareMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) = y[i] * y[j] * d.sigma()(i, j);
  for (std::size_t i = 0; i < n; ++i) c(i, i) += 1.0;
  return PdMatrix::from_entries(c);
}

inline MvnQuery pmf_query(const ProbitBernoulli& d, const SignVector& y, double accuracy, std::uint64_t seed) {
  check_support(d, y);
  std::vector<double> upper(d.dim());
  for (std::size_t r = 0; r < d.dim(); ++r) upper[r] = y[r] * d.mu()[r];
  MvnQuery q{std::move(upper), std::vector<double>(d.dim(), 0.0), flipped_cov(d, y)};
  q.accuracy = accuracy;
  q.seed = seed;
  return q;
}

}  // namespace detail

/// pi(y), evaluated as F_N(I_y mu | 0, I + I_y Sigma I_y).
inline MvnEstimate pmf(const ProbitBernoulli& d, const SignVector& y, double accuracy = 1e-6,
                       std::uint64_t seed = 0) {
  return cdf(detail::pmf_query(d, y, accuracy, seed));
}

/// pi(y), evaluated as F_N(0 | -I_y mu, I_y Sigma I_y + I).
inline MvnEstimate pmf_centered_form(const ProbitBernoulli& d, const SignVector& y, double accuracy = 1e-6,
                                     std::uint64_t seed = 0) {
  MvnQuery q = detail::pmf_query(d, y, accuracy, seed);
  for (std::size_t r = 0; r < d.dim(); ++r) {
    q.mean[r] = -q.upper[r];
    q.upper[r] = 0.0;
  }
  return cdf(q);
}

/// log pi(y); -infinity when the probability underflows to 0.
inline double log_pmf(const ProbitBernoulli& d, const SignVector& y, double accuracy = 1e-6,
                      std::uint64_t seed = 0) {
  const double p = pmf(d, y, accuracy, seed).value;
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

/// Draws f ~ N(mu, Sigma), then y_r = sign(f_r + eps_r) with eps_r iid
/// standard normal, which is a Bernoulli(Phi(f_r)) trial on {-1, +1}.
inline std::vector<SignVector> sample(const ProbitBernoulli& d, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw DomainError("sample: count must be positive");
  const std::size_t n = d.dim();
  const SquareMatrix& l = d.sigma().chol();
  RandomStream rng(seed);
  std::vector<double> z(n);
  std::vector<SignVector> out;
  out.reserve(count);
  std::vector<int> y(n);
  for (std::size_t k = 0; k < count; ++k) {
    for (double& zi : z) zi = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      double f = d.mu()[i];
      for (std::size_t j = 0; j <= i; ++j) f += l(i, j) * z[j];
      y[i] = f + rng.normal() >= 0.0 ? 1 : -1;
    }
    out.emplace_back(y);
  }
  return out;
}

inline constexpr std::size_t kMaxEnumerationDim = 15;

struct EnumerationTotal {
  double total = 0.0;
  /// Sum of the per-term error estimates.
  double err_estimate = 0.0;
  /// Looser contract bound: 2^N * per-term accuracy.
  double budget = 0.0;
};

/// Sum of pi(y) over all 2^N support points, in index order.
inline EnumerationTotal normalization(const ProbitBernoulli& d, double accuracy = 1e-6, std::uint64_t seed = 0) {
  if (d.dim() > kMaxEnumerationDim) throw DomainError("normalization: enumeration limited to N <= 15");
  const std::uint64_t support = std::uint64_t{1} << d.dim();
  EnumerationTotal out;
  for (std::uint64_t k = 0; k < support; ++k) {
    const MvnEstimate e = pmf(d, SignVector::from_index(d.dim(), k), accuracy, seed);
    out.total += e.value;
    out.err_estimate += e.err_estimate;
  }
  out.budget = static_cast<double>(support) * accuracy;
  return out;
}

/// E[Y_r] = 2 Phi(mu_r / sqrt(1 + Sigma_rr)) - 1.
inline std::vector<double> mean(const ProbitBernoulli& d) {
  std::vector<double> m(d.dim());
  for (std::size_t r = 0; r < d.dim(); ++r) m[r] = 2.0 * cdf(d.mu()[r] / std::sqrt(1.0 + d.sigma()(r, r))) - 1.0;
  return m;
}

/// Distribution of the sub-vector Y_keep (0-based indices, in the given order).
inline ProbitBernoulli marginalize(const ProbitBernoulli& d, std::span<const std::size_t> keep) {
  if (keep.empty()) throw DomainError("marginalize: keep must be nonempty");
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("marginalize: duplicate index");
  }
  if (sorted.back() >= d.dim()) throw DomainError("marginalize: index out of range");
  std::vector<double> mu(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) mu[i] = d.mu()[keep[i]];
  return ProbitBernoulli(std::move(mu), d.sigma().submatrix(keep));
}

}  // namespace owenext
