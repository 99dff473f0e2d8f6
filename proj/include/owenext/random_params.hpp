#pragma once

// Seeded generators of random parameter sets, shared by the verification
// suites and the tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "owenext/identity_params.hpp"
#include "owenext/pd_matrix.hpp"
#include "owenext/probit_bernoulli.hpp"
#include "owenext/random.hpp"

namespace owenext {

inline double uniform_in(RandomStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

/// G'G / n + ridge * I with G standard normal.
inline PdMatrix random_pd_matrix(RandomStream& rng, std::size_t n, double ridge = 0.1) {
  SquareMatrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.normal();
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += g(k, i) * g(k, j);
      m(i, j) = s / static_cast<double>(n);
    }
  for (std::size_t i = 0; i < n; ++i) m(i, i) += ridge;
  return PdMatrix::from_entries(m);
}

/// mu, m in [-2, 2]; v, sigma in [0.3, 2].
inline Lemma2Params random_lemma2(RandomStream& rng, std::size_t n) {
  Lemma2Params p;
  p.mu = uniform_in(rng, -2.0, 2.0);
  const double sigma = uniform_in(rng, 0.3, 2.0);
  p.sigma2 = sigma * sigma;
  for (std::size_t r = 0; r < n; ++r) {
    p.m.push_back(uniform_in(rng, -2.0, 2.0));
    p.v.push_back(uniform_in(rng, 0.3, 2.0));
  }
  return p;
}

inline Lemma3Params random_lemma3(RandomStream& rng, std::size_t n) {
  std::vector<double> mu(n), m(n), v(n);
  for (std::size_t r = 0; r < n; ++r) {
    mu[r] = uniform_in(rng, -2.0, 2.0);
    m[r] = uniform_in(rng, -2.0, 2.0);
    v[r] = uniform_in(rng, 0.3, 2.0);
  }
  return Lemma3Params{std::move(mu), random_pd_matrix(rng, n), std::move(m), std::move(v)};
}

/// Latent mean in [-1, 1], covariance from random_pd_matrix.
inline ProbitBernoulli random_bernoulli(RandomStream& rng, std::size_t n) {
  std::vector<double> mu(n);
  for (double& x : mu) x = uniform_in(rng, -1.0, 1.0);
  return ProbitBernoulli(std::move(mu), random_pd_matrix(rng, n));
}

/// Latent covariance [[3, 2], [2, 3]]: I + I_y Sigma I_y then has unit-scaled
/// correlation y1 y2 / 2, the same orthant probabilities as the limiting
/// correlation matrix [[1, y1 y2 / 2], [y1 y2 / 2, 1]].
inline ProbitBernoulli half_correlation_fixture() {
  return ProbitBernoulli({0.0, 0.0}, PdMatrix::from_rows({{3.0, 2.0}, {2.0, 3.0}}));
}

}  // namespace owenext
