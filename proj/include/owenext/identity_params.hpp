#pragma once

#include <cmath>
#include <vector>

#include "owenext/errors.hpp"
#include "owenext/pd_matrix.hpp"

namespace owenext {

/// int prod_r Phi((x - m_r) / v_r) N(x | mu, sigma2) dx, a scalar latent x.
struct Lemma2Params {
  double mu = 0.0;
  double sigma2 = 1.0;
  std::vector<double> m;
  std::vector<double> v;

  std::size_t dim() const noexcept { return m.size(); }

  void validate() const {
    if (m.empty() || m.size() != v.size()) throw DomainError("Lemma2Params: m and v must be nonempty, equal length");
    if (!std::isfinite(mu)) throw DomainError("Lemma2Params: mu must be finite");
    for (double x : m)
      if (!std::isfinite(x)) throw DomainError("Lemma2Params: m entries must be finite");
    detail::require_positive_scales(sigma2, v);
  }
};

/// int prod_r Phi((x_r - m_r) / v_r) N(x | mu, Sigma) dx, a vector latent x.
struct Lemma3Params {
  std::vector<double> mu;
  PdMatrix sigma;
  std::vector<double> m;
  std::vector<double> v;

  std::size_t dim() const noexcept { return mu.size(); }

  void validate() const {
    const std::size_t n = sigma.dim();
    if (mu.size() != n || m.size() != n || v.size() != n) {
      throw DomainError("Lemma3Params: mu, m, v and sigma dimensions disagree");
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (!std::isfinite(mu[r]) || !std::isfinite(m[r])) throw DomainError("Lemma3Params: mu and m must be finite");
      if (!(v[r] > 0.0) || !std::isfinite(v[r])) throw DomainError("Lemma3Params: every v_r must be positive");
    }
  }
};

}  // namespace owenext
