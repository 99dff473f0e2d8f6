#pragma once

// Closed forms of two Gaussian integrals of products of normal CDFs:
//
//   int prod_r Phi((x - m_r)/v_r) N(x | mu, s2) dx     = F_N(mu 1 | m, diag(v^2) + s2 11')
//   int prod_r Phi((x_r - m_r)/v_r) N(x | mu, S) dx    = F_N(mu   | m, diag(v^2) + S)

#include <span>
#include <vector>

#include "owenext/identity_params.hpp"
#include "owenext/mvn_cdf.hpp"
#include "owenext/pd_matrix.hpp"

namespace owenext {

/// diag(v^2) + sigma2 * 11'.
inline PdMatrix build_vn(double sigma2, std::span<const double> v) {
  detail::require_positive_scales(sigma2, v);
  const std::size_t n = v.size();
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = sigma2;
    m(i, i) = v[i] * v[i] + sigma2;
  }
  return PdMatrix::from_entries(m);
}

inline MvnEstimate lemma2_closed_form(const Lemma2Params& p, double accuracy, std::uint64_t seed = 0) {
  p.validate();
  MvnQuery q{std::vector<double>(p.dim(), p.mu), p.m, build_vn(p.sigma2, p.v)};
  q.accuracy = accuracy;
  q.seed = seed;
  return cdf(q);
}

inline MvnEstimate lemma3_closed_form(const Lemma3Params& p, double accuracy, std::uint64_t seed = 0) {
  p.validate();
  SquareMatrix cov = p.sigma.entries();
  for (std::size_t r = 0; r < p.dim(); ++r) cov(r, r) += p.v[r] * p.v[r];
  MvnQuery q{p.mu, p.m, PdMatrix::from_entries(cov)};
  q.accuracy = accuracy;
  q.seed = seed;
  return cdf(q);
}

}  // namespace owenext
