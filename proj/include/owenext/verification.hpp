#pragma once

// Property suites behind `owenext verify`. Each check compares a library
// result against an independent route; `perturb` is added to the library
// side so the failure path can be exercised.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "owenext/errors.hpp"
#include "owenext/gauss_scalar.hpp"
#include "owenext/mvn_cdf.hpp"
#include "owenext/oracles.hpp"
#include "owenext/owen_identities.hpp"
#include "owenext/pd_matrix.hpp"
#include "owenext/probit_bernoulli.hpp"
#include "owenext/random_params.hpp"

namespace owenext::verify {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Options {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double accuracy = 1e-5;
  double perturb = 0.0;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"scalar", "matrix", "lemma2", "lemma3", "bernoulli"};
  return names;
}

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

/// Worst-case tracker for "max |error| <= tol" style checks.
struct WorstCase {
  double worst = 0.0;
  void add(double err) { worst = std::max(worst, std::isnan(err) ? INFINITY : err); }
  CheckResult result(std::string suite, std::string name, double tol) const {
    return {std::move(suite), std::move(name), worst <= tol, "max error " + fmt(worst) + " (tol " + fmt(tol) + ")"};
  }
};

}  // namespace detail

inline std::vector<CheckResult> scalar_suite(const Options& opt) {
  using detail::WorstCase;
  std::vector<CheckResult> out;
  const double eps = opt.perturb;

  WorstCase sym;
  for (int i = 0; i <= 10000; ++i) {
    const double x = -8.0 + 16.0 * i / 10000.0;
    sym.add(std::abs(cdf(x) + eps + cdf(-x) - 1.0));
  }
  out.push_back(sym.result("scalar", "cdf symmetry on [-8, 8]", 1e-14));

  WorstCase deriv;
  for (int i = 0; i <= 1200; ++i) {
    const double x = -6.0 + 12.0 * i / 1200.0;
    const double h = 1e-5;
    deriv.add(std::abs((cdf(x + h) - cdf(x - h)) / (2.0 * h) - phi(x) - eps));
  }
  out.push_back(deriv.result("scalar", "cdf derivative equals phi", 1e-8));

  WorstCase quantile;
  for (int i = 0; i <= 2000; ++i) {
    const double p = std::pow(10.0, -15.0 + 15.0 * i / 2000.0) * (1.0 - 1e-15);
    for (double q : {p, 1.0 - p}) {
      if (q <= 0.0 || q >= 1.0) continue;
      quantile.add(std::abs(cdf(inv_cdf(q)) + eps - q));
    }
  }
  out.push_back(quantile.result("scalar", "inv_cdf round trip", 1e-12));

  WorstCase owen;
  WorstCase owen_even;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const double h = -3.0 + 6.0 * i / 49.0;
      const double a = -3.0 + 6.0 * j / 49.0;
      const double t = owen_t(h, a) + eps;
      owen.add(std::abs(t - oracles::owen_t_quadrature(h, a)));
      owen_even.add(std::abs(t - owen_t(-h, a)));
    }
  out.push_back(owen.result("scalar", "owen_t vs adaptive quadrature (50x50 grid)", 1e-10));
  out.push_back(owen_even.result("scalar", "owen_t even in h", 1e-14));

  WorstCase owen_one;
  for (double h : {0.0, 0.5, -0.5, 2.0, -2.0}) {
    const double p = cdf(h);
    owen_one.add(std::abs(owen_t(h, 1.0) + eps - 0.5 * p * (1.0 - p)));
  }
  out.push_back(owen_one.result("scalar", "T(h, 1) = Phi(h)(1 - Phi(h))/2", 1e-10));

  WorstCase arcsin;
  for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    arcsin.add(std::abs(bivariate_cdf(0.0, 0.0, rho) + eps - (0.25 + std::asin(rho) / (2.0 * std::numbers::pi))));
  }
  out.push_back(arcsin.result("scalar", "bivariate orthant arcsin law", 1e-10));
  return out;
}

inline std::vector<CheckResult> matrix_suite(const Options& opt) {
  using detail::WorstCase;
  RandomStream rng(substream_seed(opt.seed, 101));
  WorstCase recon;
  WorstCase det;
  WorstCase inverse;
  std::size_t consistency_failures = 0;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t n = 1 + t % 8;
    const PdMatrix m = random_pd_matrix(rng, n);
    recon.add(frobenius_distance(m.chol() * m.chol().transposed(), m.entries()) / frobenius_norm(m.entries()) +
              opt.perturb);

    const std::size_t k = 1 + t % 6;
    const double sigma2 = uniform_in(rng, 0.1, 3.0);
    std::vector<double> v(k);
    for (double& x : v) x = uniform_in(rng, 0.2, 3.0);
    double closed = sigma2;
    for (double x : v) closed *= x * x;
    try {
      const double d = full_cov_determinant(sigma2, v);
      det.add(std::abs(d * (1.0 + opt.perturb) - closed) / closed);
      const PdMatrix cov = partitioned_inverse_check(lemma_precision_blocks(sigma2, v));
      SquareMatrix perturbed = cov.entries();
      perturbed(0, 0) += opt.perturb;
      inverse.add(frobenius_distance(assemble_precision(lemma_precision_blocks(sigma2, v)) * perturbed,
                                     SquareMatrix::identity(k + 1)));
    } catch (const ConsistencyError&) {
      ++consistency_failures;
    }
  }
  std::vector<CheckResult> out;
  out.push_back(recon.result("matrix", "Cholesky reconstruction (relative Frobenius)", 1e-10));
  out.push_back(det.result("matrix", "determinant: Cholesky vs sigma^2 prod v_r^2", 1e-10));
  out.push_back(inverse.result("matrix", "partitioned inverse times precision = I", 1e-10));
  out.push_back({"matrix", "internal consistency errors", consistency_failures == 0,
                 std::to_string(consistency_failures) + " raised"});
  return out;
}

inline std::vector<CheckResult> lemma2_suite(const Options& opt) {
  RandomStream rng(substream_seed(opt.seed, 202));
  std::size_t failures = 0;
  double worst_excess = -INFINITY;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const Lemma2Params p = random_lemma2(rng, 1 + t % 5);
    const MvnEstimate closed = lemma2_closed_form(p, opt.accuracy, substream_seed(opt.seed, t));
    const double oracle = oracles::lemma2_lhs_quadrature(p, 200);
    const double excess = std::abs(closed.value + opt.perturb - oracle) - (opt.accuracy + closed.err_estimate);
    worst_excess = std::max(worst_excess, excess);
    if (excess > 0.0) ++failures;
  }
  return {{"lemma2", "closed form vs Gauss-Hermite(200)", failures == 0,
           std::to_string(failures) + "/" + std::to_string(opt.trials) + " outside accuracy + err_estimate"}};
}

inline std::vector<CheckResult> lemma3_suite(const Options& opt) {
  RandomStream rng(substream_seed(opt.seed, 303));
  const std::size_t draws = std::max<std::size_t>(opt.trials / 2, 1);
  const std::size_t allowed = std::max<std::size_t>(draws / 50, 1);
  std::size_t excursions = 0;
  for (std::size_t t = 0; t < draws; ++t) {
    const Lemma3Params p = random_lemma3(rng, 1 + t % 4);
    const MvnEstimate closed = lemma3_closed_form(p, opt.accuracy, substream_seed(opt.seed, t));
    const oracles::McEstimate mc = oracles::lemma3_lhs_mc(p, 1000000, substream_seed(opt.seed, 1000 + t));
    const double se = std::hypot(mc.std_error, closed.err_estimate / 3.0);
    if (std::abs(closed.value + opt.perturb - mc.estimate) > 3.0 * se) ++excursions;
  }
  return {{"lemma3", "closed form vs Monte Carlo (1e6 draws, 3 SE)", excursions <= allowed,
           std::to_string(excursions) + "/" + std::to_string(draws) + " excursions (allowed " +
               std::to_string(allowed) + ")"}};
}

inline std::vector<CheckResult> bernoulli_suite(const Options& opt) {
  using detail::WorstCase;
  std::vector<CheckResult> out;
  const double acc = 1e-6;

  {
    const ProbitBernoulli d = half_correlation_fixture();
    WorstCase w;
    for (const SignVector& y : {SignVector{1, 1}, SignVector{-1, -1}}) w.add(std::abs(pmf(d, y).value + opt.perturb - 1.0 / 3.0));
    for (const SignVector& y : {SignVector{1, -1}, SignVector{-1, 1}}) w.add(std::abs(pmf(d, y).value + opt.perturb - 1.0 / 6.0));
    out.push_back(w.result("bernoulli", "orthant example 1/3, 1/6", 1e-6));
  }

  RandomStream rng(substream_seed(opt.seed, 404));
  {
    const std::size_t draws = std::max<std::size_t>(opt.trials / 5, 1);
    std::size_t failures = 0;
    for (std::size_t t = 0; t < draws; ++t) {
      const ProbitBernoulli d = random_bernoulli(rng, 1 + t % 8);
      const EnumerationTotal e = normalization(d, acc, substream_seed(opt.seed, t));
      if (std::abs(e.total + opt.perturb - 1.0) > e.budget) ++failures;
    }
    out.push_back({"bernoulli", "pmf sums to one within 2^N accuracy", failures == 0,
                   std::to_string(failures) + "/" + std::to_string(draws) + " outside budget"});
  }
  {
    WorstCase w;
    const std::size_t draws = std::max<std::size_t>(opt.trials / 2, 1);
    for (std::size_t t = 0; t < draws; ++t) {
      const std::size_t n = 1 + t % 4;
      const ProbitBernoulli d = random_bernoulli(rng, n);
      std::vector<double> neg(d.mu());
      for (double& x : neg) x = -x;
      const ProbitBernoulli flipped(neg, d.sigma());
      const SignVector y = SignVector::from_index(n, t % (std::size_t{1} << n));
      w.add(std::abs(pmf(d, y, acc).value + opt.perturb - pmf(flipped, y.negated(), acc).value));
    }
    out.push_back(w.result("bernoulli", "sign flip pi(y; mu) = pi(-y; -mu)", 2.0 * acc));
  }
  {
    std::size_t failures = 0;
    const std::size_t draws = std::max<std::size_t>(opt.trials / 5, 1);
    for (std::size_t t = 0; t < draws; ++t) {
      const std::size_t n = 2 + t % 4;
      const ProbitBernoulli d = random_bernoulli(rng, n);
      const std::vector<std::size_t> keep = {0, n - 1};
      const ProbitBernoulli marg = marginalize(d, keep);
      for (std::uint64_t k = 0; k < 4; ++k) {
        const SignVector ym = SignVector::from_index(2, k);
        double sum = 0.0;
        double err = 0.0;
        for (std::uint64_t full = 0; full < (std::uint64_t{1} << n); ++full) {
          const SignVector y = SignVector::from_index(n, full);
          if (y[0] != ym[0] || y[n - 1] != ym[1]) continue;
          const MvnEstimate e = pmf(d, y, acc);
          sum += e.value;
          err += std::max(e.err_estimate, acc);
        }
        if (std::abs(pmf(marg, ym, acc).value + opt.perturb - sum) > err + acc) ++failures;
      }
    }
    out.push_back({"bernoulli", "marginalize agrees with summed pmf", failures == 0,
                   std::to_string(failures) + " mismatches"});
  }
  {
    std::size_t failures = 0;
    const std::size_t draws = std::max<std::size_t>(opt.trials / 10, 1);
    const std::size_t count = 1000000;
    for (std::size_t t = 0; t < draws; ++t) {
      const std::size_t n = 1 + t % 3;
      const ProbitBernoulli d = random_bernoulli(rng, n);
      std::vector<std::size_t> freq(std::size_t{1} << n, 0);
      for (const SignVector& y : sample(d, count, substream_seed(opt.seed, 500 + t))) ++freq[y.index()];
      for (std::uint64_t k = 0; k < freq.size(); ++k) {
        const double p = pmf(d, SignVector::from_index(n, k), acc).value;
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(count));
        if (std::abs(static_cast<double>(freq[k]) / count + opt.perturb - p) > 4.0 * se + acc) ++failures;
      }
    }
    out.push_back({"bernoulli", "sampler frequencies match pmf (4 SE)", failures == 0,
                   std::to_string(failures) + " support points outside band"});
  }
  return out;
}

inline std::vector<CheckResult> run_suite(const std::string& name, const Options& opt) {
  if (name == "scalar") return scalar_suite(opt);
  if (name == "matrix") return matrix_suite(opt);
  if (name == "lemma2") return lemma2_suite(opt);
  if (name == "lemma3") return lemma3_suite(opt);
  if (name == "bernoulli") return bernoulli_suite(opt);
  if (name == "all") {
    std::vector<CheckResult> all;
    for (const auto& s : suite_names()) {
      auto part = run_suite(s, opt);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  throw DomainError("unknown suite: " + name);
}

}  // namespace owenext::verify
