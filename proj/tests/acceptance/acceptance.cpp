// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "owenext/gauss_scalar.hpp"
#include "owenext/mvn_cdf.hpp"
#include "owenext/oracles.hpp"
#include "owenext/owen_identities.hpp"
#include "owenext/pd_matrix.hpp"
#include "owenext/probit_bernoulli.hpp"
#include "owenext/random_params.hpp"
#include "owenext_cli.hpp"

using namespace owenext;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome orthant_example() {
  const auto t0 = std::chrono::steady_clock::now();
  const ProbitBernoulli d = half_correlation_fixture();
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 4; ++k) {
    const SignVector y = SignVector::from_index(2, k);
    const double expected = y[0] == y[1] ? 1.0 / 3.0 : 1.0 / 6.0;
    worst = std::max(worst, std::abs(pmf(d, y).value - expected));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 1.0, "max |pmf - {1/3, 1/6}| = " + sci(worst) + ", " + sci(secs) + " s"};
}

Outcome scalar_latent_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(substream_seed(0, 202));
  const double accuracy = 1e-5;
  std::size_t failures = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < 100; ++t) {
    const Lemma2Params p = random_lemma2(rng, 1 + t % 5);
    const MvnEstimate closed = lemma2_closed_form(p, accuracy, substream_seed(0, t));
    const double diff = std::abs(closed.value - oracles::lemma2_lhs_quadrature(p, 200));
    worst = std::max(worst, diff);
    if (diff > 1e-5 + closed.err_estimate) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 60.0, std::to_string(failures) + "/100 outside 1e-5 + err, max diff " + sci(worst) +
                                            ", " + sci(secs) + " s"};
}

Outcome vector_latent_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(substream_seed(0, 303));
  std::size_t inside = 0;
  for (std::size_t t = 0; t < 50; ++t) {
    const Lemma3Params p = random_lemma3(rng, 1 + t % 4);
    const MvnEstimate closed = lemma3_closed_form(p, 1e-6, substream_seed(0, t));
    const oracles::McEstimate mc = oracles::lemma3_lhs_mc(p, 1000000, substream_seed(0, 1000 + t));
    const double se = std::hypot(mc.std_error, closed.err_estimate / 3.0);
    if (std::abs(closed.value - mc.estimate) <= 3.0 * se) ++inside;
  }
  const double secs = seconds_since(t0);
  return {inside >= 49 && secs < 300.0,
          std::to_string(inside) + "/50 within 3 combined SE, " + sci(secs) + " s"};
}

void draw_scales(RandomStream& rng, std::size_t n, double& sigma2, std::vector<double>& v) {
  const double sigma = uniform_in(rng, 0.3, 2.0);
  sigma2 = sigma * sigma;
  v.resize(n);
  for (double& x : v) x = uniform_in(rng, 0.3, 2.0);
}

Outcome determinant_identity() {
  RandomStream rng(substream_seed(0, 404));
  double worst = 0.0;
  for (std::size_t t = 0; t < 100; ++t) {
    double sigma2 = 0.0;
    std::vector<double> v;
    draw_scales(rng, 1 + t % 6, sigma2, v);
    const double by_cholesky = PdMatrix::from_entries(full_cov_matrix(sigma2, v)).determinant();
    double closed = sigma2;
    for (double x : v) closed *= x * x;
    worst = std::max(worst, std::abs(by_cholesky - closed) / closed);
  }
  return {worst <= 1e-10, "max relative error " + sci(worst)};
}

Outcome partitioned_inverse() {
  RandomStream rng(substream_seed(0, 505));
  double worst = 0.0;
  for (std::size_t t = 0; t < 100; ++t) {
    double sigma2 = 0.0;
    std::vector<double> v;
    draw_scales(rng, 1 + t % 6, sigma2, v);
    const PrecisionBlocks blocks = lemma_precision_blocks(sigma2, v);
    try {
      const PdMatrix cov = partitioned_inverse_check(blocks);
      const std::size_t n = v.size() + 1;
      worst = std::max(worst, frobenius_distance(assemble_precision(blocks) * cov.entries(), SquareMatrix::identity(n)));
    } catch (const ConsistencyError&) {
      worst = INFINITY;
    }
  }
  return {worst <= 1e-10, "max Frobenius residual " + sci(worst)};
}

Outcome pmf_normalization() {
  RandomStream rng(substream_seed(0, 606));
  std::size_t failures = 0;
  double worst_ratio = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 8;
    const EnumerationTotal e = normalization(random_bernoulli(rng, n), 1e-6, substream_seed(0, t));
    const double budget = std::ldexp(1e-6, static_cast<int>(n));
    worst_ratio = std::max(worst_ratio, std::abs(e.total - 1.0) / budget);
    if (std::abs(e.total - 1.0) > budget) ++failures;
  }
  return {failures == 0, std::to_string(failures) + "/20 outside 2^N * 1e-6, worst |total - 1| / budget = " +
                             sci(worst_ratio)};
}

Outcome generative_equivalence() {
  std::size_t hits = 0;
  const std::size_t draws = 1000000;
  for (const SignVector& y : sample(half_correlation_fixture(), draws, 0)) hits += y == SignVector{1, 1};
  const double freq = static_cast<double>(hits) / static_cast<double>(draws);
  return {std::abs(freq - 1.0 / 3.0) <= 0.002, "frequency of (+1,+1) = " + std::to_string(freq)};
}

Outcome bivariate_exactness() {
  double worst = 0.0;
  for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    const double expected = 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
    worst = std::max(worst, std::abs(bivariate_cdf(0.0, 0.0, rho) - expected));
  }
  return {worst <= 1e-10, "max error " + sci(worst)};
}

Outcome owen_t_checks() {
  double grid = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double h = -6.0 + 12.0 * i / 49.0;
    for (int j = 0; j < 50; ++j) {
      const double a = -10.0 + 20.0 * j / 49.0;
      grid = std::max(grid, std::abs(owen_t(h, a) - oracles::owen_t_quadrature(h, a)));
    }
  }
  double diag = 0.0;
  for (double h : {0.0, 0.5, -0.5, 2.0, -2.0}) {
    const double p = cdf(h);
    diag = std::max(diag, std::abs(owen_t(h, 1.0) - 0.5 * p * (1.0 - p)));
  }
  return {grid <= 1e-10 && diag <= 1e-10, "2500-point grid max error " + sci(grid) + ", T(h,1) max error " + sci(diag)};
}

template <class F>
bool repeats(F f) {
  return f() == f();
}

Outcome determinism() {
  std::vector<std::string> broken;
  RandomStream rng(substream_seed(0, 707));
  const Lemma2Params l2 = random_lemma2(rng, 4);
  const Lemma3Params l3 = random_lemma3(rng, 4);
  const ProbitBernoulli d = random_bernoulli(rng, 5);
  const MvnQuery q{{0.3, -0.2, 0.8, 0.1, 0.5}, std::vector<double>(5, 0.0), random_pd_matrix(rng, 5)};
  auto est = [](const MvnEstimate& e) { return std::vector<double>{e.value, e.err_estimate}; };
  auto mc = [](const oracles::McEstimate& e) { return std::vector<double>{e.estimate, e.std_error}; };

  if (!repeats([&] { return est(cdf(q)); })) broken.push_back("mvn cdf");
  if (!repeats([&] { return est(lemma2_closed_form(l2, 1e-6, 9)); })) broken.push_back("lemma2 closed form");
  if (!repeats([&] { return est(lemma3_closed_form(l3, 1e-6, 9)); })) broken.push_back("lemma3 closed form");
  if (!repeats([&] { return mc(oracles::lemma3_lhs_mc(l3, 100000, 9)); })) broken.push_back("lemma3 Monte Carlo");
  if (!repeats([&] { return mc(oracles::mvn_mc(q, 100000, 9)); })) broken.push_back("mvn Monte Carlo");
  if (!repeats([&] { return sample(d, 10000, 9); })) broken.push_back("sample");
  if (!repeats([&] { return normalization(d, 1e-6, 9).total; })) broken.push_back("normalization");
  if (!repeats([&] { return est(pmf(d, SignVector::from_index(5, 11), 1e-6, 9)); })) broken.push_back("pmf");
  if (!repeats([&] {
        RandomStream s(9);
        std::vector<double> x;
        for (int i = 0; i < 1000; ++i) x.push_back(s.normal());
        return x;
      }))
    broken.push_back("normal stream");

  auto cli_output = [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return std::to_string(code) + out.str();
  };
  if (!repeats([&] { return cli_output({"verify", "--suite", "all", "--trials", "10", "--seed", "3"}); }))
    broken.push_back("verify report");

  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  const int code = cli::run_cli(std::vector<std::string>{"verify", "--suite", "all"}, out, err);
  const double secs = seconds_since(t0);
  if (code != 0) std::fputs(out.str().c_str(), stdout);

  std::string detail = broken.empty() ? "all seeded operations repeat bit-identically" : "not repeatable:";
  for (const auto& b : broken) detail += " " + b;
  detail += "; verify --suite all exit " + std::to_string(code) + " in " + sci(secs) + " s";
  return {broken.empty() && code == 0 && secs < 600.0, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"orthant example 1/3 and 1/6", orthant_example},
      {"scalar-latent identity vs Gauss-Hermite(200)", scalar_latent_identity},
      {"vector-latent identity vs Monte Carlo", vector_latent_identity},
      {"joint covariance determinant", determinant_identity},
      {"partitioned inverse", partitioned_inverse},
      {"pmf normalization", pmf_normalization},
      {"sampler frequency on orthant example", generative_equivalence},
      {"bivariate orthant arcsin law", bivariate_exactness},
      {"Owen's T against quadrature", owen_t_checks},
      {"determinism and full verification", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %2zu  %-46s  %s  (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
