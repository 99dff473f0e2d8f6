#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "owenext/mvn_cdf.hpp"
#include "owenext/probit_bernoulli.hpp"
#include "owenext/random_params.hpp"

using namespace owenext;

namespace {

constexpr double kAcc = 1e-6;

std::vector<SignVector> support(std::size_t n) {
  std::vector<SignVector> out;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) out.push_back(SignVector::from_index(n, k));
  return out;
}

/// Generative process with explicit Bernoulli(Phi(f_r)) trials.
double generative_frequency(const ProbitBernoulli& d, const SignVector& y, std::size_t draws, std::uint64_t seed) {
  RandomStream rng(seed);
  const SquareMatrix& l = d.sigma().chol();
  const std::size_t n = d.dim();
  std::vector<double> z(n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < draws; ++k) {
    for (double& x : z) x = rng.normal();
    bool match = true;
    for (std::size_t i = 0; i < n; ++i) {
      double f = d.mu()[i];
      for (std::size_t j = 0; j <= i; ++j) f += l(i, j) * z[j];
      const int yi = rng.uniform() < cdf(f) ? 1 : -1;
      match = match && yi == y[i];
    }
    hits += match;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

}  // namespace

TEST(SignVector, ValidatesEntries) {
  EXPECT_THROW(SignVector({1, 0}), DomainError);
  EXPECT_THROW(SignVector({2}), DomainError);
  const SignVector y{1, -1, -1};
  EXPECT_EQ(y.index(), 6u);
  EXPECT_EQ(SignVector::from_index(3, 6), y);
  EXPECT_EQ(y.negated(), (SignVector{-1, 1, 1}));
}

TEST(Pmf, HalfCorrelationOrthants) {
  const ProbitBernoulli d = half_correlation_fixture();
  EXPECT_NEAR(pmf(d, {1, 1}).value, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(pmf(d, {-1, -1}).value, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(pmf(d, {1, -1}).value, 1.0 / 6.0, 1e-6);
  EXPECT_NEAR(pmf(d, {-1, 1}).value, 1.0 / 6.0, 1e-6);
}

TEST(Pmf, LimitingCorrelationPassedDirectly) {
  for (const SignVector& y : support(2)) {
    const double r = 0.5 * y[0] * y[1];
    const MvnQuery q{{0.0, 0.0}, {0.0, 0.0}, PdMatrix::from_rows({{1.0, r}, {r, 1.0}})};
    EXPECT_NEAR(cdf(q).value, y[0] == y[1] ? 1.0 / 3.0 : 1.0 / 6.0, 1e-6);
  }
}

TEST(Pmf, IndependentCentredLatentIsUniform) {
  for (std::size_t n : {1, 2, 3, 5}) {
    const ProbitBernoulli d(std::vector<double>(n, 0.0), PdMatrix::from_entries([&] {
                              SquareMatrix s(n);
                              for (std::size_t i = 0; i < n; ++i) s(i, i) = 0.3 + 0.4 * i;
                              return s;
                            }()));
    for (const SignVector& y : support(n)) EXPECT_NEAR(pmf(d, y).value, std::ldexp(1.0, -static_cast<int>(n)), 1e-12);
  }
}

TEST(Pmf, SingleCoordinate) {
  const ProbitBernoulli d({0.7}, PdMatrix::identity(1));
  // Phi(0.7 / sqrt(2))
  constexpr double kExpected = 0.68969102678115513;
  EXPECT_NEAR(pmf(d, {1}).value, kExpected, 1e-15);
  EXPECT_NEAR(pmf(d, {-1}).value, 1.0 - kExpected, 1e-15);

  const double freq = generative_frequency(d, {1}, 10000000, 3);
  const double se = std::sqrt(kExpected * (1.0 - kExpected) / 1e7);
  EXPECT_NEAR(freq, kExpected, 4.0 * se);
}

TEST(Pmf, CentredAndShiftedFormsAgree) {
  RandomStream rng(12);
  for (std::size_t t = 0; t < 10; ++t) {
    const std::size_t n = 1 + t % 5;
    const ProbitBernoulli d = random_bernoulli(rng, n);
    const SignVector y = SignVector::from_index(n, (t * 7) % (std::uint64_t{1} << n));
    EXPECT_NEAR(pmf(d, y, kAcc, t).value, pmf_centered_form(d, y, kAcc, t + 100).value, 2.0 * kAcc);
  }
}

TEST(Pmf, SignFlip) {
  RandomStream rng(31);
  for (std::size_t t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 4;
    const ProbitBernoulli d = random_bernoulli(rng, n);
    std::vector<double> neg(d.mu());
    for (double& x : neg) x = -x;
    const ProbitBernoulli flipped(neg, d.sigma());
    const SignVector y = SignVector::from_index(n, t % (std::uint64_t{1} << n));
    EXPECT_NEAR(pmf(d, y, kAcc, t).value, pmf(flipped, y.negated(), kAcc, t + 1).value, 2.0 * kAcc);
  }
}

TEST(Pmf, RejectsWrongLength) {
  const ProbitBernoulli d = half_correlation_fixture();
  EXPECT_THROW(pmf(d, {1}), DomainError);
  EXPECT_THROW(pmf(d, {1, 1, 1}), DomainError);
  EXPECT_THROW(ProbitBernoulli({0.0}, PdMatrix::identity(2)), DomainError);
}

TEST(LogPmf, Values) {
  EXPECT_NEAR(log_pmf(half_correlation_fixture(), {1, 1}), std::log(1.0 / 3.0), 1e-5);
  const ProbitBernoulli iid(std::vector<double>(4, 0.0), PdMatrix::identity(4));
  EXPECT_NEAR(log_pmf(iid, {1, -1, 1, 1}), -4.0 * std::numbers::ln2, 1e-12);

  RandomStream rng(8);
  for (int t = 0; t < 10; ++t) {
    const ProbitBernoulli d = random_bernoulli(rng, 3);
    const SignVector y = SignVector::from_index(3, t % 8);
    const double p = pmf(d, y).value;
    ASSERT_GT(p, 1e-10);
    EXPECT_NEAR(std::exp(log_pmf(d, y)), p, 1e-12 * p);
  }
  const ProbitBernoulli far({1e3}, PdMatrix::identity(1));
  EXPECT_EQ(log_pmf(far, {-1}), -std::numeric_limits<double>::infinity());
}

TEST(Sample, SeededRunsRepeat) {
  RandomStream rng(4);
  const ProbitBernoulli d = random_bernoulli(rng, 3);
  EXPECT_EQ(sample(d, 500, 42), sample(d, 500, 42));
  EXPECT_NE(sample(d, 500, 42), sample(d, 500, 43));
  EXPECT_THROW(sample(d, 0, 1), DomainError);
}

TEST(Sample, SaturatedLatentGivesAllPositive) {
  const ProbitBernoulli d(std::vector<double>(3, 10.0), PdMatrix::identity(3));
  std::size_t hits = 0;
  for (const SignVector& y : sample(d, 10000, 0)) hits += y == SignVector{1, 1, 1};
  EXPECT_GE(hits, 9990u);
}

TEST(Sample, HalfCorrelationFrequency) {
  std::size_t hits = 0;
  for (const SignVector& y : sample(half_correlation_fixture(), 1000000, 0)) hits += y == SignVector{1, 1};
  EXPECT_NEAR(static_cast<double>(hits) / 1e6, 1.0 / 3.0, 0.002);
}

TEST(Sample, FrequenciesMatchPmf) {
  RandomStream rng(55);
  const std::size_t draws = 1000000;
  for (std::size_t t = 0; t < 10; ++t) {
    const std::size_t n = 1 + t % 3;
    const ProbitBernoulli d = random_bernoulli(rng, n);
    std::vector<std::size_t> freq(std::size_t{1} << n, 0);
    for (const SignVector& y : sample(d, draws, 900 + t)) ++freq[y.index()];
    for (std::uint64_t k = 0; k < freq.size(); ++k) {
      const double p = pmf(d, SignVector::from_index(n, k)).value;
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
      EXPECT_NEAR(static_cast<double>(freq[k]) / draws, p, 4.0 * se) << "set " << t << " point " << k;
    }
  }
}

TEST(Normalization, SmallCases) {
  const ProbitBernoulli one({-0.4}, PdMatrix::from_rows({{2.5}}));
  EXPECT_NEAR(normalization(one, kAcc).total, 1.0, 2.0 * kAcc);
  const EnumerationTotal two = normalization(half_correlation_fixture(), kAcc);
  EXPECT_NEAR(two.total, 1.0, 4.0 * kAcc);
  EXPECT_EQ(two.budget, 4.0 * kAcc);

  RandomStream rng(6);
  const EnumerationTotal six = normalization(random_bernoulli(rng, 6), kAcc, 1);
  EXPECT_NEAR(six.total, 1.0, 64.0 * kAcc);
}

TEST(Normalization, RandomDrawsWithinBudget) {
  RandomStream rng(66);
  for (std::size_t t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 8;
    const EnumerationTotal e = normalization(random_bernoulli(rng, n), kAcc, t);
    EXPECT_LE(std::abs(e.total - 1.0), std::ldexp(kAcc, static_cast<int>(n))) << "N=" << n;
  }
}

TEST(Normalization, RejectsLargeDimension) {
  const ProbitBernoulli d(std::vector<double>(16, 0.0), PdMatrix::identity(16));
  EXPECT_THROW(normalization(d), DomainError);
}

TEST(Mean, ClosedForm) {
  const ProbitBernoulli centred(std::vector<double>(3, 0.0), PdMatrix::from_rows({{1.0, 0.3, 0.0}, {0.3, 2.0, 0.1}, {0.0, 0.1, 0.5}}));
  for (double m : mean(centred)) EXPECT_EQ(m, 0.0);

  const ProbitBernoulli d({0.7}, PdMatrix::identity(1));
  EXPECT_NEAR(mean(d)[0], pmf(d, {1}).value - pmf(d, {-1}).value, 1e-15);
  EXPECT_NEAR(mean(d)[0], 2.0 * 0.68969102678115513 - 1.0, 1e-15);
}

TEST(Mean, MatchesEnumeration) {
  RandomStream rng(9);
  for (int t = 0; t < 3; ++t) {
    const ProbitBernoulli d = random_bernoulli(rng, 3);
    std::vector<double> enumerated(3, 0.0);
    for (const SignVector& y : support(3)) {
      const double p = pmf(d, y, kAcc).value;
      for (std::size_t r = 0; r < 3; ++r) enumerated[r] += y[r] * p;
    }
    const std::vector<double> m = mean(d);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(m[r], enumerated[r], 8.0 * kAcc);
  }
}

TEST(Marginalize, KeepAllIsIdentity) {
  RandomStream rng(10);
  const ProbitBernoulli d = random_bernoulli(rng, 3);
  const std::vector<std::size_t> all = {0, 1, 2};
  const ProbitBernoulli m = marginalize(d, all);
  EXPECT_EQ(m.mu(), d.mu());
  EXPECT_EQ(m.sigma().entries(), d.sigma().entries());
}

TEST(Marginalize, HalfCorrelationFirstCoordinate) {
  const std::vector<std::size_t> first = {0};
  const ProbitBernoulli m = marginalize(half_correlation_fixture(), first);
  EXPECT_NEAR(pmf(m, {1}).value, 1.0 / 3.0 + 1.0 / 6.0, 1e-15);
}

TEST(Marginalize, FourDimensionsKeepSecondAndFourth) {
  RandomStream rng(44);
  const ProbitBernoulli d = random_bernoulli(rng, 4);
  const std::vector<std::size_t> keep = {1, 3};
  const ProbitBernoulli m = marginalize(d, keep);
  for (const SignVector& ym : support(2)) {
    double sum = 0.0;
    for (const SignVector& y : support(4))
      if (y[1] == ym[0] && y[3] == ym[1]) sum += pmf(d, y, kAcc).value;
    EXPECT_NEAR(pmf(m, ym, kAcc).value, sum, 4.0 * kAcc);
  }
}

TEST(Marginalize, MatchesSummedPmf) {
  RandomStream rng(45);
  for (std::size_t t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 4;
    const ProbitBernoulli d = random_bernoulli(rng, n);
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < n; ++r)
      if ((t >> (r % 3)) & 1U || r == 0) keep.push_back(r);
    const ProbitBernoulli m = marginalize(d, keep);
    for (const SignVector& ym : support(keep.size())) {
      double sum = 0.0;
      double err = 0.0;
      for (const SignVector& y : support(n)) {
        bool match = true;
        for (std::size_t i = 0; i < keep.size(); ++i) match = match && y[keep[i]] == ym[i];
        if (!match) continue;
        sum += pmf(d, y, kAcc).value;
        err += kAcc;
      }
      EXPECT_NEAR(pmf(m, ym, kAcc).value, sum, err + kAcc) << "draw " << t;
    }
  }
}

TEST(Marginalize, RejectsBadIndexSets) {
  const ProbitBernoulli d = half_correlation_fixture();
  EXPECT_THROW(marginalize(d, std::vector<std::size_t>{}), DomainError);
  EXPECT_THROW(marginalize(d, std::vector<std::size_t>{0, 0}), DomainError);
  EXPECT_THROW(marginalize(d, std::vector<std::size_t>{2}), DomainError);
}
