#include <doctest.h>

#include <cmath>
#include <random>

#include "hybridpower/criteria.hpp"
#include "hybridpower/error.hpp"
#include "hybridpower/gauss.hpp"
#include "hybridpower/oracle.hpp"
#include "hybridpower/quadrature.hpp"

using namespace hybridpower;

namespace {

// Reference values: tests/oracle/reference_values.py (mpmath, 50 digits).
constexpr double kPhi1959964 = 0.9750000009035576;
constexpr double kPhiMinus8 = 6.2209605742717841e-16;
constexpr double kPhiMinus1 = 0.15865525393145705;
constexpr double kZ975 = 1.9599639845400542;
constexpr double kZ80 = 0.84162123357291421;
constexpr double kZ1e10 = -6.3613409024040562;
constexpr double kClinicalCdf005 = 0.22318955189403588;
constexpr double kClinicalMass005 = 0.77681044810596412;
constexpr double kClinicalCondMedian = 0.25597267874418554;
constexpr double kClinicalCondQ10 = 0.097038430547138064;
constexpr double kClinicalQuantile03 = 0.096546011229157304;
constexpr double kMassRelevantFig4Mid = 0.94516377807702013;

// Test-only inverse of the cdf by bisection.
double bisect_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std_norm_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const TruncatedNormalPrior kClinical(0.2, 0.2, -0.3, 0.7);

}  // namespace

TEST_CASE("std_norm_cdf matches high-precision references") {
  CHECK(std_norm_cdf(0.0) == 0.5);
  CHECK(std::abs(std_norm_cdf(1.959964) - kPhi1959964) <= 1e-12);
  CHECK(std::abs(std_norm_cdf(1.959964) - 0.975) <= 1e-9);
  CHECK(std::abs(std_norm_cdf(-1.0) - kPhiMinus1) <= 1e-15);
  const double tail = std_norm_cdf(-8.0);
  CHECK(tail > 0.0);
  CHECK(tail < 1e-15);
  CHECK(std::abs(tail - kPhiMinus8) <= 1e-12 * kPhiMinus8);
}

TEST_CASE("std_norm_cdf is monotone") {
  double prev = 0.0;
  for (double x = -12.0; x <= 12.0; x += 1e-3) {
    const double v = std_norm_cdf(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("std_norm_quantile") {
  CHECK(std::abs(std_norm_quantile(0.5)) <= 1e-15);
  CHECK(std::abs(std_norm_quantile(0.975) - kZ975) <= 1e-12);
  CHECK(std::abs(std_norm_quantile(0.8) - kZ80) <= 1e-12);
  CHECK(std::abs(std_norm_quantile(1e-10) - kZ1e10) <= 1e-10);
  CHECK(std::abs(std_norm_quantile(0.8) - bisect_quantile(0.8)) <= 1e-12);

  SUBCASE("domain errors") {
    for (double p : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
      CHECK_THROWS_AS(std_norm_quantile(p), Error);
    }
  }

  SUBCASE("inverse of the cdf and monotone") {
    double prev = -kInf;
    for (int i = 1; i < 10000; ++i) {
      const double p = i / 10000.0;
      const double q = std_norm_quantile(p);
      CHECK(std::abs(std_norm_cdf(q) - p) <= 1e-9);
      CHECK(q > prev);
      prev = q;
    }
    for (double p : {1e-300, 1e-100, 1e-20, 1e-5, 0.02, 0.03}) {
      const double q = std_norm_quantile(p);
      CHECK(std::abs(std_norm_cdf(q) - p) <= 1e-9 * p);
    }
    for (double p : {1e-5, 0.02, 0.03, 0.3}) {
      CHECK(std::abs(std_norm_quantile(1.0 - p) + std_norm_quantile(p)) <= 1e-6);
    }
  }
}

TEST_CASE("truncated normal prior construction") {
  CHECK_THROWS_AS(TruncatedNormalPrior(0.0, 0.0, -1.0, 1.0), Error);
  CHECK_THROWS_AS(TruncatedNormalPrior(0.0, -1.0, -1.0, 1.0), Error);
  CHECK_THROWS_AS(TruncatedNormalPrior(0.0, 1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(TruncatedNormalPrior(0.0, 1.0, 2.0, 1.0), Error);
  CHECK_THROWS_AS(TruncatedNormalPrior(std::nan(""), 1.0, 0.0, 1.0), Error);
  // Interval so deep in the tail that the normal puts no mass on it.
  CHECK_THROWS_AS(TruncatedNormalPrior(0.0, 0.01, 50.0, 60.0), Error);
  CHECK_NOTHROW(TruncatedNormalPrior(0.0, 1.0));
}

TEST_CASE("prior_cdf") {
  CHECK(prior_cdf(kClinical, 0.7) == 1.0);
  CHECK(prior_cdf(kClinical, 2.0) == 1.0);
  CHECK(prior_cdf(kClinical, -0.3) == 0.0);
  CHECK(prior_cdf(kClinical, 0.05) == doctest::Approx(kClinicalCdf005).epsilon(1e-12));
  CHECK(prior_cdf(kClinical, 0.05) == doctest::Approx(0.2232).epsilon(1e-3));
  const TruncatedNormalPrior symmetric(0.0, 1.0, -1.0, 1.0);
  CHECK(prior_cdf(symmetric, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("prior pdf integrates to one and vanishes outside the support") {
  for (const auto& prior : {kClinical, TruncatedNormalPrior(0.5, 0.05, -0.3, 0.7),
                            TruncatedNormalPrior(-0.25, 0.4, -0.3, 0.7),
                            TruncatedNormalPrior(3.0, 0.5, -1.0, 1.0),
                            TruncatedNormalPrior(0.1, 2.0)}) {
    const double total = integrate_against(prior, prior.lo(), prior.hi(), [](double) { return 1.0; });
    CHECK(std::abs(total - 1.0) <= 1e-8);
    CHECK(prior.pdf(prior.lo() - 1e-9) == 0.0);
    CHECK(prior.pdf(prior.hi() + 1e-9) == 0.0);
  }
}

TEST_CASE("prior_mass_relevant") {
  CHECK(prior_mass_relevant(kClinical, -0.3) == 1.0);
  CHECK(prior_mass_relevant(kClinical, -5.0) == 1.0);
  CHECK(prior_mass_relevant(kClinical, 0.7) == 0.0);
  CHECK(prior_mass_relevant(kClinical, 0.05) == doctest::Approx(kClinicalMass005).epsilon(1e-12));
  // Differs from the 0.86 quoted alongside the clinical example.
  CHECK(prior_mass_relevant(kClinical, 0.05) == doctest::Approx(0.777).epsilon(1e-3));

  const TruncatedNormalPrior mid(0.3, 0.125, -0.3, 0.7);
  const double mass = prior_mass_relevant(mid, 0.1);
  CHECK(mass == doctest::Approx(kMassRelevantFig4Mid).epsilon(1e-12));
  SUBCASE("Monte-Carlo cross-check") {
    const std::int64_t draws = 10'000'000;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < draws; ++i) {
      if (prior_sample(mid, oracle::uniform_at(7, static_cast<std::uint64_t>(i))) >= 0.1) ++hits;
    }
    const double est = static_cast<double>(hits) / draws;
    const double se = std::sqrt(est * (1 - est) / draws);
    CHECK(std::abs(est - mass) <= 3 * se);
  }

  SUBCASE("nonincreasing in mcid") {
    double prev = 1.0;
    for (double m = -1.0; m <= 1.0; m += 0.001) {
      const double v = prior_mass_relevant(kClinical, m);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("conditional prior and its quantiles") {
  const ConditionalPrior cond(kClinical, 0.05);
  CHECK(conditional_quantile(cond, 0.5) == doctest::Approx(kClinicalCondMedian).epsilon(1e-10));
  CHECK(std::abs(conditional_quantile(cond, 0.5) - 0.26) <= 0.005);
  CHECK(conditional_quantile(cond, 0.1) == doctest::Approx(kClinicalCondQ10).epsilon(1e-10));
  CHECK(std::abs(conditional_quantile(cond, 0.1) - 0.10) <= 0.005);
  CHECK(conditional_quantile(cond, 0.0) == 0.05);
  CHECK(conditional_quantile(cond, 1.0) == 0.7);
  CHECK_THROWS_AS(conditional_quantile(cond, 1.1), Error);

  SUBCASE("cut below the support uses the support") {
    const ConditionalPrior whole(kClinical, -1.0);
    CHECK(conditional_quantile(whole, 0.0) == -0.3);
    CHECK(whole.mass() == 1.0);
  }

  SUBCASE("degenerate conditionals are constructor errors") {
    try {
      ConditionalPrior bad(kClinical, 0.7);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateConditional);
    }
    CHECK_THROWS_AS(ConditionalPrior(kClinical, 1.0), Error);
    CHECK_THROWS_AS(ConditionalPrior(TruncatedNormalPrior(0.0, 0.01), 1.0), Error);
  }

  SUBCASE("conditional pdf is the base pdf over the relevant mass") {
    for (double t = 0.05; t <= 0.7; t += 0.01) {
      CHECK(std::abs(cond.pdf(t) - kClinical.pdf(t) / cond.mass()) <= 1e-10);
    }
    CHECK(cond.pdf(0.049) == 0.0);
    const double total = conditional_expectation(cond, [](double) { return 1.0; });
    CHECK(std::abs(total - 1.0) <= 1e-8);
  }
}

TEST_CASE("prior_sample") {
  const TruncatedNormalPrior symmetric(0.0, 1.0, -1.0, 1.0);
  CHECK(std::abs(prior_sample(symmetric, 0.5)) <= 1e-15);
  CHECK(prior_sample(kClinical, kClinicalCdf005) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(prior_sample(kClinical, 0.3) == doctest::Approx(kClinicalQuantile03).epsilon(1e-10));
  CHECK_THROWS_AS(prior_sample(kClinical, 0.0), Error);
  CHECK_THROWS_AS(prior_sample(kClinical, 1.0), Error);

  SUBCASE("support containment, including far-tail truncation") {
    const TruncatedNormalPrior upper_tail(0.0, 0.1, 0.8, 0.9);  // 8 sd above the mean
    const TruncatedNormalPrior lower_tail(0.0, 0.1, -0.9, -0.8);
    for (const auto& p : {kClinical, upper_tail, lower_tail}) {
      for (int i = 0; i < 100000; ++i) {
        const double x = prior_sample(p, oracle::uniform_at(3, static_cast<std::uint64_t>(i)));
        CHECK(x >= p.lo());
        CHECK(x <= p.hi());
      }
    }
    CHECK(upper_tail.quantile(0.5) > 0.8);
    CHECK(std::abs(upper_tail.cdf(upper_tail.quantile(0.5)) - 0.5) <= 1e-8);
  }
}

TEST_CASE("cdf and quantile are mutual inverses") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> mean(-1.0, 1.0), sd(0.02, 1.0), lo(-1.5, 0.0), width(0.1, 2.0);
  std::uniform_real_distribution<double> unit(1e-6, 1.0 - 1e-6);
  for (int s = 0; s < 200; ++s) {
    const double l = lo(rng);
    const TruncatedNormalPrior p(mean(rng), sd(rng), l, l + width(rng));
    for (int k = 0; k < 20; ++k) {
      const double u = unit(rng);
      CHECK(std::abs(p.cdf(p.quantile(u)) - u) <= 1e-8);
      const double x = p.lo() + unit(rng) * (p.hi() - p.lo());
      if (p.pdf(x) > 1e-3) CHECK(std::abs(p.quantile(p.cdf(x)) - x) <= 1e-8);
    }
  }
}

TEST_CASE("inversion samples reproduce the quadrature mean") {
  for (const auto& p : {kClinical, TruncatedNormalPrior(-0.25, 0.4, -0.3, 0.7),
                        TruncatedNormalPrior(0.5, 0.05, -0.3, 0.7)}) {
    const double mean = integrate_against(p, p.lo(), p.hi(), [](double t) { return t; });
    double sum = 0.0, sum2 = 0.0;
    const int draws = 1'000'000;
    for (int i = 0; i < draws; ++i) {
      const double x = prior_sample(p, oracle::uniform_at(11, static_cast<std::uint64_t>(i)));
      sum += x;
      sum2 += x * x;
    }
    const double m = sum / draws;
    const double se = std::sqrt((sum2 / draws - m * m) / draws);
    CHECK(std::abs(m - mean) <= 4 * se);
  }
}

TEST_CASE("Gauss-Legendre rule and adaptive integration") {
  const auto& rule = quadrature::gauss_legendre_15();
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  // Exact for polynomials up to degree 29.
  CHECK(quadrature::gauss_legendre_panel([](double x) { return std::pow(x, 28); }, -1.0, 1.0) ==
        doctest::Approx(2.0 / 29.0).epsilon(1e-13));
  CHECK(quadrature::integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  // Steep logistic step.
  CHECK(quadrature::integrate([](double x) { return std_norm_cdf(1000.0 * (x - 0.3)); }, 0.0, 1.0) ==
        doctest::Approx(0.7).epsilon(1e-10));
  CHECK(quadrature::integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
  CHECK(quadrature::integrate([](double) { return 1.0; }, 1.0, 0.0) == 0.0);
}
