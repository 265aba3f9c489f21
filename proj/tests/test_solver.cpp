#include <doctest.h>

#include <cmath>
#include <random>

#include "hybridpower/criteria.hpp"
#include "hybridpower/error.hpp"
#include "hybridpower/solver.hpp"

using namespace hybridpower;

namespace {

const TestSetup kClinicalSetup = TestSetup::standardized(0.025, 0.05);
const TruncatedNormalPrior kClinical(0.2, 0.2, -0.3, 0.7);

void check_certificate(const TestSetup& setup, const TruncatedNormalPrior& prior,
                       const SampleSizeResult& r) {
  CHECK(r.achieved >= r.criterion.target());
  CHECK(r.achieved == criterion_value(setup, prior, r.criterion, r.n));
  if (r.n > 1) {
    REQUIRE(r.achieved_below.has_value());
    CHECK(*r.achieved_below < r.criterion.target());
    CHECK(*r.achieved_below == criterion_value(setup, prior, r.criterion, r.n - 1));
  } else {
    CHECK_FALSE(r.achieved_below.has_value());
  }
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("clinical example sample sizes") {
  const auto mcid = solve_sample_size(kClinicalSetup, kClinical, Criterion::point_alternative(0.05, 0.8));
  CHECK(mcid.n == 3140);
  check_certificate(kClinicalSetup, kClinical, mcid);

  const auto q90 = solve_sample_size(kClinicalSetup, kClinical, Criterion::prior_quantile(0.9, 0.8));
  CHECK(q90.n == 834);
  check_certificate(kClinicalSetup, kClinical, q90);

  const auto q50 = solve_sample_size(kClinicalSetup, kClinical, Criterion::prior_quantile(0.5, 0.8));
  CHECK(q50.n == 120);
  check_certificate(kClinicalSetup, kClinical, q50);

  const auto ep = solve_sample_size(kClinicalSetup, kClinical, Criterion::expected_power(0.8));
  CHECK(ep.n == 218);
  check_certificate(kClinicalSetup, kClinical, ep);
  CHECK(ep.criterion.name() == "expected_power");
}

TEST_CASE("prior-quantile rule with gamma = 1 is the MCID rule") {
  const auto q = solve_sample_size(kClinicalSetup, kClinical, Criterion::prior_quantile(1.0, 0.8));
  const auto m = solve_sample_size(kClinicalSetup, kClinical, Criterion::point_alternative(0.05, 0.8));
  CHECK(q.n == m.n);
}

TEST_CASE("expected-power sizes for three priors with mcid 0") {
  const TestSetup setup = TestSetup::standardized(0.025, 0.0);
  const auto ep = Criterion::expected_power(0.8);
  CHECK(solve_sample_size(setup, TruncatedNormalPrior(-0.25, 0.4, -0.3, 0.7), ep).n == 854);
  CHECK(solve_sample_size(setup, TruncatedNormalPrior(0.3, 0.125, -0.3, 0.7), ep).n == 127);
  CHECK(solve_sample_size(setup, TruncatedNormalPrior(0.5, 0.05, -0.3, 0.7), ep).n == 33);
}

TEST_CASE("PoS target and infeasibility") {
  const double mass = prior_mass_relevant(kClinical, 0.05);
  const auto ok = solve_sample_size(kClinicalSetup, kClinical, Criterion::probability_of_success(0.5));
  check_certificate(kClinicalSetup, kClinical, ok);
  CHECK(ok.achieved <= mass);

  CHECK(code_of([&] {
          solve_sample_size(kClinicalSetup, kClinical, Criterion::probability_of_success(0.8));
        }) == ErrorCode::Infeasible);

  SUBCASE("PoS and EP designs coincide under the converted threshold") {
    const auto e = solve_sample_size(kClinicalSetup, kClinical, Criterion::expected_power(0.7));
    const auto p = solve_sample_size(kClinicalSetup, kClinical,
                                     Criterion::probability_of_success(0.7 * mass));
    CHECK(std::abs(e.n - p.n) <= 1);
  }
}

TEST_CASE("prior quantile at or below the null is infeasible") {
  const TruncatedNormalPrior low(-0.2, 0.1, -0.3, 0.7);
  const TestSetup setup = TestSetup::standardized(0.025, 0.0);
  CHECK(code_of([&] {
          solve_sample_size(setup, low, Criterion::prior_quantile(1.0, 0.8));
        }) == ErrorCode::Infeasible);
  CHECK(code_of([&] {
          solve_sample_size(setup, low, Criterion::point_alternative(0.0, 0.8));
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("n_max") {
  try {
    solve_sample_size(kClinicalSetup, kClinical, Criterion::point_alternative(0.05, 0.8), 1000);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExceedsNMax);
  }
  CHECK(solve_sample_size(kClinicalSetup, kClinical, Criterion::point_alternative(0.05, 0.8), 3140).n == 3140);
}

TEST_CASE("criterion validation") {
  CHECK_THROWS_AS(Criterion::expected_power(0.0), Error);
  CHECK_THROWS_AS(Criterion::expected_power(1.0), Error);
  CHECK_THROWS_AS(Criterion::prior_quantile(0.0, 0.8), Error);
  CHECK_THROWS_AS(Criterion::prior_quantile(1.1, 0.8), Error);
  CHECK(Criterion::prior_quantile(0.5, 0.8).name() == "prior_quantile");
}

TEST_CASE("small targets are met at n = 1") {
  const auto r = solve_sample_size(kClinicalSetup, kClinical, Criterion::point_alternative(0.5, 0.05));
  CHECK(r.n == 1);
  check_certificate(kClinicalSetup, kClinical, r);
}

TEST_CASE("utility maximisation") {
  SUBCASE("zero reward") {
    const auto r = solve_utility(kClinicalSetup, kClinical, {0.0});
    CHECK(r.n_opt == 1);
  }
  SUBCASE("clinical example") {
    const auto r = solve_utility(kClinicalSetup, kClinical, {3333.0});
    CHECK(r.n_opt == 329);
    CHECK(std::abs(r.ep_at_opt - 0.86) <= 0.01);
    CHECK(r.utility == doctest::Approx(utility(kClinicalSetup, kClinical, 329, {3333.0})));
    for (SampleSize n = 250; n < 420; ++n) CHECK(utility(kClinicalSetup, kClinical, n, {3333.0}) <= r.utility);
  }
  SUBCASE("negative reward is rejected") {
    CHECK_THROWS_AS(solve_utility(kClinicalSetup, kClinical, {-1.0}), Error);
  }
  SUBCASE("agrees with an exhaustive scan") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mean(-0.2, 0.6), sd(0.05, 0.5), lam(0.0, 4000.0);
    const SampleSize n_max = 1500;
    for (int s = 0; s < 25; ++s) {
      const TruncatedNormalPrior prior(mean(rng), sd(rng), -0.3, 0.7);
      const UtilityParams params{lam(rng)};
      SampleSize best = 1;
      double best_u = utility(kClinicalSetup, prior, 1, params);
      for (SampleSize n = 2; n <= n_max; ++n) {
        const double u = utility(kClinicalSetup, prior, n, params);
        if (u > best_u) {
          best_u = u;
          best = n;
        }
      }
      try {
        const auto r = solve_utility(kClinicalSetup, prior, params, n_max);
        CHECK(r.n_opt == best);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ExceedsNMax);
        CHECK(best >= n_max - 1);
      }
    }
  }
}

TEST_CASE("implied reward") {
  const double l80 = implied_reward(kClinicalSetup, kClinical, 0.8);
  const double l90 = implied_reward(kClinicalSetup, kClinical, 0.9);
  CHECK(std::abs(l80 / 1732.0 - 1.0) <= 0.05);
  CHECK(std::abs(l90 / 6006.0 - 1.0) <= 0.05);
  double prev = 0.0;
  for (double t = 0.6; t < 0.96; t += 0.05) {
    const double l = implied_reward(kClinicalSetup, kClinical, t);
    CHECK(l > prev);
    prev = l;
  }

  SUBCASE("relaxed EP size brackets the integer size") {
    const double n = relaxed_ep_sample_size(kClinicalSetup, kClinical, 0.8);
    CHECK(n > 217.0);
    CHECK(n <= 218.0);
    CHECK(expected_power_relaxed(kClinicalSetup, kClinical, n) == doctest::Approx(0.8).epsilon(1e-9));
  }

  SUBCASE("round trip through the utility optimum") {
    for (double t : {0.7, 0.8, 0.9}) {
      const auto ep = solve_sample_size(kClinicalSetup, kClinical, Criterion::expected_power(t));
      const auto u = solve_utility(kClinicalSetup, kClinical, {implied_reward(kClinicalSetup, kClinical, t)});
      CHECK(std::abs(u.n_opt - ep.n) <= 1);
    }
  }
}
