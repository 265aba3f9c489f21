#include "hybridpower/criteria.hpp"

#include <cmath>
#include <sstream>

#include "hybridpower/error.hpp"

namespace hybridpower {

namespace {

void require_positive_n(double n) {
  if (!(n >= 1.0) || !std::isfinite(n)) {
    std::ostringstream msg;
    msg << "sample size must be >= 1, got " << n;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

double rejection_mass(const TestSetup& setup, const TruncatedNormalPrior& prior, double n,
                      double a, double b) {
  return integrate_against(prior, a, b,
                           [&](double t) { return prob_reject_relaxed(setup, n, t); });
}

}  // namespace

double expected_power_relaxed(const TestSetup& setup, const TruncatedNormalPrior& prior,
                              double n) {
  require_positive_n(n);
  const ConditionalPrior cond(prior, setup.mcid());
  return conditional_expectation(cond,
                                 [&](double t) { return prob_reject_relaxed(setup, n, t); });
}

double pos_relaxed(const TestSetup& setup, const TruncatedNormalPrior& prior, double n) {
  require_positive_n(n);
  return rejection_mass(setup, prior, n, setup.mcid(), prior.hi());
}

double pos_derivative(const TestSetup& setup, const TruncatedNormalPrior& prior, double n) {
  require_positive_n(n);
  const double root_n = std::sqrt(n);
  const double z = setup.critical_value();
  return integrate_against(prior, setup.mcid(), prior.hi(), [&](double t) {
    const double shift = (t - setup.theta0()) / setup.sigma();
    return std_norm_pdf(root_n * shift - z) * shift / (2.0 * root_n);
  });
}

double expected_power(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n) {
  return expected_power_relaxed(setup, prior, static_cast<double>(n));
}

double pos(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n) {
  return pos_relaxed(setup, prior, static_cast<double>(n));
}

PosDecomposition pos_prime(const TestSetup& setup, const TruncatedNormalPrior& prior,
                           SampleSize n) {
  const double nn = static_cast<double>(n);
  require_positive_n(nn);
  return {
      rejection_mass(setup, prior, nn, prior.lo(), setup.theta0()),
      rejection_mass(setup, prior, nn, setup.theta0(), setup.mcid()),
      rejection_mass(setup, prior, nn, setup.mcid(), prior.hi()),
  };
}

ThresholdConversion ep_pos_threshold(double threshold, double mass_relevant,
                                     ThresholdDirection direction) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
  }
  if (mass_relevant == 0.0) {
    throw Error(ErrorCode::DegenerateConditional,
                "a-priori probability of a relevant effect is zero");
  }
  if (!(mass_relevant > 0.0 && mass_relevant <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "mass_relevant must lie in (0, 1]");
  }
  if (direction == ThresholdDirection::EpToPos) return {threshold * mass_relevant, true};
  const double ep = threshold / mass_relevant;
  // EP(n) < 1 for every finite n, so a threshold of 1 is already out of reach.
  return {ep, ep < 1.0};
}

double ep_tradeoff_ratio(const TruncatedNormalPrior& prior, double mcid, double theta_a,
                         double theta_b) {
  const double lower = std::max(mcid, prior.lo());
  for (double t : {theta_a, theta_b}) {
    if (!(t >= lower && t <= prior.hi())) {
      std::ostringstream msg;
      msg << "trade-off points must lie in the relevant support [" << lower << ", "
          << prior.hi() << "], got " << t;
      throw Error(ErrorCode::InvalidArgument, msg.str());
    }
  }
  if (prior.pdf(theta_b) == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "prior density vanishes at theta_b");
  }
  const double za = (theta_a - prior.mean()) / prior.sd();
  const double zb = (theta_b - prior.mean()) / prior.sd();
  return std::exp(0.5 * (zb * zb - za * za));
}

}  // namespace hybridpower
