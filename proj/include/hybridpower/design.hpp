#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hybridpower/gauss.hpp"

namespace hybridpower {

using SampleSize = std::int64_t;

/// One-arm, one-sided Z-test of H0: theta <= theta0 at level alpha with
/// known sigma, plus the minimal clinically important difference.
class TestSetup {
 public:
  TestSetup(double theta0, double sigma, double alpha, double mcid);

  /// theta0 = 0, sigma = 1: effects on the standardized scale.
  static TestSetup standardized(double alpha, double mcid) { return {0.0, 1.0, alpha, mcid}; }

  double theta0() const noexcept { return theta0_; }
  double sigma() const noexcept { return sigma_; }
  double alpha() const noexcept { return alpha_; }
  double mcid() const noexcept { return mcid_; }
  /// z_{1-alpha}.
  double critical_value() const noexcept { return z_crit_; }

 private:
  double theta0_;
  double sigma_;
  double alpha_;
  double mcid_;
  double z_crit_;
};

/// Pr_theta[Z_n > z_{1-alpha}] = Phi(sqrt(n) (theta - theta0) / sigma - z_{1-alpha}).
double prob_reject(const TestSetup& setup, SampleSize n, double theta);
/// Same with real-valued n, for continuous relaxations inside solvers.
double prob_reject_relaxed(const TestSetup& setup, double n, double theta) noexcept;

/// Smallest theta whose rejection probability at n is at least x, x in (0, 1).
double power_exceed_threshold_theta(const TestSetup& setup, SampleSize n, double x);

struct HistogramBin {
  double lo;
  double hi;
  double mass;
};

/// A-priori distribution of the rejection probability at fixed n: random
/// power (conditional on Theta >= mcid) or the unconditional random
/// probability to reject. All functions are closed form through the prior
/// cdf, using that the rejection probability is increasing in theta.
class PowerDistribution {
 public:
  PowerDistribution(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n,
                    bool conditional);

  const TestSetup& setup() const noexcept { return setup_; }
  const TruncatedNormalPrior& prior() const noexcept { return prior_; }
  SampleSize n() const noexcept { return n_; }
  bool conditional() const noexcept { return conditional_; }

  /// Pr[RPow(n) >= x] (or RPR(n) when unconditional).
  double survival(double x) const;
  double cdf(double x) const { return 1.0 - survival(x); }
  /// p-quantile, p in [0, 1].
  double quantile(double p) const;
  /// Equal-width bins over [0, 1]; masses from survival differences.
  std::vector<HistogramBin> histogram(int bins) const;

 private:
  const TruncatedNormalPrior& effect_distribution() const noexcept;

  TestSetup setup_;
  TruncatedNormalPrior prior_;
  SampleSize n_;
  bool conditional_;
  std::optional<ConditionalPrior> cond_;
};

inline double power_dist_survival(const PowerDistribution& dist, double x) {
  return dist.survival(x);
}
inline double power_dist_quantile(const PowerDistribution& dist, double p) {
  return dist.quantile(p);
}
inline std::vector<HistogramBin> power_dist_histogram(const PowerDistribution& dist, int bins) {
  return dist.histogram(bins);
}

}  // namespace hybridpower
