#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "hybridpower/design.hpp"
#include "hybridpower/gauss.hpp"

namespace hybridpower {

inline constexpr SampleSize kDefaultNMax = 1'000'000;

/// Power the design at a fixed effect size.
struct PointAlternative {
  double theta_alt;
};
/// Require Pr[RPow(n) >= target] >= gamma; reduces to powering at the
/// conditional (1 - gamma)-quantile of the prior.
struct PriorQuantile {
  double gamma;
};
struct ExpectedPower {};
struct ProbabilityOfSuccess {};

using CriterionRule = std::variant<PointAlternative, PriorQuantile, ExpectedPower, ProbabilityOfSuccess>;

/// A sample-size rule together with its threshold 1 - beta.
class Criterion {
 public:
  Criterion(CriterionRule rule, double target);

  static Criterion point_alternative(double theta_alt, double target) {
    return {PointAlternative{theta_alt}, target};
  }
  static Criterion prior_quantile(double gamma, double target) {
    return {PriorQuantile{gamma}, target};
  }
  static Criterion expected_power(double target) { return {ExpectedPower{}, target}; }
  static Criterion probability_of_success(double target) {
    return {ProbabilityOfSuccess{}, target};
  }

  const CriterionRule& rule() const noexcept { return rule_; }
  double target() const noexcept { return target_; }
  /// "point_alternative", "prior_quantile", "expected_power" or
  /// "probability_of_success".
  std::string_view name() const noexcept;

 private:
  CriterionRule rule_;
  double target_;
};

struct SampleSizeResult {
  SampleSize n;
  double achieved;                       // criterion value at n
  std::optional<double> achieved_below;  // criterion value at n - 1, empty when n = 1
  Criterion criterion;
};

/// The quantity a criterion thresholds, evaluated at n.
double criterion_value(const TestSetup& setup, const TruncatedNormalPrior& prior,
                       const Criterion& criterion, SampleSize n);

/// Smallest n <= n_max meeting the criterion, found by doubling then
/// bisection on the (increasing) criterion. Throws Infeasible when the
/// target cannot be met by any n, ExceedsNMax when it is unmet at n_max.
SampleSizeResult solve_sample_size(const TestSetup& setup, const TruncatedNormalPrior& prior,
                                   const Criterion& criterion, SampleSize n_max = kDefaultNMax);

struct UtilityParams {
  /// Reward for a correct rejection, in units of average per-patient cost.
  double lambda;
};

/// U(n) = lambda * PoS(n) - n.
double utility(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n,
               const UtilityParams& params);

struct UtilityResult {
  SampleSize n_opt;
  double utility;
  double ep_at_opt;
  double pos_at_opt;
};

/// Integer argmax of U over [1, n_max], ties to the smaller n.
UtilityResult solve_utility(const TestSetup& setup, const TruncatedNormalPrior& prior,
                            const UtilityParams& params, SampleSize n_max = kDefaultNMax);

/// Real n solving EP(n) = ep_target (n >= 1).
double relaxed_ep_sample_size(const TestSetup& setup, const TruncatedNormalPrior& prior,
                              double ep_target, SampleSize n_max = kDefaultNMax);

/// Reward lambda for which the EP-constrained design is utility-optimal:
/// lambda = 1 / PoS'(n) at the relaxed EP sample size.
double implied_reward(const TestSetup& setup, const TruncatedNormalPrior& prior, double ep_target,
                      SampleSize n_max = kDefaultNMax);

}  // namespace hybridpower
