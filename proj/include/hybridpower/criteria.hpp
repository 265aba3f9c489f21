#pragma once

#include <algorithm>

#include "hybridpower/design.hpp"
#include "hybridpower/gauss.hpp"
#include "hybridpower/quadrature.hpp"

namespace hybridpower {

/// Components of the marginal rejection probability PoS'(n).
struct PosDecomposition {
  double type1;       // rejection with Theta <= theta0
  double irrelevant;  // rejection with theta0 < Theta < mcid
  double relevant;    // rejection with Theta >= mcid, i.e. PoS(n)

  double total() const noexcept { return type1 + irrelevant + relevant; }
};

/// Integral of f(theta) * prior.pdf(theta) over [a, b], clipped to the
/// prior's effective support so the integrand is smooth and nonzero.
template <class F>
double integrate_against(const TruncatedNormalPrior& prior, double a, double b, const F& f) {
  const auto [support_lo, support_hi] = prior.effective_support();
  const double lo = std::max(a, support_lo);
  const double hi = std::min(b, support_hi);
  if (!(hi > lo)) return 0.0;
  return quadrature::integrate([&](double t) { return f(t) * prior.pdf(t); }, lo, hi);
}

/// E[f(Theta) | Theta >= cut].
template <class F>
double conditional_expectation(const ConditionalPrior& cond, const F& f) {
  return integrate_against(cond.restricted(), cond.lower(), cond.hi(), f);
}

/// EP(n): rejection probability averaged under the prior conditioned on a
/// relevant effect. Throws DegenerateConditional when Pr[Theta >= mcid]
/// is (numerically) zero.
double expected_power(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n);
/// PoS(n) = Pr[reject, Theta >= mcid].
double pos(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n);
/// PoS'(n) split into type I, irrelevant-effect and relevant-effect parts.
PosDecomposition pos_prime(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n);

// Real-valued n, for solver relaxations.
double expected_power_relaxed(const TestSetup& setup, const TruncatedNormalPrior& prior, double n);
double pos_relaxed(const TestSetup& setup, const TruncatedNormalPrior& prior, double n);
/// d PoS / d n, differentiating the rejection probability under the integral.
double pos_derivative(const TestSetup& setup, const TruncatedNormalPrior& prior, double n);

enum class ThresholdDirection {
  EpToPos,  // PoS threshold = EP threshold * mass
  PosToEp,  // EP threshold = PoS threshold / mass
};

struct ThresholdConversion {
  double value;
  bool feasible;  // false when an EP threshold >= 1 would be required
};

ThresholdConversion ep_pos_threshold(double threshold, double mass_relevant,
                                     ThresholdDirection direction);

/// phi(theta_a) / phi(theta_b): percentage points of rejection probability
/// at theta_a that offset one point lost at theta_b with EP held fixed.
double ep_tradeoff_ratio(const TruncatedNormalPrior& prior, double mcid, double theta_a,
                         double theta_b);

}  // namespace hybridpower
