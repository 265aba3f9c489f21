#pragma once

#include <limits>
#include <utility>

namespace hybridpower {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

double std_norm_pdf(double x) noexcept;
/// Standard normal CDF, absolute error below 1e-15 on finite input.
double std_norm_cdf(double x) noexcept;
/// Upper tail 1 - Phi(x), without cancellation for large x.
double std_norm_sf(double x) noexcept;
/// Inverse of std_norm_cdf on (0, 1). Throws InvalidArgument outside.
double std_norm_quantile(double p);

/// Normal(mean, sd) restricted and renormalised to [lo, hi]. `mean` and
/// `sd` are the parameters before truncation; bounds may be infinite.
class TruncatedNormalPrior {
 public:
  TruncatedNormalPrior(double mean, double sd, double lo = -kInf, double hi = kInf);

  double mean() const noexcept { return mean_; }
  double sd() const noexcept { return sd_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  double pdf(double x) const noexcept;
  double cdf(double x) const noexcept;
  /// Pr[Theta >= x].
  double sf(double x) const noexcept;
  /// u-quantile, u in [0, 1]; u = 0 and u = 1 return the bounds.
  double quantile(double u) const;

  /// Range outside which the density underflows to zero; what quadrature
  /// routines integrate over.
  std::pair<double, double> effective_support() const noexcept;

 private:
  double standardize(double x) const noexcept { return (x - mean_) / sd_; }

  double mean_;
  double sd_;
  double lo_;
  double hi_;
  double lo_z_;
  double hi_z_;
  double norm_;
};

/// The prior conditioned on Theta >= cut: the base density renormalised to
/// [max(cut, lo), hi].
class ConditionalPrior {
 public:
  /// Conditional masses at or below this are degenerate.
  static constexpr double kMinMass = 1e-12;

  ConditionalPrior(const TruncatedNormalPrior& base, double cut);

  const TruncatedNormalPrior& base() const noexcept { return base_; }
  double cut() const noexcept { return cut_; }
  double lower() const noexcept { return restricted_.lo(); }
  double hi() const noexcept { return restricted_.hi(); }
  /// Pr[Theta >= cut] under the base prior.
  double mass() const noexcept { return mass_; }
  /// The conditional distribution as a truncated normal on [lower, hi].
  const TruncatedNormalPrior& restricted() const noexcept { return restricted_; }

  double pdf(double x) const noexcept { return restricted_.pdf(x); }
  double cdf(double x) const noexcept { return restricted_.cdf(x); }

 private:
  TruncatedNormalPrior base_;
  double cut_;
  double mass_;
  TruncatedNormalPrior restricted_;
};

double prior_cdf(const TruncatedNormalPrior& prior, double x) noexcept;
/// Pr[Theta >= mcid].
double prior_mass_relevant(const TruncatedNormalPrior& prior, double mcid) noexcept;
double conditional_quantile(const ConditionalPrior& cond, double p);
/// Inversion sampler: the u-quantile for u in (0, 1).
double prior_sample(const TruncatedNormalPrior& prior, double u);

}  // namespace hybridpower
