#include "hybridpower/gauss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "hybridpower/error.hpp"

namespace hybridpower {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Density is exactly zero in double precision beyond this many sd.
constexpr double kSupportSds = 40.0;

// Rational approximation of the normal quantile (relative error ~1.2e-9),
// central region |p - 0.5| <= 0.5 - kTailSplit and a tail region in
// sqrt(-2 log p).
constexpr double kTailSplit = 0.02425;
constexpr std::array<double, 6> kCentralNum = {
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array<double, 5> kCentralDen = {
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01};
constexpr std::array<double, 6> kTailNum = {
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array<double, 4> kTailDen = {
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
    3.754408661907416e+00};

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
  double acc = 0.0;
  for (double ci : c) acc = acc * x + ci;
  return acc;
}

// Lower-half quantile, p in (0, 0.5].
double lower_quantile(double p) {
  double x;
  if (p < kTailSplit) {
    const double t = std::sqrt(-2.0 * std::log(p));
    x = horner(kTailNum, t) / (horner(kTailDen, t) * t + 1.0);
  } else {
    const double r = p - 0.5;
    const double s = r * r;
    x = horner(kCentralNum, s) * r / (horner(kCentralDen, s) * s + 1.0);
  }
  // One Newton step on the cdf.
  const double density = std_norm_pdf(x);
  if (density > 0.0) x -= (std_norm_cdf(x) - p) / density;
  return x;
}

// Pr[a <= Z <= b] for standard normal Z, a <= b, evaluated in whichever
// tail avoids cancellation.
double interval_mass(double a, double b) noexcept {
  if (a > 0.0) return std_norm_sf(a) - std_norm_sf(b);
  return std_norm_cdf(b) - std_norm_cdf(a);
}

}  // namespace

double std_norm_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_norm_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double std_norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream msg;
    msg << "normal quantile requires 0 < p < 1, got " << p;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (p <= 0.5) return lower_quantile(p);
  return -lower_quantile(1.0 - p);
}

TruncatedNormalPrior::TruncatedNormalPrior(double mean, double sd, double lo, double hi)
    : mean_(mean), sd_(sd), lo_(lo), hi_(hi) {
  if (!std::isfinite(mean)) throw Error(ErrorCode::InvalidArgument, "prior mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw Error(ErrorCode::InvalidArgument, "prior sd must be positive and finite");
  }
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    throw Error(ErrorCode::InvalidArgument, "prior bounds must satisfy lo < hi");
  }
  lo_z_ = standardize(lo);
  hi_z_ = standardize(hi);
  norm_ = interval_mass(lo_z_, hi_z_);
  if (!(norm_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "prior truncation interval carries no normal mass");
  }
}

double TruncatedNormalPrior::pdf(double x) const noexcept {
  if (x < lo_ || x > hi_) return 0.0;
  return std_norm_pdf(standardize(x)) / (sd_ * norm_);
}

double TruncatedNormalPrior::cdf(double x) const noexcept {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  return std::clamp(interval_mass(lo_z_, standardize(x)) / norm_, 0.0, 1.0);
}

double TruncatedNormalPrior::sf(double x) const noexcept {
  if (x <= lo_) return 1.0;
  if (x >= hi_) return 0.0;
  return std::clamp(interval_mass(standardize(x), hi_z_) / norm_, 0.0, 1.0);
}

double TruncatedNormalPrior::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    std::ostringstream msg;
    msg << "prior quantile requires 0 <= u <= 1, got " << u;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (u == 0.0) return lo_;
  if (u == 1.0) return hi_;
  // Mass below the answer, measured from the left, and mass above it,
  // measured from the right; invert whichever is the smaller tail.
  const double below = std_norm_cdf(lo_z_) + u * norm_;
  const double above = std_norm_sf(hi_z_) + (1.0 - u) * norm_;
  double z;
  if (below <= 0.5) {
    z = below > 0.0 ? std_norm_quantile(below) : lo_z_;
  } else {
    z = above > 0.0 ? -std_norm_quantile(above) : hi_z_;
  }
  return std::clamp(mean_ + sd_ * z, lo_, hi_);
}

std::pair<double, double> TruncatedNormalPrior::effective_support() const noexcept {
  return {std::max(lo_, mean_ - kSupportSds * sd_), std::min(hi_, mean_ + kSupportSds * sd_)};
}

ConditionalPrior::ConditionalPrior(const TruncatedNormalPrior& base, double cut)
    : base_(base),
      cut_(cut),
      mass_(base.sf(cut)),
      restricted_([&] {
        if (std::isnan(cut)) throw Error(ErrorCode::InvalidArgument, "conditioning threshold is NaN");
        const double lower = std::max(cut, base.lo());
        if (!(lower < base.hi()) || !(base.sf(cut) > kMinMass)) {
          std::ostringstream msg;
          msg << "conditional prior on Theta >= " << cut << " has no mass (prior support ["
              << base.lo() << ", " << base.hi() << "])";
          throw Error(ErrorCode::DegenerateConditional, msg.str());
        }
        return TruncatedNormalPrior(base.mean(), base.sd(), lower, base.hi());
      }()) {}

double prior_cdf(const TruncatedNormalPrior& prior, double x) noexcept { return prior.cdf(x); }

double prior_mass_relevant(const TruncatedNormalPrior& prior, double mcid) noexcept {
  return prior.sf(mcid);
}

double conditional_quantile(const ConditionalPrior& cond, double p) {
  return cond.restricted().quantile(p);
}

double prior_sample(const TruncatedNormalPrior& prior, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream msg;
    msg << "inversion sampling requires 0 < u < 1, got " << u;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return prior.quantile(u);
}

}  // namespace hybridpower
