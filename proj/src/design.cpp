#include "hybridpower/design.hpp"

#include <cmath>
#include <sstream>

#include "hybridpower/error.hpp"

namespace hybridpower {

namespace {

void require_positive_n(SampleSize n) {
  if (n < 1) {
    std::ostringstream msg;
    msg << "sample size must be >= 1, got " << n;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

}  // namespace

TestSetup::TestSetup(double theta0, double sigma, double alpha, double mcid)
    : theta0_(theta0), sigma_(sigma), alpha_(alpha), mcid_(mcid) {
  if (!std::isfinite(theta0)) throw Error(ErrorCode::InvalidArgument, "theta0 must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be positive and finite");
  }
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 0.5)");
  }
  if (!std::isfinite(mcid) || mcid < theta0) {
    throw Error(ErrorCode::InvalidArgument, "mcid must be finite and >= theta0");
  }
  z_crit_ = -std_norm_quantile(alpha);
}

double prob_reject_relaxed(const TestSetup& setup, double n, double theta) noexcept {
  if (theta == kInf) return 1.0;
  if (theta == -kInf) return 0.0;
  return std_norm_cdf(std::sqrt(n) * (theta - setup.theta0()) / setup.sigma() -
                      setup.critical_value());
}

double prob_reject(const TestSetup& setup, SampleSize n, double theta) {
  require_positive_n(n);
  return prob_reject_relaxed(setup, static_cast<double>(n), theta);
}

double power_exceed_threshold_theta(const TestSetup& setup, SampleSize n, double x) {
  require_positive_n(n);
  if (!(x > 0.0 && x < 1.0)) {
    std::ostringstream msg;
    msg << "power threshold must lie in (0, 1), got " << x;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return setup.theta0() + setup.sigma() * (setup.critical_value() + std_norm_quantile(x)) /
                              std::sqrt(static_cast<double>(n));
}

PowerDistribution::PowerDistribution(const TestSetup& setup, const TruncatedNormalPrior& prior,
                                     SampleSize n, bool conditional)
    : setup_(setup), prior_(prior), n_(n), conditional_(conditional) {
  require_positive_n(n);
  if (conditional) cond_.emplace(prior, setup.mcid());
}

const TruncatedNormalPrior& PowerDistribution::effect_distribution() const noexcept {
  return cond_ ? cond_->restricted() : prior_;
}

double PowerDistribution::survival(double x) const {
  if (std::isnan(x)) throw Error(ErrorCode::InvalidArgument, "power level is NaN");
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return effect_distribution().sf(power_exceed_threshold_theta(setup_, n_, x));
}

double PowerDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << "quantile level must lie in [0, 1], got " << p;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return prob_reject(setup_, n_, effect_distribution().quantile(p));
}

std::vector<HistogramBin> PowerDistribution::histogram(int bins) const {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  std::vector<HistogramBin> out;
  out.reserve(static_cast<std::size_t>(bins));
  double upper_survival = 1.0;
  for (int k = 0; k < bins; ++k) {
    const double lo = static_cast<double>(k) / bins;
    const double hi = static_cast<double>(k + 1) / bins;
    const double next = k + 1 == bins ? 0.0 : survival(hi);
    out.push_back({lo, hi, upper_survival - next});
    upper_survival = next;
  }
  return out;
}

}  // namespace hybridpower
