#include "hybridpower/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "hybridpower/criteria.hpp"
#include "hybridpower/error.hpp"

namespace hybridpower {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_n_max(SampleSize n_max) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
}

double quantile_alternative(const TestSetup& setup, const TruncatedNormalPrior& prior,
                            double gamma) {
  const ConditionalPrior cond(prior, setup.mcid());
  return conditional_quantile(cond, 1.0 - gamma);
}

// Smallest n in [1, n_max] with value(n) >= target for an increasing value.
SampleSizeResult search_increasing(const std::function<double(SampleSize)>& value, double target,
                                   SampleSize n_max, const Criterion& criterion) {
  std::map<SampleSize, double> seen;
  auto eval = [&](SampleSize n) {
    auto it = seen.find(n);
    if (it != seen.end()) return it->second;
    const double v = value(n);
    seen.emplace(n, v);
    return v;
  };

  if (eval(1) >= target) return {1, eval(1), std::nullopt, criterion};

  SampleSize failing = 1;
  SampleSize candidate = std::min<SampleSize>(2, n_max);
  while (eval(candidate) < target) {
    if (candidate == n_max) {
      std::ostringstream msg;
      msg << criterion.name() << " target " << target << " not reached by n_max = " << n_max
          << " (achieved " << eval(candidate) << ")";
      throw Error(ErrorCode::ExceedsNMax, msg.str());
    }
    failing = candidate;
    candidate = std::min(candidate * 2, n_max);
  }
  // value(failing) < target <= value(candidate)
  while (candidate - failing > 1) {
    const SampleSize mid = failing + (candidate - failing) / 2;
    if (eval(mid) >= target) {
      candidate = mid;
    } else {
      failing = mid;
    }
  }
  return {candidate, eval(candidate), eval(candidate - 1), criterion};
}

}  // namespace

Criterion::Criterion(CriterionRule rule, double target) : rule_(rule), target_(target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "criterion target must lie in (0, 1)");
  }
  if (const auto* q = std::get_if<PriorQuantile>(&rule_)) {
    if (!(q->gamma > 0.0 && q->gamma <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "prior-quantile gamma must lie in (0, 1]");
    }
  }
  if (const auto* p = std::get_if<PointAlternative>(&rule_)) {
    if (!std::isfinite(p->theta_alt)) {
      throw Error(ErrorCode::InvalidArgument, "point alternative must be finite");
    }
  }
}

std::string_view Criterion::name() const noexcept {
  return std::visit(overloaded{
                        [](const PointAlternative&) { return std::string_view("point_alternative"); },
                        [](const PriorQuantile&) { return std::string_view("prior_quantile"); },
                        [](const ExpectedPower&) { return std::string_view("expected_power"); },
                        [](const ProbabilityOfSuccess&) {
                          return std::string_view("probability_of_success");
                        },
                    },
                    rule_);
}

double criterion_value(const TestSetup& setup, const TruncatedNormalPrior& prior,
                       const Criterion& criterion, SampleSize n) {
  return std::visit(
      overloaded{
          [&](const PointAlternative& p) { return prob_reject(setup, n, p.theta_alt); },
          [&](const PriorQuantile& q) {
            return prob_reject(setup, n, quantile_alternative(setup, prior, q.gamma));
          },
          [&](const ExpectedPower&) { return expected_power(setup, prior, n); },
          [&](const ProbabilityOfSuccess&) { return pos(setup, prior, n); },
      },
      criterion.rule());
}

SampleSizeResult solve_sample_size(const TestSetup& setup, const TruncatedNormalPrior& prior,
                                   const Criterion& criterion, SampleSize n_max) {
  require_n_max(n_max);
  const double target = criterion.target();

  if (const auto* q = std::get_if<PriorQuantile>(&criterion.rule())) {
    const double theta_alt = quantile_alternative(setup, prior, q->gamma);
    if (!(theta_alt > setup.theta0())) {
      std::ostringstream msg;
      msg << "conditional prior quantile " << theta_alt << " does not exceed theta0";
      throw Error(ErrorCode::Infeasible, msg.str());
    }
    auto reduced = solve_sample_size(
        setup, prior, Criterion::point_alternative(theta_alt, target), n_max);
    return {reduced.n, reduced.achieved, reduced.achieved_below, criterion};
  }

  if (const auto* p = std::get_if<PointAlternative>(&criterion.rule())) {
    if (!(p->theta_alt > setup.theta0())) {
      throw Error(ErrorCode::InvalidArgument, "point alternative must exceed theta0");
    }
    const double theta_alt = p->theta_alt;
    return search_increasing([&](SampleSize n) { return prob_reject(setup, n, theta_alt); },
                             target, n_max, criterion);
  }

  if (std::holds_alternative<ExpectedPower>(criterion.rule())) {
    const ConditionalPrior cond(prior, setup.mcid());  // degenerate check up front
    return search_increasing([&](SampleSize n) { return expected_power(setup, prior, n); },
                             target, n_max, criterion);
  }

  // PoS(n) < Pr[Theta >= mcid] for every n.
  const double mass = prior_mass_relevant(prior, setup.mcid());
  if (target >= mass) {
    std::ostringstream msg;
    msg << "probability of success " << target
        << " is unreachable: a-priori probability of a relevant effect is " << mass;
    throw Error(ErrorCode::Infeasible, msg.str());
  }
  return search_increasing([&](SampleSize n) { return pos(setup, prior, n); }, target, n_max,
                           criterion);
}

double utility(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n,
               const UtilityParams& params) {
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be finite and >= 0");
  }
  if (params.lambda == 0.0) return -static_cast<double>(n);
  return params.lambda * pos(setup, prior, n) - static_cast<double>(n);
}

UtilityResult solve_utility(const TestSetup& setup, const TruncatedNormalPrior& prior,
                            const UtilityParams& params, SampleSize n_max) {
  require_n_max(n_max);
  const double lambda = params.lambda;
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be finite and >= 0");
  }

  std::map<SampleSize, double> pos_cache;
  auto pos_at = [&](SampleSize n) {
    auto it = pos_cache.find(n);
    if (it != pos_cache.end()) return it->second;
    const double v = pos(setup, prior, n);
    pos_cache.emplace(n, v);
    return v;
  };
  auto value = [&](SampleSize n) { return lambda * pos_at(n) - static_cast<double>(n); };
  auto finish = [&](SampleSize n) {
    return UtilityResult{n, value(n), expected_power(setup, prior, n), pos_at(n)};
  };

  if (lambda == 0.0 || n_max == 1) return finish(1);

  // Marginal gain of one more patient: U(n + 1) - U(n), for n < n_max.
  auto marginal = [&](SampleSize n) { return lambda * (pos_at(n + 1) - pos_at(n)) - 1.0; };

  // Geometric scan of the marginal to locate its sign changes.
  std::vector<SampleSize> grid;
  for (SampleSize n = 1; n < n_max;) {
    grid.push_back(n);
    n = std::max(n + 1, static_cast<SampleSize>(std::ceil(n * 1.05)));
  }
  if (grid.back() != n_max - 1) grid.push_back(n_max - 1);

  if (marginal(grid.back()) > 0.0) {
    std::ostringstream msg;
    msg << "utility still increasing at n_max = " << n_max;
    throw Error(ErrorCode::ExceedsNMax, msg.str());
  }

  std::vector<SampleSize> candidates{1};
  std::size_t rises = 0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const bool up_here = marginal(grid[k]) > 0.0;
    const bool up_next = marginal(grid[k + 1]) > 0.0;
    if (!up_here && up_next) ++rises;
    if (up_here && !up_next) {
      // Smallest n in (grid[k], grid[k + 1]] where the marginal is <= 0.
      SampleSize rising = grid[k];
      SampleSize falling = grid[k + 1];
      while (falling - rising > 1) {
        const SampleSize mid = rising + (falling - rising) / 2;
        if (marginal(mid) > 0.0) {
          rising = mid;
        } else {
          falling = mid;
        }
      }
      candidates.push_back(falling);
    }
  }

  // The marginal starting positive or dipping once below zero before its
  // final fall leaves at most two local maxima, both among the candidates.
  // Anything more irregular falls back to an exhaustive scan.
  const bool starts_up = marginal(grid.front()) > 0.0;
  if (rises > (starts_up ? 0u : 1u)) {
    candidates.clear();
    for (SampleSize n = 1; n <= n_max; ++n) candidates.push_back(n);
  }

  SampleSize best = candidates.front();
  double best_value = value(best);
  for (SampleSize n : candidates) {
    const double v = value(n);
    if (v > best_value || (v == best_value && n < best)) {
      best = n;
      best_value = v;
    }
  }
  return finish(best);
}

double relaxed_ep_sample_size(const TestSetup& setup, const TruncatedNormalPrior& prior,
                              double ep_target, SampleSize n_max) {
  const auto integer = solve_sample_size(setup, prior, Criterion::expected_power(ep_target), n_max);
  if (integer.n == 1) return 1.0;
  double lo = static_cast<double>(integer.n - 1);
  double hi = static_cast<double>(integer.n);
  for (int iter = 0; iter < 80 && hi - lo > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (expected_power_relaxed(setup, prior, mid) >= ep_target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double implied_reward(const TestSetup& setup, const TruncatedNormalPrior& prior, double ep_target,
                      SampleSize n_max) {
  const double n = relaxed_ep_sample_size(setup, prior, ep_target, n_max);
  const double slope = pos_derivative(setup, prior, n);
  if (!(slope > 0.0)) {
    throw Error(ErrorCode::Infeasible, "probability of success is flat at the EP sample size");
  }
  return 1.0 / slope;
}

}  // namespace hybridpower
