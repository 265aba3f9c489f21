#include "hybridpower/oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "hybridpower/error.hpp"

namespace hybridpower::oracle {

namespace {

constexpr std::int64_t kChunk = 1 << 16;

// Running mean and sum of squared deviations.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) noexcept {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }

  McEstimate estimate(std::uint64_t seed) const noexcept {
    const double var = count > 1.0 ? m2 / (count - 1.0) : 0.0;
    return {mean, std::sqrt(std::max(var, 0.0) / count), static_cast<std::int64_t>(count), seed};
  }
};

void require_draws(std::int64_t draws) {
  if (draws < 1) throw Error(ErrorCode::InvalidArgument, "draws must be >= 1");
}

// Runs f(theta) -> std::array<double, K> over `draws` inversion samples of
// `dist`, chunked and merged in chunk order.
template <std::size_t K, class F>
std::array<Moments, K> run(const TruncatedNormalPrior& dist, std::int64_t draws,
                           std::uint64_t seed, int workers, const F& f) {
  require_draws(draws);
  const std::int64_t chunks = (draws + kChunk - 1) / kChunk;
  std::vector<std::array<Moments, K>> partial(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};

  auto work = [&] {
    for (std::int64_t c = next++; c < chunks; c = next++) {
      auto& acc = partial[static_cast<std::size_t>(c)];
      const std::int64_t end = std::min(draws, (c + 1) * kChunk);
      for (std::int64_t i = c * kChunk; i < end; ++i) {
        const double theta = prior_sample(dist, uniform_at(seed, static_cast<std::uint64_t>(i)));
        const auto values = f(theta);
        for (std::size_t k = 0; k < K; ++k) acc[k].add(values[k]);
      }
    }
  };

  const int threads = std::clamp<int>(workers, 1, static_cast<int>(std::min<std::int64_t>(chunks, 64)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::array<Moments, K> total{};
  for (const auto& chunk : partial) {
    for (std::size_t k = 0; k < K; ++k) total[k].merge(chunk[k]);
  }
  return total;
}

}  // namespace

double uniform_at(std::uint64_t seed, std::uint64_t i) noexcept {
  // SplitMix64 output i for state `seed`.
  std::uint64_t z = seed + (i + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  // 53 random bits, centred in their cell: never 0 or 1.
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

McEstimate mc_criterion(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n,
                        McCriterion which, std::int64_t draws, std::uint64_t seed, int workers) {
  const double nn = static_cast<double>(n);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  const double mcid = setup.mcid();
  switch (which) {
    case McCriterion::ExpectedPower: {
      const ConditionalPrior cond(prior, mcid);
      return run<1>(cond.restricted(), draws, seed, workers, [&](double t) {
               return std::array<double, 1>{prob_reject_relaxed(setup, nn, t)};
             })[0]
          .estimate(seed);
    }
    case McCriterion::Pos:
      return run<1>(prior, draws, seed, workers, [&](double t) {
               return std::array<double, 1>{t >= mcid ? prob_reject_relaxed(setup, nn, t) : 0.0};
             })[0]
          .estimate(seed);
    case McCriterion::PosPrime:
      return run<1>(prior, draws, seed, workers, [&](double t) {
               return std::array<double, 1>{prob_reject_relaxed(setup, nn, t)};
             })[0]
          .estimate(seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown Monte-Carlo criterion");
}

McDecomposition mc_decomposition(const TestSetup& setup, const TruncatedNormalPrior& prior,
                                 SampleSize n, std::int64_t draws, std::uint64_t seed,
                                 int workers) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  const double nn = static_cast<double>(n);
  const auto m = run<3>(prior, draws, seed, workers, [&](double t) {
    const double p = prob_reject_relaxed(setup, nn, t);
    if (t <= setup.theta0()) return std::array<double, 3>{p, 0.0, 0.0};
    if (t < setup.mcid()) return std::array<double, 3>{0.0, p, 0.0};
    return std::array<double, 3>{0.0, 0.0, p};
  });
  return {m[0].estimate(seed), m[1].estimate(seed), m[2].estimate(seed)};
}

McEstimate mc_power_survival(const TestSetup& setup, const TruncatedNormalPrior& prior,
                             SampleSize n, double x, bool conditional, std::int64_t draws,
                             std::uint64_t seed, int workers) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidArgument, "x must lie in [0, 1]");
  const double nn = static_cast<double>(n);
  auto indicator = [&](double t) {
    return std::array<double, 1>{prob_reject_relaxed(setup, nn, t) >= x ? 1.0 : 0.0};
  };
  if (conditional) {
    const ConditionalPrior cond(prior, setup.mcid());
    return run<1>(cond.restricted(), draws, seed, workers, indicator)[0].estimate(seed);
  }
  return run<1>(prior, draws, seed, workers, indicator)[0].estimate(seed);
}

}  // namespace hybridpower::oracle
