#pragma once

#include <cstdint>

#include "hybridpower/design.hpp"
#include "hybridpower/gauss.hpp"

namespace hybridpower::oracle {

// Brute-force Monte-Carlo counterparts of the deterministic criteria. Effect
// sizes are drawn by inversion from a counter-based uniform stream: draw i
// depends only on (seed, i). Draws are summed in fixed-size chunks combined
// in chunk order, so results are bit-identical for any worker count.

struct McEstimate {
  double value;
  double std_error;
  std::int64_t draws;
  std::uint64_t seed;
};

struct McDecomposition {
  McEstimate type1;
  McEstimate irrelevant;
  McEstimate relevant;
};

enum class McCriterion {
  ExpectedPower,  // draws from the prior conditioned on Theta >= mcid
  Pos,            // rejection probability times 1{Theta >= mcid}
  PosPrime,       // unconditional rejection probability
};

/// i-th uniform in (0, 1) of the stream identified by seed.
double uniform_at(std::uint64_t seed, std::uint64_t i) noexcept;

McEstimate mc_criterion(const TestSetup& setup, const TruncatedNormalPrior& prior, SampleSize n,
                        McCriterion which, std::int64_t draws, std::uint64_t seed,
                        int workers = 1);

McDecomposition mc_decomposition(const TestSetup& setup, const TruncatedNormalPrior& prior,
                                 SampleSize n, std::int64_t draws, std::uint64_t seed,
                                 int workers = 1);

/// Fraction of draws whose rejection probability is >= x.
McEstimate mc_power_survival(const TestSetup& setup, const TruncatedNormalPrior& prior,
                             SampleSize n, double x, bool conditional, std::int64_t draws,
                             std::uint64_t seed, int workers = 1);

}  // namespace hybridpower::oracle
