#include "hybridpower/quadrature.hpp"

#include <numbers>

namespace hybridpower::quadrature {

namespace {

GaussLegendreRule build_rule() {
  GaussLegendreRule rule{};
  constexpr int n = kOrder;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like starting guess for the i-th largest root.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre_15() {
  static const GaussLegendreRule rule = build_rule();
  return rule;
}

}  // namespace hybridpower::quadrature
