#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace hybridpower::quadrature {

inline constexpr int kOrder = 15;

struct GaussLegendreRule {
  std::array<double, kOrder> nodes;    // on [-1, 1], ascending
  std::array<double, kOrder> weights;
};

/// 15-point Gauss-Legendre rule, computed once by Newton iteration on P_15.
const GaussLegendreRule& gauss_legendre_15();

template <class F>
double gauss_legendre_panel(const F& f, double a, double b) {
  const auto& rule = gauss_legendre_15();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < kOrder; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-16;
  int initial_panels = 4;
  int max_depth = 48;
};

/// Adaptive composite Gauss-Legendre: a panel is accepted when its 15-point
/// value agrees with the sum over its two halves to within the panel's
/// share (by length) of the global tolerance; otherwise it is bisected.
/// Zero-length and reversed intervals integrate to exactly 0.
template <class F>
double integrate(const F& f, double a, double b, const Options& opt = {}) {
  if (!(b > a)) return 0.0;

  struct Panel {
    double a, b, value;
    int depth;
  };
  std::vector<Panel> stack;
  double coarse = 0.0;
  const double width = (b - a) / opt.initial_panels;
  for (int i = 0; i < opt.initial_panels; ++i) {
    const double lo = a + i * width;
    const double hi = i + 1 == opt.initial_panels ? b : lo + width;
    const double v = gauss_legendre_panel(f, lo, hi);
    coarse += v;
    stack.push_back({lo, hi, v, 0});
  }
  // Absolute target from the first pass; refinement only tightens it.
  const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(coarse));
  const double total_len = b - a;

  double result = 0.0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    const double left = gauss_legendre_panel(f, p.a, mid);
    const double right = gauss_legendre_panel(f, mid, p.b);
    const double refined = left + right;
    const double share = tol * (p.b - p.a) / total_len;
    if (std::abs(refined - p.value) <= share || p.depth >= opt.max_depth) {
      result += refined;
    } else {
      stack.push_back({p.a, mid, left, p.depth + 1});
      stack.push_back({mid, p.b, right, p.depth + 1});
    }
  }
  return result;
}

}  // namespace hybridpower::quadrature
