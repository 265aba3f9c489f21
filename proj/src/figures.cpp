#include "hybridpower/figures.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "hybridpower/criteria.hpp"
#include "hybridpower/design.hpp"
#include "hybridpower/error.hpp"
#include "hybridpower/solver.hpp"

namespace hybridpower::figures {

namespace {

constexpr double kLo = -0.3;
constexpr double kHi = 0.7;
constexpr double kAlpha = 0.025;
constexpr double kTarget = 0.8;

// Evenly spaced, computed from the index so rows never drift.
std::vector<double> linspace(double from, double to, int points) {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = from + (to - from) * i / (points - 1);
  return v;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  CsvFile file(std::string name) const { return {std::move(name), out_.str()}; }

 private:
  static std::string cell(double x) { return format_number(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(SampleSize x) { return std::to_string(x); }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(const std::optional<SampleSize>& n) {
    return n ? std::to_string(*n) : std::string("NA");
  }

  std::ostringstream out_;
};

std::optional<SampleSize> try_solve(const TestSetup& setup, const TruncatedNormalPrior& prior,
                                    const Criterion& criterion, SampleSize n_max) {
  try {
    return solve_sample_size(setup, prior, criterion, n_max).n;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw;
    return std::nullopt;
  }
}

std::vector<CsvFile> fig2() {
  const TestSetup setup = TestSetup::standardized(kAlpha, 0.1);
  const SampleSize n_max = 1000;
  const std::pair<const char*, Criterion> methods[] = {
      {"EP", Criterion::expected_power(kTarget)},
      {"PoS", Criterion::probability_of_success(kTarget)},
      {"quantile_0.5", Criterion::prior_quantile(0.5, kTarget)},
      {"quantile_0.9", Criterion::prior_quantile(0.9, kTarget)},
  };
  Csv csv{"prior_mean", "prior_sd", "method", "n"};
  for (double mean : linspace(-0.1, 0.5, 13)) {
    for (double sd : linspace(0.05, 0.5, 10)) {
      const TruncatedNormalPrior prior(mean, sd, kLo, kHi);
      for (const auto& [name, criterion] : methods) {
        csv.row(mean, sd, name, try_solve(setup, prior, criterion, n_max));
      }
    }
  }
  return {csv.file("fig2.csv")};
}

std::vector<CsvFile> fig3() {
  const TestSetup setup = TestSetup::standardized(kAlpha, 0.1);
  Csv csv{"prior_mean", "prior_sd", "share_A", "share_B", "share_C", "pos_prime"};
  for (double mean : linspace(-0.2, 0.4, 7)) {
    for (double sd : linspace(0.05, 0.45, 5)) {
      const auto d = pos_prime(setup, TruncatedNormalPrior(mean, sd, kLo, kHi), 150);
      const double total = d.total();
      csv.row(mean, sd, d.type1 / total, d.irrelevant / total, d.relevant / total, total);
    }
  }
  return {csv.file("fig3.csv")};
}

struct Panel {
  TruncatedNormalPrior prior;
  TestSetup setup;
  Criterion criterion;
};

// Prior densities, power curves and random-power histograms for each panel.
std::vector<CsvFile> power_panels(const std::string& id, const std::vector<Panel>& panels) {
  Csv designs{"panel", "prior_mean", "prior_sd", "mcid", "criterion", "gamma", "target", "n",
              "rpow_exceed_target", "rpr_exceed_target"};
  Csv curves{"panel", "theta_grid", "pdf_cond", "pdf_uncond", "power"};
  Csv hist{"panel", "distribution", "bin", "bin_lo", "bin_hi", "mass"};
  const auto theta = linspace(kLo, kHi, 201);
  int index = 0;
  for (const auto& p : panels) {
    ++index;
    const SampleSize n = solve_sample_size(p.setup, p.prior, p.criterion).n;
    const PowerDistribution rpow(p.setup, p.prior, n, true);
    const PowerDistribution rpr(p.setup, p.prior, n, false);
    const auto* q = std::get_if<PriorQuantile>(&p.criterion.rule());
    designs.row(index, p.prior.mean(), p.prior.sd(), p.setup.mcid(), p.criterion.name(),
                q ? format_number(q->gamma) : std::string("NA"), p.criterion.target(), n,
                rpow.survival(p.criterion.target()), rpr.survival(p.criterion.target()));

    const ConditionalPrior cond(p.prior, p.setup.mcid());
    for (double t : theta) {
      curves.row(index, t, cond.pdf(t), p.prior.pdf(t), prob_reject(p.setup, n, t));
    }
    for (const auto& [name, dist] : {std::pair{"rpow", &rpow}, std::pair{"rpr", &rpr}}) {
      const auto bins = dist->histogram(20);
      for (std::size_t b = 0; b < bins.size(); ++b) {
        hist.row(index, name, static_cast<int>(b), bins[b].lo, bins[b].hi, bins[b].mass);
      }
    }
  }
  return {designs.file(id + "_designs.csv"), curves.file(id + "_curves.csv"),
          hist.file(id + "_hist.csv")};
}

std::vector<CsvFile> fig4() {
  const TestSetup setup = TestSetup::standardized(kAlpha, 0.0);
  const auto ep = Criterion::expected_power(kTarget);
  return power_panels("fig4", {
                                  {TruncatedNormalPrior(-0.25, 0.4, kLo, kHi), setup, ep},
                                  {TruncatedNormalPrior(0.3, 0.125, kLo, kHi), setup, ep},
                                  {TruncatedNormalPrior(0.5, 0.05, kLo, kHi), setup, ep},
                              });
}

std::vector<CsvFile> fig5() {
  const TestSetup setup = TestSetup::standardized(kAlpha, 0.1);
  const TruncatedNormalPrior prior(0.3, 0.2, kLo, kHi);
  std::vector<Panel> panels;
  for (double gamma : {0.5, 0.9}) {
    for (double target : {0.7, 0.8}) panels.push_back({prior, setup, Criterion::prior_quantile(gamma, target)});
  }
  return power_panels("fig5", panels);
}

std::vector<CsvFile> fig6() {
  const TestSetup setup = TestSetup::standardized(kAlpha, 0.05);
  const TruncatedNormalPrior prior(0.2, 0.2, kLo, kHi);
  const ConditionalPrior cond(prior, setup.mcid());
  const std::pair<const char*, Criterion> methods[] = {
      {"MCID", Criterion::point_alternative(setup.mcid(), kTarget)},
      {"quantile_0.5", Criterion::prior_quantile(0.5, kTarget)},
      {"quantile_0.9", Criterion::prior_quantile(0.9, kTarget)},
      {"EP", Criterion::expected_power(kTarget)},
  };
  const auto theta = linspace(kLo, kHi, 201);
  const auto x = linspace(0.0, 1.0, 201);

  Csv density{"theta", "pdf", "pdf_cond"};
  for (double t : theta) density.row(t, prior.pdf(t), cond.pdf(t));

  Csv designs{"method", "n"};
  Csv power{"method", "theta", "power"};
  Csv cdf{"method", "x", "cdf"};
  for (const auto& [name, criterion] : methods) {
    const SampleSize n = solve_sample_size(setup, prior, criterion).n;
    designs.row(name, n);
    for (double t : theta) power.row(name, t, prob_reject(setup, n, t));
    const PowerDistribution rpow(setup, prior, n, true);
    for (double v : x) cdf.row(name, v, rpow.cdf(v));
  }
  return {density.file("fig6_prior.csv"), designs.file("fig6_designs.csv"),
          power.file("fig6_power.csv"), cdf.file("fig6_cdf.csv")};
}

std::vector<CsvFile> fig7() {
  const TestSetup setup = TestSetup::standardized(kAlpha, 0.05);
  const TruncatedNormalPrior prior(0.2, 0.2, kLo, kHi);
  Csv csv{"ep_target", "lambda"};
  for (double t : linspace(0.5, 0.95, 46)) csv.row(t, implied_reward(setup, prior, t));
  return {csv.file("fig7.csv")};
}

}  // namespace

const std::vector<std::string>& ids() {
  static const std::vector<std::string> all{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
  return all;
}

std::vector<CsvFile> generate(std::string_view id) {
  if (id == "fig2") return fig2();
  if (id == "fig3") return fig3();
  if (id == "fig4") return fig4();
  if (id == "fig5") return fig5();
  if (id == "fig6") return fig6();
  if (id == "fig7") return fig7();
  throw Error(ErrorCode::InvalidArgument, "unknown figure id '" + std::string(id) + "'");
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return "NA";
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace hybridpower::figures
