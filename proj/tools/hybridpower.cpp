// hybridpower: sample sizes under effect-size uncertainty.
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridpower/api.hpp"
#include "hybridpower/error.hpp"
#include "hybridpower/figures.hpp"
#include "hybridpower/service.hpp"

namespace {

using hybridpower::api::Endpoint;
using hybridpower::api::json;
namespace figures = hybridpower::figures;

enum Exit : int {
  kOk = 0,
  kInvalid = 2,
  kInfeasible = 3,
  kExceedsNMax = 4,
  kIo = 5,
};

struct ScenarioFlags {
  std::string scenario_file;
  std::optional<double> prior_mean, prior_sd, prior_lo, prior_hi;
  std::optional<double> alpha, theta0, sigma, mcid;
  std::optional<std::int64_t> n, n_max;
  std::optional<std::string> criterion;
  std::optional<double> target, gamma, theta_alt, lambda;
  std::optional<double> grid_from, grid_to;
  std::optional<int> grid_points;
  bool unconditional = false;
  std::string format = "text";
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_scenario_flags(CLI::App& cmd, ScenarioFlags& f, Endpoint endpoint) {
  cmd.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd.add_option("--scenario", f.scenario_file, "JSON scenario file (service schema); flags override it");
  cmd.add_option("--prior-mean", f.prior_mean, "prior mean before truncation");
  cmd.add_option("--prior-sd", f.prior_sd, "prior sd before truncation");
  cmd.add_option("--prior-lo", f.prior_lo, "lower truncation bound");
  cmd.add_option("--prior-hi", f.prior_hi, "upper truncation bound");
  cmd.add_option("--alpha", f.alpha, "one-sided level (default 0.025)");
  cmd.add_option("--theta0", f.theta0, "null boundary (default 0)");
  cmd.add_option("--sigma", f.sigma, "outcome sd (default 1)");
  cmd.add_option("--mcid", f.mcid, "minimal clinically important difference (default theta0)");
  cmd.add_option("--n-max", f.n_max, "largest admissible sample size (default 1e6)");
  cmd.add_option("--format", f.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
  switch (endpoint) {
    case Endpoint::Evaluate:
      cmd.add_option("--n", f.n, "sample size");
      break;
    case Endpoint::SampleSize:
      cmd.add_option("--criterion", f.criterion,
                     "point_alternative|prior_quantile|expected_power|probability_of_success "
                     "(or point|quantile|ep|pos)");
      cmd.add_option("--target", f.target, "threshold 1 - beta");
      cmd.add_option("--gamma", f.gamma, "prior-quantile confidence");
      cmd.add_option("--theta-alt", f.theta_alt, "point alternative (default mcid)");
      break;
    case Endpoint::PowerDistribution:
      cmd.add_option("--n", f.n, "sample size");
      cmd.add_flag("--unconditional", f.unconditional, "do not condition on a relevant effect");
      cmd.add_option("--grid-from", f.grid_from, "first power level");
      cmd.add_option("--grid-to", f.grid_to, "last power level");
      cmd.add_option("--grid-points", f.grid_points, "number of power levels");
      break;
    case Endpoint::Utility:
      cmd.add_option("--lambda", f.lambda, "reward per correct rejection, in per-patient costs");
      break;
    case Endpoint::ImpliedReward:
      cmd.add_option("--grid-from", f.grid_from, "first expected-power target");
      cmd.add_option("--grid-to", f.grid_to, "last expected-power target");
      cmd.add_option("--grid-points", f.grid_points, "number of targets");
      break;
  }
}

template <class T>
void put(json& obj, const char* key, const std::optional<T>& v) {
  if (v) obj[key] = *v;
}

json& child(json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_object()) obj[key] = json::object();
  return obj[key];
}

// File fields first, flags on top; fields meant for other subcommands are
// dropped so one scenario file serves them all.
json build_body(const ScenarioFlags& f, Endpoint endpoint) {
  json body = json::object();
  if (!f.scenario_file.empty()) {
    std::ifstream in(f.scenario_file);
    if (!in) throw IoError("cannot read scenario file '" + f.scenario_file + "'");
    body = json::parse(in, nullptr, false);
    if (body.is_discarded()) {
      throw hybridpower::api::SchemaError("/", "scenario file is not valid JSON");
    }
    if (!body.is_object()) throw hybridpower::api::SchemaError("/", "expected an object");
  }

  const std::map<std::string, std::vector<Endpoint>> owners{
      {"n", {Endpoint::Evaluate, Endpoint::PowerDistribution}},
      {"criterion", {Endpoint::SampleSize}},
      {"lambda", {Endpoint::Utility}},
      {"conditional", {Endpoint::PowerDistribution}},
      {"grid", {Endpoint::PowerDistribution, Endpoint::ImpliedReward}},
  };
  for (const auto& [key, users] : owners) {
    if (std::find(users.begin(), users.end(), endpoint) == users.end()) body.erase(key);
  }

  if (f.prior_mean || f.prior_sd || f.prior_lo || f.prior_hi) {
    json& prior = child(body, "prior");
    put(prior, "mean", f.prior_mean);
    put(prior, "sd", f.prior_sd);
    put(prior, "lo", f.prior_lo);
    put(prior, "hi", f.prior_hi);
  }
  if (f.alpha || f.theta0 || f.sigma || f.mcid) {
    json& setup = child(body, "setup");
    put(setup, "alpha", f.alpha);
    put(setup, "theta0", f.theta0);
    put(setup, "sigma", f.sigma);
    put(setup, "mcid", f.mcid);
  }
  put(body, "n_max", f.n_max);
  put(body, "n", f.n);
  put(body, "lambda", f.lambda);
  if (f.criterion || f.target || f.gamma || f.theta_alt) {
    json& c = child(body, "criterion");
    if (f.criterion && c.value("type", "") != *f.criterion) {
      c = json::object();
      c["type"] = *f.criterion;
    }
    put(c, "target", f.target);
    put(c, "gamma", f.gamma);
    put(c, "theta_alt", f.theta_alt);
  }
  if (f.unconditional) body["conditional"] = false;
  if (f.grid_from || f.grid_to || f.grid_points) {
    json& g = child(body, "grid");
    put(g, "from", f.grid_from);
    put(g, "to", f.grid_to);
    put(g, "points", f.grid_points);
  }
  return body;
}

std::string scalar_text(const json& v) {
  if (v.is_number_float()) return figures::format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Scalars flattened with dotted keys; equal-length arrays kept apart.
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& scalars,
             std::vector<std::pair<std::string, json>>& arrays) {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, name, scalars, arrays);
    } else if (value.is_array()) {
      arrays.emplace_back(name, value);
    } else {
      scalars.emplace_back(name, value);
    }
  }
}

void print(const json& body, const std::string& format) {
  if (format == "json") {
    std::cout << body.dump(2) << '\n';
    return;
  }
  std::vector<std::pair<std::string, json>> scalars, arrays;
  flatten(body, "", scalars, arrays);

  if (format == "text") {
    std::size_t width = 0;
    for (const auto& [k, v] : scalars) width = std::max(width, k.size());
    for (const auto& [k, v] : scalars) {
      std::cout << k << std::string(width - k.size(), ' ') << "  " << scalar_text(v) << '\n';
    }
    if (!arrays.empty()) {
      if (!scalars.empty()) std::cout << '\n';
      for (std::size_t c = 0; c < arrays.size(); ++c) std::cout << (c ? "\t" : "") << arrays[c].first;
      std::cout << '\n';
      for (std::size_t r = 0; r < arrays.front().second.size(); ++r) {
        for (std::size_t c = 0; c < arrays.size(); ++c) {
          std::cout << (c ? "\t" : "") << scalar_text(arrays[c].second.at(r));
        }
        std::cout << '\n';
      }
    }
    return;
  }

  // csv: one row per array element (scalars repeated), or a single row.
  std::vector<std::string> header;
  for (const auto& [k, v] : scalars) header.push_back(k);
  for (const auto& [k, v] : arrays) header.push_back(k);
  for (std::size_t c = 0; c < header.size(); ++c) std::cout << (c ? "," : "") << header[c];
  std::cout << '\n';
  const std::size_t rows = arrays.empty() ? 1 : arrays.front().second.size();
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t c = 0;
    for (const auto& [k, v] : scalars) std::cout << (c++ ? "," : "") << scalar_text(v);
    for (const auto& [k, v] : arrays) std::cout << (c++ ? "," : "") << scalar_text(v.at(r));
    std::cout << '\n';
  }
}

int exit_code(const hybridpower::api::Outcome& outcome) {
  if (outcome.status == 200) return kOk;
  const std::string code = outcome.body.value("code", "");
  if (code == "exceeds_n_max") return kExceedsNMax;
  if (outcome.status == 422) return kInfeasible;
  return kInvalid;
}

int run_endpoint(const ScenarioFlags& f, Endpoint endpoint) {
  hybridpower::api::Outcome outcome;
  try {
    outcome = hybridpower::api::handle(endpoint, build_body(f, endpoint));
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const hybridpower::api::SchemaError& e) {
    outcome = {400, hybridpower::api::error_body("invalid_request", e.what(), e.field_path())};
  }
  if (outcome.status != 200) {
    const auto& b = outcome.body;
    std::cerr << "error (" << b.value("code", "") << "): " << b.value("message", "");
    if (b.contains("field_path")) std::cerr << " at " << b["field_path"].get<std::string>();
    std::cerr << '\n';
    if (f.format == "json") std::cout << b.dump(2) << '\n';
    return exit_code(outcome);
  }
  print(outcome.body, f.format);
  return kOk;
}

int run_figures(const std::string& id, const std::string& out_dir) {
  std::vector<std::string> wanted;
  if (id == "all") {
    wanted = figures::ids();
  } else {
    wanted.push_back(id);
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create '" << out_dir << "': " << ec.message() << '\n';
    return kIo;
  }
  for (const auto& fig : wanted) {
    for (const auto& file : figures::generate(fig)) {
      const auto path = std::filesystem::path(out_dir) / file.name;
      std::ofstream out(path, std::ios::binary);
      out << file.content;
      out.close();
      if (!out) {
        std::cerr << "error: cannot write '" << path.string() << "'\n";
        return kIo;
      }
      std::cout << path.string() << '\n';
    }
  }
  return kOk;
}

hybridpower::service::Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const std::string& addr_flag, const std::string& cors) {
  std::string addr = addr_flag;
  if (addr.empty()) {
    if (const char* env = std::getenv("HYBRIDPOWER_ADDR")) addr = env;
  }
  auto options = hybridpower::service::parse_address(addr);
  if (!options) {
    std::cerr << "error: bad address '" << addr << "' (expected host:port)\n";
    return kInvalid;
  }
  options->cors_origin = cors;
  hybridpower::service::Server server(*options);
  const int port = server.bind();
  if (port < 0) {
    std::cerr << "error: cannot bind " << options->host << ":" << options->port << '\n';
    return kIo;
  }
  std::cerr << "hybridpower " << hybridpower::service::version() << " listening on " << options->host
            << ":" << port << '\n';
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clinical-trial sample sizes under effect-size uncertainty"};
  app.set_version_flag("--version", hybridpower::service::version());
  app.require_subcommand(1);

  const std::pair<const char*, Endpoint> commands[] = {
      {"evaluate", Endpoint::Evaluate},
      {"samplesize", Endpoint::SampleSize},
      {"distribution", Endpoint::PowerDistribution},
      {"utility", Endpoint::Utility},
      {"implied-reward", Endpoint::ImpliedReward},
  };
  const std::map<std::string, std::string> descriptions{
      {"evaluate", "expected power, PoS and PoS' decomposition at a fixed n"},
      {"samplesize", "smallest n meeting a power criterion"},
      {"distribution", "survival function and quantiles of random power"},
      {"utility", "n maximising lambda * PoS(n) - n"},
      {"implied-reward", "reward making the expected-power design utility-optimal"},
  };
  std::map<std::string, ScenarioFlags> flags;
  std::vector<std::pair<CLI::App*, Endpoint>> endpoint_cmds;
  for (const auto& [name, endpoint] : commands) {
    auto* cmd = app.add_subcommand(name, descriptions.at(name));
    add_scenario_flags(*cmd, flags[name], endpoint);
    endpoint_cmds.emplace_back(cmd, endpoint);
  }

  std::string figure_id;
  std::string out_dir = ".";
  auto* figure = app.add_subcommand("figure", "write the CSV data behind a figure");
  std::vector<std::string> choices = figures::ids();
  choices.push_back("all");
  figure->add_option("id", figure_id, "fig2..fig7 or all")->required()->check(CLI::IsMember(choices));
  figure->add_option("--out", out_dir, "output directory");

  std::string addr;
  std::string cors;
  auto* serve = app.add_subcommand("serve", "run the JSON HTTP service");
  serve->add_option("--addr", addr, "host:port (default $HYBRIDPOWER_ADDR or 127.0.0.1:8080)");
  serve->add_option("--cors-origin", cors, "allowed browser origin for CORS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  for (const auto& [cmd, endpoint] : endpoint_cmds) {
    if (cmd->parsed()) return run_endpoint(flags[cmd->get_name()], endpoint);
  }
  try {
    if (figure->parsed()) return run_figures(figure_id, out_dir);
  } catch (const hybridpower::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  if (serve->parsed()) return run_serve(addr, cors);
  return kInvalid;
}
