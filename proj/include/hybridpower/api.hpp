#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hybridpower/design.hpp"
#include "hybridpower/gauss.hpp"
#include "hybridpower/solver.hpp"

namespace hybridpower::api {

using json = nlohmann::json;

enum class Endpoint {
  Evaluate,
  SampleSize,
  PowerDistribution,
  Utility,
  ImpliedReward,
};

/// "evaluate", "sample-size", "power-distribution", "utility", "implied-reward".
std::string_view path_name(Endpoint endpoint) noexcept;

inline constexpr int kMaxGridPoints = 10'000;
inline constexpr SampleSize kMaxNMax = 10'000'000;

/// Evenly spaced points from `from` to `to` inclusive.
struct Grid {
  double from;
  double to;
  int points;

  std::vector<double> values() const;
};

struct Scenario {
  TestSetup setup;
  TruncatedNormalPrior prior;
  std::optional<SampleSize> n;
  std::optional<Criterion> criterion;
  std::optional<double> lambda;
  std::optional<Grid> grid;
  bool conditional = true;
  SampleSize n_max = kDefaultNMax;
};

/// Request body violating the schema; field_path is a JSON pointer.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field_path, const std::string& message)
      : std::runtime_error(message), field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

/// Validates `body` against the schema of `endpoint`. Unknown fields and
/// fields belonging to other endpoints are rejected.
Scenario parse_scenario(const json& body, Endpoint endpoint);

json evaluate(const Scenario& s);
json sample_size(const Scenario& s);
json power_distribution(const Scenario& s);
json utility(const Scenario& s);
json implied_reward(const Scenario& s);

json criterion_json(const Criterion& c);

struct Outcome {
  int status;  // HTTP status: 200, 400 or 422
  json body;
};

/// Parse, dispatch and map failures to {code, message, field_path?}.
Outcome handle(Endpoint endpoint, const json& body);
/// As above for a raw request body; malformed JSON is a 400.
Outcome handle_text(Endpoint endpoint, std::string_view body);

json error_body(std::string_view code, std::string_view message,
                const std::optional<std::string>& field_path = std::nullopt);

}  // namespace hybridpower::api
