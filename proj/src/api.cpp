#include "hybridpower/api.hpp"

#include <cmath>
#include <initializer_list>
#include <sstream>

#include "hybridpower/criteria.hpp"
#include "hybridpower/error.hpp"

namespace hybridpower::api {

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw SchemaError(join(path, key), "unknown field");
  }
}

double number(const json& obj, std::string_view key, const std::string& path) {
  const auto& v = obj.at(std::string(key));
  if (!v.is_number()) throw SchemaError(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(join(path, key), "expected a finite number");
  return x;
}

double number_or(const json& obj, std::string_view key, const std::string& path, double fallback) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return fallback;
  return number(obj, key, path);
}

std::int64_t integer(const json& obj, std::string_view key, const std::string& path,
                     std::int64_t lo, std::int64_t hi) {
  const auto& v = obj.at(std::string(key));
  std::ostringstream range;
  range << "expected an integer in [" << lo << ", " << hi << "]";
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
      throw SchemaError(join(path, key), range.str());
    }
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) throw SchemaError(join(path, key), range.str());
    return x;
  }
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && x >= static_cast<double>(lo) &&
        x <= static_cast<double>(hi)) {
      return static_cast<std::int64_t>(x);
    }
  }
  throw SchemaError(join(path, key), range.str());
}

const json& required(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) throw SchemaError(join(path, key), "required field missing");
  return *it;
}

TruncatedNormalPrior parse_prior(const json& j) {
  const std::string path = "/prior";
  require_object(j, path);
  reject_unknown(j, path, {"mean", "sd", "lo", "hi"});
  required(j, "mean", path);
  required(j, "sd", path);
  const double mean = number(j, "mean", path);
  const double sd = number(j, "sd", path);
  const double lo = number_or(j, "lo", path, -kInf);
  const double hi = number_or(j, "hi", path, kInf);
  if (!(sd > 0.0)) throw SchemaError("/prior/sd", "must be > 0");
  if (!(lo < hi)) throw SchemaError("/prior/hi", "must exceed prior lo");
  try {
    return TruncatedNormalPrior(mean, sd, lo, hi);
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

TestSetup parse_setup(const json* j) {
  const std::string path = "/setup";
  const json empty = json::object();
  const json& s = j ? *j : empty;
  require_object(s, path);
  reject_unknown(s, path, {"alpha", "theta0", "sigma", "mcid"});
  const double alpha = number_or(s, "alpha", path, 0.025);
  const double theta0 = number_or(s, "theta0", path, 0.0);
  const double sigma = number_or(s, "sigma", path, 1.0);
  const double mcid = number_or(s, "mcid", path, theta0);
  if (!(alpha > 0.0 && alpha < 0.5)) throw SchemaError("/setup/alpha", "must lie in (0, 0.5)");
  if (!(sigma > 0.0)) throw SchemaError("/setup/sigma", "must be > 0");
  if (!(mcid >= theta0)) throw SchemaError("/setup/mcid", "must be >= theta0");
  return {theta0, sigma, alpha, mcid};
}

std::string canonical_type(const std::string& t) {
  if (t == "point_alternative" || t == "point" || t == "mcid") return "point_alternative";
  if (t == "prior_quantile" || t == "quantile") return "prior_quantile";
  if (t == "expected_power" || t == "ep") return "expected_power";
  if (t == "probability_of_success" || t == "pos") return "probability_of_success";
  return {};
}

Criterion parse_criterion(const json& j, const TestSetup& setup) {
  const std::string path = "/criterion";
  require_object(j, path);
  const auto& type_field = required(j, "type", path);
  if (!type_field.is_string()) throw SchemaError("/criterion/type", "expected a string");
  const std::string type = canonical_type(type_field.get<std::string>());
  if (type.empty()) {
    throw SchemaError("/criterion/type",
                      "expected one of point_alternative, prior_quantile, expected_power, "
                      "probability_of_success");
  }
  required(j, "target", path);
  const double target = number(j, "target", path);
  if (!(target > 0.0 && target < 1.0)) throw SchemaError("/criterion/target", "must lie in (0, 1)");

  if (type == "point_alternative") {
    reject_unknown(j, path, {"type", "target", "theta_alt"});
    const double theta_alt = number_or(j, "theta_alt", path, setup.mcid());
    if (!(theta_alt > setup.theta0())) {
      throw SchemaError("/criterion/theta_alt", "must exceed theta0 (defaults to mcid)");
    }
    return Criterion::point_alternative(theta_alt, target);
  }
  if (type == "prior_quantile") {
    reject_unknown(j, path, {"type", "target", "gamma"});
    required(j, "gamma", path);
    const double gamma = number(j, "gamma", path);
    if (!(gamma > 0.0 && gamma <= 1.0)) throw SchemaError("/criterion/gamma", "must lie in (0, 1]");
    return Criterion::prior_quantile(gamma, target);
  }
  reject_unknown(j, path, {"type", "target"});
  if (type == "expected_power") return Criterion::expected_power(target);
  return Criterion::probability_of_success(target);
}

// Missing grid fields fall back to `fallback`.
Grid parse_grid(const json& j, bool open_unit, const Grid& fallback) {
  const std::string path = "/grid";
  require_object(j, path);
  reject_unknown(j, path, {"from", "to", "points"});
  const double from = number_or(j, "from", path, fallback.from);
  const double to = number_or(j, "to", path, fallback.to);
  const int points = j.contains("points") && !j["points"].is_null()
                         ? static_cast<int>(integer(j, "points", path, 1, kMaxGridPoints))
                         : fallback.points;
  auto inside = [&](double x) { return open_unit ? (x > 0.0 && x < 1.0) : (x >= 0.0 && x <= 1.0); };
  const char* range = open_unit ? "must lie in (0, 1)" : "must lie in [0, 1]";
  if (!inside(from)) throw SchemaError("/grid/from", range);
  if (!inside(to)) throw SchemaError("/grid/to", range);
  if (!(from <= to)) throw SchemaError("/grid/to", "must be >= from");
  return {from, to, points};
}

json array_of(const std::vector<double>& v) { return json(v); }

}  // namespace

std::string_view path_name(Endpoint endpoint) noexcept {
  switch (endpoint) {
    case Endpoint::Evaluate: return "evaluate";
    case Endpoint::SampleSize: return "sample-size";
    case Endpoint::PowerDistribution: return "power-distribution";
    case Endpoint::Utility: return "utility";
    case Endpoint::ImpliedReward: return "implied-reward";
  }
  return "unknown";
}

std::vector<double> Grid::values() const {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] =
        points == 1 ? from : (i == points - 1 ? to : from + (to - from) * i / (points - 1));
  }
  return out;
}

Scenario parse_scenario(const json& body, Endpoint endpoint) {
  require_object(body, "");
  switch (endpoint) {
    case Endpoint::Evaluate: reject_unknown(body, "", {"prior", "setup", "n_max", "n"}); break;
    case Endpoint::SampleSize: reject_unknown(body, "", {"prior", "setup", "n_max", "criterion"}); break;
    case Endpoint::PowerDistribution:
      reject_unknown(body, "", {"prior", "setup", "n_max", "n", "conditional", "grid"});
      break;
    case Endpoint::Utility: reject_unknown(body, "", {"prior", "setup", "n_max", "lambda"}); break;
    case Endpoint::ImpliedReward: reject_unknown(body, "", {"prior", "setup", "n_max", "grid"}); break;
  }

  const auto setup_it = body.find("setup");
  const TestSetup setup = parse_setup(setup_it == body.end() ? nullptr : &*setup_it);
  Scenario s{setup, parse_prior(required(body, "prior", "")), {}, {}, {}, {}, true, kDefaultNMax};

  if (body.contains("n_max")) s.n_max = integer(body, "n_max", "", 1, kMaxNMax);

  switch (endpoint) {
    case Endpoint::Evaluate:
      required(body, "n", "");
      s.n = integer(body, "n", "", 1, kMaxNMax);
      break;
    case Endpoint::SampleSize:
      s.criterion = parse_criterion(required(body, "criterion", ""), setup);
      break;
    case Endpoint::PowerDistribution:
      required(body, "n", "");
      s.n = integer(body, "n", "", 1, kMaxNMax);
      if (body.contains("conditional")) {
        if (!body["conditional"].is_boolean()) throw SchemaError("/conditional", "expected a boolean");
        s.conditional = body["conditional"].get<bool>();
      }
      s.grid = Grid{0.0, 1.0, 101};
      if (body.contains("grid")) s.grid = parse_grid(body["grid"], false, *s.grid);
      break;
    case Endpoint::Utility:
      required(body, "lambda", "");
      s.lambda = number(body, "lambda", "");
      if (!(*s.lambda >= 0.0)) throw SchemaError("/lambda", "must be >= 0");
      break;
    case Endpoint::ImpliedReward:
      s.grid = Grid{0.5, 0.95, 10};
      if (body.contains("grid")) s.grid = parse_grid(body["grid"], true, *s.grid);
      break;
  }
  return s;
}

json criterion_json(const Criterion& c) {
  json j{{"type", std::string(c.name())}, {"target", c.target()}};
  if (const auto* p = std::get_if<PointAlternative>(&c.rule())) j["theta_alt"] = p->theta_alt;
  if (const auto* q = std::get_if<PriorQuantile>(&c.rule())) j["gamma"] = q->gamma;
  return j;
}

json evaluate(const Scenario& s) {
  const SampleSize n = s.n.value();
  const auto d = pos_prime(s.setup, s.prior, n);
  return {
      {"n", n},
      {"ep", expected_power(s.setup, s.prior, n)},
      {"pos", pos(s.setup, s.prior, n)},
      {"pos_prime", d.total()},
      {"decomposition", {{"type1", d.type1}, {"irrelevant", d.irrelevant}, {"relevant", d.relevant}}},
      {"mass_relevant", prior_mass_relevant(s.prior, s.setup.mcid())},
      {"power_at_mcid", prob_reject(s.setup, n, s.setup.mcid())},
  };
}

json sample_size(const Scenario& s) {
  const auto r = solve_sample_size(s.setup, s.prior, s.criterion.value(), s.n_max);
  json j{{"n", r.n}, {"achieved", r.achieved}};
  if (r.achieved_below) j["achieved_below"] = *r.achieved_below;
  j["criterion"] = criterion_json(r.criterion);
  return j;
}

json power_distribution(const Scenario& s) {
  const PowerDistribution dist(s.setup, s.prior, s.n.value(), s.conditional);
  const auto x = s.grid.value().values();
  std::vector<double> survival(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) survival[i] = dist.survival(x[i]);
  return {
      {"n", dist.n()},
      {"conditional", dist.conditional()},
      {"x", array_of(x)},
      {"survival", array_of(survival)},
      {"quantiles",
       {{"p10", dist.quantile(0.10)},
        {"p25", dist.quantile(0.25)},
        {"p50", dist.quantile(0.50)},
        {"p75", dist.quantile(0.75)},
        {"p90", dist.quantile(0.90)}}},
  };
}

json utility(const Scenario& s) {
  const double lambda = s.lambda.value();
  const auto r = solve_utility(s.setup, s.prior, {lambda}, s.n_max);
  json j{
      {"lambda", lambda},
      {"n_opt", r.n_opt},
      {"utility", r.utility},
      {"ep_at_opt", r.ep_at_opt},
      {"pos_at_opt", r.pos_at_opt},
  };
  if (lambda == 0.0) j["warning"] = "lambda is 0: no reward, so the smallest trial (n = 1) is optimal";
  return j;
}

json implied_reward(const Scenario& s) {
  const auto targets = s.grid.value().values();
  std::vector<double> lambdas(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    lambdas[i] = hybridpower::implied_reward(s.setup, s.prior, targets[i], s.n_max);
  }
  return {{"ep_target", array_of(targets)}, {"lambda", array_of(lambdas)}};
}

json error_body(std::string_view code, std::string_view message,
                const std::optional<std::string>& field_path) {
  json j{{"code", std::string(code)}, {"message", std::string(message)}};
  if (field_path) j["field_path"] = *field_path;
  return j;
}

Outcome handle(Endpoint endpoint, const json& body) {
  try {
    const Scenario s = parse_scenario(body, endpoint);
    switch (endpoint) {
      case Endpoint::Evaluate: return {200, evaluate(s)};
      case Endpoint::SampleSize: return {200, sample_size(s)};
      case Endpoint::PowerDistribution: return {200, power_distribution(s)};
      case Endpoint::Utility: return {200, utility(s)};
      case Endpoint::ImpliedReward: return {200, implied_reward(s)};
    }
    return {400, error_body("invalid_request", "unknown endpoint")};
  } catch (const SchemaError& e) {
    return {400, error_body("invalid_request", e.what(), e.field_path())};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) return {400, error_body(to_string(e.code()), e.what())};
    return {422, error_body(to_string(e.code()), e.what())};
  } catch (const json::exception& e) {
    return {400, error_body("invalid_request", e.what())};
  }
}

Outcome handle_text(Endpoint endpoint, std::string_view body) {
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) return {400, error_body("malformed_json", "request body is not valid JSON")};
  return handle(endpoint, parsed);
}

}  // namespace hybridpower::api
