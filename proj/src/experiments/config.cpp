#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "slowdrift/experiments.hpp"

namespace slowdrift {
namespace {

std::string format_cutoff(const Resolution& r) {
  switch (r.kind) {
    case Resolution::Kind::grid:
      return "grid";
    case Resolution::Kind::automatic:
      return "auto";
    case Resolution::Kind::fixed:
      return fmt::format("{}", r.value);
  }
  return "auto";
}

}  // namespace

const std::map<std::string, double>& tolerance_defaults() {
  static const std::map<std::string, double> defaults{
      {"A1.ks", 0.02},          {"A1.runtime_s", 120.0},   {"A2.ks_cross", 0.03},
      {"A2.ks_selfsim", 0.02},  {"A3.ks_equality", 0.04},  {"A3.trend_se", 2.0},
      {"A3.ks_asymptotic", 0.05}, {"A4.ks_frechet", 0.10}, {"A4.transform", 1e-12},
      {"A4.ks_drift", 0.06},    {"A4.runtime_s", 1200.0},  {"A5.ks_engines", 0.05},
      {"A6.mean_se", 3.0},      {"A6.laplace_rel", 0.01},  {"A7.refcvf_limit", 1e-6},
      {"A8.sigma", 3.0},
  };
  return defaults;
}

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::jumplaw:
      return "jumplaw";
    case Experiment::lemma2:
      return "lemma2";
    case Experiment::theorem:
      return "theorem";
    case Experiment::fluctuation:
      return "fluctuation";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : kAllExperiments) {
    if (experiment_name(e) == name) return e;
  }
  throw std::invalid_argument(fmt::format("unknown experiment '{}'", name));
}

std::uint64_t stream_id(Experiment e, unsigned branch, unsigned r_index, std::uint64_t replica) {
  if (branch > 0xff || r_index > 0xff || replica >= (std::uint64_t{1} << 40)) {
    throw std::out_of_range("stream_id: field out of range");
  }
  return (std::uint64_t{static_cast<std::uint8_t>(e)} << 56) | (std::uint64_t{branch} << 48) |
         (std::uint64_t{r_index} << 40) | replica;
}

std::size_t ExperimentConfig::replicas(Experiment e) const {
  const auto it = replica_overrides.find(std::string(experiment_name(e)));
  return it == replica_overrides.end() ? n_replicas : it->second;
}

double ExperimentConfig::tolerance(std::string_view name) const {
  const std::string key(name);
  if (const auto it = tolerances.find(key); it != tolerances.end()) {
    return it->second;
  }
  const auto& d = tolerance_defaults();
  const auto it = d.find(key);
  if (it == d.end()) {
    throw std::invalid_argument(fmt::format("unknown tolerance '{}'", name));
  }
  return it->second;
}

void ExperimentConfig::validate() const {
  params.validate();
  if (r_values.empty()) {
    throw std::invalid_argument("r_values must not be empty");
  }
  if (r_values.size() > 255) {
    throw std::invalid_argument("at most 255 r values");
  }
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    if (!(r_values[i] > 0.0)) throw std::invalid_argument("r_values must be positive");
    if (i > 0 && !(r_values[i] > r_values[i - 1])) {
      throw std::invalid_argument("r_values must be sorted ascending without repeats");
    }
  }
  for (Experiment e : kAllExperiments) {
    if (replicas(e) < 100) {
      throw std::invalid_argument(fmt::format(
          "{}: KS assertions need at least 100 replicas, got {}", experiment_name(e), replicas(e)));
    }
  }
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (cutoff.kind == Resolution::Kind::fixed && !(cutoff.value > 0.0)) {
    throw std::invalid_argument("cutoff must be auto, grid or a positive number");
  }
  if (!(crosscheck_r > 0.0) || !(crosscheck_step > 0.0)) {
    throw std::invalid_argument("crosscheck_r and crosscheck_step must be positive");
  }
  for (const auto& [name, value] : tolerances) {
    if (!tolerance_defaults().contains(name)) {
      throw std::invalid_argument(fmt::format("unknown tolerance '{}'", name));
    }
    if (!(value > 0.0)) throw std::invalid_argument(fmt::format("tolerance {} must be positive", name));
  }
}

namespace {

[[noreturn]] void bad_key(std::string_view key, std::string_view what) {
  throw std::invalid_argument(fmt::format("config key '{}': {}", key, what));
}

double number(const Json& v, std::string_view key) {
  if (!v.is_number()) bad_key(key, "expected a number");
  return v.get<double>();
}

std::uint64_t count(const Json& v, std::string_view key) {
  if (!v.is_number_unsigned()) bad_key(key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

bool boolean(const Json& v, std::string_view key) {
  if (!v.is_boolean()) bad_key(key, "expected true or false");
  return v.get<bool>();
}

const Json& object(const Json& v, std::string_view key) {
  if (!v.is_object()) bad_key(key, "expected an object");
  return v;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  Json root;
  // Repeated keys would silently keep one value.
  std::vector<std::set<std::string>> keys;
  const Json::parser_callback_t reject_repeats = [&keys](int, Json::parse_event_t event, Json& j) {
    if (event == Json::parse_event_t::object_start) {
      keys.emplace_back();
    } else if (event == Json::parse_event_t::object_end) {
      keys.pop_back();
    } else if (event == Json::parse_event_t::key && !keys.back().insert(j.get<std::string>()).second) {
      bad_key(j.get<std::string>(), "given twice");
    }
    return true;
  };
  try {
    root = Json::parse(text.begin(), text.end(), reject_repeats, true, true);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");

  ExperimentConfig c;
  for (const auto& [key, v] : root.items()) {
    if (key == "alpha") {
      c.params.alpha = number(v, key);
    } else if (key == "c_plus") {
      c.params.c_plus = number(v, key);
    } else if (key == "c_minus") {
      c.params.c_minus = number(v, key);
    } else if (key == "delta") {
      c.params.delta = number(v, key);
    } else if (key == "r_values") {
      if (!v.is_array()) bad_key(key, "expected an array of numbers");
      c.r_values.clear();
      for (const Json& r : v) c.r_values.push_back(number(r, key));
    } else if (key == "n_replicas") {
      if (v.is_object()) {
        for (const auto& [exp, n] : v.items()) {
          if (exp == "default") {
            c.n_replicas = count(n, key);
            continue;
          }
          try {
            parse_experiment(exp);
          } catch (const std::invalid_argument&) {
            bad_key(key, fmt::format("unknown experiment '{}'", exp));
          }
          c.replica_overrides[exp] = count(n, key);
        }
      } else {
        c.n_replicas = count(v, key);
      }
    } else if (key == "step") {
      c.step = number(v, key);
    } else if (key == "cutoff") {
      if (v == "auto") {
        c.cutoff = Resolution::automatic();
      } else if (v == "grid") {
        c.cutoff = Resolution::grid();
      } else if (v.is_number()) {
        c.cutoff = Resolution::fixed(v.get<double>());
      } else {
        bad_key(key, "expected \"auto\", \"grid\" or a number");
      }
    } else if (key == "include_I2") {
      c.include_I2 = boolean(v, key);
    } else if (key == "seed") {
      c.seed = count(v, key);
    } else if (key == "workers") {
      c.workers = static_cast<unsigned>(count(v, key));
    } else if (key == "out_dir") {
      if (!v.is_string()) bad_key(key, "expected a string");
      c.out_dir = v.get<std::string>();
    } else if (key == "crosscheck_r") {
      c.crosscheck_r = number(v, key);
    } else if (key == "crosscheck_step") {
      c.crosscheck_step = number(v, key);
    } else if (key == "tolerances") {
      for (const auto& [name, t] : object(v, key).items()) {
        if (!tolerance_defaults().contains(name)) {
          bad_key(key, fmt::format("unknown tolerance '{}'", name));
        }
        c.tolerances[name] = number(t, key);
      }
    } else {
      bad_key(key, "unknown key");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open config {}", file.string()));
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(fmt::format("{}: {}", file.string(), e.what()));
  }
}

Json config_echo(const ExperimentConfig& c) {
  Json j;
  j["alpha"] = c.params.alpha;
  j["c_plus"] = c.params.c_plus;
  j["c_minus"] = c.params.c_minus;
  j["delta"] = c.params.delta;
  j["r_values"] = c.r_values;
  j["n_replicas"] = c.n_replicas;
  Json overrides = Json::object();
  for (const auto& [k, v] : c.replica_overrides) overrides[k] = v;
  j["n_replicas_by_experiment"] = overrides;
  j["step"] = c.step;
  j["cutoff"] = format_cutoff(c.cutoff);
  j["include_I2"] = c.include_I2;
  j["seed"] = c.seed;
  j["crosscheck_r"] = c.crosscheck_r;
  j["crosscheck_step"] = c.crosscheck_step;
  Json tol = Json::object();
  for (const auto& [k, v] : tolerance_defaults()) tol[k] = c.tolerance(k);
  j["tolerances"] = tol;
  j["mode"] = c.statistical ? "statistical" : "fixed";
  return j;
}

}  // namespace slowdrift
