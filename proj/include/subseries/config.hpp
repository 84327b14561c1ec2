#pragma once
// Experiment configuration: a small TOML subset (tables, key = value, strings,
// numbers, booleans, flat or nested arrays, # comments) or the equivalent
// JSON object. Unknown tables or keys are rejected so typos fail loudly, and
// every load records an FNV-1a hash of the raw bytes that output files carry
// for traceability.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "subseries/series_models.hpp"

namespace subseries {

struct ConfigValue {
  enum class Kind { integer, real, boolean, string, array };
  Kind kind = Kind::integer;
  std::int64_t integer_value = 0;
  double real_value = 0.0;
  bool bool_value = false;
  std::string string_value;
  std::vector<ConfigValue> items;
  int line = 0;  // 0 when the source had no line information (JSON)

  double as_real() const;         // integers widen; anything else throws
  std::int64_t as_integer() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const std::vector<ConfigValue>& as_array() const;
};

// table name ("" for root keys) -> key -> value
struct ParsedConfig {
  std::map<std::string, std::map<std::string, ConfigValue>> tables;
};

ParsedConfig parse_toml(const std::string& text);
ParsedConfig parsed_from_json(const nlohmann::json& j);

struct StarNormParams {
  std::size_t n = 0;
  std::size_t m = 1000;
  std::size_t paths = 2000;
};

struct MgfParams {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> lambda_scales{-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};
  std::size_t paths = 10000;
};

struct TailParams {
  std::vector<double> t_grid;
  std::size_t paths = 10000;
};

struct ConvergenceParams {
  std::vector<std::size_t> checkpoints;
  std::size_t window = 50;
  std::size_t paths = 1000;
};

struct NormalizedMaxParams {
  double beta = 1.0;
  int min_pow = 10;
  int max_pow = 18;
  std::size_t paths = 100;
};

struct DecouplingParams {
  CorrelationSpec corr{Ar1Corr{0.5}};
  std::size_t n_max = 512;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::uint64_t seed = 0;
  bool has_seed = false;
  unsigned threads = 1;
  std::string constant_mode = "both";  // "computed" | "paper" | "both"
  std::optional<SeriesModel> model;
  std::vector<double> weights;  // outer weights a_k driving the checks

  std::optional<StarNormParams> star_norm;
  std::optional<MgfParams> mgf;
  std::optional<TailParams> tail;
  std::optional<ConvergenceParams> convergence;
  std::optional<NormalizedMaxParams> normalized_max;
  std::optional<DecouplingParams> decoupling;

  std::string config_hash;  // 16 hex chars over the raw config bytes
};

// Dispatches on the file extension: .toml or .json.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_text(const std::string& text, bool is_json);

// Shared weight-rule expansion: "one_over_k" (a_k = 1/k), "geometric"
// (a_k = value^k), "constant" (a_k = value), "list" (verbatim).
std::vector<double> expand_weight_rule(const std::string& rule, std::size_t length, double value,
                                       const std::vector<double>& list);

}  // namespace subseries
