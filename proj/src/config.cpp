#include "subseries/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "subseries/numeric.hpp"

namespace subseries {

namespace {

[[noreturn]] void fail_at(int line, const std::string& message) {
  throw std::runtime_error("config: line " + std::to_string(line) + ": " + message);
}

[[noreturn]] void fail(const std::string& message) {
  throw std::runtime_error("config: " + message);
}

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_inline_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
  }
  // Whitespace, newlines and comments; used inside arrays where values may
  // continue across lines.
  void skip_filler() {
    for (;;) {
      skip_inline_ws();
      if (done()) return;
      if (peek() == '\n') {
        take();
        continue;
      }
      if (peek() == '#') {
        while (!done() && peek() != '\n') take();
        continue;
      }
      return;
    }
  }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string parse_basic_string(Cursor& cur) {
  const int start_line = cur.line;
  cur.take();  // opening quote
  std::string out;
  while (!cur.done()) {
    const char c = cur.take();
    if (c == '"') return out;
    if (c == '\n') fail_at(start_line, "unterminated string");
    if (c == '\\') {
      if (cur.done()) fail_at(start_line, "dangling escape");
      const char e = cur.take();
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail_at(start_line, std::string("unsupported escape \\") + e);
      }
    } else {
      out.push_back(c);
    }
  }
  fail_at(start_line, "unterminated string");
}

ConfigValue parse_scalar_token(const std::string& token, int line) {
  ConfigValue v;
  v.line = line;
  if (token == "true" || token == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.bool_value = token == "true";
    return v;
  }
  const bool looks_float = token.find_first_of(".eE") != std::string::npos ||
                           token == "inf" || token == "-inf" || token == "nan";
  if (!looks_float) {
    std::int64_t i = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), i);
    if (res.ec == std::errc() && res.ptr == token.data() + token.size()) {
      v.kind = ConfigValue::Kind::integer;
      v.integer_value = i;
      return v;
    }
  }
  double d = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), d);
  if (res.ec == std::errc() && res.ptr == token.data() + token.size()) {
    v.kind = ConfigValue::Kind::real;
    v.real_value = d;
    return v;
  }
  fail_at(line, "cannot parse value '" + token + "'");
}

ConfigValue parse_value(Cursor& cur);

ConfigValue parse_array(Cursor& cur) {
  ConfigValue v;
  v.kind = ConfigValue::Kind::array;
  v.line = cur.line;
  cur.take();  // '['
  for (;;) {
    cur.skip_filler();
    if (cur.done()) fail_at(v.line, "unterminated array");
    if (cur.peek() == ']') {
      cur.take();
      return v;
    }
    v.items.push_back(parse_value(cur));
    cur.skip_filler();
    if (cur.done()) fail_at(v.line, "unterminated array");
    if (cur.peek() == ',') {
      cur.take();
      continue;
    }
    if (cur.peek() == ']') {
      cur.take();
      return v;
    }
    fail_at(cur.line, "expected ',' or ']' in array");
  }
}

ConfigValue parse_value(Cursor& cur) {
  cur.skip_inline_ws();
  if (cur.done()) fail_at(cur.line, "missing value");
  const char c = cur.peek();
  if (c == '[') return parse_array(cur);
  if (c == '"') {
    ConfigValue v;
    v.kind = ConfigValue::Kind::string;
    v.line = cur.line;
    v.string_value = parse_basic_string(cur);
    return v;
  }
  std::string token;
  const int line = cur.line;
  while (!cur.done()) {
    const char t = cur.peek();
    if (t == '\n' || t == '#' || t == ',' || t == ']' || t == ' ' || t == '\t' || t == '\r') break;
    token.push_back(cur.take());
  }
  if (token.empty()) fail_at(line, "missing value");
  return parse_scalar_token(token, line);
}

}  // namespace

double ConfigValue::as_real() const {
  if (kind == Kind::real) return real_value;
  if (kind == Kind::integer) return static_cast<double>(integer_value);
  fail_at(line, "expected a number");
}

std::int64_t ConfigValue::as_integer() const {
  if (kind == Kind::integer) return integer_value;
  fail_at(line, "expected an integer");
}

bool ConfigValue::as_bool() const {
  if (kind == Kind::boolean) return bool_value;
  fail_at(line, "expected a boolean");
}

const std::string& ConfigValue::as_string() const {
  if (kind == Kind::string) return string_value;
  fail_at(line, "expected a string");
}

const std::vector<ConfigValue>& ConfigValue::as_array() const {
  if (kind == Kind::array) return items;
  fail_at(line, "expected an array");
}

ParsedConfig parse_toml(const std::string& text) {
  ParsedConfig cfg;
  Cursor cur{text};
  std::string table;
  cfg.tables[table];
  while (!cur.done()) {
    cur.skip_inline_ws();
    if (cur.done()) break;
    const char c = cur.peek();
    if (c == '\n') {
      cur.take();
      continue;
    }
    if (c == '#') {
      while (!cur.done() && cur.peek() != '\n') cur.take();
      continue;
    }
    if (c == '[') {
      const int line = cur.line;
      cur.take();
      std::string name;
      while (!cur.done() && cur.peek() != ']' && cur.peek() != '\n') name.push_back(cur.take());
      if (cur.done() || cur.peek() != ']') fail_at(line, "unterminated table header");
      cur.take();
      if (name.empty()) fail_at(line, "empty table name");
      if (cfg.tables.count(name)) fail_at(line, "duplicate table [" + name + "]");
      table = name;
      cfg.tables[table];
      cur.skip_inline_ws();
      if (!cur.done() && cur.peek() == '#') {
        while (!cur.done() && cur.peek() != '\n') cur.take();
      }
      if (!cur.done() && cur.peek() != '\n') fail_at(line, "trailing content after table header");
      continue;
    }
    // key = value
    const int line = cur.line;
    std::string key;
    while (!cur.done() && is_bare_key_char(cur.peek())) key.push_back(cur.take());
    if (key.empty()) fail_at(line, "expected a key");
    cur.skip_inline_ws();
    if (cur.done() || cur.peek() != '=') fail_at(line, "expected '=' after key '" + key + "'");
    cur.take();
    ConfigValue value = parse_value(cur);
    cur.skip_inline_ws();
    if (!cur.done() && cur.peek() == '#') {
      while (!cur.done() && cur.peek() != '\n') cur.take();
    }
    if (!cur.done() && cur.peek() != '\n') fail_at(line, "trailing content after value");
    if (cfg.tables[table].count(key)) {
      fail_at(line, "duplicate key '" + key + "' in table [" + table + "]");
    }
    cfg.tables[table][key] = std::move(value);
  }
  return cfg;
}

namespace {

ConfigValue value_from_json(const nlohmann::json& j) {
  ConfigValue v;
  if (j.is_boolean()) {
    v.kind = ConfigValue::Kind::boolean;
    v.bool_value = j.get<bool>();
  } else if (j.is_number_integer() || j.is_number_unsigned()) {
    v.kind = ConfigValue::Kind::integer;
    v.integer_value = j.get<std::int64_t>();
  } else if (j.is_number_float()) {
    v.kind = ConfigValue::Kind::real;
    v.real_value = j.get<double>();
  } else if (j.is_string()) {
    v.kind = ConfigValue::Kind::string;
    v.string_value = j.get<std::string>();
  } else if (j.is_array()) {
    v.kind = ConfigValue::Kind::array;
    for (const auto& item : j) v.items.push_back(value_from_json(item));
  } else {
    fail("unsupported JSON value type");
  }
  return v;
}

}  // namespace

ParsedConfig parsed_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail("top-level JSON value must be an object");
  ParsedConfig cfg;
  cfg.tables[""];
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      auto& table = cfg.tables[key];
      for (const auto& [k2, v2] : value.items()) table[k2] = value_from_json(v2);
    } else {
      cfg.tables[""][key] = value_from_json(value);
    }
  }
  return cfg;
}

namespace {

// Tracks which keys a table binder consumed so leftovers can be rejected.
class TableReader {
 public:
  TableReader(const ParsedConfig& cfg, const std::string& table) : name_(table) {
    const auto it = cfg.tables.find(table);
    entries_ = it == cfg.tables.end() ? nullptr : &it->second;
  }

  bool exists() const { return entries_ != nullptr; }

  const ConfigValue* find(const std::string& key) {
    if (!entries_) return nullptr;
    used_.insert(key);
    const auto it = entries_->find(key);
    return it == entries_->end() ? nullptr : &it->second;
  }

  const ConfigValue& require(const std::string& key) {
    const ConfigValue* v = find(key);
    if (!v) fail("table [" + name_ + "] is missing required key '" + key + "'");
    return *v;
  }

  void finish() const {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_) {
      if (!used_.count(key)) {
        fail_at(value.line, "unknown key '" + key + "' in table [" + name_ + "]");
      }
    }
  }

 private:
  std::string name_;
  const std::map<std::string, ConfigValue>* entries_ = nullptr;
  std::set<std::string> used_;
};

std::vector<double> real_list(const ConfigValue& v) {
  std::vector<double> out;
  for (const auto& item : v.as_array()) out.push_back(item.as_real());
  return out;
}

std::size_t positive_size(const ConfigValue& v, const char* what) {
  const std::int64_t i = v.as_integer();
  if (i <= 0) fail_at(v.line, std::string(what) + " must be positive");
  return static_cast<std::size_t>(i);
}

DistributionSpec spec_from_table(TableReader& t);

DistributionSpec spec_from_fields(const std::string& family, TableReader& t) {
  if (family == "gaussian") return DistributionSpec::gaussian(t.require("sigma").as_real());
  if (family == "rademacher") return DistributionSpec::rademacher();
  if (family == "uniform_sym") {
    return DistributionSpec::uniform_sym(t.require("half_width").as_real());
  }
  if (family == "bounded_centered") {
    return DistributionSpec::bounded_centered(t.require("lo").as_real(),
                                              t.require("hi").as_real(),
                                              t.require("density_id").as_string());
  }
  fail("unknown distribution family '" + family + "'");
}

DistributionSpec spec_from_table(TableReader& t) {
  const std::string family = t.require("family").as_string();
  DistributionSpec spec = spec_from_fields(family, t);
  if (const ConfigValue* factor = t.find("scale")) {
    spec = DistributionSpec::scaled(std::move(spec), factor->as_real());
  }
  return spec;
}

CorrelationSpec correlation_from(TableReader& t, const char* shape_key, const char* rho_key,
                                 const char* lags_key) {
  const std::string shape = t.require(shape_key).as_string();
  if (shape == "ar1") return Ar1Corr{t.require(rho_key).as_real()};
  if (shape == "finite_lags") return FiniteLagsCorr{real_list(t.require(lags_key))};
  fail("unknown correlation shape '" + shape + "'");
}

SeriesModel model_from(const ParsedConfig& cfg) {
  TableReader t(cfg, "model");
  if (!t.exists()) fail("missing [model] table");
  const std::string cls = t.require("class").as_string();
  SeriesModel model = [&]() -> SeriesModel {
    if (cls == "independent") {
      return IndependentSeq{{spec_from_table(t)}};
    }
    if (cls == "nd_gaussian") {
      const auto& rows = t.require("covariance").as_array();
      if (rows.empty()) fail("nd_gaussian: covariance must be nonempty");
      const std::size_t n = rows.size();
      Eigen::MatrixXd cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[i].as_array();
        if (row.size() != n) fail("nd_gaussian: covariance rows must be square");
        for (std::size_t j = 0; j < n; ++j) {
          cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].as_real();
        }
      }
      return NDGaussianSeq{std::move(cov)};
    }
    if (cls == "cond_subgaussian") {
      CondSubgaussianSeq cs;
      if (const ConfigValue* c = t.find("c")) {
        cs.c_seq = {c->as_real()};
      } else {
        cs.c_seq = real_list(t.require("c_seq"));
      }
      if (const ConfigValue* d = t.find("driver")) cs.driver_id = d->as_string();
      return cs;
    }
    if (cls == "stationary_pair") {
      StationaryPair sp;
      sp.corr = correlation_from(t, "corr_shape", "rho", "lags");
      sp.coupling = t.require("coupling").as_real();
      sp.a_seq = real_list(t.require("a_seq"));
      sp.b_seq = real_list(t.require("b_seq"));
      return sp;
    }
    if (cls == "ito") {
      ItoIncrements ito;
      ito.h_spec = t.require("h_spec").as_string();
      ito.cap_k = t.require("cap_k").as_real();
      ito.dt = t.require("dt").as_real();
      return ito;
    }
    fail("unknown model class '" + cls + "'");
  }();
  t.finish();
  return model;
}

}  // namespace

std::vector<double> expand_weight_rule(const std::string& rule, std::size_t length, double value,
                                       const std::vector<double>& list) {
  if (rule == "list") {
    if (list.empty()) fail("weight rule 'list' needs a nonempty list");
    return list;
  }
  if (length == 0) fail("weight rule '" + rule + "' needs a positive length");
  std::vector<double> out(length);
  if (rule == "one_over_k") {
    for (std::size_t k = 0; k < length; ++k) out[k] = 1.0 / static_cast<double>(k + 1);
  } else if (rule == "geometric") {
    if (!(std::abs(value) < 1.0) || value == 0.0) {
      fail("weight rule 'geometric' needs 0 < |ratio| < 1");
    }
    double w = 1.0;
    for (std::size_t k = 0; k < length; ++k) {
      w *= value;
      out[k] = w;
    }
  } else if (rule == "constant") {
    for (auto& w : out) w = value;
  } else {
    fail("unknown weight rule '" + rule + "'");
  }
  return out;
}

ExperimentConfig experiment_config_from_text(const std::string& text, bool is_json) {
  ParsedConfig parsed;
  if (is_json) {
    parsed = parsed_from_json(nlohmann::json::parse(text));
  } else {
    parsed = parse_toml(text);
  }

  ExperimentConfig out;
  out.config_hash = to_hex64(fnv1a64(text));

  TableReader root(parsed, "");
  if (const ConfigValue* v = root.find("schema_version")) {
    out.schema_version = static_cast<int>(v->as_integer());
    if (out.schema_version != 1) fail("unsupported schema_version (expected 1)");
  }
  if (const ConfigValue* v = root.find("seed")) {
    const std::int64_t s = v->as_integer();
    if (s < 0) fail("seed must be nonnegative");
    out.seed = static_cast<std::uint64_t>(s);
    out.has_seed = true;
  }
  if (const ConfigValue* v = root.find("threads")) {
    out.threads = static_cast<unsigned>(positive_size(*v, "threads"));
  }
  if (const ConfigValue* v = root.find("constant_mode")) {
    out.constant_mode = v->as_string();
    if (out.constant_mode != "computed" && out.constant_mode != "paper" &&
        out.constant_mode != "both") {
      fail("constant_mode must be computed, paper or both");
    }
  }
  root.finish();

  if (parsed.tables.count("model")) out.model = model_from(parsed);

  {
    TableReader t(parsed, "weights");
    if (t.exists()) {
      const std::string rule = t.require("rule").as_string();
      std::size_t length = 0;
      double value = 0.0;
      std::vector<double> list;
      if (const ConfigValue* v = t.find("length")) length = positive_size(*v, "length");
      if (const ConfigValue* v = t.find("value")) value = v->as_real();
      if (const ConfigValue* v = t.find("list")) list = real_list(*v);
      out.weights = expand_weight_rule(rule, length, value, list);
      t.finish();
    }
  }

  {
    TableReader t(parsed, "star_norm");
    if (t.exists()) {
      StarNormParams p;
      if (const ConfigValue* v = t.find("n")) {
        const std::int64_t n = v->as_integer();
        if (n < 0) fail("star_norm.n must be nonnegative");
        p.n = static_cast<std::size_t>(n);
      }
      p.m = positive_size(t.require("m"), "star_norm.m");
      p.paths = positive_size(t.require("paths"), "star_norm.paths");
      t.finish();
      out.star_norm = p;
    }
  }

  {
    TableReader t(parsed, "mgf");
    if (t.exists()) {
      MgfParams p;
      const auto& pairs = t.require("pairs").as_array();
      for (const auto& item : pairs) {
        const auto& pair = item.as_array();
        if (pair.size() != 2) fail_at(item.line, "mgf.pairs entries must be [n, m]");
        const std::int64_t a = pair[0].as_integer();
        const std::int64_t b = pair[1].as_integer();
        if (a < 0 || b <= a) fail_at(item.line, "mgf.pairs entries need 0 <= n < m");
        p.pairs.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
      }
      if (const ConfigValue* v = t.find("lambda_scales")) p.lambda_scales = real_list(*v);
      p.paths = positive_size(t.require("paths"), "mgf.paths");
      t.finish();
      out.mgf = p;
    }
  }

  {
    TableReader t(parsed, "tail");
    if (t.exists()) {
      TailParams p;
      p.t_grid = real_list(t.require("t_grid"));
      p.paths = positive_size(t.require("paths"), "tail.paths");
      t.finish();
      out.tail = p;
    }
  }

  {
    TableReader t(parsed, "convergence");
    if (t.exists()) {
      ConvergenceParams p;
      for (const auto& item : t.require("checkpoints").as_array()) {
        const std::int64_t c = item.as_integer();
        if (c < 0) fail_at(item.line, "checkpoints must be nonnegative");
        p.checkpoints.push_back(static_cast<std::size_t>(c));
      }
      if (const ConfigValue* v = t.find("window")) p.window = positive_size(*v, "window");
      p.paths = positive_size(t.require("paths"), "convergence.paths");
      t.finish();
      out.convergence = p;
    }
  }

  {
    TableReader t(parsed, "normalized_max");
    if (t.exists()) {
      NormalizedMaxParams p;
      if (const ConfigValue* v = t.find("beta")) p.beta = v->as_real();
      p.min_pow = static_cast<int>(t.require("min_pow").as_integer());
      p.max_pow = static_cast<int>(t.require("max_pow").as_integer());
      p.paths = positive_size(t.require("paths"), "normalized_max.paths");
      t.finish();
      out.normalized_max = p;
    }
  }

  {
    TableReader t(parsed, "decoupling");
    if (t.exists()) {
      DecouplingParams p;
      p.corr = correlation_from(t, "corr_shape", "rho", "lags");
      if (const ConfigValue* v = t.find("n_max")) p.n_max = positive_size(*v, "n_max");
      t.finish();
      out.decoupling = p;
    }
  }

  for (const auto& [name, table] : parsed.tables) {
    static const std::set<std::string> known{"",          "model",         "weights",
                                             "star_norm", "mgf",           "tail",
                                             "convergence", "normalized_max", "decoupling"};
    if (!known.count(name)) fail("unknown table [" + name + "]");
  }
  return out;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (!is_json && !(path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0)) {
    fail("config file must end in .toml or .json");
  }
  return experiment_config_from_text(text, is_json);
}

}  // namespace subseries
