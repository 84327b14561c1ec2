#include "subseries/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "subseries/bounds_engine.hpp"
#include "subseries/config.hpp"
#include "subseries/entropy_dudley.hpp"
#include "subseries/numeric.hpp"
#include "subseries/rng.hpp"
#include "subseries/series_models.hpp"
#include "subseries/subgaussian.hpp"
#include "subseries/verify_mc.hpp"
#include "subseries/young_orlicz.hpp"

namespace subseries {

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_text_file(out_path, content);
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SUBSERIES_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::uint64_t value = 0;
  const std::string s(raw);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("SUBSERIES_SEED must be a nonnegative integer");
  }
  return value;
}

int run_constants(const std::vector<double>& alphas, const std::string& out_path) {
  std::ostringstream os;
  os << "alpha,C_computed,C_upper,C_paper\n";
  for (double alpha : alphas) {
    os << format_double(alpha) << ',' << format_double(chaining_constant(alpha)) << ','
       << format_double(chaining_constant_upper(alpha)) << ',';
    if (const auto paper = ConstantChoice::paper(alpha)) os << format_double(paper->value);
    os << '\n';
  }
  emit(os.str(), out_path);
  return 0;
}

int run_covering(const std::vector<double>& weights, double alpha,
                 const std::vector<double>& epsilons, std::optional<std::size_t> max_index,
                 const std::string& out_path) {
  const AlphaMetric metric(WeightSequence(weights), alpha);
  const std::size_t top = max_index.value_or(weights.size());
  std::ostringstream os;
  os << "epsilon,count,centers\n";
  for (double eps : epsilons) {
    const CoveringResult cover = covering_number(metric, eps, top);
    os << format_double(eps) << ',' << cover.count << ',';
    for (std::size_t i = 0; i < cover.centers.size(); ++i) {
      if (i) os << ' ';
      os << cover.centers[i];
    }
    os << '\n';
  }
  emit(os.str(), out_path);
  return 0;
}

std::vector<double> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    const std::string token = line.substr(start);
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw std::runtime_error("'" + path + "': cannot parse sample line '" + line + "'");
    }
  }
  return values;
}

int run_norms(const std::string& input, std::optional<double> analytic_tau, double slack,
              const std::string& out_path) {
  SampleBatch batch{read_sample_file(input)};
  const NormEstimate norm = orlicz_norm_empirical(batch);
  const double tau = analytic_tau ? *analytic_tau
                                  : tau_empirical(batch, default_t_grid()).value;
  std::ostringstream os;
  os << "quantity,value\n";
  os << "count," << batch.count() << '\n';
  os << "phi_norm," << format_double(norm.value) << '\n';
  os << "phi_norm_unbounded," << (norm.unbounded ? "true" : "false") << '\n';
  os << "tau," << format_double(tau) << '\n';
  os << "tau_source," << (analytic_tau ? "given" : "empirical") << '\n';
  if (!norm.unbounded) {
    const EquivalenceReport eq = equivalence_check(tau, norm.value, slack);
    os << "equivalence_lower," << format_double(eq.lower_side) << '\n';
    os << "equivalence_upper," << format_double(eq.upper_side) << '\n';
    os << "equivalence_ok," << (eq.ok ? "true" : "false") << '\n';
  }
  emit(os.str(), out_path);
  return 0;
}

int run_simulate(const std::string& config_path, std::size_t n, std::size_t paths,
                 std::optional<std::uint64_t> seed_flag, const std::string& out_path) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  if (!cfg.model) throw std::runtime_error("simulate: config has no [model] table");
  std::uint64_t seed = 0;
  if (seed_flag) {
    seed = *seed_flag;
  } else if (cfg.has_seed) {
    seed = cfg.seed;
  } else if (const auto env = env_seed()) {
    seed = *env;
  }
  const PathSampler sampler(*cfg.model, n);
  std::ostringstream os;
  os << "# schema_version=1 config_hash=" << cfg.config_hash << " seed=" << seed << '\n';
  os << "path,k,x\n";
  std::vector<double> path;
  for (std::size_t i = 0; i < paths; ++i) {
    RngStream stream(seed, i);
    sampler.sample(stream, path);
    for (std::size_t k = 0; k < path.size(); ++k) {
      os << i << ',' << (k + 1) << ',' << format_double(path[k]) << '\n';
    }
  }
  emit(os.str(), out_path);
  return 0;
}

// Hides the column the requested constant mode does not cover. Verdicts are
// always decided under the computed constant; "paper" only changes display.
void apply_constant_mode(VerificationReport& report, const std::string& mode) {
  for (auto& row : report.rows) {
    if (mode == "computed") {
      row.bound_paper = std::numeric_limits<double>::quiet_NaN();
    } else if (mode == "paper") {
      row.bound_computed = std::numeric_limits<double>::quiet_NaN();
    }
  }
}

int run_verify(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
               std::optional<unsigned> threads_flag, std::optional<std::string> mode_flag,
               const std::string& out_dir) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  std::uint64_t seed = 0;
  if (seed_flag) {
    seed = *seed_flag;
  } else if (cfg.has_seed) {
    seed = cfg.seed;
  } else if (const auto env = env_seed()) {
    seed = *env;
  }
  const unsigned threads = threads_flag.value_or(cfg.threads);
  const std::string mode = mode_flag.value_or(cfg.constant_mode);
  if (mode != "computed" && mode != "paper" && mode != "both") {
    throw std::runtime_error("constant mode must be computed, paper or both");
  }
  McOptions options;
  options.threads = threads;

  auto require_model = [&]() -> const SeriesModel& {
    if (!cfg.model) throw std::runtime_error("verify: config has no [model] table");
    return *cfg.model;
  };
  auto require_weights = [&](std::size_t length, const char* what) -> const std::vector<double>& {
    if (cfg.weights.size() < length) {
      throw std::runtime_error(std::string("verify: [weights] too short for ") + what);
    }
    return cfg.weights;
  };

  std::vector<VerificationReport> reports;
  if (cfg.star_norm) {
    const auto& p = *cfg.star_norm;
    reports.push_back(estimate_star_norm(require_model(), require_weights(p.m, "star_norm"), p.n,
                                         p.m, p.paths, mix_seed(seed, 1), options)
                          .report);
  }
  if (cfg.mgf) {
    const auto& p = *cfg.mgf;
    std::size_t length = 0;
    for (const auto& [a, b] : p.pairs) length = std::max(length, b);
    reports.push_back(increment_mgf_check(require_model(), require_weights(length, "mgf"), p.pairs,
                                          p.lambda_scales, p.paths, mix_seed(seed, 2), options));
  }
  if (cfg.tail) {
    const auto& p = *cfg.tail;
    if (cfg.weights.empty()) throw std::runtime_error("verify: tail check needs [weights]");
    reports.push_back(tail_curve(require_model(), cfg.weights, p.t_grid, p.paths,
                                 mix_seed(seed, 3), options));
  }
  if (cfg.convergence) {
    const auto& p = *cfg.convergence;
    const std::size_t length = (p.checkpoints.empty() ? 0 : p.checkpoints.back()) + p.window;
    reports.push_back(convergence_diagnostic(require_model(),
                                             require_weights(length, "convergence"), p.checkpoints,
                                             p.window, p.paths, mix_seed(seed, 4), options));
  }
  if (cfg.normalized_max) {
    const auto& p = *cfg.normalized_max;
    reports.push_back(normalized_max_experiment(require_model(), p.beta, p.min_pow, p.max_pow,
                                                p.paths, mix_seed(seed, 5), options));
  }
  if (cfg.decoupling) {
    reports.push_back(decoupling_gap_check(cfg.decoupling->corr, cfg.decoupling->n_max));
  }
  if (reports.empty()) throw std::runtime_error("verify: config enables no checks");

  bool any_fail = false;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "# schema_version=1 config_hash=" << cfg.config_hash << " seed=" << seed << '\n';
  VerificationReport::write_csv_header(csv);
  for (auto& report : reports) {
    apply_constant_mode(report, mode);
    any_fail = any_fail || report.verdict == Verdict::fail;
    checks.push_back(report.to_json());
    report.append_csv(csv);
  }

  nlohmann::ordered_json doc{{"schema_version", 1},
                             {"config_hash", cfg.config_hash},
                             {"seed", seed},
                             {"constant_mode", mode},
                             {"overall_verdict", any_fail ? "fail" : "pass"},
                             {"checks", std::move(checks)}};

  const std::filesystem::path dir(out_dir.empty() ? "out" : out_dir);
  write_text_file((dir / "report.json").string(), doc.dump(2) + "\n");
  write_text_file((dir / "summary.csv").string(), csv.str());
  std::cout << "verify: " << reports.size() << " checks, overall "
            << (any_fail ? "fail" : "pass") << ", outputs in " << dir.string() << '\n';
  return any_fail ? 1 : 0;
}

int run_report(const std::string& input) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open '" + input + "'");
  nlohmann::json doc = nlohmann::json::parse(in);
  std::cout << "config_hash=" << doc.value("config_hash", std::string("?"))
            << " seed=" << doc.value("seed", 0ULL)
            << " constant_mode=" << doc.value("constant_mode", std::string("?")) << '\n';
  for (const auto& check : doc.at("checks")) {
    std::cout << check.at("check_id").get<std::string>() << ": "
              << check.at("verdict").get<std::string>();
    const auto& rows = check.at("rows");
    std::cout << " (" << rows.size() << " rows)";
    for (const auto& note : check.at("notes")) {
      std::cout << "\n    note: " << note.get<std::string>();
    }
    std::cout << '\n';
  }
  std::cout << "overall: " << doc.at("overall_verdict").get<std::string>() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"verification laboratory for series of subgaussian random variables"};
  app.require_subcommand(1);

  // constants
  auto* constants = app.add_subcommand("constants", "chaining constants C(alpha)");
  std::vector<double> alphas{0.5};
  std::string constants_out;
  constants->add_option("--alpha", alphas, "alpha values")->delimiter(',');
  constants->add_option("--out", constants_out, "output CSV path (default stdout)");

  // covering
  auto* covering = app.add_subcommand("covering", "covering numbers for a weight sequence");
  std::vector<double> cover_weights;
  double cover_alpha = 1.0;
  std::vector<double> cover_eps;
  std::size_t cover_max_index = 0;
  bool cover_has_max = false;
  std::string covering_out;
  covering->add_option("--weights", cover_weights, "weight sequence u_k")
      ->delimiter(',')
      ->required();
  covering->add_option("--alpha", cover_alpha, "metric exponent");
  covering->add_option("--eps", cover_eps, "radii")->delimiter(',')->required();
  covering->add_option("--max-index", cover_max_index, "largest index covered")
      ->each([&](const std::string&) { cover_has_max = true; });
  covering->add_option("--out", covering_out, "output CSV path (default stdout)");

  // norms
  auto* norms = app.add_subcommand("norms", "empirical phi-norm and subgaussian standard");
  std::string norms_input, norms_out;
  double norms_tau = -1.0;
  bool norms_has_tau = false;
  double norms_slack = 0.05;
  norms->add_option("--input", norms_input, "sample file, one value per line")->required();
  norms->add_option("--tau", norms_tau, "analytic tau (default: estimate from samples)")
      ->each([&](const std::string&) { norms_has_tau = true; });
  norms->add_option("--slack", norms_slack, "equivalence slack");
  norms->add_option("--out", norms_out, "output CSV path (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "sample raw model paths to CSV");
  std::string sim_config, sim_out;
  std::size_t sim_n = 0, sim_paths = 1;
  std::uint64_t sim_seed = 0;
  bool sim_has_seed = false;
  simulate->add_option("--config", sim_config, "config with a [model] table")->required();
  simulate->add_option("--n", sim_n, "path length")->required();
  simulate->add_option("--paths", sim_paths, "number of paths");
  simulate->add_option("--seed", sim_seed, "seed override")
      ->each([&](const std::string&) { sim_has_seed = true; });
  simulate->add_option("--out", sim_out, "output CSV path (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  std::string verify_config, verify_out = "out", verify_mode;
  std::uint64_t verify_seed = 0;
  bool verify_has_seed = false;
  unsigned verify_threads = 0;
  verify->add_option("--config", verify_config, "experiment config (.toml or .json)")->required();
  verify->add_option("--seed", verify_seed, "seed override")
      ->each([&](const std::string&) { verify_has_seed = true; });
  verify->add_option("--threads", verify_threads, "worker threads");
  verify->add_option("--out", verify_out, "output directory");
  verify->add_option("--constant-mode", verify_mode, "computed | paper | both")
      ->check(CLI::IsMember({"computed", "paper", "both"}));

  // report
  auto* report = app.add_subcommand("report", "render a verify report.json");
  std::string report_input;
  report->add_option("--input", report_input, "report.json path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (constants->parsed()) return run_constants(alphas, constants_out);
    if (covering->parsed()) {
      return run_covering(cover_weights, cover_alpha, cover_eps,
                          cover_has_max ? std::optional<std::size_t>(cover_max_index)
                                        : std::nullopt,
                          covering_out);
    }
    if (norms->parsed()) {
      return run_norms(norms_input,
                       norms_has_tau ? std::optional<double>(norms_tau) : std::nullopt,
                       norms_slack, norms_out);
    }
    if (simulate->parsed()) {
      return run_simulate(sim_config, sim_n, sim_paths,
                          sim_has_seed ? std::optional<std::uint64_t>(sim_seed) : std::nullopt,
                          sim_out);
    }
    if (verify->parsed()) {
      return run_verify(verify_config,
                        verify_has_seed ? std::optional<std::uint64_t>(verify_seed) : std::nullopt,
                        verify_threads ? std::optional<unsigned>(verify_threads) : std::nullopt,
                        verify_mode.empty() ? std::nullopt : std::optional<std::string>(verify_mode),
                        verify_out);
    }
    if (report->parsed()) return run_report(report_input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace subseries
