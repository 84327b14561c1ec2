#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subseries/cli.hpp"

namespace subseries {
namespace {

namespace fs = std::filesystem;

int call_cli(std::initializer_list<std::string> args, std::string* out = nullptr) {
  std::vector<std::string> storage{"subseries"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  int code = 2;
  try {
    code = run_cli(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  if (out) *out = captured.str();
  return code;
}

double csv_value(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(key + ",", 0) == 0) return std::stod(line.substr(key.size() + 1));
  }
  FAIL("missing csv key ", key);
  return 0.0;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

TEST_CASE("cli: constants table") {
  std::string out;
  CHECK(call_cli({"constants", "--alpha", "0.5,1"}, &out) == 0);
  std::istringstream is(out);
  std::string header, half, one;
  std::getline(is, header);
  std::getline(is, half);
  std::getline(is, one);
  CHECK(header == "alpha,C_computed,C_upper,C_paper");
  CHECK(half.rfind("0.5,", 0) == 0);
  CHECK(half.find(",8.26") == half.size() - 5);  // paper value only at 1/2
  CHECK(one.back() == ',');                      // empty paper column elsewhere
  CHECK(std::stod(half.substr(4)) == doctest::Approx(3.897351227878509).epsilon(1e-12));
}

TEST_CASE("cli: covering on the worked example") {
  std::string out;
  CHECK(call_cli({"covering", "--weights", "0.5,0.5", "--alpha", "1", "--eps", "0.6,0.5"},
                 &out) == 0);
  CHECK(out == "epsilon,count,centers\n0.6,1,1\n0.5,3,0 1 2\n");
}

TEST_CASE("cli: norms on a sign sample") {
  TempDir dir("subseries_cli_norms");
  const fs::path sample = dir.path / "signs.txt";
  {
    std::ofstream f(sample);
    f << "# alternating signs\n";
    for (int i = 0; i < 8; ++i) f << (i % 2 ? "-1\n" : "1\n");
  }
  std::string out;
  CHECK(call_cli({"norms", "--input", sample.string(), "--tau", "1"}, &out) == 0);
  CHECK(csv_value(out, "count") == 8.0);
  CHECK(csv_value(out, "phi_norm") == doctest::Approx(1.2011224087864498).epsilon(1e-9));
  CHECK(csv_value(out, "tau") == 1.0);
  CHECK(out.find("tau_source,given") != std::string::npos);
  CHECK(out.find("equivalence_ok,true") != std::string::npos);

  std::string empirical;
  CHECK(call_cli({"norms", "--input", sample.string()}, &empirical) == 0);
  CHECK(empirical.find("tau_source,empirical") != std::string::npos);
  CHECK(csv_value(empirical, "tau") == doctest::Approx(0.99967476496036624).epsilon(1e-9));
}

TEST_CASE("cli: simulate is deterministic under the seed") {
  TempDir dir("subseries_cli_sim");
  const fs::path cfg = dir.path / "model.toml";
  {
    std::ofstream f(cfg);
    f << "[model]\nclass = \"independent\"\nfamily = \"gaussian\"\nsigma = 1.0\n";
  }
  std::string first, second;
  CHECK(call_cli({"simulate", "--config", cfg.string(), "--n", "3", "--paths", "2", "--seed",
                  "7"},
                 &first) == 0);
  CHECK(call_cli({"simulate", "--config", cfg.string(), "--n", "3", "--paths", "2", "--seed",
                  "7"},
                 &second) == 0);
  CHECK(first == second);
  CHECK(first.find("# schema_version=1 config_hash=") == 0);
  CHECK(first.find(" seed=7") != std::string::npos);
  CHECK(first.find("path,k,x\n") != std::string::npos);
  int rows = 0;
  std::istringstream is(first);
  std::string line;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2 + 6);  // hash comment + header + 2 paths * 3 entries
}

TEST_CASE("cli: verify produces reports and honors the constant mode") {
  TempDir dir("subseries_cli_verify");
  const fs::path cfg = dir.path / "suite.toml";
  {
    std::ofstream f(cfg);
    f << "schema_version = 1\n"
         "seed = 5\n"
         "\n"
         "[model]\n"
         "class = \"independent\"\n"
         "family = \"rademacher\"\n"
         "\n"
         "[weights]\n"
         "rule = \"one_over_k\"\n"
         "length = 64\n"
         "\n"
         "[star_norm]\n"
         "m = 32\n"
         "paths = 200\n"
         "\n"
         "[tail]\n"
         "t_grid = [1.0, 2.0]\n"
         "paths = 10000\n"
         "\n"
         "[decoupling]\n"
         "corr_shape = \"ar1\"\n"
         "rho = 0.3\n"
         "n_max = 32\n";
  }
  const fs::path out_a = dir.path / "a";
  const fs::path out_b = dir.path / "b";
  std::string line_a;
  CHECK(call_cli({"verify", "--config", cfg.string(), "--out", out_a.string()}, &line_a) == 0);
  CHECK(line_a.find("overall pass") != std::string::npos);
  CHECK(call_cli({"verify", "--config", cfg.string(), "--out", out_b.string(), "--threads",
                  "8"}) == 0);
  // Byte-identical outputs for the same seed, any thread count.
  CHECK(slurp(out_a / "report.json") == slurp(out_b / "report.json"));
  CHECK(slurp(out_a / "summary.csv") == slurp(out_b / "summary.csv"));

  const nlohmann::json doc = nlohmann::json::parse(slurp(out_a / "report.json"));
  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("seed") == 5);
  CHECK(doc.at("constant_mode") == "both");
  CHECK(doc.at("overall_verdict") == "pass");
  REQUIRE(doc.at("checks").size() == 3);
  CHECK(doc.at("checks")[0].at("check_id") == "star_norm");
  // Both constant columns are populated in "both" mode on star-norm rows.
  const auto& star_row = doc.at("checks")[0].at("rows")[0];
  CHECK(star_row.at("bound_computed_C").is_number());
  CHECK(star_row.at("bound_paper_C").is_number());

  const std::string csv = slurp(out_a / "summary.csv");
  CHECK(csv.rfind("# schema_version=1 config_hash=", 0) == 0);
  CHECK(csv.find("check_id,n,m,empirical,ci_upper,bound_computed_C,bound_paper_C,verdict\n") !=
        std::string::npos);

  // Restricting the constant mode only blanks the other display column.
  const fs::path out_c = dir.path / "c";
  CHECK(call_cli({"verify", "--config", cfg.string(), "--out", out_c.string(),
                  "--constant-mode", "computed"}) == 0);
  const nlohmann::json doc_c = nlohmann::json::parse(slurp(out_c / "report.json"));
  CHECK(doc_c.at("constant_mode") == "computed");
  CHECK(doc_c.at("checks")[0].at("rows")[0].at("bound_paper_C").is_null());
  CHECK(doc_c.at("checks")[0].at("verdict") == doc.at("checks")[0].at("verdict"));

  // The report renderer summarizes the JSON.
  std::string rendered;
  CHECK(call_cli({"report", "--input", (out_a / "report.json").string()}, &rendered) == 0);
  CHECK(rendered.find("star_norm: pass") != std::string::npos);
  CHECK(rendered.find("overall: pass") != std::string::npos);
}

TEST_CASE("cli: errors exit with code 2") {
  std::string out;
  CHECK(call_cli({"unknown-subcommand"}, &out) == 2);
  CHECK(call_cli({"covering", "--weights", "1", "--eps", "0"}, &out) == 2);  // eps domain
  TempDir dir("subseries_cli_err");
  const fs::path cfg = dir.path / "empty.toml";
  {
    std::ofstream f(cfg);
    f << "seed = 1\n";
  }
  // No checks enabled.
  CHECK(call_cli({"verify", "--config", cfg.string(), "--out", (dir.path / "o").string()}) == 2);
}

}  // namespace
}  // namespace subseries
