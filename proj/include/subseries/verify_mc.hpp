#pragma once
// Monte Carlo stress checks: each one simulates a model, measures the
// quantity an inequality controls, and compares against the closed-form
// right-hand side from the bounds engine. Results are VerificationReports
// with per-row empirical values, upper confidence limits, bounds under the
// computed and (where defined) "paper" chaining constants, and a verdict.
//
// Reproducibility: path i always draws from RngStream(seed, i), and
// accumulation runs over fixed chunks combined in chunk order, so every
// report is byte-identical for a given seed regardless of thread count.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "subseries/bounds_engine.hpp"
#include "subseries/series_models.hpp"
#include "subseries/young_orlicz.hpp"

namespace subseries {

enum class Verdict { pass, fail, informational };

const char* verdict_name(Verdict v);

struct ReportRow {
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> m;
  std::string x_name;  // optional extra abscissa ("t", "lambda", ...), JSON only
  double x = std::numeric_limits<double>::quiet_NaN();
  double empirical = std::numeric_limits<double>::quiet_NaN();
  double ci_upper = std::numeric_limits<double>::quiet_NaN();
  double bound_computed = std::numeric_limits<double>::quiet_NaN();
  double bound_paper = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::informational;
};

struct VerificationReport {
  std::string check_id;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  Verdict verdict = Verdict::informational;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;

  nlohmann::ordered_json to_json() const;
  // CSV columns: check_id,n,m,empirical,ci_upper,bound_computed_C,bound_paper_C,verdict
  static void write_csv_header(std::ostream& os);
  void append_csv(std::ostream& os) const;
};

struct McOptions {
  unsigned threads = 1;
};

// Largest increment of weighted partial sums inside the window:
// max over n <= i <= j <= m of |sum_{k=i+1}^{j} path_k| via a prefix sweep.
double maximal_over_range(std::span<const double> path, std::size_t n, std::size_t m);

// Scale sequence the model's own increment claim induces (u_k = s_k^2 before
// outer weighting), and the route (ND or CS) its tail estimate follows. The
// "safe" variant doubles u for independent/ND classes, matching the series
// bounds, and is what star-norm and tail comparisons use.
struct ClaimedMetric {
  WeightSequence u;
  SeriesKind kind = SeriesKind::nd;
};
ClaimedMetric claimed_metric(const SeriesModel& model, std::span<const double> outer_weights,
                             std::size_t length);
ClaimedMetric safe_metric(const SeriesModel& model, std::span<const double> outer_weights,
                          std::size_t length);

struct StarNormResult {
  NormEstimate estimate;
  VerificationReport report;
};

// Empirical phi-norm of max_{n <= i <= m} |S_i - S_n| for weighted model
// paths, against the chaining bound on the model's safe metric.
// Needs n_paths >= 100 for the plug-in norm to mean anything.
StarNormResult estimate_star_norm(const SeriesModel& model, std::span<const double> a_seq,
                                  std::size_t n, std::size_t m, std::size_t n_paths,
                                  std::uint64_t seed, const McOptions& options = {});

// Empirical mgf of increments S_m - S_n against exp(lambda^2 d(n,m)^2 / 2)
// on the claimed metric. lambda is specified through scales s = lambda d(n,m)
// with |s| <= 2, so the comparison sits where the claim has teeth. A row
// passes when mean exp(lambda (S_m - S_n)) <= bound within three relative
// standard errors. Needs n_paths >= 10000.
VerificationReport increment_mgf_check(const SeriesModel& model, std::span<const double> a_seq,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                       std::span<const double> lambda_scales, std::size_t n_paths,
                                       std::uint64_t seed, const McOptions& options = {});

// Exceedance frequencies of |sum b_k X_k| over a t-grid, with one-sided 99%
// Clopper-Pearson upper limits, against the route's tail bound.
// Needs n_paths >= 10000.
VerificationReport tail_curve(const SeriesModel& model, std::span<const double> b_row,
                              std::span<const double> t_grid, std::size_t n_paths,
                              std::uint64_t seed, const McOptions& options = {});

// Cauchy-property trace: 95th percentile of max_{j <= window} |S_{c+j} - S_c|
// at each checkpoint c. Passes when the percentile sequence is nonincreasing
// with at most one violation; rows are informational.
VerificationReport convergence_diagnostic(const SeriesModel& model, std::span<const double> a_seq,
                                          std::span<const std::size_t> checkpoints,
                                          std::size_t window, std::size_t n_paths,
                                          std::uint64_t seed, const McOptions& options = {});

// Path maxima of |S_n| (n log^{1+beta} n)^{-1/2} along dyadic n = 2^j,
// j in [min_pow, max_pow]. Passes when the final statistic is below 0.5 and
// the trace is nonincreasing from n = 2^14 on with at most one violation.
// Defined for the independent/ND/CS/Euler classes (uniformly bounded scales).
VerificationReport normalized_max_experiment(const SeriesModel& model, double beta, int min_pow,
                                             int max_pow, std::size_t n_paths, std::uint64_t seed,
                                             const McOptions& options = {});

// Spectral check of the decoupling coefficient p for a stationary correlation
// shape: lambda_max(R_n) <= 2p - 1 must hold at every dyadic n up to n_max
// (that side is provable); n where lambda_max exceeds p itself are flagged in
// the notes, since the one-sided comparison with p alone can genuinely fail.
VerificationReport decoupling_gap_check(const CorrelationSpec& corr, std::size_t n_max);

}  // namespace subseries
