#include "subseries/verify_mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subseries/numeric.hpp"
#include "subseries/rng.hpp"

namespace subseries {

namespace {

constexpr double kExpArgCap = 700.0;

void require_outer(std::span<const double> a, std::size_t length, const char* what) {
  if (a.size() < length) {
    throw std::domain_error(std::string(what) + ": weight sequence shorter than path length");
  }
  for (std::size_t k = 0; k < length; ++k) {
    if (!std::isfinite(a[k])) {
      throw std::domain_error(std::string(what) + ": weights must be finite");
    }
  }
}

nlohmann::ordered_json row_to_json(const ReportRow& row) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (row.n) j["n"] = *row.n;
  if (row.m) j["m"] = *row.m;
  if (!row.x_name.empty()) j[row.x_name] = row.x;
  auto put = [&](const char* key, double v) {
    if (std::isnan(v)) {
      j[key] = nullptr;
    } else {
      j[key] = v;
    }
  };
  put("empirical", row.empirical);
  put("ci_upper", row.ci_upper);
  put("bound_computed_C", row.bound_computed);
  put("bound_paper_C", row.bound_paper);
  j["verdict"] = verdict_name(row.verdict);
  return j;
}

std::string csv_cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

// Fold row verdicts into the check verdict: any fail fails, otherwise any
// pass passes, otherwise the check is purely informational.
Verdict fold_verdicts(const std::vector<ReportRow>& rows) {
  bool any_pass = false;
  for (const auto& row : rows) {
    if (row.verdict == Verdict::fail) return Verdict::fail;
    any_pass = any_pass || row.verdict == Verdict::pass;
  }
  return any_pass ? Verdict::pass : Verdict::informational;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "informational";
  }
}

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const auto& row : rows) rows_json.push_back(row_to_json(row));
  return nlohmann::ordered_json{{"check_id", check_id},
                                {"seed", seed},
                                {"n_paths", n_paths},
                                {"verdict", verdict_name(verdict)},
                                {"rows", std::move(rows_json)},
                                {"notes", notes}};
}

void VerificationReport::write_csv_header(std::ostream& os) {
  os << "check_id,n,m,empirical,ci_upper,bound_computed_C,bound_paper_C,verdict\n";
}

void VerificationReport::append_csv(std::ostream& os) const {
  for (const auto& row : rows) {
    os << check_id << ',';
    if (row.n) os << *row.n;
    os << ',';
    if (row.m) os << *row.m;
    os << ',' << csv_cell(row.empirical) << ',' << csv_cell(row.ci_upper) << ','
       << csv_cell(row.bound_computed) << ',' << csv_cell(row.bound_paper) << ','
       << verdict_name(row.verdict) << '\n';
  }
}

double maximal_over_range(std::span<const double> path, std::size_t n, std::size_t m) {
  if (!(n < m) || m > path.size()) {
    throw std::domain_error("maximal_over_range: needs n < m <= path length");
  }
  double prefix = 0.0, lo = 0.0, hi = 0.0;
  for (std::size_t k = n; k < m; ++k) {
    prefix += path[k];
    lo = std::min(lo, prefix);
    hi = std::max(hi, prefix);
  }
  return hi - lo;
}

ClaimedMetric claimed_metric(const SeriesModel& model, std::span<const double> outer_weights,
                             std::size_t length) {
  require_outer(outer_weights, length, "claimed_metric");
  const std::vector<double> scales = PathSampler(model, length).index_scales();
  std::vector<double> u(length);
  for (std::size_t k = 0; k < length; ++k) {
    u[k] = outer_weights[k] * outer_weights[k] * scales[k] * scales[k];
  }
  ClaimedMetric cm;
  cm.u = WeightSequence(std::move(u));
  const bool cs_route = std::holds_alternative<CondSubgaussianSeq>(model) ||
                        std::holds_alternative<ItoIncrements>(model);
  cm.kind = cs_route ? SeriesKind::cs : SeriesKind::nd;
  return cm;
}

ClaimedMetric safe_metric(const SeriesModel& model, std::span<const double> outer_weights,
                          std::size_t length) {
  ClaimedMetric cm = claimed_metric(model, outer_weights, length);
  const bool doubled = std::holds_alternative<IndependentSeq>(model) ||
                       std::holds_alternative<NDGaussianSeq>(model);
  if (doubled) {
    std::vector<double> u = cm.u.weights();
    for (auto& v : u) v *= 2.0;
    cm.u = WeightSequence(std::move(u));
  }
  return cm;
}

StarNormResult estimate_star_norm(const SeriesModel& model, std::span<const double> a_seq,
                                  std::size_t n, std::size_t m, std::size_t n_paths,
                                  std::uint64_t seed, const McOptions& options) {
  if (!(n < m)) throw std::domain_error("estimate_star_norm: needs n < m");
  if (n_paths < 100) throw std::domain_error("estimate_star_norm: needs at least 100 paths");
  require_outer(a_seq, m, "estimate_star_norm");

  const PathSampler sampler(model, m);
  std::vector<double> stats(n_paths);
  run_chunked(n_paths, options.threads, kDefaultChunks,
              [&](std::size_t, std::size_t begin, std::size_t end) {
                std::vector<double> path;
                for (std::size_t i = begin; i < end; ++i) {
                  RngStream stream(seed, i);
                  sampler.sample(stream, path);
                  double prefix = 0.0, lo = 0.0, hi = 0.0;
                  for (std::size_t k = n; k < m; ++k) {
                    prefix += a_seq[k] * path[k];
                    lo = std::min(lo, prefix);
                    hi = std::max(hi, prefix);
                  }
                  stats[i] = hi - lo;
                }
              });

  StarNormResult result;
  result.estimate = orlicz_norm_empirical(SampleBatch{std::move(stats)});

  const ClaimedMetric safe = safe_metric(model, a_seq, m);
  const BoundReport computed =
      subgaussian_max_bound(safe.u, 0.5, n, m, ConstantChoice::computed(0.5));
  const BoundReport paper = subgaussian_max_bound(safe.u, 0.5, n, m, *ConstantChoice::paper(0.5));

  ReportRow row;
  row.n = static_cast<std::int64_t>(n);
  row.m = static_cast<std::int64_t>(m);
  row.empirical = result.estimate.unbounded ? std::numeric_limits<double>::infinity()
                                            : result.estimate.value;
  row.ci_upper = row.empirical;  // plug-in point value; no distributional CI
  row.bound_computed = computed.rhs;
  row.bound_paper = paper.rhs;
  row.verdict = !result.estimate.unbounded && row.empirical <= computed.rhs ? Verdict::pass
                                                                            : Verdict::fail;

  result.report.check_id = "star_norm";
  result.report.seed = seed;
  result.report.n_paths = n_paths;
  result.report.rows.push_back(row);
  result.report.verdict = row.verdict;
  result.report.notes.push_back(std::string("model=") + model_class_name(model));
  return result;
}

VerificationReport increment_mgf_check(const SeriesModel& model, std::span<const double> a_seq,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                       std::span<const double> lambda_scales, std::size_t n_paths,
                                       std::uint64_t seed, const McOptions& options) {
  if (pairs.empty()) throw std::domain_error("increment_mgf_check: needs at least one index pair");
  if (lambda_scales.empty()) {
    throw std::domain_error("increment_mgf_check: needs at least one lambda scale");
  }
  for (double s : lambda_scales) {
    if (!std::isfinite(s) || s == 0.0 || std::abs(s) > 2.0) {
      throw std::domain_error(
          "increment_mgf_check: lambda scales must be nonzero with |s| <= 2");
    }
  }
  std::size_t length = 0;
  for (const auto& [pn, pm] : pairs) {
    if (!(pn < pm)) throw std::domain_error("increment_mgf_check: pairs need n < m");
    length = std::max(length, pm);
  }
  if (n_paths < 10000) throw std::domain_error("increment_mgf_check: needs at least 10000 paths");
  require_outer(a_seq, length, "increment_mgf_check");

  const ClaimedMetric claimed = claimed_metric(model, a_seq, length);
  const std::size_t n_pairs = pairs.size();
  const std::size_t n_lambda = lambda_scales.size();

  // lambda values per pair, from the requested scales on the claimed metric.
  std::vector<double> d_nm(n_pairs);
  std::vector<double> lambdas(n_pairs * n_lambda);
  for (std::size_t p = 0; p < n_pairs; ++p) {
    d_nm[p] = std::sqrt(claimed.u.range_sum(pairs[p].first, pairs[p].second));
    for (std::size_t l = 0; l < n_lambda; ++l) {
      lambdas[p * n_lambda + l] = d_nm[p] > 0.0 ? lambda_scales[l] / d_nm[p] : 0.0;
    }
  }

  const PathSampler sampler(model, length);
  const std::size_t n_cells = n_pairs * n_lambda;
  const std::size_t n_chunks = std::min<std::size_t>(kDefaultChunks, n_paths);
  std::vector<double> sum_y(n_chunks * n_cells, 0.0);
  std::vector<double> sum_y2(n_chunks * n_cells, 0.0);
  run_chunked(n_paths, options.threads, n_chunks,
              [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                std::vector<double> path;
                std::vector<double> inc(n_pairs);
                double* sy = sum_y.data() + chunk * n_cells;
                double* sy2 = sum_y2.data() + chunk * n_cells;
                for (std::size_t i = begin; i < end; ++i) {
                  RngStream stream(seed, i);
                  sampler.sample(stream, path);
                  // One prefix sweep serves every pair; the path buffer is
                  // rewritten in place with the weighted prefix sums.
                  double prefix = 0.0;
                  for (std::size_t k = 0; k < length; ++k) {
                    prefix += a_seq[k] * path[k];
                    path[k] = prefix;
                  }
                  for (std::size_t p = 0; p < n_pairs; ++p) {
                    const auto [pn, pm] = pairs[p];
                    const double start = pn == 0 ? 0.0 : path[pn - 1];
                    inc[p] = path[pm - 1] - start;
                  }
                  for (std::size_t p = 0; p < n_pairs; ++p) {
                    for (std::size_t l = 0; l < n_lambda; ++l) {
                      const double arg = lambdas[p * n_lambda + l] * inc[p];
                      const double y = std::exp(std::min(arg, kExpArgCap));
                      sy[p * n_lambda + l] += y;
                      sy2[p * n_lambda + l] += y * y;
                    }
                  }
                }
              });

  VerificationReport report;
  report.check_id = "increment_mgf";
  report.seed = seed;
  report.n_paths = n_paths;
  report.notes.push_back(std::string("model=") + model_class_name(model));
  const double n = static_cast<double>(n_paths);
  for (std::size_t p = 0; p < n_pairs; ++p) {
    for (std::size_t l = 0; l < n_lambda; ++l) {
      double total = 0.0, total2 = 0.0;
      for (std::size_t c = 0; c < n_chunks; ++c) {
        total += sum_y[c * n_cells + p * n_lambda + l];
        total2 += sum_y2[c * n_cells + p * n_lambda + l];
      }
      const double mean = total / n;
      const double var = std::max(0.0, (total2 - n * mean * mean) / (n - 1.0));
      const double se = std::sqrt(var / n);
      const double rel_se = mean > 0.0 ? se / mean : 0.0;
      const double lambda = lambdas[p * n_lambda + l];
      const double bound = std::exp(0.5 * lambda * lambda * d_nm[p] * d_nm[p]);

      ReportRow row;
      row.n = static_cast<std::int64_t>(pairs[p].first);
      row.m = static_cast<std::int64_t>(pairs[p].second);
      row.x_name = "lambda";
      row.x = lambda;
      row.empirical = mean;
      row.ci_upper = mean / (1.0 + 3.0 * rel_se);
      row.bound_computed = bound;
      row.verdict = row.ci_upper <= bound ? Verdict::pass : Verdict::fail;
      report.rows.push_back(row);
    }
  }
  report.verdict = fold_verdicts(report.rows);
  return report;
}

VerificationReport tail_curve(const SeriesModel& model, std::span<const double> b_row,
                              std::span<const double> t_grid, std::size_t n_paths,
                              std::uint64_t seed, const McOptions& options) {
  if (b_row.empty()) throw std::domain_error("tail_curve: weight row must be nonempty");
  if (t_grid.empty()) throw std::domain_error("tail_curve: t grid must be nonempty");
  for (double t : t_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::domain_error("tail_curve: t values must be finite and positive");
    }
  }
  if (n_paths < 10000) throw std::domain_error("tail_curve: needs at least 10000 paths");
  const std::size_t length = b_row.size();
  require_outer(b_row, length, "tail_curve");

  const ClaimedMetric safe = safe_metric(model, b_row, length);
  const double scale2 = safe.u.total();
  if (!(scale2 > 0.0)) {
    throw std::domain_error("tail_curve: degenerate (zero) scale; tail bound is trivial");
  }

  const PathSampler sampler(model, length);
  const std::size_t n_t = t_grid.size();
  const std::size_t n_chunks = std::min<std::size_t>(kDefaultChunks, n_paths);
  std::vector<std::uint64_t> counts(n_chunks * n_t, 0);
  run_chunked(n_paths, options.threads, n_chunks,
              [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                std::vector<double> path;
                std::uint64_t* c = counts.data() + chunk * n_t;
                for (std::size_t i = begin; i < end; ++i) {
                  RngStream stream(seed, i);
                  sampler.sample(stream, path);
                  double sum = 0.0;
                  for (std::size_t k = 0; k < length; ++k) sum += b_row[k] * path[k];
                  const double a = std::abs(sum);
                  for (std::size_t j = 0; j < n_t; ++j) {
                    if (a >= t_grid[j]) ++c[j];
                  }
                }
              });

  VerificationReport report;
  report.check_id = "tail_curve";
  report.seed = seed;
  report.n_paths = n_paths;
  report.notes.push_back(std::string("model=") + model_class_name(model));
  report.notes.push_back(std::string("route=") + (safe.kind == SeriesKind::nd ? "nd" : "cs"));
  for (std::size_t j = 0; j < n_t; ++j) {
    std::uint64_t hits = 0;
    for (std::size_t c = 0; c < n_chunks; ++c) hits += counts[c * n_t + j];
    const double t = t_grid[j];
    // 2 exp(-t^2 / (2 sum u)) with the safe u equals the route's bound:
    // 4 A^2 in the ND parametrization, 2 B^2 in the CS one.
    const double bound = 2.0 * std::exp(-t * t / (2.0 * scale2));
    ReportRow row;
    row.x_name = "t";
    row.x = t;
    row.empirical = static_cast<double>(hits) / static_cast<double>(n_paths);
    row.ci_upper = clopper_pearson_upper(hits, n_paths, 0.01);
    row.bound_computed = bound;
    row.verdict = row.ci_upper <= bound ? Verdict::pass : Verdict::fail;
    report.rows.push_back(row);
  }
  report.verdict = fold_verdicts(report.rows);
  return report;
}

VerificationReport convergence_diagnostic(const SeriesModel& model, std::span<const double> a_seq,
                                          std::span<const std::size_t> checkpoints,
                                          std::size_t window, std::size_t n_paths,
                                          std::uint64_t seed, const McOptions& options) {
  if (checkpoints.empty()) throw std::domain_error("convergence_diagnostic: needs checkpoints");
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i - 1] < checkpoints[i])) {
      throw std::domain_error("convergence_diagnostic: checkpoints must be strictly increasing");
    }
  }
  if (window == 0) throw std::domain_error("convergence_diagnostic: window must be positive");
  if (n_paths == 0) throw std::domain_error("convergence_diagnostic: needs at least one path");
  const std::size_t length = checkpoints.back() + window;
  require_outer(a_seq, length, "convergence_diagnostic");

  const PathSampler sampler(model, length);
  const std::size_t n_cp = checkpoints.size();
  std::vector<double> stats(n_paths * n_cp);
  run_chunked(n_paths, options.threads, kDefaultChunks,
              [&](std::size_t, std::size_t begin, std::size_t end) {
                std::vector<double> path;
                for (std::size_t i = begin; i < end; ++i) {
                  RngStream stream(seed, i);
                  sampler.sample(stream, path);
                  for (std::size_t c = 0; c < n_cp; ++c) {
                    const std::size_t start = checkpoints[c];
                    double prefix = 0.0, worst = 0.0;
                    for (std::size_t k = start; k < start + window; ++k) {
                      prefix += a_seq[k] * path[k];
                      worst = std::max(worst, std::abs(prefix));
                    }
                    stats[i * n_cp + c] = worst;
                  }
                }
              });

  VerificationReport report;
  report.check_id = "convergence";
  report.seed = seed;
  report.n_paths = n_paths;
  report.notes.push_back(std::string("model=") + model_class_name(model));
  std::vector<double> percentiles(n_cp);
  std::vector<double> column(n_paths);
  for (std::size_t c = 0; c < n_cp; ++c) {
    for (std::size_t i = 0; i < n_paths; ++i) column[i] = stats[i * n_cp + c];
    percentiles[c] = percentile_nearest_rank(column, 0.95);
    ReportRow row;
    row.n = static_cast<std::int64_t>(checkpoints[c]);
    row.empirical = percentiles[c];
    row.verdict = Verdict::informational;
    report.rows.push_back(row);
  }
  std::size_t violations = 0;
  for (std::size_t c = 1; c < n_cp; ++c) {
    if (percentiles[c] > percentiles[c - 1]) ++violations;
  }
  report.verdict = violations <= 1 ? Verdict::pass : Verdict::fail;
  report.notes.push_back("percentile_violations=" + std::to_string(violations));
  return report;
}

VerificationReport normalized_max_experiment(const SeriesModel& model, double beta, int min_pow,
                                             int max_pow, std::size_t n_paths, std::uint64_t seed,
                                             const McOptions& options) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("normalized_max_experiment: beta must be finite and positive");
  }
  if (min_pow < 1 || min_pow > max_pow || max_pow > 30) {
    throw std::domain_error("normalized_max_experiment: needs 1 <= min_pow <= max_pow <= 30");
  }
  if (n_paths == 0) throw std::domain_error("normalized_max_experiment: needs at least one path");
  if (std::holds_alternative<StationaryPair>(model)) {
    throw std::domain_error(
        "normalized_max_experiment: stationary pairs are outside this check's scope");
  }

  const std::size_t length = std::size_t{1} << max_pow;
  const std::size_t n_dyadic = static_cast<std::size_t>(max_pow - min_pow) + 1;
  std::vector<double> normalizers(n_dyadic);
  for (std::size_t j = 0; j < n_dyadic; ++j) {
    normalizers[j] = lln_normalizer(std::size_t{1} << (min_pow + static_cast<int>(j)), beta);
  }

  const PathSampler sampler(model, length);
  const std::size_t n_chunks = std::min<std::size_t>(kDefaultChunks, n_paths);
  std::vector<double> maxima(n_chunks * n_dyadic, 0.0);
  run_chunked(n_paths, options.threads, n_chunks,
              [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                std::vector<double> path;
                double* mx = maxima.data() + chunk * n_dyadic;
                for (std::size_t i = begin; i < end; ++i) {
                  RngStream stream(seed, i);
                  sampler.sample(stream, path);
                  double sum = 0.0;
                  std::size_t next = 0;
                  std::size_t boundary = std::size_t{1} << min_pow;
                  for (std::size_t k = 0; k < length; ++k) {
                    sum += path[k];
                    if (k + 1 == boundary) {
                      const double v = std::abs(sum) * normalizers[next];
                      mx[next] = std::max(mx[next], v);
                      ++next;
                      boundary <<= 1;
                    }
                  }
                }
              });

  VerificationReport report;
  report.check_id = "lln_normalized_max";
  report.seed = seed;
  report.n_paths = n_paths;
  report.notes.push_back(std::string("model=") + model_class_name(model));
  std::vector<double> trace(n_dyadic, 0.0);
  for (std::size_t j = 0; j < n_dyadic; ++j) {
    for (std::size_t c = 0; c < n_chunks; ++c) trace[j] = std::max(trace[j], maxima[c * n_dyadic + j]);
    ReportRow row;
    row.n = static_cast<std::int64_t>(std::size_t{1} << (min_pow + static_cast<int>(j)));
    row.empirical = trace[j];
    row.bound_computed = 0.5;  // decision threshold on the final statistic
    row.verdict = Verdict::informational;
    report.rows.push_back(row);
  }
  std::size_t violations = 0;
  for (std::size_t j = 1; j < n_dyadic; ++j) {
    const bool in_regime = (std::size_t{1} << (min_pow + static_cast<int>(j) - 1)) >= (1u << 14);
    if (in_regime && trace[j] > trace[j - 1]) ++violations;
  }
  const bool final_ok = trace.back() < 0.5;
  report.verdict = final_ok && violations <= 1 ? Verdict::pass : Verdict::fail;
  report.notes.push_back("final_statistic=" + format_double(trace.back()));
  report.notes.push_back("late_violations=" + std::to_string(violations));
  return report;
}

VerificationReport decoupling_gap_check(const CorrelationSpec& corr, std::size_t n_max) {
  if (n_max == 0) throw std::domain_error("decoupling_gap_check: n_max must be positive");
  const double p = decoupling_coefficient(corr);
  const double two_sided = 2.0 * p - 1.0;

  VerificationReport report;
  report.check_id = "decoupling_gap";
  report.n_paths = 0;
  report.notes.push_back("p=" + format_double(p));
  std::vector<std::size_t> sizes;
  for (std::size_t n = 1; n < n_max; n *= 2) sizes.push_back(n);
  sizes.push_back(n_max);
  for (std::size_t n : sizes) {
    const Eigen::MatrixXd r = toeplitz_correlation(corr, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
    const double lambda_min = es.eigenvalues().minCoeff();
    const double lambda_max = es.eigenvalues().maxCoeff();
    if (lambda_min < -1e-10) {
      throw std::domain_error("decoupling_gap_check: correlation matrix is not PSD");
    }
    ReportRow row;
    row.n = static_cast<std::int64_t>(n);
    row.empirical = lambda_max;
    row.ci_upper = lambda_max;
    row.bound_computed = two_sided;
    row.verdict = lambda_max <= two_sided + 1e-9 ? Verdict::pass : Verdict::fail;
    report.rows.push_back(row);
    if (lambda_max > p) {
      report.notes.push_back("lambda_max=" + format_double(lambda_max) +
                             " exceeds p=" + format_double(p) + " at n=" + std::to_string(n));
    }
  }
  report.verdict = fold_verdicts(report.rows);
  return report;
}

}  // namespace subseries
