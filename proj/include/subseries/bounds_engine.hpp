#pragma once
// Closed-form right-hand sides for the maximal/limit/tail inequalities the
// Monte Carlo suite stresses. Every bound is returned as a BoundReport that
// names the inequality, carries the numeric inputs, and records which
// chaining-constant mode produced it, so report files are self-describing.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "subseries/entropy_dudley.hpp"

namespace subseries {

enum class ConstantMode { computed, paper };

// A pinned value of the chaining constant C(alpha). "computed" evaluates the
// cross-checked closed form; "paper" is the alternative reference value,
// available only at alpha = 1/2.
struct ConstantChoice {
  ConstantMode mode = ConstantMode::computed;
  double alpha = 0.5;
  double value = 0.0;

  static ConstantChoice computed(double alpha);
  static std::optional<ConstantChoice> paper(double alpha);
  const char* mode_name() const { return mode == ConstantMode::computed ? "computed" : "paper"; }
};

struct BoundReport {
  std::string bound_id;
  double rhs = 0.0;
  std::vector<std::pair<std::string, double>> inputs;
  std::string citation;       // human-readable statement of the inequality
  std::string constant_mode;  // "computed" | "paper" | "none"

  nlohmann::ordered_json to_json() const;
};

// Expected maximum of weighted partial sums over the index window (n, m]
// under the metric d(i, j) = (sum of u over (i, j])^alpha:
//   E max_{n <= i <= m} |S_i - S_n| <= 8 C(alpha) (U_m - U_n)^alpha.
BoundReport partial_max_bound(const WeightSequence& u, double alpha, std::size_t n, std::size_t m,
                              const ConstantChoice& constant);

// phi-norm of the almost-sure limit: ||S||_phi <= (total u)^alpha when the
// increment condition behind partial_max_bound holds with constant scale.
BoundReport limit_norm_bound(const WeightSequence& u, double alpha);

// Same window maximum measured in the phi-norm for subgaussian increments:
//   || max_{n <= i <= m} |S_i - S_n| ||_phi <= 8 sqrt(2 + 2 sqrt 2) C(alpha) d(n, m).
BoundReport subgaussian_max_bound(const WeightSequence& u, double alpha, std::size_t n,
                                  std::size_t m, const ConstantChoice& constant);

struct SeriesLimitBounds {
  BoundReport tau_limit;  // tau(S) <= sum |a_k| tau_k
  BoundReport phi_limit;  // ||S||_phi <= sqrt(2 + 2 sqrt 2) sum |a_k| tau_k
};

// l1 route: absolute summability of a_k tau_k controls the limit directly.
SeriesLimitBounds l1_limit_bounds(std::span<const double> a_seq, std::span<const double> tau_seq);

struct SeriesNormBounds {
  BoundReport max_norm;   // || sup_m |S_m| ||_phi
  BoundReport tau_limit;  // tau(S)
  BoundReport phi_limit;  // ||S||_phi
};

// l2 route for negatively correlated Gaussian coordinates, with
// A = sqrt(sum a_k^2 tau_k^2):
//   || sup |S_m| ||_phi <= 16 sqrt(1 + sqrt 2) C(1/2) A,
//   tau(S) <= sqrt 2 A,   ||S||_phi <= 2 sqrt(1 + sqrt 2) A.
SeriesNormBounds nd_series_bounds(std::span<const double> a_seq, std::span<const double> tau_seq,
                                  const ConstantChoice& constant);

// l2 route for conditionally subgaussian martingale differences, with
// B = sqrt(sum a_k^2 c_k^2):
//   || sup |S_m| ||_phi <= 8 sqrt(2 + 2 sqrt 2) C(1/2) B,
//   tau(S) <= B,          ||S||_phi <= sqrt(2 + 2 sqrt 2) B.
SeriesNormBounds cs_series_bounds(std::span<const double> a_seq, std::span<const double> c_seq,
                                  const ConstantChoice& constant);

// Stationary-pair partial sums T = sum over (n, m] of (a_k g_k + b_k g'_k):
//   tau(T) <= sqrt(2 max(p, p') sum (a_k^2 + b_k^2))
// with p, p' the decoupling coefficients of the two stationary processes.
BoundReport stationary_pair_tau_bound(std::span<const double> a_seq,
                                      std::span<const double> b_seq, double p_g, double p_gp);

// Tail estimates for the weighted limit T:
//   ND route: P(|T| >= t) <= 2 exp(-t^2 / (4 A^2))
//   CS route: P(|T| >= t) <= 2 exp(-t^2 / (2 B^2))
double tail_bound_nd(double t, double a_scale);
double tail_bound_cs(double t, double b_scale);

// Normalizer (n log^(1+beta) n)^(-1/2) under which max partial sums of a
// uniformly subgaussian sequence vanish almost surely; defined for n >= 2.
double lln_normalizer(std::size_t n, double beta);

enum class SeriesKind { nd, cs };

struct TailEnvelope {
  enum class Form { constant_level, power_decay, log_inverse };
  Form form = Form::constant_level;
  double coef = 1.0;
  double rate = 1.0;

  // A_n = level for all n.
  static TailEnvelope constant_level(double level);
  // A_n <= coef * n^(-rate), rate > 0.
  static TailEnvelope power_decay(double coef, double rate);
  // A_n <= coef / log n  (n >= 2).
  static TailEnvelope log_inverse(double coef);
};

struct SummabilityResult {
  enum class Outcome { convergent, divergent, indeterminate };
  Outcome outcome = Outcome::indeterminate;
  std::vector<double> partial_sums;  // trace over the explicit prefix
  double tail_estimate = 0.0;        // numeric estimate of the mass beyond the prefix
};

// Convergence of sum_n exp(-t^2 / (q A_n^2)) with q = 4 (ND route) or q = 2
// (CS route): the explicit prefix of scales A_n is summed directly, and the
// optional envelope settles the tail. Without an envelope the outcome is
// indeterminate (convergent only for an empty prefix, where the sum is 0).
SummabilityResult summability_check(std::span<const double> scales, double t, SeriesKind kind,
                                    const std::optional<TailEnvelope>& envelope);

}  // namespace subseries
