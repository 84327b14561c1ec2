#include "subseries/bounds_engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "subseries/numeric.hpp"
#include "subseries/young_orlicz.hpp"

namespace subseries {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("alpha must be finite and positive");
  }
}

void require_window(std::size_t n, std::size_t m) {
  if (!(n < m)) throw std::domain_error("index window requires n < m");
}

void require_matched(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size() || a.empty()) {
    throw std::domain_error(std::string(what) + ": sequences must be nonempty and equal length");
  }
}

double l2_cross_norm(std::span<const double> a, std::span<const double> s) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!std::isfinite(a[k]) || !std::isfinite(s[k])) {
      throw std::domain_error("bound inputs must be finite");
    }
    sum += a[k] * a[k] * s[k] * s[k];
  }
  return std::sqrt(sum);
}

}  // namespace

ConstantChoice ConstantChoice::computed(double alpha) {
  require_alpha(alpha);
  return {ConstantMode::computed, alpha, chaining_constant(alpha)};
}

std::optional<ConstantChoice> ConstantChoice::paper(double alpha) {
  if (alpha == 0.5) return ConstantChoice{ConstantMode::paper, alpha, kPaperConstantHalf};
  return std::nullopt;
}

nlohmann::ordered_json BoundReport::to_json() const {
  nlohmann::ordered_json inputs_json = nlohmann::ordered_json::object();
  for (const auto& [key, value] : inputs) inputs_json[key] = value;
  return nlohmann::ordered_json{{"bound_id", bound_id},
                                {"rhs", rhs},
                                {"inputs", std::move(inputs_json)},
                                {"citation", citation},
                                {"constant_mode", constant_mode}};
}

BoundReport partial_max_bound(const WeightSequence& u, double alpha, std::size_t n, std::size_t m,
                              const ConstantChoice& constant) {
  require_alpha(alpha);
  require_window(n, m);
  const double range = u.range_sum(n, m);
  BoundReport r;
  r.bound_id = "partial_max";
  r.rhs = 8.0 * constant.value * std::pow(range, alpha);
  r.inputs = {{"alpha", alpha},
              {"n", static_cast<double>(n)},
              {"m", static_cast<double>(m)},
              {"range_sum", range},
              {"C", constant.value}};
  r.citation = "E max_{n<=i<=m} |S_i - S_n| <= 8 C(alpha) (U_m - U_n)^alpha";
  r.constant_mode = constant.mode_name();
  return r;
}

BoundReport limit_norm_bound(const WeightSequence& u, double alpha) {
  require_alpha(alpha);
  BoundReport r;
  r.bound_id = "limit_norm";
  r.rhs = std::pow(u.total(), alpha);
  r.inputs = {{"alpha", alpha}, {"total", u.total()}};
  r.citation = "||S||_phi <= (sum_k u_k)^alpha";
  r.constant_mode = "none";
  return r;
}

BoundReport subgaussian_max_bound(const WeightSequence& u, double alpha, std::size_t n,
                                  std::size_t m, const ConstantChoice& constant) {
  require_alpha(alpha);
  require_window(n, m);
  const double d = std::pow(u.range_sum(n, m), alpha);
  BoundReport r;
  r.bound_id = "subgaussian_max";
  r.rhs = 8.0 * kPhiNormUpperFactor * constant.value * d;
  r.inputs = {{"alpha", alpha},
              {"n", static_cast<double>(n)},
              {"m", static_cast<double>(m)},
              {"d_nm", d},
              {"C", constant.value}};
  r.citation = "|| max_{n<=i<=m} |S_i - S_n| ||_phi <= 8 sqrt(2+2 sqrt 2) C(alpha) d(n,m)";
  r.constant_mode = constant.mode_name();
  return r;
}

SeriesLimitBounds l1_limit_bounds(std::span<const double> a_seq, std::span<const double> tau_seq) {
  require_matched(a_seq, tau_seq, "l1_limit_bounds");
  double sum = 0.0;
  for (std::size_t k = 0; k < a_seq.size(); ++k) {
    if (!std::isfinite(a_seq[k]) || !(tau_seq[k] >= 0.0) || !std::isfinite(tau_seq[k])) {
      throw std::domain_error("l1_limit_bounds: inputs must be finite, tau nonnegative");
    }
    sum += std::abs(a_seq[k]) * tau_seq[k];
  }
  SeriesLimitBounds out;
  out.tau_limit = {"l1_tau_limit",
                   sum,
                   {{"sum_abs_a_tau", sum}},
                   "tau(S) <= sum_k |a_k| tau(X_k)",
                   "none"};
  out.phi_limit = {"l1_phi_limit",
                   kPhiNormUpperFactor * sum,
                   {{"sum_abs_a_tau", sum}},
                   "||S||_phi <= sqrt(2+2 sqrt 2) sum_k |a_k| tau(X_k)",
                   "none"};
  return out;
}

SeriesNormBounds nd_series_bounds(std::span<const double> a_seq, std::span<const double> tau_seq,
                                  const ConstantChoice& constant) {
  require_matched(a_seq, tau_seq, "nd_series_bounds");
  const double a_scale = l2_cross_norm(a_seq, tau_seq);
  SeriesNormBounds out;
  out.max_norm = {"nd_max_norm",
                  16.0 * std::sqrt(1.0 + std::sqrt(2.0)) * constant.value * a_scale,
                  {{"A", a_scale}, {"C", constant.value}},
                  "|| sup_m |S_m| ||_phi <= 16 sqrt(1+sqrt 2) C(1/2) A, A^2 = sum a_k^2 tau_k^2",
                  constant.mode_name()};
  out.tau_limit = {"nd_tau_limit",
                   std::sqrt(2.0) * a_scale,
                   {{"A", a_scale}},
                   "tau(S) <= sqrt 2 A",
                   "none"};
  out.phi_limit = {"nd_phi_limit",
                   2.0 * std::sqrt(1.0 + std::sqrt(2.0)) * a_scale,
                   {{"A", a_scale}},
                   "||S||_phi <= 2 sqrt(1+sqrt 2) A",
                   "none"};
  return out;
}

SeriesNormBounds cs_series_bounds(std::span<const double> a_seq, std::span<const double> c_seq,
                                  const ConstantChoice& constant) {
  require_matched(a_seq, c_seq, "cs_series_bounds");
  const double b_scale = l2_cross_norm(a_seq, c_seq);
  SeriesNormBounds out;
  out.max_norm = {"cs_max_norm",
                  8.0 * kPhiNormUpperFactor * constant.value * b_scale,
                  {{"B", b_scale}, {"C", constant.value}},
                  "|| sup_m |S_m| ||_phi <= 8 sqrt(2+2 sqrt 2) C(1/2) B, B^2 = sum a_k^2 c_k^2",
                  constant.mode_name()};
  out.tau_limit = {"cs_tau_limit", b_scale, {{"B", b_scale}}, "tau(S) <= B", "none"};
  out.phi_limit = {"cs_phi_limit",
                   kPhiNormUpperFactor * b_scale,
                   {{"B", b_scale}},
                   "||S||_phi <= sqrt(2+2 sqrt 2) B",
                   "none"};
  return out;
}

BoundReport stationary_pair_tau_bound(std::span<const double> a_seq,
                                      std::span<const double> b_seq, double p_g, double p_gp) {
  require_matched(a_seq, b_seq, "stationary_pair_tau_bound");
  if (!(p_g >= 1.0) || !(p_gp >= 1.0) || !std::isfinite(p_g) || !std::isfinite(p_gp)) {
    throw std::domain_error("stationary_pair_tau_bound: decoupling coefficients must be >= 1");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a_seq.size(); ++k) {
    if (!std::isfinite(a_seq[k]) || !std::isfinite(b_seq[k])) {
      throw std::domain_error("stationary_pair_tau_bound: inputs must be finite");
    }
    sum += a_seq[k] * a_seq[k] + b_seq[k] * b_seq[k];
  }
  const double p = std::max(p_g, p_gp);
  BoundReport r;
  r.bound_id = "stationary_pair_tau";
  r.rhs = std::sqrt(2.0 * p * sum);
  r.inputs = {{"p_max", p}, {"sum_a2_b2", sum}};
  r.citation = "tau(sum (a_k g_k + b_k g'_k)) <= sqrt(2 max(p,p') sum (a_k^2 + b_k^2))";
  r.constant_mode = "none";
  return r;
}

double tail_bound_nd(double t, double a_scale) {
  if (!(t >= 0.0) || !(a_scale > 0.0) || !std::isfinite(t) || !std::isfinite(a_scale)) {
    throw std::domain_error("tail_bound_nd: needs t >= 0 and a_scale > 0");
  }
  return 2.0 * std::exp(-t * t / (4.0 * a_scale * a_scale));
}

double tail_bound_cs(double t, double b_scale) {
  if (!(t >= 0.0) || !(b_scale > 0.0) || !std::isfinite(t) || !std::isfinite(b_scale)) {
    throw std::domain_error("tail_bound_cs: needs t >= 0 and b_scale > 0");
  }
  return 2.0 * std::exp(-t * t / (2.0 * b_scale * b_scale));
}

double lln_normalizer(std::size_t n, double beta) {
  if (n < 2) throw std::domain_error("lln_normalizer: defined for n >= 2");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("lln_normalizer: beta must be finite and positive");
  }
  const double ln = std::log(static_cast<double>(n));
  return 1.0 / std::sqrt(static_cast<double>(n) * std::pow(ln, 1.0 + beta));
}

TailEnvelope TailEnvelope::constant_level(double level) {
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw std::domain_error("TailEnvelope: level must be finite and nonnegative");
  }
  return {Form::constant_level, level, 0.0};
}

TailEnvelope TailEnvelope::power_decay(double coef, double rate) {
  if (!(coef >= 0.0) || !std::isfinite(coef) || !(rate > 0.0) || !std::isfinite(rate)) {
    throw std::domain_error("TailEnvelope: power decay needs coef >= 0 and rate > 0");
  }
  return {Form::power_decay, coef, rate};
}

TailEnvelope TailEnvelope::log_inverse(double coef) {
  if (!(coef >= 0.0) || !std::isfinite(coef)) {
    throw std::domain_error("TailEnvelope: coef must be finite and nonnegative");
  }
  return {Form::log_inverse, coef, 0.0};
}

SummabilityResult summability_check(std::span<const double> scales, double t, SeriesKind kind,
                                    const std::optional<TailEnvelope>& envelope) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::domain_error("summability_check: t must be finite and positive");
  }
  const double q = kind == SeriesKind::nd ? 4.0 : 2.0;
  auto term_for_scale = [&](double a) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::domain_error("summability_check: scales must be finite and nonnegative");
    }
    if (a == 0.0) return 0.0;
    return std::exp(-t * t / (q * a * a));
  };

  SummabilityResult result;
  double sum = 0.0;
  result.partial_sums.reserve(scales.size());
  for (double a : scales) {
    sum += term_for_scale(a);
    result.partial_sums.push_back(sum);
  }

  if (!envelope) {
    result.outcome = scales.empty() ? SummabilityResult::Outcome::convergent
                                    : SummabilityResult::Outcome::indeterminate;
    return result;
  }

  const TailEnvelope& env = *envelope;
  const double start = static_cast<double>(scales.size()) + 1.0;
  switch (env.form) {
    case TailEnvelope::Form::constant_level:
      if (env.coef > 0.0 && term_for_scale(env.coef) > 0.0) {
        result.outcome = SummabilityResult::Outcome::divergent;
      } else {
        result.outcome = SummabilityResult::Outcome::convergent;
      }
      return result;
    case TailEnvelope::Form::power_decay:
    case TailEnvelope::Form::log_inverse: {
      auto envelope_at = [&](double x) {
        if (env.form == TailEnvelope::Form::power_decay) {
          return env.coef * std::pow(x, -env.rate);
        }
        return x > 1.0 ? env.coef / std::log(x) : std::numeric_limits<double>::infinity();
      };
      // Terms are increasing in the scale, so bounding A_n by the envelope
      // bounds each term; the envelope decreases, so each unit step is
      // bounded by the integral one unit to the left plus the first term.
      double x0 = std::max(start, 2.0);
      double tail = term_for_scale(envelope_at(x0));
      for (int block = 0; block < 64; ++block) {
        const double x1 = 2.0 * x0;
        const double piece = adaptive_simpson(
            [&](double x) { return term_for_scale(envelope_at(x)); }, x0, x1, 1e-12);
        tail += piece;
        if (piece < 1e-16 * (1.0 + tail)) break;
        x0 = x1;
      }
      result.tail_estimate = tail;
      result.outcome = SummabilityResult::Outcome::convergent;
      return result;
    }
  }
  return result;
}

}  // namespace subseries
