#include "subseries/young_orlicz.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subseries {

namespace {

constexpr double kExpArgCap = 700.0;  // exp(700) is finite, exp(710) is not

// Mean of phi(|x|/c) over the batch; +infinity once any term saturates.
double mean_phi(const std::vector<double>& values, double c) {
  if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : values) {
    const double t = std::abs(v) / c;
    const double t2 = t * t;
    if (t2 > kExpArgCap) return std::numeric_limits<double>::infinity();
    sum += std::expm1(t2);
  }
  return sum / static_cast<double>(values.size());
}

}  // namespace

double phi(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::domain_error("phi: argument must be finite and nonnegative");
  }
  const double x2 = x * x;
  if (x2 > kExpArgCap) return std::numeric_limits<double>::infinity();
  return std::expm1(x2);
}

double phi_inv(double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) {
    throw std::domain_error("phi_inv: argument must be finite and nonnegative");
  }
  return std::sqrt(std::log1p(y));
}

double SampleBatch::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void SampleBatch::validate() const {
  if (values.empty()) throw std::domain_error("SampleBatch: batch is empty");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::domain_error("SampleBatch: non-finite sample value");
  }
}

NormEstimate orlicz_norm_empirical(const SampleBatch& batch, double tolerance) {
  batch.validate();
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw std::domain_error("orlicz_norm_empirical: tolerance must be positive and finite");
  }
  NormEstimate est;
  est.tolerance = tolerance;
  const double max_abs = batch.max_abs();
  if (max_abs == 0.0) return est;  // degenerate all-zero batch: norm 0

  const double n = static_cast<double>(batch.count());
  double lo = max_abs / phi_inv(n);
  double hi = 2.0 * max_abs / phi_inv(1.0 / n);
  // The bracket holds by construction; tighten defensively if rounding spoiled it.
  while (mean_phi(batch.values, lo) < 1.0 && lo > max_abs * 1e-300) lo *= 0.5;
  const double cap = 1e6 * max_abs;
  while (mean_phi(batch.values, hi) > 1.0) {
    hi *= 2.0;
    if (hi > cap) {
      est.unbounded = true;
      est.value = std::numeric_limits<double>::infinity();
      est.lower_bracket = lo;
      est.upper_bracket = hi;
      return est;
    }
  }

  int iterations = 0;
  while (hi - lo > tolerance && iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    if (mean_phi(batch.values, mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }
  est.value = 0.5 * (lo + hi);
  est.lower_bracket = lo;
  est.upper_bracket = hi;
  est.iterations = iterations;
  return est;
}

double orlicz_norm_gaussian(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("orlicz_norm_gaussian: sigma must be finite and nonnegative");
  }
  return sigma * std::sqrt(8.0 / 3.0);
}

EquivalenceReport equivalence_check(double tau_value, double phi_norm, double slack) {
  if (!(tau_value >= 0.0) || !std::isfinite(tau_value)) {
    throw std::domain_error("equivalence_check: tau must be finite and nonnegative");
  }
  if (!(phi_norm >= 0.0) || !std::isfinite(phi_norm)) {
    throw std::domain_error("equivalence_check: phi norm must be finite and nonnegative");
  }
  if (!(slack >= 0.0) || !std::isfinite(slack)) {
    throw std::domain_error("equivalence_check: slack must be finite and nonnegative");
  }
  EquivalenceReport rep;
  rep.lower_side = tau_value * kPhiNormLowerFactor;
  rep.upper_side = tau_value * kPhiNormUpperFactor;
  rep.phi_norm = phi_norm;
  rep.slack = slack;
  rep.ok = rep.lower_side <= phi_norm * (1.0 + slack) && phi_norm <= rep.upper_side * (1.0 + slack);
  return rep;
}

}  // namespace subseries
