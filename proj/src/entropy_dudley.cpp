#include "subseries/entropy_dudley.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "subseries/numeric.hpp"

namespace subseries {

WeightSequence::WeightSequence(std::vector<double> weights) : weights_(std::move(weights)) {
  cumulative_.reserve(weights_.size() + 1);
  cumulative_.push_back(0.0);
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::domain_error("WeightSequence: weights must be finite and nonnegative");
    }
    cumulative_.push_back(cumulative_.back() + w);
  }
}

double WeightSequence::weight(std::size_t k) const {
  if (k == 0) throw std::domain_error("WeightSequence: weights are 1-based");
  return k <= weights_.size() ? weights_[k - 1] : 0.0;
}

double WeightSequence::cumulative(std::size_t n) const {
  if (cumulative_.empty()) return 0.0;
  return n < cumulative_.size() ? cumulative_[n] : cumulative_.back();
}

double WeightSequence::total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

double WeightSequence::range_sum(std::size_t n, std::size_t m) const {
  if (n > m) throw std::domain_error("WeightSequence::range_sum: needs n <= m");
  return cumulative(m) - cumulative(n);
}

AlphaMetric::AlphaMetric(WeightSequence w, double a) : weights(std::move(w)), alpha(a) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("AlphaMetric: alpha must be finite and positive");
  }
}

double AlphaMetric::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const std::size_t lo = i < j ? i : j;
  const std::size_t hi = i < j ? j : i;
  return std::pow(weights.range_sum(lo, hi), alpha);
}

CoveringResult covering_number(const AlphaMetric& metric, double epsilon, std::size_t max_index) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::domain_error("covering_number: epsilon must be finite and positive");
  }
  // Embedded points U_0 <= U_1 <= ... <= U_max; d(i, j) = |U_i - U_j|^alpha,
  // so the open epsilon-ball around center c spans (U_c - r, U_c + r) with
  // r = epsilon^(1/alpha). Greedy: walk left to right, pick as center the
  // rightmost point within strict distance r of the first uncovered point,
  // then skip everything the ball covers.
  const double radius = std::pow(epsilon, 1.0 / metric.alpha);
  CoveringResult result;
  result.epsilon = epsilon;
  std::size_t i = 0;
  while (i <= max_index) {
    const double anchor = metric.weights.cumulative(i);
    std::size_t center = i;
    while (center + 1 <= max_index && metric.weights.cumulative(center + 1) - anchor < radius) {
      ++center;
    }
    result.centers.push_back(center);
    const double reach = metric.weights.cumulative(center);
    std::size_t next = center + 1;
    while (next <= max_index && metric.weights.cumulative(next) - reach < radius) ++next;
    i = next;
  }
  result.count = result.centers.size();
  return result;
}

double covering_bound(double total_weight, double alpha, double epsilon) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("covering_bound: alpha must be finite and positive");
  }
  if (!(total_weight > 0.0) || !std::isfinite(total_weight)) {
    throw std::domain_error("covering_bound: total weight must be finite and positive");
  }
  if (!(epsilon > 0.0) || !(epsilon < std::pow(total_weight, alpha))) {
    throw std::domain_error("covering_bound: epsilon must lie in (0, total^alpha)");
  }
  return 2.0 * total_weight * std::pow(epsilon, -1.0 / alpha);
}

DudleyResult dudley_integral(const std::function<double(double)>& covering_count, double diam,
                             const QuadratureControl& control) {
  if (!(diam >= 0.0) || !std::isfinite(diam)) {
    throw std::domain_error("dudley_integral: diameter must be finite and nonnegative");
  }
  if (!(control.rel_tol > 0.0) || control.initial_cells == 0 ||
      control.max_levels < control.min_levels) {
    throw std::domain_error("dudley_integral: invalid quadrature control");
  }
  DudleyResult result;
  if (diam == 0.0) {
    result.converged = true;
    return result;
  }
  auto integrand = [&](double eps) {
    const double count = covering_count(eps);
    if (!(count >= 0.0)) {
      throw std::domain_error("dudley_integral: covering count must be nonnegative");
    }
    return std::sqrt(std::log1p(count));
  };

  double previous = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> increments;
  std::size_t cells = control.initial_cells;
  for (int level = 0; level <= control.max_levels; ++level, cells *= 2) {
    const double h = diam / static_cast<double>(cells);
    double sum = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      sum += integrand((static_cast<double>(c) + 0.5) * h);
    }
    const double value = sum * h;
    result.evaluations += cells;
    result.levels = level + 1;
    if (!std::isfinite(value)) {
      // The covering count blew up on a set of positive measure; the
      // integral has no finite value.
      result.value = std::numeric_limits<double>::infinity();
      result.divergent = true;
      return result;
    }
    if (!std::isnan(previous)) {
      const double delta = std::abs(value - previous);
      if (level >= control.min_levels && delta <= control.rel_tol * std::max(std::abs(value), 1e-300)) {
        result.value = value;
        result.converged = true;
        return result;
      }
      increments.push_back(value - previous);
    }
    previous = value;
  }
  result.value = previous;
  // Not converged. Call it divergent when the last refinements kept adding
  // mass without decay (constant or growing increments); a decaying-but-slow
  // sequence is left unconverged without the divergence flag.
  const std::size_t k = increments.size();
  if (k >= 3) {
    const double a = increments[k - 3];
    const double b = increments[k - 2];
    const double c = increments[k - 1];
    result.divergent = a > 0.0 && b > 0.0 && c > 0.0 && b >= 0.9 * a && c >= 0.9 * b;
  }
  return result;
}

double chaining_constant_closed(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("chaining_constant: alpha must be finite and positive");
  }
  const double a = std::sqrt(alpha * std::log(3.0));
  // int_a^inf x^2 e^{-x^2} dx = (a/2) e^{-a^2} + (sqrt(pi)/4) erfc(a)
  const double integral = 0.5 * a * std::exp(-a * a) + 0.25 * std::sqrt(M_PI) * std::erfc(a);
  return std::exp2(2.0 * alpha + 2.0) / std::sqrt(alpha) * integral;
}

double chaining_constant_quadrature(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("chaining_constant: alpha must be finite and positive");
  }
  const double a = std::sqrt(alpha * std::log(3.0));
  // Beyond x = max(a + 6, 8) the integrand is below e^{-64}; truncation is
  // far inside the 1e-8 agreement budget.
  const double b = std::max(a + 6.0, 8.0);
  const double integral = adaptive_simpson(
      [](double x) { return x * x * std::exp(-x * x); }, a, b, 1e-13);
  return std::exp2(2.0 * alpha + 2.0) / std::sqrt(alpha) * integral;
}

double chaining_constant(double alpha) {
  const double closed = chaining_constant_closed(alpha);
  const double quad = chaining_constant_quadrature(alpha);
  if (std::abs(closed - quad) > 1e-8 * std::max(1.0, std::abs(closed))) {
    throw std::runtime_error("chaining_constant: evaluation routes disagree");
  }
  return closed;
}

double chaining_constant_upper(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("chaining_constant_upper: alpha must be finite and positive");
  }
  const double log3 = std::log(3.0);
  return std::sqrt(2.0 / alpha) * (std::pow(4.0 / 3.0, alpha) * std::sqrt(2.0 * alpha * log3) +
                                   std::pow(4.0, alpha) * std::sqrt(M_PI / 2.0));
}

}  // namespace subseries
