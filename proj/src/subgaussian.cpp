#include "subseries/subgaussian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subseries {

namespace {

constexpr double kExpArgCap = 700.0;

void require_finite_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(what) + " must be finite and positive");
  }
}

// One-time certification that sinh(t)/t <= exp(t^2/6) on a wide grid, which
// is the inequality behind the exact value h/sqrt(3) for UniformSym(h).
bool certify_uniform_standard() {
  for (int i = 1; i <= 5000; ++i) {
    const double t = static_cast<double>(i) * 0.01;  // (0, 50]
    const double lhs = std::log(std::sinh(t) / t);
    const double rhs = t * t / 6.0;
    if (lhs > rhs * (1.0 + 1e-12) + 1e-15) return false;
  }
  return true;
}

double empirical_mgf(const std::vector<double>& values, double t) {
  double sum = 0.0;
  for (double v : values) {
    const double e = t * v;
    if (e > kExpArgCap) return std::numeric_limits<double>::infinity();
    sum += std::exp(e);
  }
  return sum / static_cast<double>(values.size());
}

void validate_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::domain_error("t_grid must be nonempty");
  for (double t : t_grid) {
    if (!std::isfinite(t) || t == 0.0) {
      throw std::domain_error("t_grid entries must be finite and nonzero");
    }
  }
}

}  // namespace

DistributionSpec::DistributionSpec(Node node)
    : node_(std::make_shared<const Node>(std::move(node))) {}

DistributionSpec DistributionSpec::gaussian(double sigma) {
  require_finite_positive(sigma, "gaussian sigma");
  return DistributionSpec(GaussianSpec{sigma});
}

DistributionSpec DistributionSpec::rademacher() { return DistributionSpec(RademacherSpec{}); }

DistributionSpec DistributionSpec::uniform_sym(double half_width) {
  require_finite_positive(half_width, "uniform_sym half_width");
  return DistributionSpec(UniformSymSpec{half_width});
}

DistributionSpec DistributionSpec::bounded_centered(double lo, double hi, std::string density_id) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::domain_error("bounded_centered: requires finite lo < hi");
  }
  if (density_id == "uniform") {
    if (std::abs(lo + hi) > 1e-12 * (hi - lo)) {
      throw std::domain_error("bounded_centered uniform: interval must be symmetric to be centered");
    }
  } else if (density_id == "two_point") {
    if (!(lo < 0.0) || !(hi > 0.0)) {
      throw std::domain_error("bounded_centered two_point: needs lo < 0 < hi to be centered");
    }
  } else {
    throw std::domain_error("bounded_centered: unknown density_id '" + density_id + "'");
  }
  return DistributionSpec(BoundedCenteredSpec{lo, hi, std::move(density_id)});
}

DistributionSpec DistributionSpec::scaled(DistributionSpec inner, double factor) {
  if (!std::isfinite(factor) || factor == 0.0) {
    throw std::domain_error("scaled: factor must be finite and nonzero");
  }
  auto boxed = std::make_shared<const DistributionSpec>(std::move(inner));
  return DistributionSpec(ScaledSpec{std::move(boxed), factor});
}

SubgaussianStandard tau_analytic(const DistributionSpec& spec) {
  struct Visitor {
    SubgaussianStandard operator()(const GaussianSpec& g) const {
      return {g.sigma, Exactness::exact, {}};
    }
    SubgaussianStandard operator()(const RademacherSpec&) const {
      return {1.0, Exactness::exact, {}};
    }
    SubgaussianStandard operator()(const UniformSymSpec& u) const {
      static const bool certified = certify_uniform_standard();
      if (!certified) {
        throw std::logic_error("uniform_sym standard failed its numeric certification");
      }
      return {u.half_width / std::sqrt(3.0), Exactness::exact, {}};
    }
    SubgaussianStandard operator()(const BoundedCenteredSpec& b) const {
      return {0.5 * (b.hi - b.lo), Exactness::upper_bound, {}};
    }
    SubgaussianStandard operator()(const ScaledSpec& s) const {
      SubgaussianStandard inner = tau_analytic(*s.inner);
      inner.value *= std::abs(s.factor);
      return inner;
    }
  };
  return std::visit(Visitor{}, spec.node());
}

SubgaussianStandard tau_empirical(const SampleBatch& batch, const std::vector<double>& t_grid) {
  batch.validate();
  validate_grid(t_grid);
  double best = 0.0;
  for (double t : t_grid) {
    const double m = empirical_mgf(batch.values, t);
    if (std::isinf(m)) {
      best = std::numeric_limits<double>::infinity();
      break;
    }
    const double logm = std::log(m);
    if (logm > 0.0) best = std::max(best, std::sqrt(2.0 * logm) / std::abs(t));
  }
  SubgaussianStandard out;
  out.value = best;
  out.exactness = Exactness::empirical;
  out.t_grid = t_grid;
  return out;
}

std::vector<double> default_t_grid() {
  std::vector<double> grid;
  for (int k = -4; k <= 3; ++k) grid.push_back(-std::ldexp(1.0, k));
  for (int k = -4; k <= 3; ++k) grid.push_back(std::ldexp(1.0, k));
  return grid;
}

MgfDominationReport mgf_dominated(const SampleBatch& batch, double tau_value,
                                  const std::vector<double>& t_grid, double slack) {
  batch.validate();
  validate_grid(t_grid);
  if (!(tau_value >= 0.0)) throw std::domain_error("mgf_dominated: tau must be nonnegative");
  if (!(slack >= 0.0) || !std::isfinite(slack)) {
    throw std::domain_error("mgf_dominated: slack must be finite and nonnegative");
  }
  MgfDominationReport rep;
  rep.ok = true;
  for (double t : t_grid) {
    MgfDominationEntry e;
    e.t = t;
    e.empirical_mgf = empirical_mgf(batch.values, t);
    const double arg = 0.5 * tau_value * tau_value * t * t;
    e.bound = arg > kExpArgCap ? std::numeric_limits<double>::infinity() : std::exp(arg);
    e.ok = e.empirical_mgf <= e.bound * (1.0 + slack);
    rep.ok = rep.ok && e.ok;
    rep.entries.push_back(e);
  }
  return rep;
}

double tau_triangle_bound(const std::vector<double>& tau_values) {
  double sum = 0.0;
  for (double t : tau_values) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw std::domain_error("tau_triangle_bound: entries must be finite and nonnegative");
    }
    sum += t;
  }
  return sum;
}

}  // namespace subseries
