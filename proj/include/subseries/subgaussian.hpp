#pragma once
// Subgaussian standards. For a centered random variable X,
//   tau(X) = inf{ c >= 0 : E exp(tX) <= exp(c^2 t^2 / 2) for all real t }.
// The module supplies analytic values for standard marginal families, a
// grid-based empirical estimate from samples, and mgf domination checks.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "subseries/young_orlicz.hpp"

namespace subseries {

struct GaussianSpec {
  double sigma = 1.0;
};

struct RademacherSpec {};

struct UniformSymSpec {
  double half_width = 1.0;
};

// Mean-zero law supported on [lo, hi]; density_id selects the concrete law
// ("uniform" needs a symmetric interval, "two_point" puts mass at lo and hi
// with the weights that center it).
struct BoundedCenteredSpec {
  double lo = -1.0;
  double hi = 1.0;
  std::string density_id = "uniform";
};

class DistributionSpec;

struct ScaledSpec {
  std::shared_ptr<const DistributionSpec> inner;
  double factor = 1.0;
};

class DistributionSpec {
 public:
  using Node = std::variant<GaussianSpec, RademacherSpec, UniformSymSpec, BoundedCenteredSpec,
                            ScaledSpec>;

  static DistributionSpec gaussian(double sigma);
  static DistributionSpec rademacher();
  static DistributionSpec uniform_sym(double half_width);
  static DistributionSpec bounded_centered(double lo, double hi, std::string density_id);
  static DistributionSpec scaled(DistributionSpec inner, double factor);

  const Node& node() const { return *node_; }

 private:
  explicit DistributionSpec(Node node);
  std::shared_ptr<const Node> node_;
};

enum class Exactness { exact, upper_bound, empirical };

struct SubgaussianStandard {
  double value = 0.0;
  Exactness exactness = Exactness::exact;
  std::vector<double> t_grid;  // populated for empirical estimates
};

// Analytic standards:
//   Gaussian(sigma)        -> sigma                       (exact)
//   Rademacher             -> 1                           (exact)
//   UniformSym(h)          -> h / sqrt(3)                 (exact; certified once
//                             numerically via sinh(t)/t <= exp(t^2/6))
//   BoundedCentered(lo,hi) -> (hi - lo) / 2               (upper bound)
//   Scaled(inner, f)       -> |f| * tau(inner), inner's exactness
SubgaussianStandard tau_analytic(const DistributionSpec& spec);

// Grid estimate: sup over the grid of sqrt(2 log mhat(t)) / |t| with
// mhat(t) the empirical mgf. A lower bound in spirit (finite grid), tagged
// Exactness::empirical.
SubgaussianStandard tau_empirical(const SampleBatch& batch, const std::vector<double>& t_grid);

// Default grid {-8,...,-1/16, 1/16,...,8}: signed powers of two.
std::vector<double> default_t_grid();

struct MgfDominationEntry {
  double t = 0.0;
  double empirical_mgf = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct MgfDominationReport {
  bool ok = false;
  std::vector<MgfDominationEntry> entries;
};

// Checks mhat(t) <= exp(tau^2 t^2 / 2) * (1 + slack) on each grid point.
MgfDominationReport mgf_dominated(const SampleBatch& batch, double tau_value,
                                  const std::vector<double>& t_grid, double slack);

// Triangle bound tau(sum X_k) <= sum tau(X_k); tau is subadditive under
// arbitrary dependence (Hoelder on the mgf), so this holds for any joint law.
double tau_triangle_bound(const std::vector<double>& tau_values);

}  // namespace subseries
