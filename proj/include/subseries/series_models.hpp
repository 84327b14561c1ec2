#pragma once
// Samplers for finite prefixes X_1..X_n of the dependence classes the
// verification suite exercises:
//
//   IndependentSeq       independent draws from per-index marginal specs
//   NDGaussianSeq        centered Gaussian vector with negatively correlated
//                        coordinates (PSD covariance, off-diagonal <= 0)
//   CondSubgaussianSeq   martingale differences X_k = H_{k-1} Z_k with
//                        |H_{k-1}| <= c_k, H predictable, Z_k iid N(0,1)
//   StationaryPair       X_k = a_k g_k + b_k g'_k for two coupled stationary
//                        Gaussian sequences with a shared correlation shape
//   ItoIncrements        Euler increments dM_k = H_{t_{k-1}} dB_k of a
//                        martingale with |H| <= K
//
// Every sampler draws from a caller-supplied RngStream only, in a fixed
// documented order, so paths are reproducible from (seed, stream_index).

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "subseries/rng.hpp"
#include "subseries/subgaussian.hpp"

namespace subseries {

// Stationary correlation shapes r(h) for lag h >= 0 (r(0) = 1).
struct Ar1Corr {
  double rho = 0.0;  // |rho| < 1
};
struct FiniteLagsCorr {
  std::vector<double> rho;  // rho[0] = 1, rho[h] for lag h, zero beyond
};
using CorrelationSpec = std::variant<Ar1Corr, FiniteLagsCorr>;

double correlation_at(const CorrelationSpec& corr, std::size_t lag);

// Sum of absolute correlations over all lags (lag 0 included):
// AR(1) -> 1/(1-|rho|) in closed form, finite lags -> plain sum.
double decoupling_coefficient(const CorrelationSpec& corr);

Eigen::MatrixXd toeplitz_correlation(const CorrelationSpec& corr, std::size_t n);

struct IndependentSeq {
  // One spec broadcasts to every index; otherwise specs[k-1] drives X_k.
  std::vector<DistributionSpec> specs;
};

struct NDGaussianSeq {
  Eigen::MatrixXd covariance;
};

struct CondSubgaussianSeq {
  std::vector<double> c_seq;  // one entry broadcasts
  std::string driver_id = "constant";  // "constant" | "sine"
};

struct StationaryPair {
  CorrelationSpec corr{Ar1Corr{0.0}};
  double coupling = 0.0;  // |coupling| <= 1: g'_k = coupling g_k + sqrt(1-c^2) w_k
  std::vector<double> a_seq{1.0};  // one entry broadcasts
  std::vector<double> b_seq{0.0};
};

struct ItoIncrements {
  std::string h_spec = "constant";  // "constant" | "clamped_sine" | "sign"
  double cap_k = 1.0;               // |H| <= K
  double dt = 1.0;
};

using SeriesModel =
    std::variant<IndependentSeq, NDGaussianSeq, CondSubgaussianSeq, StationaryPair, ItoIncrements>;

const char* model_class_name(const SeriesModel& model);

struct NdValidation {
  bool ok = false;
  double min_eigenvalue = 0.0;
  double max_offdiag = 0.0;
  std::string message;
};

// Symmetry is a hard precondition (throws); PSD within -1e-10 on the smallest
// eigenvalue and nonpositive off-diagonal entries are reported.
NdValidation validate_nd_covariance(const Eigen::MatrixXd& covariance);

// Exact sampler for a stationary Gaussian vector with the given correlation
// shape (unit variance), via a dense Cholesky factor computed once.
class StationaryGaussianSampler {
 public:
  StationaryGaussianSampler(const CorrelationSpec& corr, std::size_t n);
  std::size_t length() const { return static_cast<std::size_t>(factor_.rows()); }
  void sample(RngStream& stream, std::vector<double>& out) const;

 private:
  Eigen::MatrixXd factor_;
};

struct ItoPath {
  std::vector<double> increments;
  std::vector<double> h_values;  // integrand evaluated at the left endpoint
};

// Euler scheme on a grid with step dt: dB_k ~ N(0, dt) iid, H evaluated at
// the left endpoint from the path state (M = running sum of increments,
// B = running Brownian value):
//   constant      H = K
//   clamped_sine  H = K sin(M)
//   sign          H = K sign(B)   (sign(0) = 1)
ItoPath ito_increments_detailed(const std::string& h_spec, double cap_k, double dt, std::size_t n,
                                RngStream& stream);
std::vector<double> ito_increments(const std::string& h_spec, double cap_k, double dt,
                                   std::size_t n, RngStream& stream);

// Per-path sampler for a fixed model and length. Validation and any matrix
// factorization happen once in the constructor; sample() is then cheap and
// reusable across many paths.
class PathSampler {
 public:
  PathSampler(SeriesModel model, std::size_t n);

  std::size_t length() const { return n_; }
  const SeriesModel& model() const { return model_; }

  void sample(RngStream& stream, std::vector<double>& out) const;
  std::vector<double> sample(RngStream& stream) const;

  // Per-index scale s_k such that the partial sum over (n, m] of outer
  // weights a has subgaussian standard at most sqrt(sum a_k^2 s_k^2)
  // (ND Gaussian: for outer weights of a common sign, where negative
  // correlation only helps): tau_k for independent coordinates,
  // sqrt(cov_kk) for ND Gaussian ones,
  // c_k for conditionally subgaussian drivers, K sqrt(dt) for Euler
  // increments, sqrt(2 max(p, p') (a_k^2 + b_k^2)) for a stationary pair.
  std::vector<double> index_scales() const;

 private:
  void prepare();

  SeriesModel model_;
  std::size_t n_ = 0;
  std::vector<double> expanded_a_, expanded_b_, expanded_c_;
  Eigen::MatrixXd factor_;         // ND Gaussian or stationary-process factor
  bool driver_sine_ = false;       // CondSubgaussianSeq driver
  int ito_rule_ = 0;               // 0 constant, 1 clamped_sine, 2 sign
};

std::vector<double> sample_path(const SeriesModel& model, std::size_t n, RngStream& stream);

// Componentwise product a_k x_k; lengths must match exactly.
std::vector<double> weighted(const std::vector<double>& path, const std::vector<double>& weights);

}  // namespace subseries
