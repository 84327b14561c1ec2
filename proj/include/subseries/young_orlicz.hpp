#pragma once
// The Young function phi(x) = exp(x^2) - 1 and the associated Luxemburg
// (Orlicz) norm  ||X||_phi = inf{ c > 0 : E phi(|X|/c) <= 1 }.
//
// The empirical norm solves mean_i phi(|x_i|/c) = 1 on the sample's empirical
// measure by bisection. It is a plug-in value, biased for small batches, and
// is not presented as an unbiased estimator of the population norm.

#include <cstddef>
#include <vector>

namespace subseries {

// Frozen high-precision constants (defining expressions in comments).
inline constexpr double kGaussianPhiNormFactor = 1.6329931618554521;  // sqrt(8/3)
inline constexpr double kPhiNormLowerFactor = 0.35355339059327376;    // 1/(2 sqrt 2)
inline constexpr double kPhiNormUpperFactor = 2.1973682269356199;     // sqrt(2 + 2 sqrt 2)

// exp(x^2) - 1 for x >= 0. Arguments with x^2 > 700 map to +infinity so that
// batch means saturate instead of overflowing partway through a sum.
double phi(double x);

// Inverse on [0, inf): sqrt(log(1 + y)).
double phi_inv(double y);

struct SampleBatch {
  std::vector<double> values;

  std::size_t count() const { return values.size(); }
  double max_abs() const;
  // Throws std::domain_error if the batch is empty or contains a non-finite value.
  void validate() const;
};

struct NormEstimate {
  double value = 0.0;
  bool unbounded = false;  // bracket expansion hit the safety cap
  double lower_bracket = 0.0;
  double upper_bracket = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
};

// Bisection solve of mean phi(|x_i|/c) = 1. The initial bracket
// [max|x|/phi_inv(n), 2 max|x|/phi_inv(1/n)] provably straddles the root:
// at the lower end the mean is at least n * (1/n) = 1 via the largest sample
// alone, and at the upper end it is at most 1/n. An all-zero batch has norm 0.
NormEstimate orlicz_norm_empirical(const SampleBatch& batch, double tolerance = 1e-9);

// Closed form for a centered Gaussian with standard deviation sigma:
// E exp(X^2/c^2) = (1 - 2 sigma^2/c^2)^{-1/2} = 2  =>  c = sigma sqrt(8/3).
double orlicz_norm_gaussian(double sigma);

struct EquivalenceReport {
  bool ok = false;
  double lower_side = 0.0;  // tau / (2 sqrt 2)
  double upper_side = 0.0;  // sqrt(2 + 2 sqrt 2) * tau
  double phi_norm = 0.0;
  double slack = 0.0;
};

// Two-sided equivalence between a subgaussian standard tau and the phi-norm:
//   tau / (2 sqrt 2) <= ||X||_phi <= sqrt(2 + 2 sqrt 2) tau,
// tested with multiplicative slack (1 + slack) on each side to absorb
// sampling error when the inputs are empirical.
EquivalenceReport equivalence_check(double tau_value, double phi_norm, double slack);

}  // namespace subseries
