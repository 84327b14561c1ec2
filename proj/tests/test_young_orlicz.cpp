#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "subseries/young_orlicz.hpp"
#include "test_util.hpp"

namespace subseries {
namespace {

TEST_CASE("phi and phi_inv match their closed forms and invert each other") {
  CHECK(phi(0.0) == 0.0);
  CHECK(phi(1.0) == doctest::Approx(1.718281828459045).epsilon(1e-15));
  CHECK(phi_inv(0.0) == 0.0);
  CHECK(phi_inv(1.0) == doctest::Approx(0.8325546111576977).epsilon(1e-15));
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    CHECK(phi_inv(phi(x)) == doctest::Approx(x).epsilon(1e-12));
  }
  CHECK(std::isinf(phi(27.0)));  // saturation region
  CHECK_THROWS_AS(phi(-1.0), std::domain_error);
  CHECK_THROWS_AS(phi_inv(-0.5), std::domain_error);
}

TEST_CASE("a constant batch has norm value/phi_inv(1)") {
  SampleBatch ones{std::vector<double>(32, 1.0)};
  const NormEstimate est = orlicz_norm_empirical(ones, 1e-9);
  CHECK(est.value == doctest::Approx(1.2011224087864498).epsilon(1e-6));  // 1/sqrt(log 2)
  CHECK_FALSE(est.unbounded);
  CHECK(est.lower_bracket <= est.value);
  CHECK(est.value <= est.upper_bracket);
  CHECK(est.upper_bracket - est.lower_bracket <= 1e-9);
}

TEST_CASE("large Gaussian batches land near sigma sqrt(8/3)") {
  const SampleBatch batch{testutil::gaussian_batch(100000, 1.0, 20240811)};
  const NormEstimate est = orlicz_norm_empirical(batch);
  CHECK(est.value == doctest::Approx(kGaussianPhiNormFactor).epsilon(0.02));
  CHECK(orlicz_norm_gaussian(1.0) == doctest::Approx(1.6329931618554521).epsilon(1e-15));
  CHECK(orlicz_norm_gaussian(2.5) == doctest::Approx(2.5 * 1.6329931618554521).epsilon(1e-15));
  CHECK(orlicz_norm_gaussian(0.0) == 0.0);
  CHECK_THROWS_AS(orlicz_norm_gaussian(-1.0), std::domain_error);
}

TEST_CASE("norm is homogeneous and brackets always trap the root") {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    RngStream rng(99, trial);
    const std::size_t count = 2 + static_cast<std::size_t>(rng.next_u64() % 64);
    std::vector<double> values(count);
    for (auto& v : values) v = 3.0 * rng.next_gaussian();
    values[0] = 1.0;  // guarantees a nonzero batch
    const SampleBatch batch{values};
    const NormEstimate base = orlicz_norm_empirical(batch);
    REQUIRE_FALSE(base.unbounded);
    CHECK(base.lower_bracket <= base.value);
    CHECK(base.value <= base.upper_bracket);
    CHECK(base.upper_bracket - base.lower_bracket <= base.tolerance);

    const double c = 0.25 + rng.next_unit() * 4.0;
    std::vector<double> scaled(values);
    for (auto& v : scaled) v *= c;
    const NormEstimate rescaled = orlicz_norm_empirical(SampleBatch{scaled});
    CHECK(rescaled.value == doctest::Approx(c * base.value).epsilon(1e-6));
  }
}

TEST_CASE("degenerate and invalid batches") {
  CHECK(orlicz_norm_empirical(SampleBatch{{0.0, 0.0, 0.0}}).value == 0.0);
  CHECK_THROWS_AS(orlicz_norm_empirical(SampleBatch{{}}), std::domain_error);
  CHECK_THROWS_AS(orlicz_norm_empirical(SampleBatch{{1.0, std::nan("")}}), std::domain_error);
  CHECK_THROWS_AS(orlicz_norm_empirical(SampleBatch{{1.0}}, 0.0), std::domain_error);
}

TEST_CASE("norm equivalence window around the subgaussian standard") {
  // Exact pairs: Gaussian (tau = 1, norm = sqrt(8/3)) and Rademacher
  // (tau = 1, norm = 1/sqrt(log 2)) sit inside the window without slack.
  CHECK(equivalence_check(1.0, 1.6329931618554521, 0.0).ok);
  CHECK(equivalence_check(1.0, 1.2011224087864498, 0.0).ok);
  // Degenerate zero variable.
  CHECK(equivalence_check(0.0, 0.0, 0.0).ok);
  // Violations on each side.
  CHECK_FALSE(equivalence_check(1.0, 0.2, 0.0).ok);   // below tau/(2 sqrt 2)
  CHECK_FALSE(equivalence_check(1.0, 2.3, 0.0).ok);   // above sqrt(2+2 sqrt 2) tau
  // Slack absorbs a near miss.
  CHECK(equivalence_check(1.0, 2.25, 0.05).ok);
  const EquivalenceReport rep = equivalence_check(2.0, 1.0, 0.0);
  CHECK(rep.lower_side == doctest::Approx(2.0 * 0.35355339059327376).epsilon(1e-15));
  CHECK(rep.upper_side == doctest::Approx(2.0 * 2.1973682269356199).epsilon(1e-15));
  CHECK_THROWS_AS(equivalence_check(-1.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(equivalence_check(1.0, -1.0, 0.0), std::domain_error);
}

}  // namespace
}  // namespace subseries
