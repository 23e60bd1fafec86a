#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "classrbm/numerics.hpp"

using classrbm::all_finite;
using classrbm::log_sum_exp;
using classrbm::sigmoid;
using classrbm::softplus;

TEST_CASE("sigmoid midpoint and symmetry") {
  CHECK(sigmoid(0.0) == 0.5);
  for (double t : {0.1, 1.0, 3.7, 12.0}) {
    CHECK(sigmoid(t) + sigmoid(-t) == Catch::Approx(1.0).margin(1e-15));
  }
}

TEST_CASE("sigmoid saturates cleanly at extreme arguments") {
  CHECK(sigmoid(30.0) > 1.0 - 1e-12);
  CHECK(sigmoid(-30.0) < 1e-12);
  CHECK(sigmoid(-30.0) > 0.0);

  // Far beyond exp overflow range: still finite, still inside [0, 1].
  for (double t : {800.0, -800.0, 1e300, -1e300}) {
    const double v = sigmoid(t);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) == 0.0);
}

TEST_CASE("softplus small-argument values") {
  CHECK(softplus(0.0) == Catch::Approx(std::log(2.0)).margin(1e-15));
  for (double t : {-3.0, -0.5, 0.25, 2.0}) {
    CHECK(softplus(t) == Catch::Approx(std::log(1.0 + std::exp(t))).margin(1e-14));
  }
}

TEST_CASE("softplus extreme arguments") {
  CHECK(softplus(1000.0) == 1000.0);
  const double tiny = softplus(-1000.0);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-300);
  CHECK(std::isfinite(softplus(700.0)));
  CHECK(std::isfinite(softplus(-700.0)));
}

TEST_CASE("softplus difference identity") {
  // softplus(t) - softplus(-t) = t for all t.
  for (double t : {0.0, 0.3, -1.7, 5.0, -12.0, 25.0}) {
    CHECK(softplus(t) - softplus(-t) == Catch::Approx(t).margin(1e-12));
  }
}

TEST_CASE("log_sum_exp basic values") {
  const std::vector<double> pair{0.0, 0.0};
  CHECK(log_sum_exp(pair) == Catch::Approx(std::log(2.0)).margin(1e-15));

  const std::vector<double> single{-3.25};
  CHECK(log_sum_exp(single) == Catch::Approx(-3.25).margin(1e-15));

  const std::vector<double> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big) == Catch::Approx(1000.0 + std::log(2.0)).margin(1e-12));
}

TEST_CASE("log_sum_exp shift invariance") {
  const std::vector<double> base{0.4, -1.2, 2.7, 0.0};
  const double reference = log_sum_exp(base);
  for (double shift : {5.0, -40.0, 300.0}) {
    std::vector<double> shifted = base;
    for (double& v : shifted) v += shift;
    CHECK(log_sum_exp(shifted) == Catch::Approx(reference + shift).margin(1e-10));
  }
}

TEST_CASE("log_sum_exp empty input") {
  const std::vector<double> empty;
  CHECK(log_sum_exp(empty) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("all_finite flags non-finite entries") {
  const std::vector<double> good{0.0, -1e300, 1e300, 5e-324};
  CHECK(all_finite(good));

  const std::vector<double> with_nan{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_FALSE(all_finite(with_nan));

  const std::vector<double> with_inf{1.0, std::numeric_limits<double>::infinity()};
  CHECK_FALSE(all_finite(with_inf));

  const std::vector<double> with_ninf{-std::numeric_limits<double>::infinity()};
  CHECK_FALSE(all_finite(with_ninf));
}
