#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "swf/welfare.hpp"

using namespace swf;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

WeightVector half() { return WeightVector({0.5, 0.5}); }

std::vector<double> random_u(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> unif(1.0, 1000.0);
  std::vector<double> u(d);
  for (double& x : u) x = unif(rng);
  return u;
}

}  // namespace

TEST_CASE("power mean of a constant vector is that constant") {
  const std::vector<double> u{7.5, 7.5, 7.5};
  const WeightVector w({0.2, 0.3, 0.5});
  for (double p : {-kInf, -9.0, -1.0, 0.0, 1e-9, 0.5, 3.0, kInf}) {
    CHECK(power_mean(u, w, PowerParam(p)) == doctest::Approx(7.5).epsilon(1e-14));
  }
}

TEST_CASE("power mean closed forms") {
  CHECK(power_mean(std::vector<double>{2, 4}, half(), PowerParam(1)) ==
        doctest::Approx(3.0).epsilon(1e-14));
  CHECK(power_mean(std::vector<double>{1, 4}, half(), PowerParam(0)) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(power_mean(std::vector<double>{3, 7}, WeightVector({0.9, 0.1}), PowerParam(-kInf)) == 3.0);
  CHECK(power_mean(std::vector<double>{3, 7}, WeightVector({0.9, 0.1}), PowerParam(kInf)) == 7.0);
  const std::vector<double> u{1, 2, 4};
  const auto w = WeightVector::uniform(3);
  CHECK(power_mean(u, w, PowerParam(2)) == doctest::Approx(std::sqrt(7.0)).epsilon(1e-14));
  CHECK(static_cast<double>(oracle::power_mean(u, w.vector(), 2.0L)) ==
        doctest::Approx(2.6457513).epsilon(1e-7));
}

TEST_CASE("log power mean closed forms") {
  CHECK(log_power_mean(std::vector<double>{1, 4}, half(), PowerParam(0)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(log_power_mean(std::vector<double>{2, 4}, half(), PowerParam(1)) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(log_power_mean(std::vector<double>{1, 2, 4}, WeightVector::uniform(3), PowerParam(2)) ==
        doctest::Approx(0.9729551).epsilon(1e-7));
}

TEST_CASE("log power mean agrees with the direct formula") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    const std::size_t d = 1 + t % 8;
    const auto u = random_u(rng, d);
    const auto w = oracle::simplex_point(rng, d);
    const double p = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
    const double expected = std::log(static_cast<double>(oracle::power_mean(u, w, p)));
    CHECK(log_power_mean(u, WeightVector(w), PowerParam(p)) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("extreme powers do not overflow") {
  const std::vector<double> u{1.0, 1000.0};
  const WeightVector w({0.5, 0.5});
  const double big = power_mean(u, w, PowerParam(500.0));
  const double small = power_mean(u, w, PowerParam(-500.0));
  CHECK(std::isfinite(big));
  CHECK(std::isfinite(small));
  CHECK(big == doctest::Approx(1000.0 * std::pow(0.5, 1.0 / 500.0)).epsilon(1e-12));
  CHECK(small == doctest::Approx(std::pow(0.5, -1.0 / 500.0)).epsilon(1e-12));
}

TEST_CASE("zero weights drop individuals, including in the limits") {
  const std::vector<double> u{2.0, 9.0, 5.0};
  const WeightVector w({0.5, 0.0, 0.5});
  CHECK(power_mean(u, w, PowerParam(kInf)) == 5.0);
  CHECK(power_mean(u, w, PowerParam(-kInf)) == 2.0);
  CHECK(power_mean(u, w, PowerParam(0)) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
}

TEST_CASE("near-zero powers use the geometric mean and are continuous") {
  const std::vector<double> u{3.0, 50.0, 700.0};
  const WeightVector w({0.2, 0.5, 0.3});
  const double g = power_mean(u, w, PowerParam(0));
  CHECK(power_mean(u, w, PowerParam(5e-9)) == g);
  for (double h : {1e-4, -1e-4}) {
    CHECK(std::abs(power_mean(u, w, PowerParam(h)) - g) <= 1e-3 * g);
  }
}

TEST_CASE("range, scale equivariance and monotonicity") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + t % 10;
    const auto u = random_u(rng, d);
    const WeightVector w(oracle::simplex_point(rng, d));
    const double lo = *std::min_element(u.begin(), u.end());
    const double hi = *std::max_element(u.begin(), u.end());
    double prev = -kInf;
    for (int k = 0; k < 50; ++k) {
      const double p = -10.0 + 20.0 * k / 49.0;
      const double m = power_mean(u, w, PowerParam(p));
      CHECK(m >= lo - 1e-9 * 1000.0);
      CHECK(m <= hi + 1e-9 * 1000.0);
      CHECK(m >= prev - 1e-9 * 1000.0);
      prev = m;
      std::vector<double> scaled = u;
      for (double& x : scaled) x *= 3.5;
      CHECK(power_mean(scaled, w, PowerParam(p)) == doctest::Approx(3.5 * m).epsilon(1e-9));
    }
  }
}

TEST_CASE("compare") {
  const auto w = WeightVector::uniform(2);
  CHECK(compare(std::vector<double>{1, 4}, std::vector<double>{2, 3}, w, PowerParam(2)) ==
        Label::kPositive);
  CHECK(compare(std::vector<double>{1, 4}, std::vector<double>{2, 3}, w, PowerParam(0)) ==
        Label::kNegative);
  // Ties map to +1.
  CHECK(compare(std::vector<double>{2, 3}, std::vector<double>{2, 3}, w, PowerParam(1.3)) ==
        Label::kPositive);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    auto v = random_u(rng, 4);
    auto u = v;
    for (double& x : u) x *= 1.01;
    const WeightVector wr(oracle::simplex_point(rng, 4));
    for (double p : {-kInf, -7.0, 0.0, 2.0, kInf}) {
      CHECK(compare(u, v, wr, PowerParam(p)) == Label::kPositive);
    }
  }
}

TEST_CASE("gradient in w") {
  const std::vector<double> u{5.0, 17.0, 300.0};
  const auto g0 = grad_log_power_mean_w(u, WeightVector::uniform(3), PowerParam(0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(g0[i] == doctest::Approx(std::log(u[i])));
  const auto g1 = grad_log_power_mean_w(std::vector<double>{2, 4}, half(), PowerParam(1));
  CHECK(g1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(g1[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(grad_log_power_mean_w(u, WeightVector::uniform(3), PowerParam(kInf)),
                  std::domain_error);
}

TEST_CASE("gradient in p") {
  const std::vector<double> c{4.0, 4.0};
  CHECK(grad_log_power_mean_p(c, half(), PowerParam(2.0)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(grad_log_power_mean_p(c, half(), PowerParam(1e-9)), std::domain_error);
  const std::vector<double> u{1.0, 4.0};
  const double fd = oracle::central_difference(
      [&](double p) { return std::log(static_cast<double>(oracle::power_mean(u, {0.5, 0.5}, p))); },
      1.0);
  CHECK(grad_log_power_mean_p(u, half(), PowerParam(1.0)) == doctest::Approx(fd).epsilon(1e-7));
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const auto v = random_u(rng, 1 + t % 6);
    const WeightVector w(oracle::simplex_point(rng, v.size()));
    const double p = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
    if (std::abs(p) < kNearZeroPower) continue;
    CHECK(grad_log_power_mean_p(v, w, PowerParam(p)) >= 0.0);
  }
  // The unguarded derivative tends to Var(log u) / 2 at zero.
  const double var = std::pow(std::log(4.0) / 2.0, 2.0);
  CHECK(detail::dlog_mean_dp(u, half(), 0.0) == doctest::Approx(var / 2.0).epsilon(1e-12));
  CHECK(detail::dlog_mean_dp(u, half(), 1e-5) == doctest::Approx(var / 2.0).epsilon(1e-4));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(WeightVector({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(WeightVector({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(PowerParam(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(power_mean(std::vector<double>{1, 0}, half(), PowerParam(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(power_mean(std::vector<double>{1, 2, 3}, half(), PowerParam(1)),
                  std::invalid_argument);
}
