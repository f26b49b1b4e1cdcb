#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "swf/losses.hpp"

using namespace swf;

namespace {

const Label kPos = Label::kPositive;
const Label kNeg = Label::kNegative;

}  // namespace

TEST_CASE("l2 and 0-1 losses") {
  CHECK(l2_loss(3, 3) == 0.0);
  CHECK(l2_loss(5, 3) == 4.0);
  CHECK(l2_loss(1000, 1) == 999.0 * 999.0);
  CHECK(zero_one_loss(kPos, kPos) == 0);
  CHECK(zero_one_loss(kPos, kNeg) == 1);
  CHECK(zero_one_loss(kNeg, kNeg) == 0);
  CHECK(zero_one_loss(kNeg, kPos) == 1);
}

TEST_CASE("unbiased 0-1 estimator") {
  for (Label pred : {kPos, kNeg}) {
    for (Label y : {kPos, kNeg}) {
      CHECK(unbiased_zero_one(pred, y, 0.0) == zero_one_loss(pred, y));
    }
  }
  CHECK(unbiased_zero_one(kPos, kNeg, 0.25) == doctest::Approx(1.5));
  CHECK(unbiased_zero_one(kPos, kPos, 0.25) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(unbiased_zero_one(kPos, kPos, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(unbiased_zero_one(kPos, kPos, -0.1), std::invalid_argument);
}

TEST_CASE("unbiased estimator has the clean loss as its mean") {
  // Exact expectation over the flip channel.
  for (double rho : {0.1, 0.3, 0.45}) {
    for (Label pred : {kPos, kNeg}) {
      for (Label y : {kPos, kNeg}) {
        const double mean = (1 - rho) * unbiased_zero_one(pred, y, rho) +
                            rho * unbiased_zero_one(pred, negate(y), rho);
        CHECK(mean == doctest::Approx(zero_one_loss(pred, y)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("preference probability") {
  const std::vector<double> v{2.0, 9.0, 30.0};
  const auto w = WeightVector::uniform(3);
  CHECK(preference_prob(v, v, w, PowerParam(1.5), 10.0) == 0.5);
  CHECK(preference_prob(std::vector<double>{5, 1}, std::vector<double>{1, 5},
                        WeightVector::uniform(2), PowerParam(1), 0.0) == 0.5);
  std::vector<double> u = v;
  for (double& x : u) x *= std::exp(1.0);
  CHECK(preference_prob(u, v, w, PowerParam(1.5), 1.0) ==
        doctest::Approx(0.7310586).epsilon(1e-7));
  for (double c : {1e-3, 1.0, 1e3}) {
    std::vector<double> cu = {3.0 * c, 80.0 * c, 7.0 * c};
    std::vector<double> cv = {10.0 * c, 10.0 * c, 20.0 * c};
    std::vector<double> bu = {3.0, 80.0, 7.0};
    std::vector<double> bv = {10.0, 10.0, 20.0};
    CHECK(preference_prob(cu, cv, w, PowerParam(-2.0), 4.0) ==
          doctest::Approx(preference_prob(bu, bv, w, PowerParam(-2.0), 4.0)).epsilon(1e-12));
  }
  // Stays strictly inside (0, 1) for extreme arguments.
  const double hi = preference_prob(std::vector<double>{1000}, std::vector<double>{1},
                                    WeightVector::uniform(1), PowerParam(1), 50.0);
  CHECK(hi < 1.0);
  CHECK(hi > 0.99);
}

TEST_CASE("logistic negative log likelihood") {
  const std::vector<double> v{2.0, 9.0};
  std::vector<double> u = v;
  for (double& x : u) x *= std::exp(1.0);
  const auto w = WeightVector::uniform(2);
  CHECK(logistic_nll({u, v, kPos}, {w, PowerParam(0.5), 1.0}) ==
        doctest::Approx(0.3132617).epsilon(1e-7));
  CHECK(logistic_nll({u, v, kNeg}, {w, PowerParam(0.5), 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(logistic_nll({v, v, kNeg}, {w, PowerParam(0.5), 7.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // Bounded by tau_max * kappa + log 2 and finite at extreme margins.
  const double extreme = logistic_nll({std::vector<double>{1000.0}, std::vector<double>{1.0}, kNeg},
                                      {WeightVector::uniform(1), PowerParam(1), 50.0});
  CHECK(std::isfinite(extreme));
  CHECK(extreme <= 50.0 * std::log(1000.0) + std::log(2.0));
}

TEST_CASE("logistic gradient special cases") {
  const std::vector<double> v{4.0, 11.0, 60.0};
  const auto w = WeightVector({0.2, 0.3, 0.5});
  const auto same = grad_logistic_nll({v, v, kPos}, {w, PowerParam(1.7), 3.0});
  for (double g : same.w) CHECK(g == doctest::Approx(0.0));
  CHECK(same.p == doctest::Approx(0.0));

  const std::vector<double> u{9.0, 2.0, 80.0};
  const double delta = log_power_mean(u, w, PowerParam(1.7)) - log_power_mean(v, w, PowerParam(1.7));
  const auto g = grad_logistic_nll({u, v, kPos}, {w, PowerParam(1.7), 0.0});
  CHECK(g.tau == doctest::Approx(-delta / 2.0).epsilon(1e-12));
}

TEST_CASE("logistic and l2 gradients match central differences") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(1.0, 1000.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 2 + t % 7;
    std::vector<double> u(d), v(d);
    for (double& x : u) x = unif(rng);
    for (double& x : v) x = unif(rng);
    auto wv = oracle::simplex_point(rng, d);
    for (double& x : wv) x = 0.8 * x + 0.2 / static_cast<double>(d);
    const WeightVector w(wv);
    const double p = (t % 2 ? 1 : -1) * std::uniform_real_distribution<double>(0.1, 6.0)(rng);
    const double tau = std::uniform_real_distribution<double>(0.1, 20.0)(rng);
    const Label y = t % 3 ? kPos : kNeg;

    // Direction e_0 - e_1 keeps the weights on the simplex.
    auto shifted = [&](double h) {
      auto x = wv;
      x[0] += h;
      x[1] -= h;
      return WeightVector(x);
    };
    const auto gl = grad_logistic_nll({u, v, y}, {w, PowerParam(p), tau});
    const double fd_w = oracle::central_difference(
        [&](double h) { return logistic_nll({u, v, y}, {shifted(h), PowerParam(p), tau}); }, 0.0);
    CHECK(gl.w[0] - gl.w[1] == doctest::Approx(fd_w).epsilon(1e-5).scale(1.0));
    const double fd_p = oracle::central_difference(
        [&](double q) { return logistic_nll({u, v, y}, {w, PowerParam(q), tau}); }, p);
    CHECK(gl.p == doctest::Approx(fd_p).epsilon(1e-5).scale(1.0));
    const double fd_tau = oracle::central_difference(
        [&](double s) { return logistic_nll({u, v, y}, {w, PowerParam(p), s}); }, tau);
    CHECK(gl.tau == doctest::Approx(fd_tau).epsilon(1e-5).scale(1.0));

    const double target = power_mean(u, w, PowerParam(p)) + 25.0;
    const auto g2 = grad_l2({u, target}, {w, PowerParam(p), std::nullopt});
    const double fd2_w = oracle::central_difference(
        [&](double h) { return l2_loss(power_mean(u, shifted(h), PowerParam(p)), target); }, 0.0);
    CHECK(g2.w[0] - g2.w[1] == doctest::Approx(fd2_w).epsilon(1e-5).scale(1.0));
    const double fd2_p = oracle::central_difference(
        [&](double q) { return l2_loss(power_mean(u, w, PowerParam(q)), target); }, p);
    CHECK(g2.p == doctest::Approx(fd2_p).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("l2 gradient special cases") {
  const std::vector<double> u{3.0, 30.0};
  const auto w = WeightVector::uniform(2);
  const double m = power_mean(u, w, PowerParam(2.0));
  const auto g = grad_l2({u, m}, {w, PowerParam(2.0), std::nullopt});
  for (double x : g.w) CHECK(x == doctest::Approx(0.0).scale(1.0));
  CHECK(g.p == doctest::Approx(0.0).scale(1.0));
  const auto gc = grad_l2({std::vector<double>{6.0, 6.0}, 2.0}, {w, PowerParam(2.0), std::nullopt});
  CHECK(gc.p == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("noise validation") {
  CHECK_NOTHROW(validate_noise(LogisticNoise{10.0, 50.0}));
  CHECK_THROWS_AS(validate_noise(LogisticNoise{60.0, 50.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_noise(FlipNoise{0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate_noise(GaussianNoise{-1.0}), std::invalid_argument);
}
