#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "swf/datagen.hpp"
#include "swf/learner.hpp"
#include "swf/metrics.hpp"

using namespace swf;

namespace {

double l2_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

bool on_simplex(std::span<const double> w) {
  double sum = 0.0;
  for (double x : w) {
    if (x < 0.0) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= 1e-9;
}

Dataset cardinal_dataset(std::size_t n, std::size_t d, double p, std::uint64_t seed) {
  GenConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.seed = seed;
  cfg.noise = GaussianNoise{0.0};
  const auto gt = make_ground_truth(cfg, p, std::nullopt);
  return generate_cardinal(cfg, gt);
}

Dataset logistic_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  GenConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.seed = seed;
  cfg.noise = LogisticNoise{10.0, 50.0};
  const auto gt = make_ground_truth(cfg, 0.9, 10.0);
  return generate_ordinal(cfg, gt);
}

}  // namespace

TEST_CASE("projection examples") {
  CHECK(project_simplex(std::vector<double>{2, 0, 0}).vector() == std::vector<double>{1, 0, 0});
  const auto p = project_simplex(std::vector<double>{0.9, 0.6});
  CHECK(p[0] == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.35).epsilon(1e-12));
  const std::vector<double> inside{0.1, 0.2, 0.7};
  CHECK(l2_distance(project_simplex(inside).values(), inside) <= 1e-15);
  CHECK(project_simplex(std::vector<double>{-4.0}).vector() == std::vector<double>{1.0});
}

TEST_CASE("projection matches the support-enumeration oracle") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int t = 0; t < 300; ++t) {
    const std::size_t d = 1 + t % 6;
    std::vector<double> v(d);
    for (double& x : v) x = gauss(rng);
    const auto got = project_simplex(v);
    const auto want = oracle::project_simplex(v);
    CHECK(l2_distance(got.values(), want) <= 1e-9);
  }
}

TEST_CASE("start points") {
  CHECK(start_points(1) == std::vector<std::vector<double>>{{1.0}});
  const auto s = start_points(4);
  REQUIRE(s.size() == 5);
  for (const auto& x : s) CHECK(on_simplex(x));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::max_element(s[i].begin(), s[i].end()) - s[i].begin() == static_cast<long>(i));
  }
  for (double x : s[4]) CHECK(x == 0.25);
}

TEST_CASE("grid points") {
  const auto g = grid_points({-3.5, 3.5, 0.1});
  CHECK(g.size() == 71);
  CHECK(g.front() == -3.5);
  CHECK(g.back() == 3.5);
  CHECK(std::find(g.begin(), g.end(), 2.7) != g.end());
  CHECK(grid_points({1.0, 1.0, 0.5}) == std::vector<double>{1.0});
  CHECK_THROWS_AS(grid_points({1.0, 0.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(grid_points({0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("descent steps are bounded by lr and stay on the simplex") {
  GDConfig gd;
  gd.max_iters = 300;
  const Dataset card = cardinal_dataset(200, 4, 1.5, 3);
  const Dataset logi = logistic_dataset(60, 4, 3);
  for (const auto& [data, task] :
       {std::pair{card, Task::cardinal()}, std::pair{logi, Task::ordinal_logistic(50.0)}}) {
    for (const auto& start : start_points(4)) {
      DescentTrace trace;
      const auto fitted = descend_from(data, 1.5, task, gd, start, 0, &trace);
      REQUIRE(!trace.steps.empty());
      for (const auto& s : trace.steps) {
        CHECK(l2_distance(s.to, s.from) <= s.lr + 1e-12);
        CHECK(on_simplex(s.to));
      }
      CHECK(on_simplex(fitted.w.values()));
    }
  }
}

TEST_CASE("fixed-p fit dominates every start and the truth") {
  GenConfig cfg;
  cfg.n = 300;
  cfg.d = 3;
  cfg.seed = 21;
  cfg.noise = GaussianNoise{0.0};
  const auto gt = make_ground_truth(cfg, 1.5, std::nullopt);
  const Dataset data = generate_cardinal(cfg, gt);
  const auto fitted = fit_weights_fixed_p(data, 1.5, Task::cardinal(), {}, 0);
  CHECK(fitted.starts_used == 4);
  for (const auto& s : start_points(3)) {
    CHECK(fitted.loss <=
          empirical_risk(data, {WeightVector(s), PowerParam(1.5), std::nullopt}, Task::cardinal()));
  }
  CHECK(fitted.loss <=
        empirical_risk(data, {gt.w_star, PowerParam(1.5), std::nullopt}, Task::cardinal()) + 1e-8);
}

TEST_CASE("one individual forces w = (1)") {
  const Dataset data = cardinal_dataset(50, 1, 2.0, 1);
  const auto fitted = fit_weights_fixed_p(data, 2.0, Task::cardinal(), {}, 0);
  CHECK(fitted.w.vector() == std::vector<double>{1.0});
  CHECK(fitted.loss == doctest::Approx(0.0).scale(1.0));
  const Dataset logi = logistic_dataset(60, 1, 4);
  const auto lf = fit_weights_fixed_p(logi, 0.9, Task::ordinal_logistic(50.0), {}, 0);
  CHECK(lf.w.vector() == std::vector<double>{1.0});
  REQUIRE(lf.tau.has_value());
  CHECK(*lf.tau >= 0.0);
  CHECK(*lf.tau <= 50.0);
}

TEST_CASE("cardinal recovery on the grid") {
  GenConfig cfg;
  cfg.n = 400;
  cfg.d = 3;
  cfg.seed = 5;
  cfg.noise = GaussianNoise{0.0};
  const auto gt = make_ground_truth(cfg, 1.5, std::nullopt);
  const Dataset data = generate_cardinal(cfg, gt);
  const auto report = fit(data, {0.5, 2.5, 0.5}, Task::cardinal(), {}, 0, {1});
  CHECK(report.params.p.value() == 1.5);
  CHECK(kl_weights(gt.w_star, report.params.w) < 1e-3);
  REQUIRE(report.per_grid_losses.size() == 5);
  double best = report.per_grid_losses.front().loss;
  for (const auto& g : report.per_grid_losses) best = std::min(best, g.loss);
  CHECK(report.train_loss == best);
}

TEST_CASE("grid ties prefer smaller |p|, then smaller p") {
  // Constant rows make every power mean identical, so every grid point ties.
  CardinalData flat{UtilityMatrix(20, 3, 6.0), std::vector<double>(20, 6.0)};
  const auto a = fit(Dataset{flat}, {-1.0, 1.0, 0.5}, Task::cardinal(), {}, 0, {1});
  CHECK(a.params.p.value() == 0.0);
  const auto b = fit(Dataset{flat}, {-1.5, 1.5, 1.0}, Task::cardinal(), {}, 0, {1});
  CHECK(b.params.p.value() == -0.5);
}

TEST_CASE("fits do not depend on the thread count") {
  const Dataset data = logistic_dataset(50, 3, 9);
  const GridConfig grid{-1.0, 1.0, 0.5};
  GDConfig gd;
  gd.max_iters = 200;
  const auto one = fit(data, grid, Task::ordinal_logistic(50.0), gd, 4, {1});
  const auto three = fit(data, grid, Task::ordinal_logistic(50.0), gd, 4, {3});
  CHECK(one.params.w == three.params.w);
  CHECK(one.params.p.value() == three.params.p.value());
  CHECK(one.params.tau == three.params.tau);
  CHECK(one.train_loss == three.train_loss);
  CHECK(one.iterations == three.iterations);
}

TEST_CASE("unbiased task fits and reports a feasible model") {
  GenConfig cfg;
  cfg.n = 60;
  cfg.d = 3;
  cfg.seed = 2;
  cfg.noise = FlipNoise{0.1};
  const auto gt = make_ground_truth(cfg, 0.9, std::nullopt);
  const Dataset data = generate_ordinal(cfg, gt);
  GDConfig gd;
  gd.max_iters = 200;
  const auto report = fit(data, {0.0, 1.0, 0.5}, Task::ordinal_unbiased(0.1), gd, 0, {1});
  CHECK(on_simplex(report.params.w.values()));
  CHECK_FALSE(report.params.tau.has_value());
  CHECK(report.train_loss ==
        doctest::Approx(empirical_risk(data, report.params, Task::ordinal_unbiased(0.1))));
}

TEST_CASE("learner input errors") {
  const Dataset card = cardinal_dataset(10, 2, 1.0, 0);
  const Dataset logi = logistic_dataset(20, 2, 0);
  CHECK_THROWS_AS(fit_weights_fixed_p(card, 1.0, Task::ordinal_logistic(50.0), {}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_weights_fixed_p(logi, 1.0, Task::cardinal(), {}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_weights_fixed_p(Dataset{CardinalData{}}, 1.0, Task::cardinal(), {}, 0),
                  std::invalid_argument);
  GDConfig bad;
  bad.patience = bad.max_iters + 1;
  CHECK_THROWS_AS(fit_weights_fixed_p(card, 1.0, Task::cardinal(), bad, 0),
                  std::invalid_argument);
  CHECK(parse_task(task_name(TaskKind::kOrdinalUnbiased)) == TaskKind::kOrdinalUnbiased);
  CHECK_THROWS_AS(parse_task("nope"), std::invalid_argument);
}
