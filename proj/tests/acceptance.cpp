// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 only
// when every selected criterion passes.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "swf/analysis.hpp"
#include "swf/datagen.hpp"
#include "swf/io.hpp"
#include "swf/learner.hpp"
#include "swf/metrics.hpp"
#include "swf/rng.hpp"
#include "swf/sweep.hpp"
#include "swf/verify.hpp"

using namespace swf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string summary;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0 means no runtime limit
  std::function<Outcome()> run;
};

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

Outcome from_check(const CheckResult& c) {
  return {c.passed, c.name + " worst " + fmt("%.3g", c.worst) + " (tol " + fmt("%.3g", c.tolerance) +
                        ") over " + std::to_string(c.cases) + " cases"};
}

double nearest_grid_point(const GridConfig& grid, double p) {
  const auto pts = grid_points(grid);
  return *std::min_element(pts.begin(), pts.end(), [&](double a, double b) {
    return std::abs(a - p) < std::abs(b - p);
  });
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const MetricsRow& find_row(const std::vector<MetricsRow>& rows, std::size_t n, double noise,
                           int repeat) {
  for (const auto& r : rows) {
    if (r.n == n && r.noise == noise && r.repeat == repeat) return r;
  }
  throw std::runtime_error("missing sweep cell");
}

struct Settings {
  std::uint64_t seed = 0;
  fs::path out_dir = "acceptance_out";
};

Outcome projection_oracle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = 1 + static_cast<std::size_t>(t % 6);
    std::vector<double> v(d);
    for (double& x : v) x = gauss(rng);
    const auto got = project_simplex(v);
    const auto want = oracle::project_simplex(v);
    double dist = 0.0;
    for (std::size_t i = 0; i < d; ++i) dist += (got[i] - want[i]) * (got[i] - want[i]);
    worst = std::max(worst, std::sqrt(dist));
  }
  return {worst <= 1e-9, "max l2 distance to the support-enumeration oracle " + fmt("%.3g", worst) +
                             " (tol 1e-9) over 500 vectors"};
}

Outcome bound_calculator() {
  const double x = xi(1.0, 1000.0);
  const double k = kappa(1.0, 1000.0);
  BoundQuery q;
  q.theorem = Theorem::kT2a;
  q.n = 1000;
  q.d = 5;
  q.delta = 0.05;
  const double t2a = bound_value(q);
  const auto lattice = check_bound_monotonicity();
  const bool ok = x == 999000.0 && std::abs(k - 6.907755) <= 1e-5 &&
                  std::abs(t2a - 3.6123) <= 1e-3 && lattice.passed;
  return {ok, "xi " + fmt("%.10g", x) + ", kappa " + fmt("%.8f", k) + ", T2a " + fmt("%.6f", t2a) +
                  ", lattice violations " + fmt("%.0f", lattice.worst)};
}

Outcome cardinal_recovery(const Settings& s) {
  ExperimentConfig cfg = default_experiment(TaskKind::kCardinal);
  cfg.gen.d = 5;
  cfg.n_values = {2000};
  cfg.noise_values = {0.0};
  cfg.repeats = 3;
  cfg.p_star = 2.72;
  cfg.master_seed = s.seed;
  const auto rows = run_sweep(cfg);
  write_metrics_csv(s.out_dir / "cardinal_recovery.csv", rows);
  const double target = nearest_grid_point(cfg.grid, cfg.p_star);
  int good = 0;
  std::string detail;
  for (const auto& r : rows) {
    const bool ok = r.p_hat == target && r.kl_weights < 1e-3;
    good += ok;
    detail += " [p_hat " + fmt("%g", r.p_hat) + ", KL " + fmt("%.3g", r.kl_weights) + "]";
  }
  return {good >= 2, std::to_string(good) + "/3 seeds hit grid point " + fmt("%g", target) +
                         " with KL < 1e-3:" + detail};
}

Outcome logistic_trends(const Settings& s) {
  ExperimentConfig cfg = default_experiment(TaskKind::kOrdinalLogistic);
  cfg.gen.d = 5;
  cfg.n_values = {200, 2000};
  cfg.noise_values = {1.0, 10.0};
  cfg.repeats = 3;
  cfg.master_seed = s.seed;
  const auto rows = run_sweep(cfg);
  write_metrics_csv(s.out_dir / "logistic_trends.csv", rows);
  bool ok = true;
  std::string detail;
  for (double tau : cfg.noise_values) {
    int improved = 0;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      const double small = find_row(rows, 200, tau, rep).noiseless_test_accuracy;
      const double large = find_row(rows, 2000, tau, rep).noiseless_test_accuracy;
      improved += large >= small;
    }
    ok = ok && improved >= 2;
    detail += "tau* " + fmt("%g", tau) + ": n=2000 >= n=200 in " + std::to_string(improved) + "/3; ";
  }
  double mean = 0.0;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    mean += find_row(rows, 2000, 10.0, rep).noiseless_test_accuracy / cfg.repeats;
  }
  ok = ok && mean >= 0.90;
  detail += "mean noiseless accuracy at tau* 10, n=2000: " + fmt("%.4f", mean) + " (need >= 0.90)";
  return {ok, detail};
}

Outcome label_proportion(const Settings& s) {
  double lo = 1.0, hi = 0.0, sum = 0.0;
  int corpora = 0;
  for (std::size_t d : {3, 5, 8}) {
    for (std::size_t n : {200, 2000}) {
      for (std::uint64_t rep = 0; rep < 3; ++rep) {
        GenConfig gen;
        gen.d = d;
        gen.n = n;
        gen.seed = derive_seed(s.seed, "label_proportion", rep * 1000 + d * 10 + (n > 200));
        gen.noise = LogisticNoise{10.0, 50.0};
        const GroundTruth truth = make_ground_truth(gen, 0.9, 10.0);
        const OrdinalData data = generate_ordinal(gen, truth);
        const auto clean = clean_labels(data.u, data.pairs, truth);
        double agree = 0.0;
        for (std::size_t k = 0; k < clean.size(); ++k) agree += data.y[k] == clean[k];
        const double frac = agree / static_cast<double>(clean.size());
        lo = std::min(lo, frac);
        hi = std::max(hi, frac);
        sum += frac;
        ++corpora;
      }
    }
  }
  const bool ok = lo >= 0.60 && hi <= 0.90;
  return {ok, "correct-label proportion over " + std::to_string(corpora) + " corpora: mean " +
                  fmt("%.3f", sum / corpora) + ", min " + fmt("%.3f", lo) + ", max " +
                  fmt("%.3f", hi) + " (need all in [0.60, 0.90])"};
}

Outcome scaling_collapse(const Settings& s) {
  std::vector<MetricsRow> all;
  for (std::size_t d : {3, 5, 8}) {
    ExperimentConfig cfg = default_experiment(TaskKind::kOrdinalLogistic);
    cfg.gen.d = d;
    // A grid that contains p* and larger test sets keep the resolution floor
    // and the test sampling noise below the differences being measured.
    cfg.grid = {-3.5, 3.5, 0.2};
    cfg.test_fraction = 0.5;
    cfg.n_values = {50, 100, 200, 400, 800, 1600};
    cfg.noise_values = {10.0};
    cfg.repeats = 3;
    cfg.master_seed = s.seed;
    const auto rows = run_sweep(cfg);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  write_metrics_csv(s.out_dir / "scaling_collapse.csv", all);
  const auto c = collapse_spread(all);
  return {c.reduction() >= 2.0, "max spread vs n " + fmt("%.4f", c.spread_vs_n) + ", vs eta " +
                                    fmt("%.4f", c.spread_vs_eta) + ", reduction " +
                                    fmt("%.2f", c.reduction()) + "x (need >= 2)"};
}

Outcome determinism(const Settings& s) {
  // Small sweeps of every task, run serially, repeated, and run with four
  // workers; the CSV bytes must agree.
  std::vector<std::string> mismatches;
  for (TaskKind kind : {TaskKind::kCardinal, TaskKind::kOrdinalLogistic, TaskKind::kOrdinalUnbiased}) {
    ExperimentConfig cfg = default_experiment(kind);
    cfg.gen.d = 3;
    cfg.grid = {-2.0, 2.0, 1.0};
    cfg.gd.max_iters = 300;
    cfg.n_values = {40, 80};
    cfg.noise_values = kind == TaskKind::kCardinal         ? std::vector<double>{0.0, 0.1}
                       : kind == TaskKind::kOrdinalLogistic ? std::vector<double>{1.0, 10.0}
                                                            : std::vector<double>{0.1, 0.3};
    cfg.repeats = 2;
    cfg.master_seed = s.seed;
    std::vector<std::string> bytes;
    for (unsigned threads : {1u, 1u, 4u}) {
      cfg.threads = threads;
      const fs::path path = s.out_dir / ("determinism_" + task_name(kind) + "_t" +
                                         std::to_string(threads) + "_" +
                                         std::to_string(bytes.size()) + ".csv");
      write_metrics_csv(path, run_sweep(cfg));
      bytes.push_back(slurp(path));
    }
    if (bytes[0] != bytes[1] || bytes[0] != bytes[2]) mismatches.push_back(task_name(kind));
  }
  std::string detail = "metrics CSVs for 3 tasks, 8 cells each, across reruns and 1 vs 4 workers: ";
  detail += mismatches.empty() ? "bit-identical" : "differ for";
  for (const auto& m : mismatches) detail += " " + m;
  return {mismatches.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Settings settings;
  std::vector<int> only;
  app.add_option("--seed", settings.seed, "Master seed")->capture_default_str();
  app.add_option("--out-dir", settings.out_dir, "Where sweep tables are written")
      ->capture_default_str();
  app.add_option("--only", only, "Run only these criterion numbers");
  CLI11_PARSE(app, argc, argv);

  const std::uint64_t seed = settings.seed;
  const std::vector<Criterion> criteria{
      {1, "monotonicity suite", 10, [&] { return from_check(check_monotonicity(1000, seed)); }},
      {2, "gradient suite", 10, [&] { return from_check(check_gradients(200, seed)); }},
      {3, "projection oracle", 5, [&] { return projection_oracle(seed); }},
      {4, "root-count bounds", 60, [&] { return from_check(check_root_counts(500, seed)); }},
      {5, "quasiconvexity probes", 30, [&] { return from_check(check_quasiconvexity(1000, seed)); }},
      {6, "unbiased estimator", 5, [&] { return from_check(check_unbiased_estimator(100000, seed)); }},
      {7, "bound calculator", 1, [] { return bound_calculator(); }},
      {8, "cardinal recovery", 300, [&] { return cardinal_recovery(settings); }},
      {9, "logistic ordinal trends", 1200, [&] { return logistic_trends(settings); }},
      {10, "noisy-label proportion", 0, [&] { return label_proportion(settings); }},
      {11, "scaling collapse", 1800, [&] { return scaling_collapse(settings); }},
      {12, "determinism", 0, [&] { return determinism(settings); }},
  };

  try {
    fs::create_directories(settings.out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  int passed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0 || secs <= c.budget_s;
    const bool ok = out.passed && in_time;
    passed += ok;
    std::string timing = fmt("%.1f s", secs);
    if (c.budget_s > 0) timing += " of " + fmt("%g s", c.budget_s);
    std::printf("[%s] %2d %s: %s (%s)\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.summary.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d criteria passed\n", passed, ran);
  return passed == ran ? 0 : 1;
}
