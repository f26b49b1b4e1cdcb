#include "swf/sweep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "swf/parallel.hpp"
#include "swf/rng.hpp"

namespace swf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t label_seed(std::uint64_t master, std::string_view stage, std::size_t n,
                         double noise, int repeat) {
  const std::uint64_t base = derive_seed(master, stage, static_cast<std::uint64_t>(repeat));
  return derive_seed(derive_seed(base, "n", n), "noise", std::bit_cast<std::uint64_t>(noise));
}

NoiseSpec noise_for(const ExperimentConfig& cfg, double noise) {
  switch (cfg.task.kind) {
    case TaskKind::kCardinal:
      return GaussianNoise{noise};
    case TaskKind::kOrdinalLogistic:
      return LogisticNoise{noise, cfg.task.tau_max};
    case TaskKind::kOrdinalUnbiased:
      return FlipNoise{noise};
  }
  throw std::invalid_argument("unknown task");
}

Task task_for(const ExperimentConfig& cfg, double noise) {
  Task task = cfg.task;
  if (task.kind == TaskKind::kOrdinalUnbiased) task.rho = noise;
  return task;
}

OrdinalData ordinal_part(const ExperimentConfig& cfg, UtilityMatrix u, const GroundTruth& truth,
                         double noise, std::uint64_t pair_seed, std::uint64_t noise_seed) {
  const std::size_t k = std::min(cfg.gen.pairs_per_sample, u.rows() - 1);
  OrdinalData data;
  data.pairs = ordinal_pairs(u.rows(), k, pair_seed);
  if (cfg.task.kind == TaskKind::kOrdinalLogistic) {
    GroundTruth noisy = truth;
    noisy.tau_star = noise;
    data.y = label_logistic(u, data.pairs, noisy, noise_seed);
  } else {
    data.y = label_iid_flip(clean_labels(u, data.pairs, truth), noise, noise_seed);
  }
  data.u = std::move(u);
  return data;
}

// Mean of 1 - alpha per (d, n), averaged over repeats and noise levels.
std::map<std::size_t, std::map<std::size_t, double>> collapse_curves(
    const std::vector<MetricsRow>& rows) {
  std::map<std::size_t, std::map<std::size_t, std::pair<double, int>>> acc;
  for (const auto& r : rows) {
    if (std::isnan(r.one_minus_alpha)) throw std::invalid_argument("row without accuracy");
    auto& cell = acc[r.d][r.n];
    cell.first += r.one_minus_alpha;
    ++cell.second;
  }
  std::map<std::size_t, std::map<std::size_t, double>> out;
  for (const auto& [d, by_n] : acc) {
    for (const auto& [n, cell] : by_n) out[d][n] = cell.first / cell.second;
  }
  return out;
}

double interpolate_log(const std::vector<std::pair<double, double>>& curve, double x) {
  if (curve.size() == 1) return curve.front().second;
  auto hi = std::lower_bound(curve.begin(), curve.end(), x,
                             [](const auto& pt, double v) { return pt.first < v; });
  if (hi == curve.begin()) return hi->second;
  if (hi == curve.end()) return curve.back().second;
  const auto lo = hi - 1;
  const double t = (std::log(x) - std::log(lo->first)) / (std::log(hi->first) - std::log(lo->first));
  return lo->second + t * (hi->second - lo->second);
}

double max_spread(const std::vector<std::vector<std::pair<double, double>>>& curves,
                  int samples) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : curves) {
    lo = std::max(lo, c.front().first);
    hi = std::min(hi, c.back().first);
  }
  if (!(lo <= hi)) throw std::invalid_argument("curves share no abscissa range");
  double spread = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(s) / (samples - 1);
    const double x = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (const auto& c : curves) {
      const double y = interpolate_log(c, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
    spread = std::max(spread, y_max - y_min);
  }
  return spread;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (cfg.n_values.empty()) throw std::invalid_argument("n_values must be nonempty");
  if (cfg.noise_values.empty()) throw std::invalid_argument("noise_values must be nonempty");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  if (!std::isfinite(cfg.p_star)) throw std::invalid_argument("p_star must be finite");
  const bool ordinal = cfg.task.kind != TaskKind::kCardinal;
  for (std::size_t n : cfg.n_values) {
    if (n < (ordinal ? 2u : 1u)) throw std::invalid_argument("n too small for the task");
    if (ordinal && test_size(n, cfg.test_fraction) < 2) {
      throw std::invalid_argument("test split needs at least two actions");
    }
  }
  for (double noise : cfg.noise_values) validate_noise(noise_for(cfg, noise));
  validate(cfg.grid);
  validate(cfg.gd);
  GenConfig gen = cfg.gen;
  gen.noise = NoNoise{};
  validate(gen);
}

ExperimentConfig default_experiment(TaskKind kind) {
  ExperimentConfig cfg;
  cfg.task.kind = kind;
  if (kind != TaskKind::kCardinal) {
    cfg.grid = {-10.0, 10.0, 0.5};
    cfg.p_star = 0.9;
    cfg.noise_values = {kind == TaskKind::kOrdinalLogistic ? 10.0 : 0.1};
    cfg.n_values = {200, 500, 1000, 2000};
    cfg.gd.max_iters = 2000;
    cfg.gd.loss_range_tol = 1e-6;
  }
  return cfg;
}

std::size_t test_size(std::size_t n, double test_fraction) {
  const double m = std::round(static_cast<double>(n) * test_fraction / (1.0 - test_fraction));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

std::vector<std::size_t> split_permutation(std::uint64_t master_seed, std::size_t total) {
  std::vector<std::size_t> perm(total);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(master_seed, "split", total);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

CellData make_cell_data(const ExperimentConfig& cfg, std::size_t n, double noise, int repeat) {
  const std::size_t n_test = test_size(n, cfg.test_fraction);
  const std::size_t total = n + n_test;
  const auto rep = static_cast<std::uint64_t>(repeat);

  GenConfig gen = cfg.gen;
  gen.n = total;
  gen.noise = NoNoise{};
  gen.seed = derive_seed(cfg.master_seed, "utilities", rep);
  const UtilityMatrix all = gen_utilities(gen).u;

  GroundTruth truth{sample_weight_vector(gen.d, derive_seed(cfg.master_seed, "w_star", rep)),
                    cfg.p_star, std::nullopt};
  if (cfg.task.kind == TaskKind::kOrdinalLogistic) truth.tau_star = noise;

  const auto perm = split_permutation(cfg.master_seed, total);
  const std::span<const std::size_t> train_idx(perm.data(), n);
  const std::span<const std::size_t> test_idx(perm.data() + n, n_test);
  UtilityMatrix u_train = all.select_rows(train_idx);
  UtilityMatrix u_test = all.select_rows(test_idx);

  const std::uint64_t train_labels = label_seed(cfg.master_seed, "train_labels", n, noise, repeat);
  const std::uint64_t test_labels = label_seed(cfg.master_seed, "test_labels", n, noise, repeat);

  if (cfg.task.kind == TaskKind::kCardinal) {
    CardinalData train{std::move(u_train), {}};
    train.y = cardinal_labels(train.u, truth, noise, train_labels);
    CardinalData test{std::move(u_test), {}};
    test.y = cardinal_labels(test.u, truth, noise, test_labels);
    return {std::move(truth), std::move(train), std::move(test)};
  }
  const std::uint64_t pair_base = derive_seed(cfg.master_seed, "pairs", rep);
  OrdinalData train = ordinal_part(cfg, std::move(u_train), truth, noise,
                                   derive_seed(pair_base, "train", n), train_labels);
  OrdinalData test = ordinal_part(cfg, std::move(u_test), truth, noise,
                                  derive_seed(pair_base, "test", n), test_labels);
  return {std::move(truth), std::move(train), std::move(test)};
}

MetricsRow run_cell(const ExperimentConfig& cfg, std::size_t n, double noise, int repeat) {
  const CellData cell = make_cell_data(cfg, n, noise, repeat);
  const Task task = task_for(cfg, noise);
  const std::uint64_t fit_seed = label_seed(cfg.master_seed, "fit", n, noise, repeat);
  const FitReport fitted = fit(cell.train, cfg.grid, task, cfg.gd, fit_seed, {1});
  const EvaluationReport ev = evaluate(fitted.params, task, cell.test, cell.truth);

  MetricsRow row;
  row.n = n;
  row.d = cfg.gen.d;
  row.noise = noise;
  row.repeat = repeat;
  row.train_loss = fitted.train_loss;
  row.test_loss = ev.model.loss;
  row.noiseless_test_loss = ev.model.noiseless_loss;
  row.kl_weights = ev.kl;
  row.test_accuracy = ev.model.accuracy;
  row.noiseless_test_accuracy = ev.model.noiseless_accuracy;
  row.p_hat = fitted.params.p.value();
  row.tau_hat = fitted.params.tau.value_or(kNaN);
  row.p_star = cell.truth.p_star;
  row.tau_star = cell.truth.tau_star.value_or(kNaN);
  row.truth_test_loss = ev.truth.loss;
  row.truth_noiseless_test_loss = ev.truth.noiseless_loss;
  row.truth_test_accuracy = ev.truth.accuracy;
  row.truth_noiseless_test_accuracy = ev.truth.noiseless_accuracy;
  row.eta = collapse_eta(static_cast<double>(n), static_cast<double>(cfg.gen.d));
  row.one_minus_alpha = 1.0 - ev.model.noiseless_accuracy;
  return row;
}

std::vector<MetricsRow> run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  struct Cell {
    std::size_t n;
    double noise;
    int repeat;
  };
  std::vector<Cell> cells;
  for (std::size_t n : cfg.n_values) {
    for (double noise : cfg.noise_values) {
      for (int r = 0; r < cfg.repeats; ++r) cells.push_back({n, noise, r});
    }
  }
  std::vector<MetricsRow> rows(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    rows[i] = run_cell(cfg, cells[i].n, cells[i].noise, cells[i].repeat);
  });
  return rows;
}

CollapseSummary collapse_spread(const std::vector<MetricsRow>& rows, int samples) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const auto curves = collapse_curves(rows);
  if (curves.size() < 2) throw std::invalid_argument("collapse needs at least two values of d");
  std::vector<std::vector<std::pair<double, double>>> by_n;
  std::vector<std::vector<std::pair<double, double>>> by_eta;
  for (const auto& [d, points] : curves) {
    auto& cn = by_n.emplace_back();
    auto& ce = by_eta.emplace_back();
    for (const auto& [n, y] : points) {
      cn.emplace_back(static_cast<double>(n), y);
      ce.emplace_back(collapse_eta(static_cast<double>(n), static_cast<double>(d)), y);
    }
  }
  return {max_spread(by_n, samples), max_spread(by_eta, samples)};
}

}  // namespace swf
