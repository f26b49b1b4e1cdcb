#pragma once

// Experiment sweeps over (n, noise level, repeat) cells.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "swf/datagen.hpp"
#include "swf/learner.hpp"
#include "swf/metrics.hpp"

namespace swf {

// The noise axis is nu for the cardinal task, tau* for the logistic task and
// the flip rate rho for the unbiased task (which the learner is told).
struct ExperimentConfig {
  GenConfig gen;  // n, noise and seed are set per cell
  GridConfig grid;
  GDConfig gd;
  Task task;
  std::vector<std::size_t> n_values{1000};
  std::vector<double> noise_values{0.0};
  int repeats = 3;
  double test_fraction = 0.2;
  std::uint64_t master_seed = 0;
  double p_star = 2.72;
  unsigned threads = 0;  // cells run concurrently; output does not depend on it
};

void validate(const ExperimentConfig& cfg);

// Defaults per task. Ordinal tasks search p over [-10, 10] in steps of 0.5
// with p* = 0.9 and a descent budget of 2000 iterations.
ExperimentConfig default_experiment(TaskKind kind);

// Number of held-out actions accompanying n training actions.
std::size_t test_size(std::size_t n, double test_fraction);

// Permutation of the action indices [0, total) that splits training from test
// actions. Depends only on (master_seed, total), never on the repeat.
std::vector<std::size_t> split_permutation(std::uint64_t master_seed, std::size_t total);

struct CellData {
  GroundTruth truth;
  Dataset train;
  Dataset test;
};

// Data for one cell. Utilities and w* depend on (master_seed, repeat) only;
// labels additionally on n and the noise level.
CellData make_cell_data(const ExperimentConfig& cfg, std::size_t n, double noise, int repeat);

MetricsRow run_cell(const ExperimentConfig& cfg, std::size_t n, double noise, int repeat);

// Rows ordered by n, then noise, then repeat.
std::vector<MetricsRow> run_sweep(const ExperimentConfig& cfg);

// Spread between curves of 1 - alpha, one curve per d, each averaged over
// repeats and noise levels. Curves are linearly interpolated in log x over the
// abscissa range they all cover, sampled at `samples` log-spaced points.
struct CollapseSummary {
  double spread_vs_n = 0.0;
  double spread_vs_eta = 0.0;
  double reduction() const { return spread_vs_n / spread_vs_eta; }
};

CollapseSummary collapse_spread(const std::vector<MetricsRow>& rows, int samples = 200);

}  // namespace swf
