#pragma once

// Empirical risk minimization over weighted power means: a grid search over p
// and, at every grid point, multi-start projected gradient descent over the
// weights (and the temperature for logistic comparisons).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "swf/dataset.hpp"
#include "swf/welfare.hpp"

namespace swf {

struct GridConfig {
  double p_lower = -3.5;
  double p_upper = 3.5;
  double step = 0.1;
};

void validate(const GridConfig& grid);

// Grid points p_lower + k * step, k = 0..K, snapped to 1e-12 so that e.g.
// 2.7 is represented as the literal 2.7.
std::vector<double> grid_points(const GridConfig& grid);

struct GDConfig {
  double initial_lr = 0.1;
  int max_iters = 10000;
  int patience = 100;  // iterations without improvement before halving lr
  double min_lr = 1e-8;
  int loss_window = 50;
  double loss_range_tol = 1e-10;  // relative to the starting loss
  bool clip_by_lr = true;  // steps of length lr; otherwise lr * direction
};

void validate(const GDConfig& gd);

enum class TaskKind { kCardinal, kOrdinalLogistic, kOrdinalUnbiased };

struct Task {
  TaskKind kind = TaskKind::kCardinal;
  double tau_max = 50.0;  // logistic only
  double rho = 0.0;       // unbiased only

  static Task cardinal() { return {}; }
  static Task ordinal_logistic(double tau_max) {
    return {TaskKind::kOrdinalLogistic, tau_max, 0.0};
  }
  static Task ordinal_unbiased(double rho) {
    return {TaskKind::kOrdinalUnbiased, 50.0, rho};
  }
};

std::string task_name(TaskKind kind);
TaskKind parse_task(const std::string& name);

using Dataset = std::variant<CardinalData, OrdinalData>;

std::size_t dimension(const Dataset& data);

// Euclidean projection onto the probability simplex (sort-based).
WeightVector project_simplex(std::span<const double> v);

struct GridPointResult {
  double p = 0.0;
  double loss = 0.0;
  std::vector<double> w;
  std::optional<double> tau;
};

struct FixedPowerFit {
  WeightVector w;
  std::optional<double> tau;
  double loss = 0.0;
  int starts_used = 0;
  int iterations = 0;
};

// Best endpoint over the d + 1 starts (near-vertex points and the centroid).
FixedPowerFit fit_weights_fixed_p(const Dataset& data, double p, const Task& task,
                                  const GDConfig& gd, std::uint64_t seed);

struct FitReport {
  ModelParams params{WeightVector::uniform(1), PowerParam(0.0), std::nullopt};
  TaskKind task = TaskKind::kCardinal;
  double train_loss = 0.0;
  std::vector<GridPointResult> per_grid_losses;
  int starts_used = 0;
  int iterations = 0;
};

struct FitOptions {
  // Worker threads for grid points; 0 picks hardware concurrency. Results do
  // not depend on this value.
  unsigned threads = 0;
};

FitReport fit(const Dataset& data, const GridConfig& grid, const Task& task,
              const GDConfig& gd, std::uint64_t seed, const FitOptions& opts = {});

// Mean task loss. For kOrdinalUnbiased this is the mean of the unbiased
// estimator and may be negative.
double empirical_risk(const Dataset& data, const ModelParams& params, const Task& task);

// Start points used by fit_weights_fixed_p.
std::vector<std::vector<double>> start_points(std::size_t d);

// Trace of one descent run, for inspecting step-size and feasibility
// guarantees.
struct DescentStep {
  std::vector<double> from;
  std::vector<double> to;
  double lr = 0.0;  // learning rate in force for this step
  double loss = 0.0;  // loss at `to`
};

struct DescentTrace {
  std::vector<DescentStep> steps;
};

// Runs the descent from a single start at fixed p and records every iterate.
FixedPowerFit descend_from(const Dataset& data, double p, const Task& task,
                           const GDConfig& gd, std::span<const double> start,
                           std::uint64_t seed, DescentTrace* trace = nullptr);

}  // namespace swf
