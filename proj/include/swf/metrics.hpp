#pragma once

#include <cstddef>

#include "swf/datagen.hpp"
#include "swf/learner.hpp"

namespace swf {

// One sweep cell. Quantities that do not apply to a task are NaN (accuracy
// for cardinal data, tau for non-logistic tasks, eta when d or n is 1).
struct MetricsRow {
  std::size_t n = 0;
  std::size_t d = 0;
  double noise = 0.0;
  int repeat = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double noiseless_test_loss = 0.0;
  double kl_weights = 0.0;
  double test_accuracy = 0.0;
  double noiseless_test_accuracy = 0.0;
  double p_hat = 0.0;
  double tau_hat = 0.0;
  double p_star = 0.0;
  double tau_star = 0.0;
  // The same metrics at the true parameters.
  double truth_test_loss = 0.0;
  double truth_noiseless_test_loss = 0.0;
  double truth_test_accuracy = 0.0;
  double truth_noiseless_test_accuracy = 0.0;
  double eta = 0.0;
  double one_minus_alpha = 0.0;
};

// Bitwise comparison, so NaN fields compare equal to themselves.
bool identical(const MetricsRow& a, const MetricsRow& b);

// KL(w* || w_hat) with w_hat clamped below at 1e-12 and 0 log 0 = 0.
double kl_weights(const WeightVector& w_star, const WeightVector& w_hat);

// sqrt(n / (d ln n ln d)); NaN when n < 2 or d < 2.
double collapse_eta(double n, double d);

struct Evaluation {
  double loss = 0.0;             // against the noisy labels
  double noiseless_loss = 0.0;   // against labels regenerated from the truth
  double accuracy = 0.0;         // NaN for cardinal data
  double noiseless_accuracy = 0.0;
};

struct EvaluationReport {
  Evaluation model;
  Evaluation truth;
  double kl = 0.0;
};

// Metrics of `params` on held-out data. For the unbiased task the noisy loss
// is the unbiased estimator and the noiseless loss is the plain 0-1 loss.
Evaluation evaluate_params(const ModelParams& params, const Task& task, const Dataset& test,
                           const GroundTruth& truth);

// Learned and true parameters side by side. The truth uses tau_star, or
// task.tau_max when the data carry no temperature.
EvaluationReport evaluate(const ModelParams& model, const Task& task, const Dataset& test,
                          const GroundTruth& truth);

}  // namespace swf
