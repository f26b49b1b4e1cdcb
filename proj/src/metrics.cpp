#include "swf/metrics.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kKlFloor = 1e-12;

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

double nll(const OrdinalData& o, std::span<const Label> labels, const ModelParams& params) {
  double acc = 0.0;
  for (std::size_t k = 0; k < o.pairs.size(); ++k) {
    acc += logistic_nll({o.u.row(o.pairs[k].u), o.u.row(o.pairs[k].v), labels[k]}, params);
  }
  return acc / static_cast<double>(o.pairs.size());
}

}  // namespace

bool identical(const MetricsRow& a, const MetricsRow& b) {
  return a.n == b.n && a.d == b.d && a.repeat == b.repeat && same_bits(a.noise, b.noise) &&
         same_bits(a.train_loss, b.train_loss) && same_bits(a.test_loss, b.test_loss) &&
         same_bits(a.noiseless_test_loss, b.noiseless_test_loss) &&
         same_bits(a.kl_weights, b.kl_weights) && same_bits(a.test_accuracy, b.test_accuracy) &&
         same_bits(a.noiseless_test_accuracy, b.noiseless_test_accuracy) &&
         same_bits(a.p_hat, b.p_hat) && same_bits(a.tau_hat, b.tau_hat) &&
         same_bits(a.p_star, b.p_star) && same_bits(a.tau_star, b.tau_star) &&
         same_bits(a.truth_test_loss, b.truth_test_loss) &&
         same_bits(a.truth_noiseless_test_loss, b.truth_noiseless_test_loss) &&
         same_bits(a.truth_test_accuracy, b.truth_test_accuracy) &&
         same_bits(a.truth_noiseless_test_accuracy, b.truth_noiseless_test_accuracy) &&
         same_bits(a.eta, b.eta) && same_bits(a.one_minus_alpha, b.one_minus_alpha);
}

double kl_weights(const WeightVector& w_star, const WeightVector& w_hat) {
  if (w_star.size() != w_hat.size()) throw std::invalid_argument("dimension mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < w_star.size(); ++i) {
    if (w_star[i] == 0.0) continue;
    kl += w_star[i] * std::log(w_star[i] / std::max(w_hat[i], kKlFloor));
  }
  // Rounding can leave a tiny negative value when the vectors agree.
  return std::max(kl, 0.0);
}

double collapse_eta(double n, double d) {
  if (n < 2.0 || d < 2.0) return kNaN;
  return std::sqrt(n / (d * std::log(n) * std::log(d)));
}

Evaluation evaluate_params(const ModelParams& params, const Task& task, const Dataset& test,
                           const GroundTruth& truth) {
  const PowerParam p_star(truth.p_star);
  Evaluation out;
  if (const auto* c = std::get_if<CardinalData>(&test)) {
    if (task.kind != TaskKind::kCardinal) throw std::invalid_argument("task/data mismatch");
    if (c->y.empty()) throw std::invalid_argument("empty test set");
    double noisy = 0.0;
    double clean = 0.0;
    for (std::size_t r = 0; r < c->y.size(); ++r) {
      const auto row = c->u.row(r);
      const double m = power_mean(row, params.w, params.p);
      noisy += l2_loss(m, c->y[r]);
      clean += l2_loss(m, power_mean(row, truth.w_star, p_star));
    }
    const auto n = static_cast<double>(c->y.size());
    out.loss = noisy / n;
    out.noiseless_loss = clean / n;
    out.accuracy = kNaN;
    out.noiseless_accuracy = kNaN;
    return out;
  }

  const auto& o = std::get<OrdinalData>(test);
  if (task.kind == TaskKind::kCardinal) throw std::invalid_argument("task/data mismatch");
  if (o.pairs.empty()) throw std::invalid_argument("empty test set");
  const std::vector<Label> clean = clean_labels(o.u, o.pairs, truth);
  std::size_t hits = 0;
  std::size_t clean_hits = 0;
  double unbiased = 0.0;
  for (std::size_t k = 0; k < o.pairs.size(); ++k) {
    const Label pred = compare(o.u.row(o.pairs[k].u), o.u.row(o.pairs[k].v), params.w, params.p);
    hits += pred == o.y[k];
    clean_hits += pred == clean[k];
    if (task.kind == TaskKind::kOrdinalUnbiased) {
      unbiased += unbiased_zero_one(pred, o.y[k], task.rho);
    }
  }
  const auto n = static_cast<double>(o.pairs.size());
  out.accuracy = static_cast<double>(hits) / n;
  out.noiseless_accuracy = static_cast<double>(clean_hits) / n;
  if (task.kind == TaskKind::kOrdinalLogistic) {
    if (!params.tau) throw std::invalid_argument("logistic evaluation needs tau");
    out.loss = nll(o, o.y, params);
    out.noiseless_loss = nll(o, clean, params);
  } else {
    out.loss = unbiased / n;
    out.noiseless_loss = 1.0 - out.noiseless_accuracy;
  }
  return out;
}

EvaluationReport evaluate(const ModelParams& model, const Task& task, const Dataset& test,
                          const GroundTruth& truth) {
  ModelParams true_params = truth.params();
  if (task.kind == TaskKind::kOrdinalLogistic && !true_params.tau) {
    true_params.tau = task.tau_max;
  }
  EvaluationReport out;
  out.model = evaluate_params(model, task, test, truth);
  out.truth = evaluate_params(true_params, task, test, truth);
  out.kl = kl_weights(truth.w_star, model.w);
  return out;
}

}  // namespace swf
