#include "swf/learner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "swf/losses.hpp"
#include "swf/parallel.hpp"
#include "swf/rng.hpp"

namespace swf {
namespace {

constexpr double kStartOffset = 1e-3;
constexpr double kPreconditionFloor = 1e-6;
constexpr double kBoundaryFraction = 0.5;
constexpr double kSnapWeight = 1e-5;

// Log power means of every row of a utility matrix at one fixed p, for a
// changing weight vector. At fixed p each mean depends on w only through the
// linear form sum_j w_j a_rj, with a_rj = exp(p log u_rj - m_r) precomputed.
class RowMeans {
 public:
  RowMeans(const UtilityMatrix& u, double p)
      : geometric_(std::abs(p) < kNearZeroPower),
        p_(p),
        rows_(u.rows()),
        cols_(u.cols()),
        a_(rows_ * cols_),
        m_(rows_, 0.0),
        s_(rows_, 0.0),
        log_mean_(rows_, 0.0) {
    for (std::size_t r = 0; r < rows_; ++r) {
      const auto row = u.row(r);
      validate_utilities(row);
      double* a = a_.data() + r * cols_;
      if (geometric_) {
        for (std::size_t j = 0; j < cols_; ++j) a[j] = std::log(row[j]);
        continue;
      }
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cols_; ++j) m = std::max(m, p * std::log(row[j]));
      m_[r] = m;
      for (std::size_t j = 0; j < cols_; ++j) {
        a[j] = std::exp(p * std::log(row[j]) - m);
        if (a[j] == 0.0) {
          throw std::domain_error("power parameter too extreme for the utility range");
        }
      }
    }
  }

  std::size_t rows() const { return rows_; }
  double log_mean(std::size_t r) const { return log_mean_[r]; }

  void evaluate(std::span<const double> w) {
    for (std::size_t r = 0; r < rows_; ++r) {
      const double* a = a_.data() + r * cols_;
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += w[j] * a[j];
      if (geometric_) {
        log_mean_[r] = s;
      } else {
        s_[r] = s;
        log_mean_[r] = (m_[r] + std::log(s)) / p_;
      }
    }
  }

  // grad += sum_r coef_r * d log M_r / dw, using the last evaluate() call.
  void accumulate_gradient(std::span<const double> coef, std::span<double> grad) const {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (coef[r] == 0.0) continue;
      const double* a = a_.data() + r * cols_;
      const double c = geometric_ ? coef[r] : coef[r] / (p_ * s_[r]);
      for (std::size_t j = 0; j < cols_; ++j) grad[j] += c * a[j];
    }
  }

 private:
  bool geometric_;
  double p_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<double> m_;
  std::vector<double> s_;
  std::vector<double> log_mean_;
};

class Objective {
 public:
  virtual ~Objective() = default;
  virtual bool differentiable() const { return true; }
  // Forget state carried between evaluations (the temperature warm start).
  virtual void reset() {}
  // Loss at w; fills grad_w (size d) when non-null. Objectives with a
  // temperature minimize it out and report the minimizer through tau.
  virtual double evaluate(std::span<const double> w, std::vector<double>* grad_w,
                          double* tau) = 0;
};

class CardinalObjective final : public Objective {
 public:
  CardinalObjective(const CardinalData& data, double p)
      : means_(data.u, p), y_(data.y), coef_(data.y.size()) {}

  double evaluate(std::span<const double> w, std::vector<double>* grad_w,
                  double*) override {
    means_.evaluate(w);
    const double inv_n = 1.0 / static_cast<double>(y_.size());
    double loss = 0.0;
    for (std::size_t r = 0; r < y_.size(); ++r) {
      const double m = std::exp(means_.log_mean(r));
      const double resid = m - y_[r];
      loss += resid * resid;
      coef_[r] = 2.0 * resid * m * inv_n;
    }
    if (grad_w) {
      std::fill(grad_w->begin(), grad_w->end(), 0.0);
      means_.accumulate_gradient(coef_, *grad_w);
    }
    return loss * inv_n;
  }

 private:
  RowMeans means_;
  const std::vector<double>& y_;
  std::vector<double> coef_;
};

// Logistic NLL with the temperature profiled out: for fixed w the loss is
// convex in tau, so tau*(w) is found by safeguarded Newton on [0, tau_max]
// and the w-gradient at tau*(w) is the gradient of the profiled loss.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(const OrdinalData& data, double p, double tau_max)
      : means_(data.u, p),
        data_(data),
        tau_max_(tau_max),
        coef_(data.u.rows()),
        margin_(data.pairs.size()) {
    reset();
  }

  void reset() override { tau_ = std::min(1.0, tau_max_); }

  double evaluate(std::span<const double> w, std::vector<double>* grad_w,
                  double* tau) override {
    means_.evaluate(w);
    for (std::size_t k = 0; k < margin_.size(); ++k) {
      const auto [iu, iv] = data_.pairs[k];
      margin_[k] = to_int(data_.y[k]) * (means_.log_mean(iu) - means_.log_mean(iv));
    }
    tau_ = solve_tau();
    const double inv_k = 1.0 / static_cast<double>(margin_.size());
    std::fill(coef_.begin(), coef_.end(), 0.0);
    double loss = 0.0;
    for (std::size_t k = 0; k < margin_.size(); ++k) {
      // softplus(-z) and sigmoid(-z) from one exponential.
      const double z = tau_ * margin_[k];
      const double e = std::exp(-std::abs(z));
      loss += std::max(-z, 0.0) + std::log1p(e);
      const double sig = z >= 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
      const double c = -sig * tau_ * to_int(data_.y[k]) * inv_k;
      coef_[data_.pairs[k].u] += c;
      coef_[data_.pairs[k].v] -= c;
    }
    if (grad_w) {
      std::fill(grad_w->begin(), grad_w->end(), 0.0);
      means_.accumulate_gradient(coef_, *grad_w);
    }
    if (tau) *tau = tau_;
    return loss * inv_k;
  }

 private:
  // First and second derivative of the mean NLL in tau.
  std::pair<double, double> derivatives(double tau) const {
    double d1 = 0.0;
    double d2 = 0.0;
    for (double m : margin_) {
      const double s = sigmoid(-tau * m);
      d1 -= m * s;
      d2 += m * m * s * (1.0 - s);
    }
    const double inv_k = 1.0 / static_cast<double>(margin_.size());
    return {d1 * inv_k, d2 * inv_k};
  }

  // Safeguarded Newton from the previous minimizer. The derivative is
  // negative at 0 once the mean margin is positive; the upper end is only
  // examined when Newton heads past it.
  double solve_tau() const {
    double mean_margin = 0.0;
    for (double m : margin_) mean_margin += m;
    if (mean_margin <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = tau_max_;
    bool hi_bracketed = false;
    double t = std::clamp(tau_, lo, hi);
    for (int it = 0; it < 100; ++it) {
      const auto [d1, d2] = derivatives(t);
      if (d1 == 0.0) return t;
      if (d1 < 0.0) {
        if (t == tau_max_) return t;
        lo = t;
      } else {
        hi = t;
        hi_bracketed = true;
      }
      const double step = d2 > 0.0 ? -d1 / d2 : std::numeric_limits<double>::infinity();
      if (std::abs(step) <= 1e-12 * (1.0 + t)) return std::clamp(t + step, 0.0, tau_max_);
      double next = t + step;
      if (next >= hi) next = hi_bracketed ? 0.5 * (lo + hi) : hi;
      if (next <= lo) next = 0.5 * (lo + hi);
      t = next;
      if (hi_bracketed && hi - lo <= 1e-12 * (1.0 + hi)) break;
    }
    return t;
  }

  RowMeans means_;
  const OrdinalData& data_;
  double tau_max_;
  double tau_ = 1.0;
  std::vector<double> coef_;
  std::vector<double> margin_;
};

class UnbiasedObjective final : public Objective {
 public:
  UnbiasedObjective(const OrdinalData& data, double p, double rho)
      : means_(data.u, p), data_(data), rho_(rho) {
    if (!(rho >= 0.0 && rho < 0.5)) {
      throw std::invalid_argument("flip probability must lie in [0, 1/2)");
    }
  }

  bool differentiable() const override { return false; }

  double evaluate(std::span<const double> w, std::vector<double>*, double*) override {
    means_.evaluate(w);
    double risk = 0.0;
    for (std::size_t k = 0; k < data_.pairs.size(); ++k) {
      const auto [iu, iv] = data_.pairs[k];
      const Label pred = label_of(means_.log_mean(iu) - means_.log_mean(iv));
      risk += unbiased_zero_one(pred, data_.y[k], rho_);
    }
    return risk / static_cast<double>(data_.pairs.size());
  }

 private:
  RowMeans means_;
  const OrdinalData& data_;
  double rho_;
};

const CardinalData& as_cardinal(const Dataset& data) {
  const auto* c = std::get_if<CardinalData>(&data);
  if (!c) throw std::invalid_argument("cardinal task needs cardinal data");
  if (c->y.empty()) throw std::invalid_argument("empty dataset");
  if (c->y.size() != c->u.rows()) throw std::invalid_argument("label count mismatch");
  return *c;
}

const OrdinalData& as_ordinal(const Dataset& data) {
  const auto* o = std::get_if<OrdinalData>(&data);
  if (!o) throw std::invalid_argument("ordinal task needs ordinal data");
  if (o->pairs.empty()) throw std::invalid_argument("empty dataset");
  if (o->pairs.size() != o->y.size()) throw std::invalid_argument("label count mismatch");
  for (const auto& pr : o->pairs) {
    if (pr.u >= o->u.rows() || pr.v >= o->u.rows()) {
      throw std::invalid_argument("pair references a missing row");
    }
  }
  return *o;
}

std::unique_ptr<Objective> make_objective(const Dataset& data, double p, const Task& task) {
  if (!std::isfinite(p)) throw std::invalid_argument("fixed p must be finite");
  switch (task.kind) {
    case TaskKind::kCardinal:
      return std::make_unique<CardinalObjective>(as_cardinal(data), p);
    case TaskKind::kOrdinalLogistic:
      if (!(task.tau_max > 0.0)) throw std::invalid_argument("tau_max must be > 0");
      return std::make_unique<LogisticObjective>(as_ordinal(data), p, task.tau_max);
    case TaskKind::kOrdinalUnbiased:
      return std::make_unique<UnbiasedObjective>(as_ordinal(data), p, task.rho);
  }
  throw std::invalid_argument("unknown task");
}

// Keeps the iterate exactly on the simplex: moves along the tangent space
// keep the sum, so only rounding drift is removed; leaving the nonnegative
// orthant triggers the full projection.
void restore_feasibility(std::vector<double>& w) {
  const bool outside = std::any_of(w.begin(), w.end(), [](double x) { return x < 0.0; });
  if (outside) {
    w = project_simplex(w).vector();
    return;
  }
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-15) {
    for (double& x : w) x /= sum;
  }
}

struct Descent {
  std::vector<double> w;
  double tau = 0.0;
  double loss = 0.0;
  int iterations = 0;
};

// Descent direction at w under the metric diag(w + kPreconditionFloor),
// restricted to the tangent cone of the simplex: coordinates at zero whose
// direction points outward are frozen, the rest are centered under the
// metric weights so the direction sums to zero. At fixed p every mean is a
// log of a linear form in w, whose curvature grows like 1 / w_j^2 near the
// faces; the metric makes those directions comparably scaled.
void preconditioned_direction(std::span<const double> w, std::span<const double> grad,
                              std::span<double> dir) {
  const std::size_t d = w.size();
  std::vector<bool> frozen(d, false);
  std::size_t free_count = d;
  double mean = 0.0;
  for (;;) {
    double sum = 0.0;
    double mass = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (frozen[j]) continue;
      const double c = w[j] + kPreconditionFloor;
      sum += c * grad[j];
      mass += c;
    }
    mean = sum / mass;
    bool changed = false;
    for (std::size_t j = 0; j < d && free_count > 1; ++j) {
      if (!frozen[j] && w[j] <= 0.0 && grad[j] > mean) {
        frozen[j] = true;
        changed = true;
        --free_count;
      }
    }
    if (!changed) break;
  }
  for (std::size_t j = 0; j < d; ++j) {
    dir[j] = frozen[j] ? 0.0 : (w[j] + kPreconditionFloor) * (grad[j] - mean);
  }
}

// Projected descent with steps of length lr along the preconditioned
// direction. A step that does not lower the loss is rejected and halves lr;
// lr is also halved after `patience` iterations without a gain above the
// termination tolerance. A step may remove at most kBoundaryFraction of any weight above kSnapWeight;
// smaller weights may cross zero and are clamped by the projection.
Descent gradient_descent(Objective& obj, std::span<const double> start, const GDConfig& gd,
                         DescentTrace* trace) {
  const std::size_t d = start.size();
  obj.reset();
  std::vector<double> w(start.begin(), start.end());
  std::vector<double> grad(d, 0.0);
  double tau = 0.0;
  double loss = obj.evaluate(w, &grad, &tau);

  const double scale = std::max(std::abs(loss), std::numeric_limits<double>::min());
  const double tol = gd.loss_range_tol * scale;
  double lr = gd.initial_lr;
  double reference = loss;
  int since_improved = 0;
  std::deque<double> window;
  std::vector<double> dir(d);
  std::vector<double> cand(d);
  std::vector<double> grad_c(d, 0.0);
  double tau_c = 0.0;

  int it = 0;
  for (; it < gd.max_iters; ++it) {
    preconditioned_direction(w, grad, dir);
    double norm2 = 0.0;
    for (double g : dir) norm2 += g * g;
    const double norm = std::sqrt(norm2);
    if (norm == 0.0 || !std::isfinite(norm)) break;

    double factor = gd.clip_by_lr ? lr / norm : lr;
    for (std::size_t j = 0; j < d; ++j) {
      if (dir[j] > 0.0 && w[j] > kSnapWeight) {
        factor = std::min(factor, kBoundaryFraction * w[j] / dir[j]);
      }
    }
    for (std::size_t j = 0; j < d; ++j) cand[j] = w[j] - factor * dir[j];
    restore_feasibility(cand);
    const double loss_c = obj.evaluate(cand, &grad_c, &tau_c);
    if (trace) trace->steps.push_back({w, cand, lr, loss_c});

    if (loss_c < loss) {
      w.swap(cand);
      grad.swap(grad_c);
      tau = tau_c;
      loss = loss_c;
    } else {
      lr *= 0.5;
    }
    if (reference - loss > tol) {
      reference = loss;
      since_improved = 0;
    } else if (++since_improved >= gd.patience) {
      lr *= 0.5;
      since_improved = 0;
    }
    if (lr < gd.min_lr) break;
    window.push_back(loss);
    if (static_cast<int>(window.size()) > gd.loss_window) window.pop_front();
    if (static_cast<int>(window.size()) == gd.loss_window &&
        window.front() - window.back() < tol) {
      break;
    }
  }
  return {w, tau, loss, it};
}

// Derivative-free descent for the piecewise-constant 0-1 risk: compass moves
// of length lr along edge directions e_i - e_j, halving lr when no move
// improves.
Descent compass_search(Objective& obj, std::span<const double> start, const GDConfig& gd,
                       std::uint64_t seed, DescentTrace* trace) {
  const std::size_t d = start.size();
  std::vector<double> w(start.begin(), start.end());
  double risk = obj.evaluate(w, nullptr, nullptr);
  std::vector<std::pair<std::size_t, std::size_t>> dirs;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j) dirs.emplace_back(i, j);
    }
  }
  Rng rng = make_rng(seed, "compass");
  double lr = gd.initial_lr;
  int evals = 0;
  while (lr >= gd.min_lr && evals < gd.max_iters && !dirs.empty()) {
    std::shuffle(dirs.begin(), dirs.end(), rng);
    bool improved = false;
    for (const auto& [i, j] : dirs) {
      if (++evals > gd.max_iters) break;
      std::vector<double> cand = w;
      const double delta = lr / std::sqrt(2.0);
      cand[i] += delta;
      cand[j] -= delta;
      restore_feasibility(cand);
      const double r = obj.evaluate(cand, nullptr, nullptr);
      if (r < risk) {
        if (trace) trace->steps.push_back({w, cand, lr, r});
        w = std::move(cand);
        risk = r;
        improved = true;
        break;
      }
    }
    if (!improved) lr *= 0.5;
  }
  return {w, 0.0, risk, evals};
}

}  // namespace

void validate(const GridConfig& grid) {
  if (!(grid.step > 0.0) || !std::isfinite(grid.step)) {
    throw std::invalid_argument("grid step must be positive");
  }
  if (!(grid.p_lower <= grid.p_upper) || !std::isfinite(grid.p_lower) ||
      !std::isfinite(grid.p_upper)) {
    throw std::invalid_argument("grid needs finite p_lower <= p_upper");
  }
}

std::vector<double> grid_points(const GridConfig& grid) {
  validate(grid);
  const auto count =
      static_cast<std::size_t>(std::floor((grid.p_upper - grid.p_lower) / grid.step + 1e-9)) + 1;
  std::vector<double> points(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double p = grid.p_lower + static_cast<double>(k) * grid.step;
    points[k] = std::round(p * 1e12) / 1e12;
  }
  return points;
}

void validate(const GDConfig& gd) {
  if (!(gd.initial_lr > 0.0) || !(gd.min_lr > 0.0) || gd.max_iters < 1 || gd.patience < 1 ||
      gd.loss_window < 1 || !(gd.loss_range_tol > 0.0)) {
    throw std::invalid_argument("descent settings must be positive");
  }
  if (gd.patience > gd.max_iters) throw std::invalid_argument("patience exceeds max_iters");
}

std::string task_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kCardinal:
      return "cardinal";
    case TaskKind::kOrdinalLogistic:
      return "ordinal_logistic";
    case TaskKind::kOrdinalUnbiased:
      return "ordinal_unbiased";
  }
  return "unknown";
}

TaskKind parse_task(const std::string& name) {
  if (name == "cardinal") return TaskKind::kCardinal;
  if (name == "ordinal_logistic") return TaskKind::kOrdinalLogistic;
  if (name == "ordinal_unbiased") return TaskKind::kOrdinalUnbiased;
  throw std::invalid_argument("unknown task '" + name + "'");
}

std::size_t dimension(const Dataset& data) {
  return std::visit([](const auto& d) { return d.u.cols(); }, data);
}

std::vector<std::vector<double>> start_points(std::size_t d) {
  if (d == 0) throw std::invalid_argument("d must be >= 1");
  if (d == 1) return {{1.0}};
  std::vector<std::vector<double>> starts;
  const double eta = kStartOffset;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> s(d, eta);
    s[i] = 1.0 - static_cast<double>(d - 1) * eta;
    starts.push_back(std::move(s));
  }
  starts.emplace_back(d, 1.0 / static_cast<double>(d));
  return starts;
}

FixedPowerFit descend_from(const Dataset& data, double p, const Task& task,
                           const GDConfig& gd, std::span<const double> start,
                           std::uint64_t seed, DescentTrace* trace) {
  validate(gd);
  if (start.size() != dimension(data)) throw std::invalid_argument("start has wrong size");
  auto obj = make_objective(data, p, task);
  const bool with_tau = task.kind == TaskKind::kOrdinalLogistic;
  const Descent res = obj->differentiable()
                          ? gradient_descent(*obj, start, gd, trace)
                          : compass_search(*obj, start, gd, seed, trace);
  return {WeightVector(res.w), with_tau ? std::optional<double>(res.tau) : std::nullopt,
          res.loss, 1, res.iterations};
}

FixedPowerFit fit_weights_fixed_p(const Dataset& data, double p, const Task& task,
                                  const GDConfig& gd, std::uint64_t seed) {
  validate(gd);
  auto obj = make_objective(data, p, task);
  const bool with_tau = task.kind == TaskKind::kOrdinalLogistic;
  const auto starts = start_points(dimension(data));

  std::optional<Descent> best;
  int iterations = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Descent res = obj->differentiable()
                      ? gradient_descent(*obj, starts[s], gd, nullptr)
                      : compass_search(*obj, starts[s], gd, derive_seed(seed, "start", s),
                                       nullptr);
    iterations += res.iterations;
    if (!best || res.loss < best->loss) best = std::move(res);
  }
  return {WeightVector(best->w), with_tau ? std::optional<double>(best->tau) : std::nullopt,
          best->loss, static_cast<int>(starts.size()), iterations};
}

FitReport fit(const Dataset& data, const GridConfig& grid, const Task& task,
              const GDConfig& gd, std::uint64_t seed, const FitOptions& opts) {
  const auto points = grid_points(grid);
  validate(gd);
  std::vector<std::optional<FixedPowerFit>> fits(points.size());
  parallel_for(points.size(), opts.threads, [&](std::size_t k) {
    fits[k] = fit_weights_fixed_p(data, points[k], task, gd, derive_seed(seed, "grid", k));
  });

  FitReport report;
  report.task = task.kind;
  std::size_t best = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const FixedPowerFit& f = *fits[k];
    report.per_grid_losses.push_back({points[k], f.loss, f.w.vector(), f.tau});
    report.starts_used += f.starts_used;
    report.iterations += f.iterations;
    if (k == 0) continue;
    const FixedPowerFit& b = *fits[best];
    const bool better =
        f.loss < b.loss ||
        (f.loss == b.loss && (std::abs(points[k]) < std::abs(points[best]) ||
                              (std::abs(points[k]) == std::abs(points[best]) &&
                               points[k] < points[best])));
    if (better) best = k;
  }
  const FixedPowerFit& b = *fits[best];
  report.params = ModelParams{b.w, PowerParam(points[best]), b.tau};
  report.train_loss = b.loss;
  return report;
}

double empirical_risk(const Dataset& data, const ModelParams& params, const Task& task) {
  switch (task.kind) {
    case TaskKind::kCardinal: {
      const auto& c = as_cardinal(data);
      double acc = 0.0;
      for (std::size_t r = 0; r < c.y.size(); ++r) {
        acc += l2_loss(power_mean(c.u.row(r), params.w, params.p), c.y[r]);
      }
      return acc / static_cast<double>(c.y.size());
    }
    case TaskKind::kOrdinalLogistic: {
      const auto& o = as_ordinal(data);
      double acc = 0.0;
      for (std::size_t k = 0; k < o.pairs.size(); ++k) {
        acc += logistic_nll({o.u.row(o.pairs[k].u), o.u.row(o.pairs[k].v), o.y[k]}, params);
      }
      return acc / static_cast<double>(o.pairs.size());
    }
    case TaskKind::kOrdinalUnbiased: {
      const auto& o = as_ordinal(data);
      double acc = 0.0;
      for (std::size_t k = 0; k < o.pairs.size(); ++k) {
        const Label pred =
            compare(o.u.row(o.pairs[k].u), o.u.row(o.pairs[k].v), params.w, params.p);
        acc += unbiased_zero_one(pred, o.y[k], task.rho);
      }
      return acc / static_cast<double>(o.pairs.size());
    }
  }
  throw std::invalid_argument("unknown task");
}

}  // namespace swf
