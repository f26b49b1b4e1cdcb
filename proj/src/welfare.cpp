#include "swf/welfare.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace swf {
namespace {

void check_dims(Utilities u, const WeightVector& w) {
  if (u.size() != w.size()) {
    throw std::invalid_argument("dimension mismatch: utilities have " +
                                std::to_string(u.size()) +
                                " entries, weights have " +
                                std::to_string(w.size()));
  }
  validate_utilities(u);
}

double weighted_mean_log(Utilities u, const WeightVector& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (w[i] > 0.0) acc += w[i] * std::log(u[i]);
  }
  return acc;
}

// Largest p * log(u_i) over entries with positive weight.
double max_exponent(Utilities u, const WeightVector& w, double p) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (w[i] > 0.0) m = std::max(m, p * std::log(u[i]));
  }
  return m;
}

}  // namespace

void validate_utilities(Utilities u) {
  if (u.empty()) throw std::invalid_argument("empty utility vector");
  for (double x : u) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("utilities must be finite and positive, got " +
                                  std::to_string(x));
    }
  }
}

PowerParam::PowerParam(double value) : value_(value) {
  if (std::isnan(value)) throw std::invalid_argument("power parameter is NaN");
}

WeightVector::WeightVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("empty weight vector");
  double sum = 0.0;
  for (double x : weights_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument("weights must sum to 1, got sum " +
                                std::to_string(sum));
  }
}

WeightVector WeightVector::uniform(std::size_t d) {
  if (d == 0) throw std::invalid_argument("uniform weights need d >= 1");
  return WeightVector(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

double log_power_mean(Utilities u, const WeightVector& w, PowerParam p) {
  check_dims(u, w);
  const double pv = p.value();
  if (!p.is_finite()) {
    double best = pv > 0 ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (w[i] <= 0.0) continue;
      best = pv > 0 ? std::max(best, u[i]) : std::min(best, u[i]);
    }
    return std::log(best);
  }
  if (p.near_zero()) return weighted_mean_log(u, w);

  // log M = (m + log sum_i w_i exp(p log u_i - m)) / p
  const double m = max_exponent(u, w, pv);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (w[i] > 0.0) s += w[i] * std::exp(pv * std::log(u[i]) - m);
  }
  return (m + std::log(s)) / pv;
}

double power_mean(Utilities u, const WeightVector& w, PowerParam p) {
  const double log_value = log_power_mean(u, w, p);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (w[i] <= 0.0) continue;
    lo = std::min(lo, u[i]);
    hi = std::max(hi, u[i]);
  }
  if (!p.is_finite()) return p.value() > 0 ? hi : lo;
  return std::clamp(std::exp(log_value), lo, hi);
}

Label compare(Utilities u, Utilities v, const WeightVector& w, PowerParam p) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("compared utility vectors differ in dimension");
  }
  return label_of(log_power_mean(u, w, p) - log_power_mean(v, w, p));
}

std::vector<double> grad_log_power_mean_w(Utilities u, const WeightVector& w,
                                          PowerParam p) {
  check_dims(u, w);
  if (!p.is_finite()) {
    throw std::domain_error("gradient in w is undefined for infinite p");
  }
  std::vector<double> grad(u.size());
  if (p.near_zero()) {
    for (std::size_t i = 0; i < u.size(); ++i) grad[i] = std::log(u[i]);
    return grad;
  }
  // u_i^p / (p * sum_j w_j u_j^p), with the common factor exp(m) cancelled.
  const double pv = p.value();
  const double m = max_exponent(u, w, pv);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    grad[i] = std::exp(pv * std::log(u[i]) - m);
    if (w[i] > 0.0) s += w[i] * grad[i];
  }
  for (double& g : grad) g /= pv * s;
  return grad;
}

namespace detail {

double dlog_mean_dp(Utilities u, const WeightVector& w, double p) {
  if (std::abs(p) < kNearZeroPower) {
    const double mean = weighted_mean_log(u, w);
    double var = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (w[i] <= 0.0) continue;
      const double dev = std::log(u[i]) - mean;
      var += w[i] * dev * dev;
    }
    return 0.5 * var;
  }
  // (E_pi[log u] - log M) / p with tilted weights pi_i ~ w_i u_i^p.
  const double m = max_exponent(u, w, p);
  double s = 0.0;
  double tilted = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (w[i] <= 0.0) continue;
    const double lu = std::log(u[i]);
    const double a = w[i] * std::exp(p * lu - m);
    s += a;
    tilted += a * lu;
  }
  const double log_mean = (m + std::log(s)) / p;
  return std::max(0.0, (tilted / s - log_mean) / p);
}

}  // namespace detail

double grad_log_power_mean_p(Utilities u, const WeightVector& w, PowerParam p) {
  check_dims(u, w);
  if (!p.is_finite()) {
    throw std::domain_error("gradient in p is undefined for infinite p");
  }
  if (p.near_zero()) {
    throw std::domain_error(
        "gradient in p requested inside the near-zero band; use the grid");
  }
  return detail::dlog_mean_dp(u, w, p.value());
}

}  // namespace swf
