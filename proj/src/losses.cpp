#include "swf/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swf {
namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho < 0.5)) {
    throw std::invalid_argument("flip probability must lie in [0, 1/2)");
  }
}

double require_tau(const ModelParams& params) {
  if (!params.tau) throw std::invalid_argument("logistic loss needs a temperature");
  if (!(*params.tau >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  return *params.tau;
}

void require_finite(const ModelParams& params) {
  if (!params.p.is_finite()) {
    throw std::domain_error("loss gradient is undefined for infinite p");
  }
}

}  // namespace

void validate_noise(const NoiseSpec& noise) {
  if (const auto* g = std::get_if<GaussianNoise>(&noise)) {
    if (!(g->nu >= 0.0)) throw std::invalid_argument("nu must be >= 0");
  } else if (const auto* f = std::get_if<FlipNoise>(&noise)) {
    check_rho(f->rho);
  } else if (const auto* l = std::get_if<LogisticNoise>(&noise)) {
    if (!(l->tau >= 0.0 && l->tau <= l->tau_max)) {
      throw std::invalid_argument("tau must lie in [0, tau_max]");
    }
  }
}

double unbiased_zero_one(Label pred, Label y_noisy, double rho) {
  check_rho(rho);
  const double agree = zero_one_loss(pred, y_noisy);
  const double flipped = zero_one_loss(pred, negate(y_noisy));
  return ((1.0 - rho) * agree - rho * flipped) / (1.0 - 2.0 * rho);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double preference_prob(Utilities u, Utilities v, const WeightVector& w,
                       PowerParam p, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (u.size() != v.size()) {
    throw std::invalid_argument("compared utility vectors differ in dimension");
  }
  const double diff = log_power_mean(u, w, p) - log_power_mean(v, w, p);
  return std::clamp(sigmoid(tau * diff), std::numeric_limits<double>::min(),
                    std::nextafter(1.0, 0.0));
}

double logistic_nll(const OrdinalSample& s, const ModelParams& params) {
  const double tau = require_tau(params);
  const double diff =
      log_power_mean(s.u, params.w, params.p) - log_power_mean(s.v, params.w, params.p);
  // -log sigmoid(y * tau * diff)
  return softplus(-to_int(s.y) * tau * diff);
}

LogisticGradient grad_logistic_nll(const OrdinalSample& s,
                                   const ModelParams& params) {
  const double tau = require_tau(params);
  require_finite(params);
  const double p = params.p.value();
  const double diff =
      log_power_mean(s.u, params.w, params.p) - log_power_mean(s.v, params.w, params.p);
  const double y = to_int(s.y);
  // d/dz softplus(-z) = -sigmoid(-z), z = y * tau * diff
  const double outer = -sigmoid(-y * tau * diff);

  LogisticGradient g;
  const auto gu = grad_log_power_mean_w(s.u, params.w, params.p);
  const auto gv = grad_log_power_mean_w(s.v, params.w, params.p);
  g.w.resize(gu.size());
  for (std::size_t i = 0; i < gu.size(); ++i) {
    g.w[i] = outer * y * tau * (gu[i] - gv[i]);
  }
  g.p = outer * y * tau *
        (detail::dlog_mean_dp(s.u, params.w, p) - detail::dlog_mean_dp(s.v, params.w, p));
  g.tau = outer * y * diff;
  return g;
}

L2Gradient grad_l2(const CardinalSample& s, const ModelParams& params) {
  require_finite(params);
  const double m = power_mean(s.u, params.w, params.p);
  // d(M - y)^2 = 2 (M - y) M dlogM
  const double outer = 2.0 * (m - s.y) * m;
  L2Gradient g;
  g.w = grad_log_power_mean_w(s.u, params.w, params.p);
  for (double& x : g.w) x *= outer;
  g.p = outer * detail::dlog_mean_dp(s.u, params.w, params.p.value());
  return g;
}

}  // namespace swf
