#pragma once

#include <variant>
#include <vector>

#include "swf/welfare.hpp"

namespace swf {

struct CardinalSample {
  Utilities u;
  double y;
};

struct OrdinalSample {
  Utilities u;
  Utilities v;
  Label y;
};

// Label noise models.
struct NoNoise {};
struct GaussianNoise {
  double nu;  // stddev is nu * (u_(d) - u_(1))
};
struct FlipNoise {
  double rho;  // in [0, 1/2)
};
struct LogisticNoise {
  double tau;
  double tau_max;
};
using NoiseSpec = std::variant<NoNoise, GaussianNoise, FlipNoise, LogisticNoise>;

// Throws std::invalid_argument on out-of-range parameters.
void validate_noise(const NoiseSpec& noise);

struct L2Gradient {
  std::vector<double> w;
  double p = 0.0;
};

struct LogisticGradient {
  std::vector<double> w;
  double p = 0.0;
  double tau = 0.0;
};

inline double l2_loss(double m_val, double y) {
  const double r = m_val - y;
  return r * r;
}

// Mismatch indicator (1 - y * pred) / 2.
inline int zero_one_loss(Label pred, Label y) {
  return (1 - to_int(y) * to_int(pred)) / 2;
}

// ((1 - rho) l(t, y) - rho l(t, -y)) / (1 - 2 rho); unbiased for the clean
// 0-1 loss under i.i.d. flips with probability rho.
double unbiased_zero_one(Label pred, Label y_noisy, double rho);

double sigmoid(double x);

// log(1 + exp(x)) without overflow.
double softplus(double x);

// P(u preferred to v) = sigmoid(tau * (log M(u) - log M(v))), kept inside the
// open interval (0, 1).
double preference_prob(Utilities u, Utilities v, const WeightVector& w,
                       PowerParam p, double tau);

// Negative log likelihood of one comparison; requires params.tau.
double logistic_nll(const OrdinalSample& sample, const ModelParams& params);

LogisticGradient grad_logistic_nll(const OrdinalSample& sample,
                                   const ModelParams& params);

L2Gradient grad_l2(const CardinalSample& sample, const ModelParams& params);

}  // namespace swf
