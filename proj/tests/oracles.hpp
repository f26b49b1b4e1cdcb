#pragma once

// Independent reference implementations used only by tests. They favor the
// plainest formula over speed or range.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// Direct evaluation of (sum w_i u_i^p)^(1/p) in long double; the weighted
// geometric mean at p = 0.
inline long double power_mean(const std::vector<double>& u, const std::vector<double>& w,
                              long double p) {
  if (p == 0.0L) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::log(static_cast<long double>(u[i]));
    return std::exp(s);
  }
  long double s = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::pow(static_cast<long double>(u[i]), p);
  return std::pow(s, 1.0L / p);
}

// Sign of log M(u) - log M(v) from raw power sums: for p != 0 it equals
// sign(p) * sign(sum w u^p - sum w v^p).
inline int log_mean_difference_sign(const std::vector<double>& u, const std::vector<double>& v,
                                     const std::vector<double>& w, long double p) {
  long double diff = 0.0L;
  if (p == 0.0L) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      diff += w[i] * (std::log(static_cast<long double>(u[i])) -
                      std::log(static_cast<long double>(v[i])));
    }
    return diff > 0 ? 1 : (diff < 0 ? -1 : 0);
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    diff += w[i] * (std::pow(static_cast<long double>(u[i]), p) -
                    std::pow(static_cast<long double>(v[i]), p));
  }
  const int s = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
  return p > 0 ? s : -s;
}

// Euclidean projection onto the simplex by enumerating every support set,
// solving the KKT system on it, and keeping the closest feasible candidate.
inline std::vector<double> project_simplex(const std::vector<double>& v) {
  const std::size_t d = v.size();
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
    double sum = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask >> i & 1) {
        sum += v[i];
        ++k;
      }
    }
    const double theta = (sum - 1.0) / k;
    std::vector<double> x(d, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask >> i & 1) {
        x[i] = v[i] - theta;
        if (x[i] < -1e-15) feasible = false;
      } else if (v[i] - theta > 1e-15) {
        feasible = false;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < d; ++i) dist += (x[i] - v[i]) * (x[i] - v[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Uniform point on the simplex via sorted uniforms (a different construction
// from the library's normalized exponentials).
inline std::vector<double> simplex_point(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> cuts(d - 1);
  for (double& c : cuts) c = unif(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> w(d);
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    w[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  w[d - 1] = 1.0 - prev;
  return w;
}

}  // namespace oracle
