#include "swf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "swf/rng.hpp"

namespace swf {
namespace {

constexpr double kZeroTol = 1e-12;

int sign_of(double x) {
  if (std::abs(x) < kZeroTol) return 0;
  return x > 0.0 ? 1 : -1;
}

double log_difference(Utilities u, Utilities v, const WeightVector& w, double p) {
  const PowerParam pp(p);
  return log_power_mean(u, w, pp) - log_power_mean(v, w, pp);
}

double bisect(Utilities u, Utilities v, const WeightVector& w, double lo, double hi,
              int sign_lo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const int s = sign_of(log_difference(u, v, w, mid));
    if (s == 0) return mid;
    if (s == sign_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WeightVector uniform_simplex_point(Rng& rng, std::size_t d) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(d);
  double sum = 0.0;
  for (double& x : w) {
    x = expo(rng);
    sum += x;
  }
  for (double& x : w) x /= sum;
  double total = 0.0;
  for (double x : w) total += x;
  *std::max_element(w.begin(), w.end()) += 1.0 - total;
  return WeightVector(std::move(w));
}

WeightVector mix(const WeightVector& a, const WeightVector& b, double lambda) {
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = lambda * a[i] + (1.0 - lambda) * b[i];
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return WeightVector(std::move(w));
}

}  // namespace

SignChangeScan count_sign_changes(Utilities u, Utilities v, const WeightVector& w,
                                  const RootScanConfig& cfg) {
  validate_utilities(u);
  validate_utilities(v);
  if (u.size() != v.size() || u.size() != w.size()) {
    throw std::invalid_argument("dimension mismatch");
  }
  if (!(cfg.p_lo < cfg.p_hi) || cfg.grid_points < 2) {
    throw std::invalid_argument("invalid scan range");
  }
  const double inf = std::numeric_limits<double>::infinity();

  // Signs along the scan, bracketed by the two limits p -> -inf and p -> +inf.
  std::vector<double> ps;
  std::vector<int> signs;
  ps.push_back(-inf);
  signs.push_back(sign_of(log_difference(u, v, w, -inf)));
  const double step = (cfg.p_hi - cfg.p_lo) / (cfg.grid_points - 1);
  for (int k = 0; k < cfg.grid_points; ++k) {
    const double p = k + 1 == cfg.grid_points ? cfg.p_hi : cfg.p_lo + k * step;
    ps.push_back(p);
    signs.push_back(sign_of(log_difference(u, v, w, p)));
  }
  ps.push_back(inf);
  signs.push_back(sign_of(log_difference(u, v, w, inf)));

  SignChangeScan out;
  std::size_t last = signs.size();
  for (std::size_t k = 0; k < signs.size(); ++k) {
    if (signs[k] == 0) continue;
    if (last != signs.size() && signs[k] != signs[last]) {
      ++out.count;
      const double lo = ps[last];
      const double hi = ps[k];
      if (!std::isfinite(lo)) {
        out.roots.push_back(-inf);
      } else if (!std::isfinite(hi)) {
        out.roots.push_back(inf);
      } else {
        out.roots.push_back(bisect(u, v, w, lo, hi, signs[last], cfg.bisection_tol));
      }
    }
    last = k;
  }
  return out;
}

std::set<Labeling> empirical_labelings(std::span<const UtilityPair> samples,
                                       std::span<const WeightVector> w_grid,
                                       std::span<const double> p_grid) {
  std::set<Labeling> out;
  Labeling labels(samples.size());
  for (const auto& w : w_grid) {
    for (double p : p_grid) {
      const PowerParam pp(p);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        labels[i] = compare(samples[i].u, samples[i].v, w, pp);
      }
      out.insert(labels);
    }
  }
  return out;
}

std::vector<WeightVector> simplex_grid(std::size_t d, int resolution) {
  if (d < 1 || resolution < 1) throw std::invalid_argument("invalid simplex grid");
  std::vector<WeightVector> out;
  std::vector<int> counts(d, 0);
  // Enumerate compositions of `resolution` into d nonnegative parts.
  auto recurse = [&](auto&& self, std::size_t i, int remaining) -> void {
    if (i + 1 == d) {
      counts[i] = remaining;
      std::vector<double> w(d);
      for (std::size_t j = 0; j < d; ++j) w[j] = static_cast<double>(counts[j]) / resolution;
      out.emplace_back(std::move(w));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[i] = c;
      self(self, i + 1, remaining - c);
    }
  };
  recurse(recurse, 0, resolution);
  return out;
}

std::string theorem_name(Theorem t) {
  switch (t) {
    case Theorem::kT1a: return "T1a";
    case Theorem::kT1b: return "T1b";
    case Theorem::kT2a: return "T2a";
    case Theorem::kT2b: return "T2b";
    case Theorem::kT3a: return "T3a";
    case Theorem::kT3b: return "T3b";
    case Theorem::kT4a: return "T4a";
    case Theorem::kT4b: return "T4b";
  }
  return "unknown";
}

Theorem parse_theorem(const std::string& name) {
  for (Theorem t : {Theorem::kT1a, Theorem::kT1b, Theorem::kT2a, Theorem::kT2b, Theorem::kT3a,
                    Theorem::kT3b, Theorem::kT4a, Theorem::kT4b}) {
    if (theorem_name(t) == name) return t;
  }
  throw std::invalid_argument("unknown theorem '" + name + "'");
}

double xi(double u_min, double u_max) {
  if (!(u_min > 0.0 && u_min <= u_max)) throw std::invalid_argument("need 0 < u_min <= u_max");
  return u_max * (u_max - u_min);
}

double kappa(double u_min, double u_max) {
  if (!(u_min > 0.0 && u_min <= u_max)) throw std::invalid_argument("need 0 < u_min <= u_max");
  return std::log(u_max / u_min);
}

double bound_value(const BoundQuery& q) {
  if (!(q.n >= 1.0) || !(q.d >= 1.0)) throw std::invalid_argument("need n >= 1 and d >= 1");
  if (!(q.delta > 0.0 && q.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(q.c >= 0.0)) throw std::invalid_argument("c must be >= 0");
  const double n = q.n;
  const double d = q.d;
  const double ln_n = std::log(n);
  const double log2d = std::log2(d);
  const double dim = d * log2d + 1.0;
  const double conf4 = std::sqrt(std::log(4.0 / q.delta) / (2.0 * n));

  auto need_rho = [&] {
    if (!q.rho || !(*q.rho >= 0.0 && *q.rho < 0.5)) {
      throw std::invalid_argument("this bound needs rho in [0, 1/2)");
    }
    return *q.rho;
  };
  auto need_tau = [&] {
    if (!q.tau_max || !(*q.tau_max > 0.0)) {
      throw std::invalid_argument("this bound needs tau_max > 0");
    }
    return *q.tau_max;
  };

  switch (q.theorem) {
    case Theorem::kT1a: {
      const double x = xi(q.u_min, q.u_max);
      return 16.0 * x * (std::sqrt((2.0 * std::log(2.0) + 2.0 * ln_n) / n) + q.c / std::sqrt(n)) +
             6.0 * conf4;
    }
    case Theorem::kT1b: {
      const double x = xi(q.u_min, q.u_max);
      return 16.0 * x *
                 (std::sqrt((2.0 * std::log(2.0) + 16.0 * dim * ln_n) / n) + q.c / std::sqrt(n)) +
             6.0 * conf4;
    }
    case Theorem::kT2a:
      return 16.0 *
             std::sqrt((2.0 * (log2d + 1.0) * std::log(n + 1.0) + std::log(8.0 / q.delta)) / n);
    case Theorem::kT2b:
      return 16.0 * std::sqrt((8.0 * dim * std::log(n + 1.0) + std::log(8.0 / q.delta)) / n);
    case Theorem::kT3a: {
      const double rho = need_rho();
      return 8.0 / (1.0 - 2.0 * rho) * std::sqrt((log2d + 1.0) * std::log(n + 1.0) / n) +
             2.0 * std::sqrt(std::log(1.0 / q.delta) / (2.0 * n));
    }
    case Theorem::kT3b: {
      const double rho = need_rho();
      return 16.0 / (1.0 - 2.0 * rho) * std::sqrt(dim * std::log(n + 1.0) / n) +
             2.0 * std::sqrt(std::log(1.0 / q.delta) / (2.0 * n));
    }
    case Theorem::kT4a: {
      const double scale = 16.0 * need_tau() * kappa(q.u_min, q.u_max);
      return scale * (std::sqrt((2.0 * std::log(2.0) + 2.0 * ln_n) / n) + q.c / std::sqrt(n)) +
             6.0 * conf4;
    }
    case Theorem::kT4b: {
      const double scale = 16.0 * need_tau() * kappa(q.u_min, q.u_max);
      return scale * std::sqrt((2.0 * std::log(2.0) + 16.0 * dim * ln_n) / n) +
             scale * 2.0 * q.c / std::sqrt(n) + 3.0 * conf4;
    }
  }
  throw std::invalid_argument("unknown theorem");
}

ProbeResult quasiconvexity_probe(const std::function<double(const WeightVector&)>& loss,
                                 std::size_t d, bool two_sided, int trials,
                                 std::uint64_t seed) {
  if (d < 1 || trials < 0) throw std::invalid_argument("invalid probe settings");
  ProbeResult out{-std::numeric_limits<double>::infinity(), 0.0};
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, "quasiconvexity", static_cast<std::uint64_t>(t));
    const WeightVector w1 = uniform_simplex_point(rng, d);
    const WeightVector w2 = uniform_simplex_point(rng, d);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double f1 = loss(w1);
    const double f2 = loss(w2);
    const double fm = loss(mix(w1, w2, lambda));
    out.loss_scale = std::max({out.loss_scale, std::abs(f1), std::abs(f2), std::abs(fm)});
    out.worst_violation = std::max(out.worst_violation, fm - std::max(f1, f2));
    if (two_sided) out.worst_violation = std::max(out.worst_violation, std::min(f1, f2) - fm);
  }
  if (trials == 0) out.worst_violation = 0.0;
  return out;
}

ProbeResult l2_quasiconvexity_probe(Utilities u, double y, double p, int trials,
                                    std::uint64_t seed) {
  validate_utilities(u);
  const std::vector<double> row(u.begin(), u.end());
  const PowerParam pp(p);
  return quasiconvexity_probe(
      [&](const WeightVector& w) { return l2_loss(power_mean(row, w, pp), y); }, row.size(),
      false, trials, seed);
}

ProbeResult logistic_quasilinearity_probe(Utilities u, Utilities v, Label y, double p,
                                          double tau, int trials, std::uint64_t seed) {
  validate_utilities(u);
  validate_utilities(v);
  if (u.size() != v.size()) throw std::invalid_argument("dimension mismatch");
  const std::vector<double> a(u.begin(), u.end());
  const std::vector<double> b(v.begin(), v.end());
  return quasiconvexity_probe(
      [&](const WeightVector& w) {
        return logistic_nll({a, b, y}, ModelParams{w, PowerParam(p), tau});
      },
      a.size(), true, trials, seed);
}

}  // namespace swf
