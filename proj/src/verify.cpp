#include "swf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "swf/analysis.hpp"
#include "swf/learner.hpp"
#include "swf/losses.hpp"
#include "swf/rng.hpp"
#include "swf/welfare.hpp"

namespace swf {
namespace {

constexpr double kUMin = 1.0;
constexpr double kUMax = 1000.0;
constexpr double kFdStep = 1e-6;

std::vector<double> random_utilities(Rng& rng, std::size_t d) {
  std::uniform_real_distribution<double> unif(kUMin, kUMax);
  std::vector<double> u(d);
  for (double& x : u) x = unif(rng);
  return u;
}

// Exp-normalized point mixed with the centroid so every coordinate stays at
// least 0.1 / d away from the boundary.
WeightVector interior_weights(Rng& rng, std::size_t d) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(d);
  double sum = 0.0;
  for (double& x : w) sum += (x = expo(rng));
  double total = 0.0;
  for (double& x : w) total += (x = 0.9 * x / sum + 0.1 / static_cast<double>(d));
  for (double& x : w) x /= total;
  return WeightVector(std::move(w));
}

WeightVector random_weights(Rng& rng, std::size_t d) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(d);
  double sum = 0.0;
  for (double& x : w) sum += (x = expo(rng));
  for (double& x : w) x /= sum;
  return WeightVector(std::move(w));
}

double power_away_from_zero(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.05, 5.0);
  const double p = unif(rng);
  return std::bernoulli_distribution(0.5)(rng) ? p : -p;
}

WeightVector shifted(const WeightVector& w, std::size_t i, std::size_t j, double h) {
  std::vector<double> v = w.vector();
  v[i] += h;
  v[j] -= h;
  return WeightVector(std::move(v));
}

double rel_error(double analytic, double fd) {
  return std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1.0});
}

CheckResult finish(std::string name, int cases, double worst, double tol, std::string detail) {
  return {std::move(name), worst <= tol, cases, worst, tol, std::move(detail)};
}

}  // namespace

CheckResult check_monotonicity(int cases, std::uint64_t seed) {
  constexpr int kGrid = 200;
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    Rng rng = make_rng(seed, "monotonicity", static_cast<std::uint64_t>(c));
    const auto d = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    const auto u = random_utilities(rng, d);
    const WeightVector w = random_weights(rng, d);
    double prev = power_mean(u, w, PowerParam(-10.0));
    for (int k = 1; k < kGrid; ++k) {
      const double p = -10.0 + 20.0 * k / (kGrid - 1);
      const double m = power_mean(u, w, PowerParam(p));
      worst = std::max(worst, prev - m);
      prev = m;
    }
  }
  return finish("monotonicity", cases, worst, 1e-9 * kUMax, "max decrease of M along p");
}

CheckResult check_gradients(int cases, std::uint64_t seed) {
  double worst = 0.0;
  const double h = kFdStep;
  for (int c = 0; c < cases; ++c) {
    Rng rng = make_rng(seed, "gradients", static_cast<std::uint64_t>(c));
    const auto d = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const auto u = random_utilities(rng, d);
    const auto v = random_utilities(rng, d);
    const WeightVector w = interior_weights(rng, d);
    const double p = c % 10 == 0 ? 0.0 : power_away_from_zero(rng);
    auto pick = std::uniform_int_distribution<std::size_t>(0, d - 1);
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (j == i) j = (i + 1) % d;
    const WeightVector wp = shifted(w, i, j, h);
    const WeightVector wm = shifted(w, i, j, -h);

    // log M along e_i - e_j and in p.
    const auto g = grad_log_power_mean_w(u, w, PowerParam(p));
    const double fd_w = (log_power_mean(u, wp, PowerParam(p)) -
                         log_power_mean(u, wm, PowerParam(p))) / (2 * h);
    worst = std::max(worst, rel_error(g[i] - g[j], fd_w));
    if (p != 0.0) {
      const double fd_p = (log_power_mean(u, w, PowerParam(p + h)) -
                           log_power_mean(u, w, PowerParam(p - h))) / (2 * h);
      worst = std::max(worst, rel_error(grad_log_power_mean_p(u, w, PowerParam(p)), fd_p));
    }

    // Logistic loss in w, p and tau.
    const double tau = std::uniform_real_distribution<double>(0.1, 20.0)(rng);
    const Label y = std::bernoulli_distribution(0.5)(rng) ? Label::kPositive : Label::kNegative;
    const OrdinalSample s{u, v, y};
    const ModelParams params{w, PowerParam(p), tau};
    const auto gl = grad_logistic_nll(s, params);
    const double fd_lw = (logistic_nll(s, {wp, PowerParam(p), tau}) -
                          logistic_nll(s, {wm, PowerParam(p), tau})) / (2 * h);
    worst = std::max(worst, rel_error(gl.w[i] - gl.w[j], fd_lw));
    const double fd_tau = (logistic_nll(s, {w, PowerParam(p), tau + h}) -
                           logistic_nll(s, {w, PowerParam(p), tau - h})) / (2 * h);
    worst = std::max(worst, rel_error(gl.tau, fd_tau));
    if (p != 0.0) {
      const double fd_lp = (logistic_nll(s, {w, PowerParam(p + h), tau}) -
                            logistic_nll(s, {w, PowerParam(p - h), tau})) / (2 * h);
      worst = std::max(worst, rel_error(gl.p, fd_lp));
    }

    // l2 loss against a label near the mean.
    const double m = power_mean(u, w, PowerParam(p));
    const double target = m + std::normal_distribution<double>(0.0, 50.0)(rng);
    const CardinalSample cs{u, target};
    const auto g2 = grad_l2(cs, params);
    const double fd_2w = (l2_loss(power_mean(u, wp, PowerParam(p)), target) -
                          l2_loss(power_mean(u, wm, PowerParam(p)), target)) / (2 * h);
    worst = std::max(worst, rel_error(g2.w[i] - g2.w[j], fd_2w));
    if (p != 0.0) {
      const double fd_2p = (l2_loss(power_mean(u, w, PowerParam(p + h)), target) -
                            l2_loss(power_mean(u, w, PowerParam(p - h)), target)) / (2 * h);
      worst = std::max(worst, rel_error(g2.p, fd_2p));
    }
  }
  return finish("gradients", cases, worst, 1e-5, "central differences, step 1e-6");
}

CheckResult check_projection(int cases, std::uint64_t seed) {
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    Rng rng = make_rng(seed, "projection", static_cast<std::uint64_t>(c));
    const auto d = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const double scale = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<double> v(d);
    for (double& x : v) x = normal(rng);
    const WeightVector x = project_simplex(v);
    // KKT: v_i - x_i equals a common theta on the support and is <= theta off it.
    double theta = 0.0;
    int support = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      worst = std::max(worst, -x[i]);
      sum += x[i];
      if (x[i] > 0.0) {
        theta += v[i] - x[i];
        ++support;
      }
    }
    worst = std::max(worst, std::abs(sum - 1.0));
    if (support == 0) {
      worst = std::max(worst, 1.0);
      continue;
    }
    theta /= support;
    for (std::size_t i = 0; i < d; ++i) {
      const double r = v[i] - x[i];
      worst = std::max(worst, x[i] > 0.0 ? std::abs(r - theta) : r - theta);
    }
  }
  return finish("projection", cases, worst, 1e-9, "KKT residual of the projection");
}

CheckResult check_root_counts(int cases, std::uint64_t seed) {
  int worst = -1000;
  int total = 0;
  for (std::size_t d = 2; d <= 6; ++d) {
    for (int c = 0; c < cases; ++c) {
      Rng rng = make_rng(derive_seed(seed, "roots", d), "pair", static_cast<std::uint64_t>(c));
      std::vector<double> all = random_utilities(rng, 2 * d);
      std::sort(all.begin(), all.end());
      if (std::adjacent_find(all.begin(), all.end()) != all.end()) continue;
      std::shuffle(all.begin(), all.end(), rng);
      const std::vector<double> u(all.begin(), all.begin() + static_cast<long>(d));
      const std::vector<double> v(all.begin() + static_cast<long>(d), all.end());
      const int generic = count_sign_changes(u, v, random_weights(rng, d)).count;
      const int uniform = count_sign_changes(u, v, WeightVector::uniform(d)).count;
      const int di = static_cast<int>(d);
      worst = std::max({worst, generic - (2 * di - 1), uniform - (di - 1)});
      ++total;
    }
  }
  return finish("root_counts", total, worst, 0.0, "sign changes minus bound (<= 0 passes)");
}

CheckResult check_quasiconvexity(int cases, std::uint64_t seed) {
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    Rng rng = make_rng(seed, "quasi_setup", static_cast<std::uint64_t>(c));
    const auto d = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const auto u = random_utilities(rng, d);
    const auto v = random_utilities(rng, d);
    const double p = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    const double y = std::uniform_real_distribution<double>(*lo, *hi)(rng);
    const double tau = std::uniform_real_distribution<double>(0.1, 50.0)(rng);
    const Label label = c % 2 == 0 ? Label::kPositive : Label::kNegative;
    const std::uint64_t probe_seed = derive_seed(seed, "quasi_probe", c);

    for (const ProbeResult& r :
         {l2_quasiconvexity_probe(u, y, p, 1, probe_seed),
          logistic_quasilinearity_probe(u, v, label, p, tau, 1, probe_seed)}) {
      if (r.loss_scale > 0.0) worst = std::max(worst, r.worst_violation / r.loss_scale);
    }
  }
  return finish("quasiconvexity", cases, worst, 1e-9,
                "violation relative to the largest loss seen");
}

CheckResult check_unbiased_estimator(int draws, std::uint64_t seed) {
  double worst = 0.0;
  for (double rho : {0.1, 0.3}) {
    for (Label pred : {Label::kPositive, Label::kNegative}) {
      for (Label y : {Label::kPositive, Label::kNegative}) {
        Rng rng = make_rng(seed, "unbiased", static_cast<std::uint64_t>(rho * 10) * 4 +
                                                 (to_int(pred) + 1) + (to_int(y) + 1) / 2);
        std::bernoulli_distribution flip(rho);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (int k = 0; k < draws; ++k) {
          const double l = unbiased_zero_one(pred, flip(rng) ? negate(y) : y, rho);
          sum += l;
          sum_sq += l * l;
        }
        const double mean = sum / draws;
        const double var = std::max(sum_sq / draws - mean * mean, 0.0);
        const double se = std::sqrt(var / draws);
        worst = std::max(worst, std::abs(mean - zero_one_loss(pred, y)) / se);
      }
    }
  }
  return finish("unbiased_estimator", draws, worst, 3.0,
                "|MC mean - clean loss| in standard errors");
}

CheckResult check_bound_monotonicity() {
  const double ns[] = {3, 10, 30, 100, 300, 1000, 10000, 100000};
  const double ds[] = {2, 3, 5, 8, 10, 20};
  const double deltas[] = {0.2, 0.1, 0.05, 0.01};  // increasing 1/delta
  constexpr double kSlack = 1e-12;
  int violations = 0;
  int cases = 0;
  std::ostringstream detail;
  for (Theorem t : {Theorem::kT1a, Theorem::kT1b, Theorem::kT2a, Theorem::kT2b, Theorem::kT3a,
                    Theorem::kT3b, Theorem::kT4a, Theorem::kT4b}) {
    auto query = [&](double n, double d, double delta) {
      BoundQuery q;
      q.theorem = t;
      q.n = n;
      q.d = d;
      q.delta = delta;
      q.rho = 0.1;
      q.tau_max = 10.0;
      return q;
    };
    auto value = [&](double n, double d, double delta) { return bound_value(query(n, d, delta)); };
    for (double n : ns) {
      for (std::size_t k = 0; k < std::size(ds); ++k) {
        for (std::size_t m = 0; m < std::size(deltas); ++m) {
          const double f = value(n, ds[k], deltas[m]);
          ++cases;
          if (n != ns[std::size(ns) - 1]) {
            const double next_n = *(std::find(std::begin(ns), std::end(ns), n) + 1);
            if (value(next_n, ds[k], deltas[m]) > f * (1 + kSlack)) {
              ++violations;
              detail << theorem_name(t) << " increases in n at n=" << n << "; ";
            }
          }
          if (k + 1 < std::size(ds) && value(n, ds[k + 1], deltas[m]) < f * (1 - kSlack)) {
            ++violations;
            detail << theorem_name(t) << " decreases in d at d=" << ds[k] << "; ";
          }
          if (m + 1 < std::size(deltas) && value(n, ds[k], deltas[m + 1]) < f * (1 - kSlack)) {
            ++violations;
            detail << theorem_name(t) << " decreases in 1/delta; ";
          }
          // Noise parameters only enter the bounds that use them.
          for (double rho : {0.2, 0.3, 0.4, 0.49}) {
            auto q = query(n, ds[k], deltas[m]);
            q.rho = rho;
            if (bound_value(q) < f * (1 - kSlack)) {
              ++violations;
              detail << theorem_name(t) << " decreases in rho; ";
            }
          }
          for (double tau : {20.0, 50.0, 100.0}) {
            auto q = query(n, ds[k], deltas[m]);
            q.tau_max = tau;
            if (bound_value(q) < f * (1 - kSlack)) {
              ++violations;
              detail << theorem_name(t) << " decreases in tau_max; ";
            }
          }
        }
      }
    }
  }
  return finish("bound_monotonicity", cases, violations, 0.0,
                violations ? detail.str() : "lattice n >= 3; rho and tau_max nondecreasing");
}

CheckResult check_labeling_counts(int cases, std::uint64_t seed) {
  constexpr std::size_t kSamples = 8;
  std::vector<double> p_grid;
  for (int k = 0; k <= 2000; ++k) p_grid.push_back(-50.0 + 0.05 * k);
  int worst = -1000;
  for (int c = 0; c < cases; ++c) {
    Rng rng = make_rng(seed, "labelings", static_cast<std::uint64_t>(c));
    const auto d = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    std::vector<UtilityPair> samples;
    int roots = 0;
    for (std::size_t k = 0; k < kSamples; ++k) {
      UtilityPair pr{random_utilities(rng, d), random_utilities(rng, d)};
      roots += count_sign_changes(pr.u, pr.v, WeightVector::uniform(d)).count;
      samples.push_back(std::move(pr));
    }
    const std::vector<WeightVector> w_grid{WeightVector::uniform(d)};
    const int seen = static_cast<int>(empirical_labelings(samples, w_grid, p_grid).size());
    // Labels only change where some sample crosses a root, and each sample has
    // at most d - 1 roots under uniform weights.
    const int bound = std::min(roots, static_cast<int>(kSamples * (d - 1))) + 1;
    worst = std::max(worst, seen - bound);
  }
  return finish("labeling_counts", cases, worst, 0.0,
                "labelings along p minus (1 + sign changes) (<= 0 passes)");
}

std::vector<CheckResult> run_property_checks(const VerifyConfig& cfg) {
  auto scaled = [&](int base) { return std::max(1, static_cast<int>(std::lround(base * cfg.scale))); };
  return {check_monotonicity(scaled(1000), cfg.seed),
          check_gradients(scaled(200), cfg.seed),
          check_projection(scaled(500), cfg.seed),
          check_root_counts(scaled(500), cfg.seed),
          check_quasiconvexity(scaled(1000), cfg.seed),
          check_unbiased_estimator(scaled(100000), cfg.seed),
          check_bound_monotonicity(),
          check_labeling_counts(scaled(50), cfg.seed)};
}

nlohmann::json checks_to_json(const std::vector<CheckResult>& checks) {
  nlohmann::json out = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.passed;
    out.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"cases", c.cases},
                   {"worst", c.worst},
                   {"tolerance", c.tolerance},
                   {"detail", c.detail}});
  }
  return {{"passed", all}, {"checks", out}};
}

}  // namespace swf
