#include "swf/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "swf/rng.hpp"

namespace swf {
namespace {

// Uniform [0, 1) draw number `index` of the stream seeded by `stream`.
double counter_uniform(std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(splitmix64(stream + splitmix64(index)) >> 11) * 0x1.0p-53;
}

double draw_beta(Rng& rng, double alpha, double beta) {
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

}  // namespace

void validate(const GenConfig& cfg) {
  if (cfg.d < 1 || cfg.n < 1) throw std::invalid_argument("n and d must be >= 1");
  if (!(cfg.u_min > 0.0 && cfg.u_min <= cfg.u_max)) {
    throw std::invalid_argument("need 0 < u_min <= u_max");
  }
  if (!(cfg.beta_param_range.first > 0.0 &&
        cfg.beta_param_range.first <= cfg.beta_param_range.second)) {
    throw std::invalid_argument("invalid beta parameter range");
  }
  if (cfg.pairs_per_sample < 1) throw std::invalid_argument("pairs_per_sample must be >= 1");
  validate_noise(cfg.noise);
}

GeneratedUtilities gen_utilities(const GenConfig& cfg) {
  validate(cfg);
  GeneratedUtilities out;
  Rng shape_rng = make_rng(cfg.seed, "beta_shapes");
  std::uniform_real_distribution<double> shape(cfg.beta_param_range.first,
                                               cfg.beta_param_range.second);
  out.shapes.resize(cfg.d);
  for (auto& s : out.shapes) {
    s.alpha = shape(shape_rng);
    s.beta = shape(shape_rng);
  }
  out.u = UtilityMatrix(cfg.n, cfg.d);
  const double width = cfg.u_max - cfg.u_min;
  for (std::size_t r = 0; r < cfg.n; ++r) {
    Rng rng = make_rng(cfg.seed, "utilities", r);
    auto row = out.u.row(r);
    for (std::size_t i = 0; i < cfg.d; ++i) {
      const double b = draw_beta(rng, out.shapes[i].alpha, out.shapes[i].beta);
      row[i] = std::clamp(cfg.u_min + width * b, cfg.u_min, cfg.u_max);
    }
  }
  return out;
}

WeightVector sample_weight_vector(std::size_t d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  Rng rng = make_rng(seed, "weights");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(d);
  double sum = 0.0;
  for (double& x : w) {
    x = expo(rng);
    sum += x;
  }
  for (double& x : w) x /= sum;
  // Put the rounding residue on the largest entry so the sum is 1 to an ulp.
  const double residue = 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
  *std::max_element(w.begin(), w.end()) += residue;
  return WeightVector(std::move(w));
}

std::vector<double> cardinal_labels(const UtilityMatrix& u, const GroundTruth& gt,
                                    double nu, std::uint64_t seed) {
  if (!(nu >= 0.0)) throw std::invalid_argument("nu must be >= 0");
  const PowerParam p(gt.p_star);
  std::vector<double> y(u.rows());
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const auto row = u.row(r);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    double value = power_mean(row, gt.w_star, p);
    if (nu > 0.0) {
      Rng rng = make_rng(seed, "cardinal_noise", r);
      std::normal_distribution<double> noise(0.0, (*hi - *lo) * nu);
      value += noise(rng);
    }
    y[r] = std::clamp(value, *lo, *hi);
  }
  return y;
}

std::vector<IndexPair> ordinal_pairs(std::size_t n, std::size_t pairs_per_sample,
                                     std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("ordinal pairs need at least 2 samples");
  if (pairs_per_sample >= n) {
    throw std::invalid_argument("pairs_per_sample must be below the sample count");
  }
  std::vector<IndexPair> pairs;
  pairs.reserve(n * pairs_per_sample);
  const std::size_t others = n - 1;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_rng(seed, "pairs", i);
    // Floyd's sampling of a k-subset of [0, others), kept in draw order.
    std::unordered_set<std::size_t> chosen;
    std::vector<std::size_t> order;
    for (std::size_t j = others - pairs_per_sample; j < others; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      std::size_t t = pick(rng);
      if (chosen.contains(t)) t = j;
      chosen.insert(t);
      order.push_back(t);
    }
    for (std::size_t t : order) pairs.push_back({i, t >= i ? t + 1 : t});
  }
  return pairs;
}

std::vector<Label> clean_labels(const UtilityMatrix& u,
                                std::span<const IndexPair> pairs,
                                const GroundTruth& gt) {
  const PowerParam p(gt.p_star);
  std::vector<double> log_means(u.rows());
  for (std::size_t r = 0; r < u.rows(); ++r) {
    log_means[r] = log_power_mean(u.row(r), gt.w_star, p);
  }
  std::vector<Label> y(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    y[k] = label_of(log_means[pairs[k].u] - log_means[pairs[k].v]);
  }
  return y;
}

std::vector<Label> label_logistic(const UtilityMatrix& u,
                                  std::span<const IndexPair> pairs,
                                  const GroundTruth& gt, std::uint64_t seed) {
  if (!gt.tau_star) throw std::invalid_argument("logistic labels need tau_star");
  const double tau = *gt.tau_star;
  const PowerParam p(gt.p_star);
  std::vector<double> log_means(u.rows());
  for (std::size_t r = 0; r < u.rows(); ++r) {
    log_means[r] = log_power_mean(u.row(r), gt.w_star, p);
  }
  const std::uint64_t stream = derive_seed(seed, "logistic_labels");
  std::vector<Label> y(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double prob = sigmoid(tau * (log_means[pairs[k].u] - log_means[pairs[k].v]));
    y[k] = counter_uniform(stream, k) < prob ? Label::kPositive : Label::kNegative;
  }
  return y;
}

std::vector<Label> label_iid_flip(std::span<const Label> clean, double rho,
                                  std::uint64_t seed) {
  if (!(rho >= 0.0 && rho < 0.5)) {
    throw std::invalid_argument("flip probability must lie in [0, 1/2)");
  }
  const std::uint64_t stream = derive_seed(seed, "flip_labels");
  std::vector<Label> y(clean.begin(), clean.end());
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (counter_uniform(stream, k) < rho) y[k] = negate(y[k]);
  }
  return y;
}

GroundTruth make_ground_truth(const GenConfig& cfg, double p_star,
                              std::optional<double> tau_star) {
  return {sample_weight_vector(cfg.d, cfg.seed), p_star, tau_star};
}

CardinalData generate_cardinal(const GenConfig& cfg, const GroundTruth& gt) {
  validate(cfg);
  if (gt.w_star.size() != cfg.d) throw std::invalid_argument("truth dimension mismatch");
  double nu = 0.0;
  if (const auto* g = std::get_if<GaussianNoise>(&cfg.noise)) {
    nu = g->nu;
  } else if (!std::holds_alternative<NoNoise>(cfg.noise)) {
    throw std::invalid_argument("cardinal data supports only Gaussian noise");
  }
  CardinalData data;
  data.u = gen_utilities(cfg).u;
  data.y = cardinal_labels(data.u, gt, nu, cfg.seed);
  return data;
}

OrdinalData generate_ordinal(const GenConfig& cfg, const GroundTruth& gt) {
  validate(cfg);
  if (gt.w_star.size() != cfg.d) throw std::invalid_argument("truth dimension mismatch");
  OrdinalData data;
  data.u = gen_utilities(cfg).u;
  data.pairs = ordinal_pairs(cfg.n, cfg.pairs_per_sample, cfg.seed);
  if (const auto* l = std::get_if<LogisticNoise>(&cfg.noise)) {
    GroundTruth noisy = gt;
    noisy.tau_star = l->tau;
    data.y = label_logistic(data.u, data.pairs, noisy, cfg.seed);
  } else if (const auto* f = std::get_if<FlipNoise>(&cfg.noise)) {
    data.y = label_iid_flip(clean_labels(data.u, data.pairs, gt), f->rho, cfg.seed);
  } else if (std::holds_alternative<NoNoise>(cfg.noise)) {
    data.y = clean_labels(data.u, data.pairs, gt);
  } else {
    throw std::invalid_argument("ordinal data does not support Gaussian noise");
  }
  return data;
}

}  // namespace swf
