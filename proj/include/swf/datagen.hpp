#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "swf/dataset.hpp"
#include "swf/losses.hpp"
#include "swf/welfare.hpp"

namespace swf {

struct GenConfig {
  std::size_t d = 5;
  std::size_t n = 1000;
  double u_min = 1.0;
  double u_max = 1000.0;
  // Per-individual Beta shape parameters are drawn uniformly from this range.
  std::pair<double, double> beta_param_range{1.0, 5.0};
  std::size_t pairs_per_sample = 10;
  NoiseSpec noise = NoNoise{};
  std::uint64_t seed = 0;
};

void validate(const GenConfig& cfg);

struct GroundTruth {
  WeightVector w_star;
  double p_star;
  std::optional<double> tau_star;

  ModelParams params() const { return {w_star, PowerParam(p_star), tau_star}; }
};

struct BetaShape {
  double alpha;
  double beta;
};

struct GeneratedUtilities {
  UtilityMatrix u;
  std::vector<BetaShape> shapes;  // one per individual (column)
};

// Row r is drawn from its own counter-indexed substream, so the first k rows
// of an n-row draw equal a k-row draw with the same seed.
GeneratedUtilities gen_utilities(const GenConfig& cfg);

// Uniform on the simplex via normalized Exp(1) draws.
WeightVector sample_weight_vector(std::size_t d, std::uint64_t seed);

// y_i = clip(M(u_i) + N(0, ((u_(d) - u_(1)) nu)^2), u_(1), u_(d)).
std::vector<double> cardinal_labels(const UtilityMatrix& u, const GroundTruth& gt,
                                    double nu, std::uint64_t seed);

// For every row, pairs_per_sample distinct partners j != i drawn uniformly
// without replacement; the anchor is the first element of each pair.
std::vector<IndexPair> ordinal_pairs(std::size_t n, std::size_t pairs_per_sample,
                                     std::uint64_t seed);

std::vector<Label> clean_labels(const UtilityMatrix& u,
                                std::span<const IndexPair> pairs,
                                const GroundTruth& gt);

std::vector<Label> label_logistic(const UtilityMatrix& u,
                                  std::span<const IndexPair> pairs,
                                  const GroundTruth& gt, std::uint64_t seed);

std::vector<Label> label_iid_flip(std::span<const Label> clean, double rho,
                                  std::uint64_t seed);

// Full datasets following cfg.noise. For ordinal data a GaussianNoise spec is
// rejected; NoNoise yields clean comparisons.
CardinalData generate_cardinal(const GenConfig& cfg, const GroundTruth& gt);
OrdinalData generate_ordinal(const GenConfig& cfg, const GroundTruth& gt);

// Ground truth with w* ~ Uniform(simplex) drawn from cfg.seed.
GroundTruth make_ground_truth(const GenConfig& cfg, double p_star,
                              std::optional<double> tau_star);

}  // namespace swf
