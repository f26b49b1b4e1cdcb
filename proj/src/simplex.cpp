#include <algorithm>
#include <functional>
#include <stdexcept>

#include "swf/learner.hpp"

namespace swf {

// Sort-based projection: with v sorted descending, the threshold is
// theta = (sum_{k<=K} v_(k) - 1) / K for the largest K with
// v_(K) > (sum_{k<=K} v_(k) - 1) / K.
WeightVector project_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("cannot project an empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumsum += sorted[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] > t) theta = t;
  }
  std::vector<double> w(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    w[i] = std::max(v[i] - theta, 0.0);
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return WeightVector(std::move(w));
}

}  // namespace swf
