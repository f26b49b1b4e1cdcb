#pragma once

// Randomized property checks behind the `verify` command.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace swf {

struct CheckResult {
  std::string name;
  bool passed = false;
  int cases = 0;
  double worst = 0.0;      // largest observed violation or error
  double tolerance = 0.0;  // pass iff worst <= tolerance
  std::string detail;
};

// power_mean nondecreasing in p over a 200-point grid on [-10, 10], for random
// d <= 10 and utilities in [1, 1000]; tolerance 1e-9 * u_max.
CheckResult check_monotonicity(int cases, std::uint64_t seed);

// Analytic gradients of log M (in w along simplex directions, and in p), the
// logistic loss and the l2 loss against central differences with step 1e-6.
// Error is |analytic - fd| / max(|analytic|, |fd|, 1).
CheckResult check_gradients(int cases, std::uint64_t seed);

// project_simplex output satisfies the KKT conditions of the projection.
CheckResult check_projection(int cases, std::uint64_t seed);

// Sign changes in p of the log-mean difference for disjoint-entry pairs over
// [-50, 50] with 1e4 points: at most 2d - 1 for random w and d - 1 for
// uniform w, d in 2..6. `cases` pairs per d. Worst is the largest excess.
CheckResult check_root_counts(int cases, std::uint64_t seed);

// Quasiconvexity of the per-sample l2 loss and quasilinearity of the
// per-sample logistic loss in w; violation relative to the loss scale, at
// most 1e-9. `cases` trials per loss.
CheckResult check_quasiconvexity(int cases, std::uint64_t seed);

// Monte Carlo mean of unbiased_zero_one over `draws` flips for rho in
// {0.1, 0.3}, within 3 standard errors of the clean loss.
CheckResult check_unbiased_estimator(int draws, std::uint64_t seed);

// Every bound nonincreasing in n and nondecreasing in d and 1/delta over a
// lattice with n >= 3, and nondecreasing in rho and tau_max.
CheckResult check_bound_monotonicity();

// Distinct labelings of random comparison samples as p sweeps [-50, 50] at
// uniform w never exceed one plus the total number of sign changes.
CheckResult check_labeling_counts(int cases, std::uint64_t seed);

struct VerifyConfig {
  std::uint64_t seed = 0;
  double scale = 1.0;  // multiplies the default case counts
};

std::vector<CheckResult> run_property_checks(const VerifyConfig& cfg);

nlohmann::json checks_to_json(const std::vector<CheckResult>& checks);

}  // namespace swf
