#pragma once

// Desk-scale checks of the structural facts behind the learnability results:
// sign changes of log-mean differences in p, labeling counts, quasiconvexity
// probes, and the generalization bound formulas.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "swf/losses.hpp"
#include "swf/welfare.hpp"

namespace swf {

struct RootScanConfig {
  double p_lo = -50.0;
  double p_hi = 50.0;
  int grid_points = 10000;
  double bisection_tol = 1e-10;
};

struct SignChangeScan {
  int count = 0;
  // Located roots; +/-infinity marks a change between a scan endpoint and the
  // corresponding limit p -> +/-infinity.
  std::vector<double> roots;
};

// Sign changes in p of log M(u; w, p) - log M(v; w, p) over the scan range
// plus both infinite limits. Requires disjoint entry sets and w > 0.
SignChangeScan count_sign_changes(Utilities u, Utilities v, const WeightVector& w,
                                  const RootScanConfig& cfg = {});

struct UtilityPair {
  std::vector<double> u;
  std::vector<double> v;
};

using Labeling = std::vector<Label>;

// Distinct label vectors produced by compare() over every (w, p) grid pair.
std::set<Labeling> empirical_labelings(std::span<const UtilityPair> samples,
                                       std::span<const WeightVector> w_grid,
                                       std::span<const double> p_grid);

// Regular grid over the simplex with spacing 1 / resolution.
std::vector<WeightVector> simplex_grid(std::size_t d, int resolution);

enum class Theorem { kT1a, kT1b, kT2a, kT2b, kT3a, kT3b, kT4a, kT4b };

std::string theorem_name(Theorem t);
Theorem parse_theorem(const std::string& name);

struct BoundQuery {
  Theorem theorem = Theorem::kT2a;
  double n = 1000;
  double d = 5;
  double delta = 0.05;
  std::optional<double> rho;
  std::optional<double> tau_max;
  double u_min = 1.0;
  double u_max = 1000.0;
  double c = 1.0;  // covering-number constant; never fixed by the theory
};

// u_max (u_max - u_min)
double xi(double u_min, double u_max);
// log(u_max / u_min)
double kappa(double u_min, double u_max);

// Right-hand side of the selected excess-risk bound. Natural logs except the
// explicit log2 terms.
double bound_value(const BoundQuery& q);

struct ProbeResult {
  double worst_violation = 0.0;  // <= 0 means no violation found
  double loss_scale = 0.0;       // largest |loss| seen
};

// Samples w1, w2 uniformly on the simplex and lambda in [0, 1]. One-sided
// probes measure f(mix) - max(f(w1), f(w2)); two-sided probes additionally
// measure min(f(w1), f(w2)) - f(mix).
ProbeResult quasiconvexity_probe(const std::function<double(const WeightVector&)>& loss,
                                 std::size_t d, bool two_sided, int trials,
                                 std::uint64_t seed);

// Per-sample l2 loss (M(u; w, p) - y)^2 at fixed p.
ProbeResult l2_quasiconvexity_probe(Utilities u, double y, double p, int trials,
                                    std::uint64_t seed);

// Per-sample logistic loss at fixed (p, tau); two-sided.
ProbeResult logistic_quasilinearity_probe(Utilities u, Utilities v, Label y, double p,
                                          double tau, int trials, std::uint64_t seed);

}  // namespace swf
