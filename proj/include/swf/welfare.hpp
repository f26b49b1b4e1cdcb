#pragma once

// Weighted power means M(u; w, p) and their logarithms, evaluated in the log
// domain so that |p| * log(u_max) may be far beyond the range of exp().

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace swf {

// Below this magnitude p is treated as 0 (weighted geometric mean).
inline constexpr double kNearZeroPower = 1e-8;

// Tolerance on sum(w) == 1 accepted by WeightVector.
inline constexpr double kSimplexTolerance = 1e-12;

using Utilities = std::span<const double>;

// Throws std::invalid_argument unless every entry is finite and > 0.
void validate_utilities(Utilities u);

// Extended-real power parameter: finite, or one of the two infinities.
class PowerParam {
 public:
  explicit PowerParam(double value);

  static PowerParam negative_infinity() {
    return PowerParam(-std::numeric_limits<double>::infinity());
  }
  static PowerParam positive_infinity() {
    return PowerParam(std::numeric_limits<double>::infinity());
  }

  double value() const { return value_; }
  bool is_finite() const { return std::isfinite(value_); }
  bool near_zero() const { return std::abs(value_) < kNearZeroPower; }

  friend bool operator==(const PowerParam&, const PowerParam&) = default;

 private:
  double value_;
};

// A point on the probability simplex.
class WeightVector {
 public:
  // Validates nonnegativity and sum == 1 within kSimplexTolerance.
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t d);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> values() const { return weights_; }
  const std::vector<double>& vector() const { return weights_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> weights_;
};

enum class Label : std::int8_t { kNegative = -1, kPositive = 1 };

inline int to_int(Label y) { return static_cast<int>(y); }
inline Label negate(Label y) {
  return y == Label::kPositive ? Label::kNegative : Label::kPositive;
}
// sign with sign(0) = +1.
inline Label label_of(double diff) {
  return diff >= 0.0 ? Label::kPositive : Label::kNegative;
}

struct ModelParams {
  WeightVector w;
  PowerParam p;
  std::optional<double> tau;
};

double log_power_mean(Utilities u, const WeightVector& w, PowerParam p);

// Result is clamped into [min, max] of the entries carrying positive weight.
double power_mean(Utilities u, const WeightVector& w, PowerParam p);

Label compare(Utilities u, Utilities v, const WeightVector& w, PowerParam p);

// d/dw_i log M in full d coordinates (no simplex elimination). Throws
// std::domain_error for infinite p.
std::vector<double> grad_log_power_mean_w(Utilities u, const WeightVector& w,
                                          PowerParam p);

// d/dp log M. Throws std::domain_error for infinite p or |p| < kNearZeroPower.
double grad_log_power_mean_p(Utilities u, const WeightVector& w, PowerParam p);

namespace detail {
// d/dp log M without the near-zero guard: inside the band it returns the
// limit Var_w(log u) / 2.
double dlog_mean_dp(Utilities u, const WeightVector& w, double p);
}  // namespace detail

}  // namespace swf
