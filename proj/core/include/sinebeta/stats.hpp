#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace sinebeta {

/// Monte Carlo estimate with its uncertainty.
///
/// Probabilities too small for a double are carried in log_value; value is
/// then exp(log_value) and may underflow to 0 while log_value stays finite.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  double ess = 0.0;  // effective sample size; equals n_samples when unweighted
  double censored_fraction = 0.0;
  double log_value = 0.0;      // log of value; -inf when value == 0
  double log_std_error = 0.0;  // delta-method stderr of log_value
  bool unreliable = false;     // ess below kMinReliableEss
  bool extinct = false;        // splitting population died out
  int level_reached = -1;      // splitting: last level with survivors
};

inline constexpr double kMinReliableEss = 30.0;

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Sample mean with stderr from the unbiased sample variance.
Estimate mean_estimate(std::span<const double> samples);

/// Estimate of E[w 1(hit)] for weights given on log scale. Entries with
/// hit == 0 contribute zero regardless of their log weight.
Estimate weighted_indicator_estimate(std::span<const double> log_weights,
                                     std::span<const std::uint8_t> hits);

/// Upper limit of the one-sided binomial confidence interval when zero
/// successes were observed in n trials: 1 - (1 - confidence)^{1/n}.
double zero_count_upper_limit(std::size_t n, double confidence);

}  // namespace sinebeta
