#include "sinebeta/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sinebeta/error.hpp"

namespace sinebeta {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

Estimate mean_estimate(std::span<const double> samples) {
  if (samples.empty()) throw_config("mean_estimate: no samples");
  const auto n = static_cast<double>(samples.size());
  CompensatedSum s;
  for (double x : samples) s.add(x);
  const double mean = s.value() / n;
  CompensatedSum ss;
  for (double x : samples) ss.add((x - mean) * (x - mean));
  const double var = samples.size() > 1 ? ss.value() / (n - 1.0) : 0.0;

  Estimate e;
  e.value = mean;
  e.std_error = std::sqrt(var / n);
  e.n_samples = samples.size();
  e.ess = n;
  e.log_value = mean > 0.0 ? std::log(mean) : -std::numeric_limits<double>::infinity();
  e.log_std_error = mean > 0.0 ? e.std_error / mean : std::numeric_limits<double>::infinity();
  return e;
}

Estimate weighted_indicator_estimate(std::span<const double> log_weights,
                                     std::span<const std::uint8_t> hits) {
  if (log_weights.size() != hits.size() || hits.empty()) {
    throw_config("weighted_indicator_estimate: size mismatch or empty input");
  }
  const auto n = static_cast<double>(hits.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i]) top = std::max(top, log_weights[i]);
  }

  Estimate e;
  e.n_samples = hits.size();
  if (!std::isfinite(top)) {
    e.value = 0.0;
    e.std_error = 0.0;
    e.ess = 0.0;
    e.log_value = -std::numeric_limits<double>::infinity();
    e.log_std_error = std::numeric_limits<double>::infinity();
    e.unreliable = true;
    return e;
  }

  // Work with weights scaled by exp(-top) so the largest is 1.
  CompensatedSum s1, s2;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (!hits[i]) continue;
    const double w = std::exp(log_weights[i] - top);
    s1.add(w);
    s2.add(w * w);
  }
  const double m1 = s1.value() / n;
  const double m2 = s2.value() / n;
  const double var = std::max(0.0, m2 - m1 * m1) * (n > 1.0 ? n / (n - 1.0) : 0.0);
  const double rel = std::sqrt(var / n) / m1;

  e.log_value = top + std::log(m1);
  e.value = std::exp(e.log_value);
  e.std_error = e.value * rel;
  e.log_std_error = rel;
  e.ess = s1.value() * s1.value() / s2.value();
  e.unreliable = e.ess < kMinReliableEss;
  return e;
}

double zero_count_upper_limit(std::size_t n, double confidence) {
  if (n == 0 || !(confidence > 0.0 && confidence < 1.0)) {
    throw_domain("zero_count_upper_limit: need n > 0 and confidence in (0,1)");
  }
  return -std::expm1(std::log1p(-confidence) / static_cast<double>(n));
}

}  // namespace sinebeta
