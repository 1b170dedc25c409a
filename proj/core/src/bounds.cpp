#include "sinebeta/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sinebeta/error.hpp"
#include "sinebeta/specialfn.hpp"
#include "sinebeta/stats.hpp"

namespace sinebeta::bounds {
namespace {

void check_n_lambda(int n, double lambda) {
  if (n < 1) throw_domain("n must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw_domain("lambda must be finite and > 0");
}

double harmonic(int m) {
  CompensatedSum s;
  for (int k = 1; k <= m; ++k) s.add(1.0 / k);
  return s.value();
}

}  // namespace

void BoundEnvelope::validate() const {
  if (!(beta > 0.0) || !(lambda0 > 0.0) || !(c > 0.0) || !(c1 > 0.0) || !(c2 > 0.0)) {
    throw_domain("BoundEnvelope: all constants must be > 0");
  }
}

double leading_log_order(int n, double lambda, double beta) {
  check_n_lambda(n, lambda);
  const double nn = n;
  return -0.5 * beta * nn * nn * std::log(nn / lambda);
}

double envelope_width_factor(int n, double lambda) {
  check_n_lambda(n, lambda);
  const double nn = n;
  return nn * std::log(nn + 1.0) * std::log(nn / lambda) + nn * nn;
}

LogInterval envelope_log_bounds(int n, double lambda, const BoundEnvelope& env) {
  env.validate();
  check_n_lambda(n, lambda);
  if (lambda > env.lambda0) throw_domain("envelope_log_bounds: lambda exceeds lambda0");
  const double lead = leading_log_order(n, lambda, env.beta);
  const double width = env.c * envelope_width_factor(n, lambda);
  return {lead - width, lead + width};
}

double trivial_log_upper(int n, double lambda) {
  check_n_lambda(n, lambda);
  return n * std::log(lambda / (2.0 * specialfn::kPi));
}

double rescaled_trivial_log_upper(int n, double lambda, double c1) {
  check_n_lambda(n, lambda);
  const double nn = n;
  return -nn * std::log(nn / lambda) + c1 * nn * nn;
}

double tau_log_leading(double lambda, double t) {
  if (!(lambda > 0.0) || !(t > 0.0)) throw_domain("tau bound: lambda and t must be > 0");
  const double w = specialfn::lambert_w_lower(-lambda * t);
  return -2.0 / t * w * w;
}

double tau_log_bound(double lambda, double t, double c, Side side) {
  if (!(c >= 0.0)) throw_domain("tau_log_bound: c must be >= 0");
  const double lead = tau_log_leading(lambda, t);
  const double lt = std::min(lambda * t, specialfn::kInvE);
  const double slack = c * (1.0 + 1.0 / t) * std::log(1.0 / lt);
  return side == Side::Upper ? lead + slack : lead - slack;
}

LowerRecursion::LowerRecursion(double beta, double c1, int n0, double f0, int n_max)
    : beta_(beta), c1_(c1), n0_(n0) {
  if (!(beta > 0.0) || !(c1 > 0.0) || !(f0 > 0.0)) throw_domain("LowerRecursion: need beta, c1, f0 > 0");
  if (n0 < 1 || n_max < n0) throw_domain("LowerRecursion: need 1 <= n0 <= n_max");
  values_.reserve(static_cast<std::size_t>(n_max - n0 + 1));
  values_.push_back(f0);
  for (int n = n0 + 1; n <= n_max; ++n) {
    const double prev = values_.back();
    values_.push_back((n + 1.0) / n * prev + 0.5 * beta * n + c1);
  }
  constant_ = f0 / (n0 + 1.0) - 0.5 * beta * n0 - (c1 - 0.5 * beta) * harmonic(n0 + 1);
}

double LowerRecursion::value(int n) const {
  if (n < n0_ || n > n_max()) throw_domain("LowerRecursion::value: index out of range");
  return values_[static_cast<std::size_t>(n - n0_)];
}

double LowerRecursion::closed_form(int n) const {
  if (n < 1) throw_domain("LowerRecursion::closed_form: n must be >= 1");
  const double m = n + 1.0;
  return 0.5 * beta_ * n * m + (c1_ - 0.5 * beta_) * m * harmonic(n + 1) + constant_ * m;
}

UpperRecursion::UpperRecursion(double beta, double c2, int n0, int n_max) : n0_(n0) {
  if (!(beta > 0.0) || !(c2 > 0.0)) throw_domain("UpperRecursion: need beta, c2 > 0");
  if (n0 < 1 || n_max < n0) throw_domain("UpperRecursion: need 1 <= n0 <= n_max");
  values_.reserve(static_cast<std::size_t>(n_max - n0 + 1));
  values_.push_back(static_cast<double>(n0));
  branches_.push_back(UpperBranch::Cap);  // placeholder for the base index
  for (int n = n0 + 1; n <= n_max; ++n) {
    const double f = values_.back();
    const double sqrt_step = f + std::sqrt(2.0 * beta * f) - c2;
    const double geometric = f * (1.0 + 3.0 / n);
    const double cap = 0.5 * beta * static_cast<double>(n) * n;
    double v = sqrt_step;
    UpperBranch b = UpperBranch::SqrtStep;
    if (geometric < v) {
      v = geometric;
      b = UpperBranch::Geometric;
    }
    if (cap < v) {
      v = cap;
      b = UpperBranch::Cap;
    }
    values_.push_back(v);
    branches_.push_back(b);
  }
}

double UpperRecursion::value(int n) const {
  if (n < n0_ || n > n_max()) throw_domain("UpperRecursion::value: index out of range");
  return values_[static_cast<std::size_t>(n - n0_)];
}

UpperBranch UpperRecursion::branch(int n) const {
  if (n <= n0_ || n > n_max()) throw_domain("UpperRecursion::branch: index out of range");
  return branches_[static_cast<std::size_t>(n - n0_)];
}

std::vector<UpperRecursion::RegimeChange> UpperRecursion::regimes() const {
  std::vector<RegimeChange> out;
  for (int n = n0_ + 1; n <= n_max(); ++n) {
    const UpperBranch b = branch(n);
    if (out.empty() || out.back().branch != b) out.push_back({n, b});
  }
  return out;
}

double fit_envelope_constant(std::span<const EnvelopePoint> points,
                             const BoundEnvelope& env_template) {
  if (points.empty()) throw_domain("fit_envelope_constant: no points");
  if (!(env_template.beta > 0.0)) throw_domain("fit_envelope_constant: beta must be > 0");
  double c = 0.0;
  for (const auto& p : points) {
    if (!std::isfinite(p.log_prob)) throw_domain("fit_envelope_constant: non-finite log_prob");
    const double width = envelope_width_factor(p.n, p.lambda);
    if (!(width > 0.0)) throw_domain("fit_envelope_constant: envelope degenerate at this point");
    const double lead = leading_log_order(p.n, p.lambda, env_template.beta);
    c = std::max(c, std::abs(p.log_prob - lead) / width);
  }
  return c;
}

}  // namespace sinebeta::bounds
