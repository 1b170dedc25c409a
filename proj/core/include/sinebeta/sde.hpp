#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sinebeta/noise.hpp"

// Path simulation for the phase diffusions behind the Sine_beta counting
// function.
//
// Two charts are used. The alpha chart integrates
//   d alpha = mu(t) dt + 2 sin(alpha / 2) dB
// with mu(t) = lambda (beta/4) exp(-beta (t0 + t) / 4) (AlphaDecaying) or
// mu = lambda (AlphaConstant). The X chart integrates the log-tangent image
// X = log tan(alpha / 4) of one 2 pi winding,
//   dX = (lambda/2) sqrt(cosh^2 X + a) dt + (1/2) tanh X dt + dB,
// from X = -inf to explosion at +inf (a = 0 is XConstant, a != 0 the
// YFamily proposal).
namespace sinebeta::sde {

inline constexpr double kTwoPi = 6.28318530717958647692;

enum class DiffusionKind { AlphaDecaying, AlphaConstant, XConstant, YFamily };

struct DiffusionSpec {
  DiffusionKind kind = DiffusionKind::AlphaDecaying;
  double lambda = 0.0;       // drift scale; 0 is allowed as a degenerate case
  double beta = 0.0;         // AlphaDecaying only
  double a = 0.0;            // YFamily only, a > -1
  double time_offset = 0.0;  // AlphaDecaying only: clock at path start

  static DiffusionSpec alpha_decaying(double lambda, double beta, double time_offset = 0.0);
  static DiffusionSpec alpha_constant(double lambda);
  static DiffusionSpec x_constant(double lambda);
  static DiffusionSpec y_family(double lambda, double a);

  bool alpha_chart() const noexcept {
    return kind == DiffusionKind::AlphaDecaying || kind == DiffusionKind::AlphaConstant;
  }
  /// Throws InvalidConfig on out-of-range parameters.
  void validate() const;

  friend bool operator==(const DiffusionSpec&, const DiffusionSpec&) = default;
};

struct SimConfig {
  double step = 1e-3;    // Euler-Maruyama step h
  double x_cap = 12.0;   // |X| >= x_cap stands in for -inf / +inf
  double t_max = 10.0;   // censoring horizon
  double max_dx = 0.01;  // X chart: cap on |drift| * step
  std::uint64_t seed = 0;
  std::uint64_t substream_id = 0;  // experiment index for derived streams

  void validate() const;

  /// 1e-3 * min(1, 1/lambda).
  static double default_step(double lambda);
  /// (4/beta) log(lambda / (2 pi eps)): past this time the expected number
  /// of further 2 pi crossings of AlphaDecaying is below eps. Never less
  /// than one default step.
  static double counting_horizon(double lambda, double beta, double eps = 1e-4);
};

enum class PathEvent { HitLevel, Exploded, Censored };

struct PathOutcome {
  double terminal_value = 0.0;  // alpha or X at termination
  double elapsed = 0.0;
  PathEvent event = PathEvent::Censored;
  int levels_crossed = 0;
  std::uint64_t increments_consumed = 0;
  std::vector<double> crossing_times;  // alpha chart: first time each new level is reached

  friend bool operator==(const PathOutcome&, const PathOutcome&) = default;
};

/// Euler-Maruyama path in the alpha chart started at `start`. Stops at the
/// first crossing of 2 pi * target_level (HitLevel, crossing time linearly
/// interpolated) or at cfg.t_max (Censored). After the path first reaches
/// 2 pi k it is held at or above 2 pi k.
PathOutcome simulate_alpha(const DiffusionSpec& spec, double start,
                           std::optional<int> target_level, const SimConfig& cfg,
                           NoiseStream& noise);

/// Euler-Maruyama path in the X chart from -x_cap to +x_cap, with the
/// deterministic travel time beyond either cap added to `elapsed`. Step
/// sizes are min(h, max_dx / |drift|). Accepts XConstant and YFamily.
PathOutcome simulate_x(const DiffusionSpec& spec, const SimConfig& cfg, NoiseStream& noise);

/// An X-chart path with every increment retained.
struct RecordedPath {
  DiffusionSpec spec;
  PathOutcome outcome;
  std::vector<double> x;   // state at the left end of each step
  std::vector<double> dt;  // step length
  std::vector<double> dB;  // Brownian increment of the step
};

RecordedPath simulate_x_recorded(const DiffusionSpec& spec, const SimConfig& cfg,
                                 NoiseStream& noise);

/// -G for a YFamily(lambda, a) path: the log likelihood ratio of the
/// XConstant(lambda) law against the YFamily law, discretised along the
/// stored increments as sum u dB - 1/2 sum u^2 dt with
/// u(x) = (lambda/2)(cosh x - sqrt(cosh^2 x + a)). Averaging
/// exp(-G) 1{event} over YFamily paths estimates the XConstant probability.
double girsanov_log_weight(const RecordedPath& path, double lambda, double a);

/// Drives both specs with identical copies of `noise`. Both must live on the
/// same chart.
std::pair<PathOutcome, PathOutcome> couple_pair(const DiffusionSpec& low,
                                                const DiffusionSpec& high,
                                                const SimConfig& cfg, const NoiseStream& noise,
                                                std::optional<int> target_level = std::nullopt);

/// Target law for an importance-sampled X-chart excursion: drift scale
/// lambda when beta == 0, else the X image of AlphaDecaying,
/// lambda (beta/4) exp(-beta (time_offset + s) / 4).
struct XChartModel {
  double lambda = 0.0;
  double beta = 0.0;
  double time_offset = 0.0;

  double drift_scale(double s) const noexcept;
};

struct TiltedOutcome {
  PathOutcome outcome;
  double log_weight = 0.0;  // log dP_target / dP_proposal along the path
};

/// Samples the target model with drift sqrt(cosh^2 + a) in place of cosh and
/// returns the pathwise likelihood ratio back to the target.
TiltedOutcome simulate_x_tilted(const XChartModel& target, double a, const SimConfig& cfg,
                                NoiseStream& noise);

/// Same as simulate_x_tilted, but started at x_start (x_start <= -x_cap
/// means the entrance from -inf) and stopped at the first step reaching
/// x_stop. An interior stop reports HitLevel with the post-step state, so
/// the run can be resumed from (terminal_value, elapsed) exactly.
TiltedOutcome simulate_x_segment(const XChartModel& target, double a, double x_start,
                                 double x_stop, const SimConfig& cfg, NoiseStream& noise);

/// Deterministic travel time from -inf to -x_cap (entrance) and from +x_cap
/// to +inf (exit) under drift (scale/2) sqrt(cosh^2 x + a) + (1/2) tanh x.
double x_entrance_time(double scale, double a, double x_cap);
double x_exit_time(double scale, double a, double x_cap);

double x_to_alpha(double x) noexcept;
double alpha_to_x(double alpha) noexcept;

}  // namespace sinebeta::sde
