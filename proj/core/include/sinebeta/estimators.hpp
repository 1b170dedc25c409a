#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "sinebeta/noise.hpp"
#include "sinebeta/sde.hpp"
#include "sinebeta/stats.hpp"

// Monte Carlo estimators built on the path engines.
//
// Multi-path estimators draw path i from
//   NoiseStream(cfg.seed, derive_substream(cfg.substream_id, i))
// so results depend only on (cfg, sample counts), never on `workers`.
namespace sinebeta::estimators {

using sde::DiffusionSpec;
using sde::SimConfig;

/// Number of Sine_beta points in [0, lambda] read off one AlphaDecaying
/// path run to cfg.t_max. A terminal phase between 2 pi k and 2 pi (k+1)
/// counts k + 1 with probability alpha / 2 pi - k (one uniform from
/// `noise`), the law of where the drift-free remainder of the path ends.
int sample_counting(double lambda, double beta, const SimConfig& cfg, NoiseStream& noise);

struct CountingSample {
  std::vector<int> counts;  // one per path, in path order
  Estimate mean;            // of the counts
  /// P(N >= n) for n = 1..max observed count (index n - 1).
  std::vector<Estimate> tail;
};

CountingSample sample_counting_many(double lambda, double beta, std::size_t n_samples,
                                    const SimConfig& cfg, unsigned workers = 1);

/// Direct estimate of P(N >= n) from a counting sample.
Estimate tail_probability(const CountingSample& sample, int n);

enum class CdfMethod { Direct, GirsanovIS };

/// P(tau <= t) for the first 2 pi passage (alpha chart) or explosion (X
/// chart) of `spec`. GirsanovIS requires an XConstant spec and proposes from
/// YFamily(lambda, a) with weights exp(-G).
Estimate estimate_hitting_cdf(const DiffusionSpec& spec, double t, CdfMethod method, double a,
                              std::size_t n_samples, const SimConfig& cfg, unsigned workers = 1);

/// P(tau_Y in [s1, s2]) for XConstant(lambda), either directly or from
/// YFamily(lambda, a) paths weighted by exp(-G). a == 0 gives direct MC.
Estimate estimate_hitting_window(double lambda, double a, double s1, double s2,
                                 std::size_t n_samples, const SimConfig& cfg,
                                 unsigned workers = 1);

enum class IsMode {
  None,      // plain splitting
  Auto,      // per-particle tilt, see auto_tilt
  Schedule,  // fixed tilt a_k for every sub-stage of level k (0 disables)
};

struct SplittingConfig {
  std::size_t n_particles = 1000;
  std::size_t replicates = 1;      // independent populations; > 1 gives a spread-based error
  int target_level = 1;
  IsMode is_mode = IsMode::None;
  std::vector<double> a_schedule;  // Schedule mode: one entry per level
  double is_drift = 1.0;           // Auto mode: tilted drift in the middle of the X chart
  double sublevel_spacing = 1.0;   // distance between X sublevels
  double sublevel_depth = 8.0;     // lowest sublevel sits at X = -depth
  double sublevel_top = 8.0;       // highest sublevel of a non-final level
  double time_twist = 1.5;         // strength of the clock penalty at resampling, 0 disables
  double eps_cens = 1e-16;         // censoring tolerance (see counting_horizon)

  void validate() const;
  /// Interior X thresholds of one level, increasing. The final level stops
  /// at 0 (its success is decided by the sign of X at the horizon); other
  /// levels continue up to sublevel_top.
  std::vector<double> sublevels(bool final_level) const;
};

struct Particle {
  double coordinate = 0.0;  // X chart; <= -x_cap means the level was just entered
  double elapsed = 0.0;
  int level = 0;
  double log_weight = 0.0;  // of the last sub-stage; reset by resampling
  double log_twist = 0.0;   // log psi at the last threshold reached
};

struct LevelStats {
  double p_hat = 0.0;     // product of the sub-stage survival fractions
  double rel_var = 0.0;   // Var(p_hat) / p_hat^2, summed over sub-stages
  double ess = 0.0;       // smallest sub-stage ESS
  double censored_fraction = 0.0;  // runs stopped by the horizon, averaged over sub-stages
  double mean_a = 0.0;    // average tilt
  int sub_stages = 0;
};

struct OvercrowdingResult {
  Estimate estimate;
  std::vector<LevelStats> levels;
};

/// Fixed-effort multilevel splitting estimate of P(N_beta(lambda) >= n).
/// Works in the X chart of each 2 pi passage: a level is split further at
/// the thresholds X = sublevels(), and particles that reach a threshold
/// are resampled (systematic, weight-proportional) to restore the
/// population. Every particle keeps its own clock, so the drift scale is
/// lambda (beta/4) exp(-beta elapsed / 4). The last level succeeds when
/// the path ends above the midpoint 2 pi (n - 1/2). That rounding agrees
/// with the completion rule of sample_counting only once paths have
/// settled near a lattice point, which the long default horizon
/// (eps_cens = 1e-16) ensures. Runs are censored at
/// min(cfg.t_max, counting_horizon(lambda, beta, eps_cens)).
OvercrowdingResult estimate_overcrowding(double lambda, double beta, int n,
                                         const SplittingConfig& split_cfg, const SimConfig& cfg,
                                         unsigned workers = 1);

/// Resampling at a threshold favours early particles through the twist
/// psi = exp(-theta t), theta = time_twist (beta/4) e(r), where r is the
/// progress still missing (in units of 2 pi) and e(r) = r + beta r (r-1)/2
/// is the small-lambda exponent of P(N >= r) ~ lambda^e(r). The potentials
/// psi_j / psi_{j-1} telescope with psi = 1 at the start and at the final
/// event, so the product of stage means stays unbiased for any twist.
double twist_rate(double beta, double remaining, double time_twist);

/// Auto-mode tilt for a particle whose current drift scale is
/// mu = lambda_cur beta / 4: the a for which (mu/2) sqrt(a) = is_drift,
/// i.e. the proposal drifts at rate is_drift through the middle of the
/// chart, where the target's own drift is -1/2.
double auto_tilt(double lambda_cur, double beta, double is_drift);

/// (direct P(N >= n), two-stage E[g(tau)]) where stage two counts at least
/// n - 1 further levels of a fresh path with lambda exp(-beta tau / 4).
std::pair<Estimate, Estimate> recursion_check(double lambda, double beta, int n,
                                              std::size_t n_samples, const SimConfig& cfg,
                                              unsigned workers = 1);

/// (MC estimate of E exp(-(lambda^2 a/8 + lambda sqrt|a| / 4) tau~),
///  ceiling exp(-lambda ((1+a) K(-a) - E(-a)))).
std::pair<Estimate, double> mgf_check(double lambda, double a, std::size_t n_samples,
                                      const SimConfig& cfg, unsigned workers = 1);

/// Window [4K(-a)(1 - 5/(lambda sqrt a)), 4K(-a)(1 + 5/(lambda sqrt a))] for
/// lambda * tau_Y, and the Brownian-sup lower bound at sqrt(K(-a))/40.
struct Window {
  double lower;
  double upper;
  double floor_bound;
};

Window blowup_window(double lambda, double a);

/// P(lambda tau_Y in window) by direct YFamily simulation. Requires
/// lambda sqrt(a) >= 2 and a > 2.
Estimate window_probability(double lambda, double a, std::size_t n_samples,
                            const SimConfig& cfg, unsigned workers = 1);

}  // namespace sinebeta::estimators
