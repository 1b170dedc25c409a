#include "sinebeta/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sinebeta/error.hpp"
#include "sinebeta/parallel.hpp"
#include "sinebeta/specialfn.hpp"

namespace sinebeta::estimators {
namespace {

using sde::kTwoPi;
using sde::PathEvent;

constexpr std::uint64_t kResampleKey = 0x7E5A3D1C9B2F4E68ULL;

NoiseStream path_stream(const SimConfig& cfg, std::uint64_t experiment, std::uint64_t i) {
  return NoiseStream(cfg.seed, derive_substream(experiment, i));
}

// Completes a path stopped at the horizon. Past it the drift is spent and
// d alpha = 2 sin(alpha/2) dB is a bounded martingale on [2 pi k, 2 pi (k+1)]
// that converges to one of the ends, the upper one with probability
// alpha / 2 pi - k. Rounding to the nearest end instead is biased when the
// horizon leaves paths far from converged (the approach is only
// exponential at rate 1/2).
int lattice_level(double alpha, NoiseStream& noise) {
  const double levels = alpha / kTwoPi;
  const double k = std::floor(levels);
  return static_cast<int>(k) + (noise.uniform() < levels - k ? 1 : 0);
}

Estimate indicator_estimate(const std::vector<std::uint8_t>& hits, std::size_t censored) {
  std::vector<double> v(hits.begin(), hits.end());
  Estimate e = mean_estimate(v);
  e.censored_fraction = static_cast<double>(censored) / static_cast<double>(hits.size());
  return e;
}

void require_samples(std::size_t n) {
  if (n == 0) throw_config("n_samples must be > 0");
}

}  // namespace

int sample_counting(double lambda, double beta, const SimConfig& cfg, NoiseStream& noise) {
  const auto spec = DiffusionSpec::alpha_decaying(lambda, beta);
  const sde::PathOutcome out = sde::simulate_alpha(spec, 0.0, std::nullopt, cfg, noise);
  return lattice_level(out.terminal_value, noise);
}

CountingSample sample_counting_many(double lambda, double beta, std::size_t n_samples,
                                    const SimConfig& cfg, unsigned workers) {
  require_samples(n_samples);
  CountingSample s;
  s.counts.assign(n_samples, 0);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    NoiseStream noise = path_stream(cfg, cfg.substream_id, i);
    s.counts[i] = sample_counting(lambda, beta, cfg, noise);
  });
  std::vector<double> as_real(s.counts.begin(), s.counts.end());
  s.mean = mean_estimate(as_real);
  const int top = *std::max_element(s.counts.begin(), s.counts.end());
  for (int n = 1; n <= top; ++n) s.tail.push_back(tail_probability(s, n));
  return s;
}

Estimate tail_probability(const CountingSample& sample, int n) {
  std::vector<std::uint8_t> hits(sample.counts.size());
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i] = sample.counts[i] >= n;
  return indicator_estimate(hits, 0);
}

Estimate estimate_hitting_cdf(const DiffusionSpec& spec, double t, CdfMethod method, double a,
                              std::size_t n_samples, const SimConfig& cfg, unsigned workers) {
  spec.validate();
  cfg.validate();
  require_samples(n_samples);
  if (!(t > 0.0) || t > cfg.t_max) throw_config("estimate_hitting_cdf: need 0 < t <= t_max");
  SimConfig run = cfg;
  run.t_max = t;
  run.step = std::min(cfg.step, t);

  std::vector<std::uint8_t> hits(n_samples, 0);
  std::vector<std::uint8_t> censored(n_samples, 0);
  if (method == CdfMethod::Direct) {
    parallel_for(n_samples, workers, [&](std::size_t i) {
      NoiseStream noise = path_stream(cfg, cfg.substream_id, i);
      const sde::PathOutcome out = spec.alpha_chart()
                                       ? sde::simulate_alpha(spec, 0.0, 1, run, noise)
                                       : sde::simulate_x(spec, run, noise);
      hits[i] = out.event != PathEvent::Censored;
      censored[i] = !hits[i];
    });
    return indicator_estimate(hits, static_cast<std::size_t>(
                                        std::count(censored.begin(), censored.end(), 1)));
  }

  if (spec.kind != sde::DiffusionKind::XConstant) {
    throw_config("GirsanovIS applies to XConstant targets only");
  }
  if (!(a > -1.0)) throw_config("GirsanovIS requires a > -1");
  std::vector<double> log_w(n_samples, 0.0);
  const sde::XChartModel target{spec.lambda, 0.0, 0.0};
  parallel_for(n_samples, workers, [&](std::size_t i) {
    NoiseStream noise = path_stream(cfg, cfg.substream_id, i);
    const sde::TiltedOutcome r = sde::simulate_x_tilted(target, a, run, noise);
    hits[i] = r.outcome.event == PathEvent::Exploded;
    censored[i] = !hits[i];
    log_w[i] = r.log_weight;
  });
  Estimate e = weighted_indicator_estimate(log_w, hits);
  e.censored_fraction =
      static_cast<double>(std::count(censored.begin(), censored.end(), 1)) / n_samples;
  return e;
}

Estimate estimate_hitting_window(double lambda, double a, double s1, double s2,
                                 std::size_t n_samples, const SimConfig& cfg, unsigned workers) {
  cfg.validate();
  require_samples(n_samples);
  if (!(s1 < s2) || !(s2 > 0.0)) throw_config("estimate_hitting_window: need s1 < s2, s2 > 0");
  if (!(a > -1.0)) throw_config("estimate_hitting_window: need a > -1");
  SimConfig run = cfg;
  run.t_max = std::min(cfg.t_max, s2);
  run.step = std::min(cfg.step, run.t_max);
  const sde::XChartModel target{lambda, 0.0, 0.0};

  std::vector<std::uint8_t> hits(n_samples, 0);
  std::vector<double> log_w(n_samples, 0.0);
  std::vector<std::uint8_t> censored(n_samples, 0);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    NoiseStream noise = path_stream(cfg, cfg.substream_id, i);
    const sde::TiltedOutcome r = sde::simulate_x_tilted(target, a, run, noise);
    const bool exploded = r.outcome.event == PathEvent::Exploded;
    hits[i] = exploded && r.outcome.elapsed >= s1;
    censored[i] = !exploded;
    log_w[i] = r.log_weight;
  });
  const auto n_cens = static_cast<std::size_t>(std::count(censored.begin(), censored.end(), 1));
  if (a == 0.0) return indicator_estimate(hits, n_cens);
  Estimate e = weighted_indicator_estimate(log_w, hits);
  e.censored_fraction = static_cast<double>(n_cens) / n_samples;
  return e;
}

void SplittingConfig::validate() const {
  if (n_particles < 100) throw_config("SplittingConfig: n_particles must be >= 100");
  if (replicates < 1 || replicates > 4096) throw_config("SplittingConfig: replicates must be in [1, 4096]");
  if (target_level < 1) throw_config("SplittingConfig: target_level must be >= 1");
  if (is_mode == IsMode::Schedule) {
    if (a_schedule.size() < static_cast<std::size_t>(target_level)) {
      throw_config("SplittingConfig: a_schedule needs one entry per level");
    }
    for (double a : a_schedule) {
      if (!(a > -1.0) || !std::isfinite(a)) {
        throw_config("SplittingConfig: schedule entries need a > -1");
      }
    }
  }
  if (!(is_drift > 0.0) || !std::isfinite(is_drift)) {
    throw_config("SplittingConfig: is_drift must be > 0");
  }
  if (!(sublevel_spacing > 0.0) || !std::isfinite(sublevel_spacing)) {
    throw_config("SplittingConfig: sublevel_spacing must be > 0");
  }
  if (!(sublevel_depth >= 0.0) || sublevel_depth > 1e3) {
    throw_config("SplittingConfig: sublevel_depth must be in [0, 1000]");
  }
  if (!(time_twist >= 0.0) || !std::isfinite(time_twist)) {
    throw_config("SplittingConfig: time_twist must be >= 0");
  }
  if (!(sublevel_top >= 0.0) || sublevel_top > 1e3) {
    throw_config("SplittingConfig: sublevel_top must be in [0, 1000]");
  }
  if (!(eps_cens > 0.0) || !(eps_cens < 1.0)) throw_config("SplittingConfig: eps_cens must be in (0, 1)");
}

std::vector<double> SplittingConfig::sublevels(bool final_level) const {
  const auto below = static_cast<int>(std::floor(sublevel_depth / sublevel_spacing + 1e-9));
  const auto above =
      final_level ? 0 : static_cast<int>(std::floor(sublevel_top / sublevel_spacing + 1e-9));
  std::vector<double> xs;
  for (int j = -below; j <= above; ++j) xs.push_back(sublevel_spacing * j);
  return xs;
}

double twist_rate(double beta, double remaining, double time_twist) {
  const double r = std::max(remaining, 0.0);
  const double e = std::max(r + 0.5 * beta * r * (r - 1.0), 0.0);
  return time_twist * 0.25 * beta * e;
}

double auto_tilt(double lambda_cur, double beta, double is_drift) {
  const double mu = 0.25 * beta * lambda_cur;
  if (!(mu > 0.0)) return 0.0;
  const double root = 2.0 * is_drift / mu;
  return root * root;
}

namespace {

OvercrowdingResult overcrowding_run(double lambda, double beta, int n,
                                    const SplittingConfig& split_cfg, const SimConfig& cfg,
                                    unsigned workers) {
  if (n < 1) throw_config("estimate_overcrowding: n must be >= 1");
  if (!(lambda > 0.0) || !(beta > 0.0)) throw_config("estimate_overcrowding: need lambda, beta > 0");
  split_cfg.validate();
  if (split_cfg.is_mode == IsMode::Schedule &&
      split_cfg.a_schedule.size() < static_cast<std::size_t>(n)) {
    throw_config("estimate_overcrowding: a_schedule needs one entry per level");
  }
  cfg.validate();

  const double horizon =
      std::min(cfg.t_max, SimConfig::counting_horizon(lambda, beta, split_cfg.eps_cens));
  const std::size_t np = split_cfg.n_particles;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<Particle> particles(np);
  for (Particle& p : particles) p.coordinate = -inf;

  OvercrowdingResult result;
  Estimate& est = result.estimate;
  est.n_samples = np;
  est.level_reached = 0;
  double log_p = 0.0;
  double rel_var = 0.0;
  double min_ess = inf;
  double censored_sum = 0.0;
  std::size_t stage_index = 0;

  for (int k = 0; k < n; ++k) {
    const bool final_level = k == n - 1;
    const std::vector<double> thresholds = split_cfg.sublevels(final_level);
    LevelStats stats;
    double level_log_p = 0.0;
    double a_sum = 0.0;
    double level_cens = 0.0;
    stats.ess = inf;
    // Sub-stage j runs to thresholds[j]; the last one runs to the cap.
    for (std::size_t j = 0; j <= thresholds.size(); ++j, ++stage_index) {
      const bool last = j == thresholds.size();
      const double x_stop = last ? cfg.x_cap : std::min(thresholds[j], cfg.x_cap - 1.0);
      // Progress still missing once this sub-stage succeeds.
      const double progress =
          last ? k + 1.0 : k + 2.0 / specialfn::kPi * std::atan(std::exp(x_stop));
      const double theta =
          (final_level && last) ? 0.0 : twist_rate(beta, n - progress, split_cfg.time_twist);
      std::vector<std::uint8_t> hits(np, 0);
      std::vector<std::uint8_t> censored(np, 0);
      std::vector<double> a_used(np, 0.0);

      parallel_for(np, workers, [&](std::size_t i) {
        Particle& p = particles[i];
        p.log_weight = 0.0;
        const double old_twist = p.log_twist;
        if (p.coordinate >= x_stop) {
          hits[i] = 1;  // overshoot from the previous threshold
          p.log_twist = -theta * p.elapsed;
          p.log_weight = p.log_twist - old_twist;
          return;
        }
        SimConfig stage = cfg;
        stage.t_max = horizon - p.elapsed;
        if (stage.t_max < cfg.step) {
          censored[i] = 1;
          return;
        }
        const double lambda_cur = lambda * std::exp(-0.25 * beta * p.elapsed);
        double a = 0.0;
        if (split_cfg.is_mode == IsMode::Schedule) {
          a = split_cfg.a_schedule[static_cast<std::size_t>(k)];
        } else if (split_cfg.is_mode == IsMode::Auto) {
          a = auto_tilt(lambda_cur, beta, split_cfg.is_drift);
        }
        a_used[i] = a;
        NoiseStream noise = path_stream(cfg, cfg.substream_id, stage_index * np + i);
        const sde::TiltedOutcome r = sde::simulate_x_segment(
            {lambda, beta, p.elapsed}, a, p.coordinate, x_stop, stage, noise);
        p.elapsed += r.outcome.elapsed;
        p.log_twist = -theta * p.elapsed;
        p.log_weight = r.log_weight + p.log_twist - old_twist;
        p.coordinate = r.outcome.terminal_value;
        if (r.outcome.event == PathEvent::Exploded) {
          hits[i] = 1;
          p.coordinate = -inf;  // enters the next level from its bottom
          ++p.level;
        } else if (r.outcome.event == PathEvent::HitLevel) {
          hits[i] = 1;
        } else {
          censored[i] = 1;
          // Past the midpoint at the horizon: the nearest lattice point is
          // the next one.
          hits[i] = last && final_level && r.outcome.terminal_value > 0.0;
        }
      });

      std::vector<double> log_w(np);
      for (std::size_t i = 0; i < np; ++i) log_w[i] = particles[i].log_weight;
      const Estimate stage_est = weighted_indicator_estimate(log_w, hits);
      for (double a : a_used) a_sum += a;
      level_cens += static_cast<double>(std::count(censored.begin(), censored.end(), 1)) / np;
      ++stats.sub_stages;

      if (!(stage_est.value > 0.0)) {
        stats.p_hat = 0.0;
        stats.rel_var = inf;
        stats.ess = 0.0;
        stats.censored_fraction = level_cens / stats.sub_stages;
        stats.mean_a = a_sum / (static_cast<double>(np) * stats.sub_stages);
        result.levels.push_back(stats);
        est.extinct = true;
        est.value = 0.0;
        est.log_value = -inf;
        est.std_error = 0.0;
        est.log_std_error = inf;
        est.ess = 0.0;
        est.unreliable = true;
        est.censored_fraction = (censored_sum + level_cens) / static_cast<double>(stage_index + 1);
        return result;
      }
      level_log_p += stage_est.log_value;
      stats.rel_var += stage_est.log_std_error * stage_est.log_std_error;
      stats.ess = std::min(stats.ess, stage_est.ess);
      if (final_level && last) break;

      // Systematic resampling proportional to exp(log_w) among survivors.
      double top = -inf;
      for (std::size_t i = 0; i < np; ++i) {
        if (hits[i]) top = std::max(top, log_w[i]);
      }
      std::vector<double> cum(np, 0.0);
      CompensatedSum acc;
      for (std::size_t i = 0; i < np; ++i) {
        if (hits[i]) acc.add(std::exp(log_w[i] - top));
        cum[i] = acc.value();
      }
      const double total = acc.value();
      NoiseStream picker(cfg.seed ^ kResampleKey, derive_substream(cfg.substream_id, stage_index));
      const double u0 = picker.uniform();
      std::vector<Particle> next(np);
      std::size_t src = 0;
      for (std::size_t i = 0; i < np; ++i) {
        const double target = (static_cast<double>(i) + u0) / static_cast<double>(np) * total;
        while (src + 1 < np && (cum[src] <= target || !hits[src])) ++src;
        next[i] = particles[src];
      }
      particles.swap(next);
    }
    stats.p_hat = std::exp(level_log_p);
    stats.censored_fraction = level_cens / stats.sub_stages;
    stats.mean_a = a_sum / (static_cast<double>(np) * stats.sub_stages);
    result.levels.push_back(stats);
    censored_sum += level_cens;
    log_p += level_log_p;
    rel_var += stats.rel_var;
    min_ess = std::min(min_ess, stats.ess);
    est.level_reached = k + 1;
  }

  est.log_value = log_p;
  est.value = std::exp(log_p);
  est.log_std_error = std::sqrt(rel_var);
  est.std_error = est.value * est.log_std_error;
  est.ess = std::min(min_ess, static_cast<double>(np));
  est.unreliable = est.ess < kMinReliableEss;
  int total_sub = 0;
  for (const LevelStats& l : result.levels) total_sub += l.sub_stages;
  est.censored_fraction = censored_sum / total_sub;
  return result;
}

}  // namespace

OvercrowdingResult estimate_overcrowding(double lambda, double beta, int n,
                                         const SplittingConfig& split_cfg, const SimConfig& cfg,
                                         unsigned workers) {
  split_cfg.validate();
  if (split_cfg.replicates == 1) return overcrowding_run(lambda, beta, n, split_cfg, cfg, workers);

  // Independent replicates: the estimate is their mean and the error their
  // spread, which (unlike the per-stage delta method) sees the correlation
  // that resampling builds up between stages.
  const std::size_t reps = split_cfg.replicates;
  std::vector<OvercrowdingResult> runs;
  for (std::size_t r = 0; r < reps; ++r) {
    SimConfig rc = cfg;
    rc.substream_id = cfg.substream_id ^ (static_cast<std::uint64_t>(r) << 16);
    runs.push_back(overcrowding_run(lambda, beta, n, split_cfg, rc, workers));
  }
  // Average on a common scale; the replicate values may underflow.
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& r : runs) top = std::max(top, r.estimate.log_value);
  OvercrowdingResult out = runs.front();
  Estimate& e = out.estimate;
  e.n_samples = split_cfg.n_particles * reps;
  e.extinct = false;
  e.level_reached = 0;
  e.ess = 0.0;
  e.censored_fraction = 0.0;
  bool all_extinct = true;
  std::vector<double> scaled;
  for (const auto& r : runs) {
    all_extinct = all_extinct && r.estimate.extinct;
    e.level_reached = std::max(e.level_reached, r.estimate.level_reached);
    e.ess += r.estimate.ess;
    e.censored_fraction += r.estimate.censored_fraction / reps;
    scaled.push_back(r.estimate.extinct ? 0.0 : std::exp(r.estimate.log_value - top));
  }
  if (all_extinct) {
    e.extinct = true;
    return out;
  }
  const Estimate m = mean_estimate(scaled);
  e.log_value = top + std::log(m.value);
  e.value = std::exp(e.log_value);
  e.log_std_error = m.std_error / m.value;
  e.std_error = e.value * e.log_std_error;
  e.unreliable = e.ess < kMinReliableEss || reps < 5;
  return out;
}

std::pair<Estimate, Estimate> recursion_check(double lambda, double beta, int n,
                                              std::size_t n_samples, const SimConfig& cfg,
                                              unsigned workers) {
  if (n < 2) throw_config("recursion_check: n must be >= 2");
  require_samples(n_samples);
  cfg.validate();
  const CountingSample direct = sample_counting_many(lambda, beta, n_samples, cfg, workers);

  std::vector<std::uint8_t> hits(n_samples, 0);
  std::vector<std::uint8_t> censored(n_samples, 0);
  const std::uint64_t experiment = cfg.substream_id + 1;
  parallel_for(n_samples, workers, [&](std::size_t i) {
    NoiseStream noise = path_stream(cfg, experiment, i);
    const auto first = DiffusionSpec::alpha_decaying(lambda, beta);
    const sde::PathOutcome out = sde::simulate_alpha(first, 0.0, 1, cfg, noise);
    if (out.event != PathEvent::HitLevel) {
      censored[i] = 1;  // g(inf) = 0
      return;
    }
    SimConfig rest = cfg;
    rest.t_max = cfg.t_max - out.elapsed;
    if (rest.t_max < cfg.step) return;
    const double restarted = lambda * std::exp(-0.25 * beta * out.elapsed);
    hits[i] = sample_counting(restarted, beta, rest, noise) >= n - 1;
  });
  return {tail_probability(direct, n),
          indicator_estimate(hits, static_cast<std::size_t>(
                                       std::count(censored.begin(), censored.end(), 1)))};
}

std::pair<Estimate, double> mgf_check(double lambda, double a, std::size_t n_samples,
                                      const SimConfig& cfg, unsigned workers) {
  if (!(lambda > 0.0)) throw_config("mgf_check: lambda must be > 0");
  if (!(a > -1.0)) throw_config("mgf_check: need a > -1");
  require_samples(n_samples);
  cfg.validate();
  const double rate = lambda * lambda * a / 8.0 + lambda * std::sqrt(std::abs(a)) / 4.0;
  const auto spec = DiffusionSpec::alpha_constant(lambda);
  std::vector<double> samples(n_samples, 0.0);
  std::size_t n_cens = 0;
  std::vector<std::uint8_t> censored(n_samples, 0);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    NoiseStream noise = path_stream(cfg, cfg.substream_id, i);
    const sde::PathOutcome out = sde::simulate_alpha(spec, 0.0, 1, cfg, noise);
    if (out.event == PathEvent::HitLevel) {
      samples[i] = std::exp(-rate * out.elapsed);
    } else {
      censored[i] = 1;
    }
  });
  n_cens = static_cast<std::size_t>(std::count(censored.begin(), censored.end(), 1));
  Estimate e = mean_estimate(samples);
  e.censored_fraction = static_cast<double>(n_cens) / n_samples;
  const double ceiling = std::exp(
      -lambda * ((1.0 + a) * specialfn::elliptic_k(-a) - specialfn::elliptic_e(-a)));
  return {e, ceiling};
}

Window blowup_window(double lambda, double a) {
  if (!(lambda > 0.0) || !(a > 2.0) || lambda * std::sqrt(a) < 2.0) {
    throw_domain("blowup_window: need a > 2 and lambda sqrt(a) >= 2");
  }
  const double k = specialfn::elliptic_k(-a);
  const double rel = 5.0 / (lambda * std::sqrt(a));
  return {4.0 * k * (1.0 - rel), 4.0 * k * (1.0 + rel),
          specialfn::brownian_sup_lower_bound(std::sqrt(k) / 40.0)};
}

Estimate window_probability(double lambda, double a, std::size_t n_samples,
                            const SimConfig& cfg, unsigned workers) {
  const Window w = blowup_window(lambda, a);
  require_samples(n_samples);
  cfg.validate();
  const auto spec = DiffusionSpec::y_family(lambda, a);
  std::vector<std::uint8_t> hits(n_samples, 0);
  std::vector<std::uint8_t> censored(n_samples, 0);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    NoiseStream noise = path_stream(cfg, cfg.substream_id, i);
    const sde::PathOutcome out = sde::simulate_x(spec, cfg, noise);
    if (out.event != PathEvent::Exploded) {
      censored[i] = 1;
      return;
    }
    const double scaled = lambda * out.elapsed;
    hits[i] = scaled >= w.lower && scaled <= w.upper;
  });
  return indicator_estimate(hits, static_cast<std::size_t>(
                                      std::count(censored.begin(), censored.end(), 1)));
}

}  // namespace sinebeta::estimators
