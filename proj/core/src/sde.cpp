#include "sinebeta/sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "sinebeta/error.hpp"

namespace sinebeta::sde {
namespace {

struct XState {
  double cosh_x;
  double tanh_x;
  double root;  // sqrt(cosh^2 x + a)
};

inline XState x_state(double x, double a) noexcept {
  const double ex = std::exp(x);
  const double inv = 1.0 / ex;
  const double ch = 0.5 * (ex + inv);
  return {ch, (ex - inv) / (ex + inv), std::sqrt(ch * ch + a)};
}

// cosh x - sqrt(cosh^2 x + a), written without cancellation.
inline double drift_gap(const XState& s, double a) noexcept { return -a / (s.cosh_x + s.root); }

// Integral of 1/drift over a half line beyond the cap. With v = exp(-w) the
// integrand stays bounded as w -> inf because the drift grows like e^w.
double tail_time(double scale, double a, double x_cap, double sign) {
  auto drift = [&](double x) {
    const XState s = x_state(x, a);
    return 0.5 * scale * s.root + 0.5 * s.tanh_x;
  };
  if (!(scale > 0.0)) return 0.0;
  const double edge = drift(sign * x_cap);
  if (!(edge > 0.25 * scale * std::cosh(x_cap))) {
    std::ostringstream os;
    os << "x_cap = " << x_cap << " too small for drift scale " << scale
       << ": noise is not negligible beyond the cap";
    throw_config(os.str());
  }
  auto integrand = [&](double v) {
    const double w = -std::log(v);
    return 1.0 / (drift(sign * (x_cap + w)) * v);
  };
  return boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, 1.0);
}

void check_x_spec(const DiffusionSpec& spec) {
  spec.validate();
  if (spec.alpha_chart()) throw_config("simulate_x: spec must be XConstant or YFamily");
}

template <bool kWeight, bool kRecord>
PathOutcome run_x_chart(const XChartModel& model, double a, double x_start, double x_stop,
                        const SimConfig& cfg, NoiseStream& noise, double* log_weight,
                        RecordedPath* rec) {
  PathOutcome out;
  // Weighted runs push the cap out until the tilt has died off there
  // (a / cosh^2 <= e^-12), so the skipped tail part of G stays negligible.
  const double cap = kWeight ? std::max(cfg.x_cap, 0.5 * std::log1p(std::max(a, 0.0)) + 6.7)
                             : cfg.x_cap;
  const bool decaying = model.beta > 0.0;
  double scale = model.drift_scale(0.0);
  double t = 0.0;
  double x = x_start;
  if (x_start <= -cap) {
    t = x_entrance_time(scale, a, cap);
    x = -cap;
  }
  // Interior stop levels end the run at the first step at or above them and
  // keep the post-step state, so a restart continues the same Markov chain.
  const bool interior_stop = x_stop < cfg.x_cap;
  double lw = 0.0;
  const std::uint64_t cursor0 = noise.cursor();

  while (t < cfg.t_max) {
    const XState s = x_state(x, a);
    const double b = 0.5 * scale * s.root + 0.5 * s.tanh_x;
    double dt = std::min(cfg.step, cfg.t_max - t);
    if (std::abs(b) * dt > cfg.max_dx) dt = cfg.max_dx / std::abs(b);
    const double dB = std::sqrt(dt) * noise.gaussian();
    if constexpr (kWeight) {
      const double u = 0.5 * scale * drift_gap(s, a);
      lw += u * dB - 0.5 * u * u * dt;
    }
    if constexpr (kRecord) {
      rec->x.push_back(x);
      rec->dt.push_back(dt);
      rec->dB.push_back(dB);
    }
    const double xn = x + b * dt + dB;
    if (interior_stop && xn >= x_stop) {
      out.event = PathEvent::HitLevel;
      out.elapsed = t + dt;
      out.terminal_value = xn;
      break;
    }
    if (xn >= cap) {
      const double theta = (cap - x) / (xn - x);
      const double t_hit = t + theta * dt;
      const double total = t_hit + x_exit_time(model.drift_scale(t_hit), a, cap);
      if (total <= cfg.t_max) {
        out.event = PathEvent::Exploded;
        out.elapsed = total;
        out.terminal_value = cap;
        out.levels_crossed = 1;
        break;
      }
      x = xn;
      t = cfg.t_max;
      break;
    }
    x = xn;
    t += dt;
    if (decaying) scale = model.drift_scale(t);
  }
  if (out.event == PathEvent::Censored) {
    out.elapsed = cfg.t_max;
    out.terminal_value = x;
  }
  out.increments_consumed = noise.cursor() - cursor0;
  if constexpr (kWeight) *log_weight = lw;
  return out;
}

}  // namespace

DiffusionSpec DiffusionSpec::alpha_decaying(double lambda, double beta, double time_offset) {
  return {DiffusionKind::AlphaDecaying, lambda, beta, 0.0, time_offset};
}
DiffusionSpec DiffusionSpec::alpha_constant(double lambda) {
  return {DiffusionKind::AlphaConstant, lambda, 0.0, 0.0, 0.0};
}
DiffusionSpec DiffusionSpec::x_constant(double lambda) {
  return {DiffusionKind::XConstant, lambda, 0.0, 0.0, 0.0};
}
DiffusionSpec DiffusionSpec::y_family(double lambda, double a) {
  return {DiffusionKind::YFamily, lambda, 0.0, a, 0.0};
}

void DiffusionSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw_config("lambda must be finite and >= 0");
  if (kind == DiffusionKind::AlphaDecaying) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw_config("beta must be finite and > 0");
    if (!(time_offset >= 0.0) || !std::isfinite(time_offset)) {
      throw_config("time_offset must be finite and >= 0");
    }
  }
  if (kind == DiffusionKind::YFamily && (!(a > -1.0) || !std::isfinite(a))) {
    throw_config("YFamily requires finite a > -1");
  }
}

void SimConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw_config("step must be > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw_config("t_max must be > 0");
  if (step > t_max) throw_config("step must not exceed t_max");
  if (!(x_cap >= 5.0) || !std::isfinite(x_cap)) throw_config("x_cap must be >= 5");
  if (!(max_dx > 0.0)) throw_config("max_dx must be > 0");
}

double SimConfig::default_step(double lambda) {
  return 1e-3 * std::min(1.0, lambda > 0.0 ? 1.0 / lambda : 1.0);
}

double SimConfig::counting_horizon(double lambda, double beta, double eps) {
  if (!(lambda > 0.0) || !(beta > 0.0) || !(eps > 0.0)) {
    throw_config("counting_horizon: lambda, beta, eps must be > 0");
  }
  const double t = 4.0 / beta * std::log(lambda / (kTwoPi * eps));
  return std::max(t, default_step(lambda));
}

double XChartModel::drift_scale(double s) const noexcept {
  if (beta > 0.0) return lambda * 0.25 * beta * std::exp(-0.25 * beta * (time_offset + s));
  return lambda;
}

PathOutcome simulate_alpha(const DiffusionSpec& spec, double start,
                           std::optional<int> target_level, const SimConfig& cfg,
                           NoiseStream& noise) {
  spec.validate();
  cfg.validate();
  if (!spec.alpha_chart()) throw_config("simulate_alpha: spec must be an alpha-chart kind");
  if (!(start >= 0.0) || !std::isfinite(start)) throw_config("simulate_alpha: start must be >= 0");
  int level = static_cast<int>(std::floor(start / kTwoPi));
  if (target_level) {
    if (*target_level < 1 || start >= kTwoPi * *target_level) {
      throw_config("simulate_alpha: target level must exceed the start level");
    }
  }

  const bool decaying = spec.kind == DiffusionKind::AlphaDecaying;
  const double h = cfg.step;
  double mu = decaying ? spec.lambda * 0.25 * spec.beta *
                             std::exp(-0.25 * spec.beta * spec.time_offset)
                       : spec.lambda;
  const double decay_h = decaying ? std::exp(-0.25 * spec.beta * h) : 1.0;
  const double sqrt_h = std::sqrt(h);
  const std::uint64_t cursor0 = noise.cursor();

  PathOutcome out;
  double alpha = start;
  double floor_value = kTwoPi * level;
  double next_level = kTwoPi * (level + 1);
  const auto n_steps = static_cast<std::uint64_t>(std::ceil(cfg.t_max / h - 1e-9));
  double t = 0.0;
  for (std::uint64_t k = 0; k < n_steps; ++k) {
    double dt = h;
    double sdt = sqrt_h;
    double mu_step = mu;
    if (k + 1 == n_steps) {
      dt = cfg.t_max - t;
      if (!(dt > 0.0)) break;
      sdt = std::sqrt(dt);
    }
    const double z = noise.gaussian();
    double an = alpha + mu_step * dt + 2.0 * std::sin(0.5 * alpha) * sdt * z;
    while (an >= next_level) {
      ++level;
      ++out.levels_crossed;
      const double t_cross = t + dt * (next_level - alpha) / (an - alpha);
      out.crossing_times.push_back(t_cross);
      floor_value = next_level;
      next_level = kTwoPi * (level + 1);
      if (target_level && level == *target_level) {
        out.event = PathEvent::HitLevel;
        out.elapsed = t_cross;
        out.terminal_value = floor_value;
        out.increments_consumed = noise.cursor() - cursor0;
        return out;
      }
    }
    alpha = std::max(an, floor_value);
    t = (k + 1 == n_steps) ? cfg.t_max : t + dt;
    mu *= decay_h;
  }
  out.event = PathEvent::Censored;
  out.elapsed = cfg.t_max;
  out.terminal_value = alpha;
  out.increments_consumed = noise.cursor() - cursor0;
  return out;
}

PathOutcome simulate_x(const DiffusionSpec& spec, const SimConfig& cfg, NoiseStream& noise) {
  check_x_spec(spec);
  cfg.validate();
  const double a = spec.kind == DiffusionKind::YFamily ? spec.a : 0.0;
  return run_x_chart<false, false>({spec.lambda, 0.0, 0.0}, a, -cfg.x_cap, cfg.x_cap, cfg,
                                   noise, nullptr, nullptr);
}

RecordedPath simulate_x_recorded(const DiffusionSpec& spec, const SimConfig& cfg,
                                 NoiseStream& noise) {
  check_x_spec(spec);
  cfg.validate();
  RecordedPath rec;
  rec.spec = spec;
  const double a = spec.kind == DiffusionKind::YFamily ? spec.a : 0.0;
  rec.outcome = run_x_chart<false, true>({spec.lambda, 0.0, 0.0}, a, -cfg.x_cap, cfg.x_cap,
                                         cfg, noise, nullptr, &rec);
  return rec;
}

double girsanov_log_weight(const RecordedPath& path, double lambda, double a) {
  const double path_a = path.spec.kind == DiffusionKind::YFamily ? path.spec.a : 0.0;
  if (path.spec.alpha_chart() || path.spec.lambda != lambda || path_a != a) {
    throw_config("girsanov_log_weight: path was not simulated under YFamily(lambda, a)");
  }
  if (path.x.size() != path.dt.size() || path.x.size() != path.dB.size()) {
    throw_config("girsanov_log_weight: inconsistent path record");
  }
  double lw = 0.0;
  for (std::size_t k = 0; k < path.x.size(); ++k) {
    const XState s = x_state(path.x[k], a);
    const double u = 0.5 * lambda * drift_gap(s, a);
    lw += u * path.dB[k] - 0.5 * u * u * path.dt[k];
  }
  return lw;
}

std::pair<PathOutcome, PathOutcome> couple_pair(const DiffusionSpec& low,
                                                const DiffusionSpec& high,
                                                const SimConfig& cfg, const NoiseStream& noise,
                                                std::optional<int> target_level) {
  if (low.alpha_chart() != high.alpha_chart()) {
    throw_config("couple_pair: specs live on different charts");
  }
  NoiseStream n1 = noise;
  NoiseStream n2 = noise;
  if (low.alpha_chart()) {
    return {simulate_alpha(low, 0.0, target_level, cfg, n1),
            simulate_alpha(high, 0.0, target_level, cfg, n2)};
  }
  return {simulate_x(low, cfg, n1), simulate_x(high, cfg, n2)};
}

TiltedOutcome simulate_x_tilted(const XChartModel& target, double a, const SimConfig& cfg,
                                NoiseStream& noise) {
  return simulate_x_segment(target, a, -cfg.x_cap, cfg.x_cap, cfg, noise);
}

TiltedOutcome simulate_x_segment(const XChartModel& target, double a, double x_start,
                                 double x_stop, const SimConfig& cfg, NoiseStream& noise) {
  cfg.validate();
  if (!(a > -1.0) || !std::isfinite(a)) throw_config("simulate_x_tilted: need a > -1");
  if (!(target.lambda >= 0.0) || !(target.beta >= 0.0) || !(target.time_offset >= 0.0)) {
    throw_config("simulate_x_tilted: invalid target model");
  }
  if (std::isnan(x_start) || std::isnan(x_stop) || !(x_start < x_stop) || x_start >= cfg.x_cap) {
    throw_config("simulate_x_segment: need x_start < x_stop and x_start < x_cap");
  }
  x_stop = std::min(x_stop, cfg.x_cap);
  TiltedOutcome r;
  if (a == 0.0) {
    r.outcome = run_x_chart<false, false>(target, 0.0, x_start, x_stop, cfg, noise, nullptr,
                                          nullptr);
  } else {
    r.outcome = run_x_chart<true, false>(target, a, x_start, x_stop, cfg, noise, &r.log_weight,
                                         nullptr);
  }
  return r;
}

double x_entrance_time(double scale, double a, double x_cap) {
  return tail_time(scale, a, x_cap, -1.0);
}

double x_exit_time(double scale, double a, double x_cap) {
  return tail_time(scale, a, x_cap, +1.0);
}

double x_to_alpha(double x) noexcept { return 4.0 * std::atan(std::exp(x)); }

double alpha_to_x(double alpha) noexcept { return std::log(std::tan(0.25 * alpha)); }

}  // namespace sinebeta::sde
