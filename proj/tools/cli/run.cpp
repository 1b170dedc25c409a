#include "run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "grid.hpp"
#include "sinebeta/bounds.hpp"
#include "sinebeta/error.hpp"
#include "sinebeta/estimators.hpp"
#include "sinebeta/specialfn.hpp"
#include "table.hpp"
#include "verify.hpp"

namespace sinebeta::cli {

namespace {

namespace est = sinebeta::estimators;
using sde::DiffusionSpec;
using sde::SimConfig;
using json = nlohmann::ordered_json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = sde::kTwoPi;

// Options shared by the stochastic subcommands. step / t_max of 0 select the
// per-row default, and the value actually used is written into the row.
struct Common {
  std::uint64_t seed = 0;
  double step = 0.0;
  double t_max = 0.0;
  double x_cap = 12.0;
  double max_dx = 0.01;
  unsigned workers = 1;
  std::string out = "-";
  std::string format = "csv";
  std::string config;
};

void add_output_options(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "output path, - for stdout");
  app->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--workers", c.workers, "worker threads (wall time only)")
      ->check(CLI::Range(1u, 1024u));
  app->add_option("--config", c.config, "JSON file of flag values; flags win");
}

void add_sim_options(CLI::App* app, Common& c, bool with_t_max = true) {
  app->add_option("--seed", c.seed, "master seed")->required();
  app->add_option("--step", c.step, "Euler step, 0 = 1e-3 min(1, 1/lambda)");
  if (with_t_max) app->add_option("--t-max", c.t_max, "censoring horizon, 0 = command default");
  app->add_option("--x-cap", c.x_cap, "X chart cap");
  app->add_option("--max-dx", c.max_dx, "X chart: largest drift move per step");
  add_output_options(app, c);
}

SimConfig sim_config(const Common& c, double lambda, double default_t_max, std::uint64_t row) {
  SimConfig cfg;
  cfg.step = c.step > 0.0 ? c.step : SimConfig::default_step(lambda);
  cfg.t_max = c.t_max > 0.0 ? c.t_max : default_t_max;
  cfg.x_cap = c.x_cap;
  cfg.max_dx = c.max_dx;
  cfg.seed = c.seed;
  cfg.substream_id = row;
  cfg.validate();
  return cfg;
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

const std::string kVersion = SINEBETA_VERSION_STRING;

// --config: every key becomes "--key value" placed ahead of the user's
// flags. Options keep the last value given, so explicit flags override.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_config("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw_config("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw_config("config file must hold a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") throw_config("config file may not name another config");
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) text += ',';
        text += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
      }
    } else if (value.is_number() || value.is_boolean()) {
      text = value.dump();
    } else {
      throw_config("config key " + key + ": unsupported value");
    }
    out.push_back("--" + key);
    out.push_back(text);
  }
  return out;
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

json effective_options(const CLI::App* sub) {
  json m;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    const auto& res = opt->results();
    m[name] = res.empty() ? opt->get_default_str() : res.back();
  }
  return m;
}

// One subcommand: registers its options and produces the table. `failed`
// is set when a row reports a numerical failure (exit 3 after writing).
struct Command {
  CLI::App* app = nullptr;
  std::function<Table(bool& failed)> body;
};

// ---------------------------------------------------------------- commands

Command sample_counting_cmd(CLI::App& root, Common& c) {
  struct P {
    std::string lambda, n = "1..3";
    double beta = 2.0, eps = 1e-4;
    std::size_t samples = 10000;
  };
  auto p = std::make_shared<P>();
  auto* app = root.add_subcommand("sample-counting", "P(N >= n) and E N by direct simulation");
  app->add_option("--lambda", p->lambda, "lambda grid")->required();
  app->add_option("--beta", p->beta);
  app->add_option("--n", p->n, "n grid");
  app->add_option("--samples", p->samples);
  app->add_option("--eps-cens", p->eps, "default horizon leaves this many expected points");
  add_sim_options(app, c);
  return {app, [p, &c](bool&) {
            Table t;
            t.columns = {"lambda", "beta", "n", "n_samples", "step", "t_max", "x_cap",
                         "eps_cens", "mean_count", "mean_count_stderr", "mean_reference",
                         "value", "stderr", "ess", "censored_fraction", "zero_count_upper95",
                         "trivial_log_upper", "lib_version", "seed"};
            const auto lambdas = parse_real_grid(p->lambda);
            const auto ns = parse_int_grid(p->n);
            for (std::size_t r = 0; r < lambdas.size(); ++r) {
              const double lam = lambdas[r];
              const SimConfig cfg =
                  sim_config(c, lam, SimConfig::counting_horizon(lam, p->beta, p->eps), r);
              const auto sample = est::sample_counting_many(lam, p->beta, p->samples, cfg, c.workers);
              for (int n : ns) {
                if (n < 1) throw_config("sample-counting: n must be >= 1");
                const Estimate e = est::tail_probability(sample, n);
                const double upper95 =
                    e.value == 0.0 ? zero_count_upper_limit(p->samples, 0.95) : kNan;
                t.add({lam, p->beta, std::int64_t{n}, as_int(p->samples), cfg.step, cfg.t_max,
                       cfg.x_cap, p->eps, sample.mean.value, sample.mean.std_error,
                       lam / kTwoPi, e.value, e.std_error, e.ess, e.censored_fraction, upper95,
                       bounds::trivial_log_upper(n, lam), kVersion, as_int(c.seed)});
              }
            }
            return t;
          }};
}

Command overcrowding_cmd(CLI::App& root, Common& c) {
  struct P {
    std::string lambda, n, is = "auto", schedule;
    double beta = 2.0, lambda0 = 0.0;
    std::optional<double> envelope_c;
    est::SplittingConfig split;
  };
  auto p = std::make_shared<P>();
  auto* app = root.add_subcommand("overcrowding", "P(N >= n) by multilevel splitting");
  app->add_option("--lambda", p->lambda, "lambda grid")->required();
  app->add_option("--n", p->n, "n grid")->required();
  app->add_option("--beta", p->beta);
  app->add_option("--particles", p->split.n_particles);
  app->add_option("--replicates", p->split.replicates);
  app->add_option("--is", p->is, "auto, none or schedule")
      ->check(CLI::IsMember({"auto", "none", "schedule"}));
  app->add_option("--a", p->schedule, "tilt per level for --is schedule");
  app->add_option("--is-drift", p->split.is_drift);
  app->add_option("--time-twist", p->split.time_twist);
  app->add_option("--sublevel-spacing", p->split.sublevel_spacing);
  app->add_option("--sublevel-depth", p->split.sublevel_depth);
  app->add_option("--sublevel-top", p->split.sublevel_top);
  app->add_option("--eps-cens", p->split.eps_cens);
  app->add_option("--c", p->envelope_c, "envelope constant; fitted when absent");
  app->add_option("--lambda0", p->lambda0, "envelope range, 0 = largest lambda");
  add_sim_options(app, c);
  return {app, [p, &c](bool& failed) {
            Table t;
            t.columns = {"lambda", "beta", "n", "particles", "replicates", "is_mode",
                         "is_drift", "time_twist", "sublevel_spacing", "sublevel_depth",
                         "sublevel_top", "step", "t_max", "x_cap", "max_dx", "eps_cens",
                         "value", "log_value", "stderr", "log_stderr", "ess",
                         "censored_fraction", "unreliable", "extinct", "level_reached",
                         "trivial_log_upper", "leading_log_order", "envelope_c",
                         "envelope_c_source", "envelope_log_lower", "envelope_log_upper",
                         "inside_envelope", "lib_version", "seed"};
            est::SplittingConfig split = p->split;
            split.is_mode = p->is == "auto"   ? est::IsMode::Auto
                            : p->is == "none" ? est::IsMode::None
                                              : est::IsMode::Schedule;
            if (split.is_mode == est::IsMode::Schedule) {
              if (p->schedule.empty()) throw_config("--is schedule needs --a");
              split.a_schedule = parse_real_grid(p->schedule);
            }
            const auto lambdas = parse_real_grid(p->lambda);
            const auto ns = parse_int_grid(p->n);

            struct Done {
              double lambda;
              int n;
              SimConfig cfg;
              Estimate e;
            };
            std::vector<Done> done;
            std::uint64_t row = 0;
            for (double lam : lambdas) {
              for (int n : ns) {
                const SimConfig cfg = sim_config(
                    c, lam, SimConfig::counting_horizon(lam, p->beta, split.eps_cens), row++);
                split.target_level = n;
                const auto res = est::estimate_overcrowding(lam, p->beta, n, split, cfg, c.workers);
                done.push_back({lam, n, cfg, res.estimate});
              }
            }

            bounds::BoundEnvelope env;
            env.beta = p->beta;
            env.lambda0 = p->lambda0 > 0.0 ? p->lambda0
                                           : *std::max_element(lambdas.begin(), lambdas.end());
            std::string source = "supplied";
            if (p->envelope_c) {
              env.c = *p->envelope_c;
            } else {
              std::vector<bounds::EnvelopePoint> pts;
              for (const auto& d : done) {
                if (std::isfinite(d.e.log_value) && d.lambda <= env.lambda0 &&
                    bounds::envelope_width_factor(d.n, d.lambda) > 0.0) {
                  pts.push_back({d.n, d.lambda, d.e.log_value});
                }
              }
              if (pts.empty()) {
                env.c = kNan;
                source = "none";
              } else {
                env.c = bounds::fit_envelope_constant(pts, env);
                source = "fitted";
              }
            }

            for (const auto& d : done) {
              const Estimate& e = d.e;
              double lo = kNan, hi = kNan;
              bool inside = false;
              if (std::isfinite(env.c) && d.lambda <= env.lambda0) {
                const auto iv = bounds::envelope_log_bounds(d.n, d.lambda, env);
                lo = iv.lower;
                hi = iv.upper;
                inside = e.log_value >= lo && e.log_value <= hi;
              }
              if (e.extinct || e.ess < 1.5) failed = true;
              t.add({d.lambda, p->beta, std::int64_t{d.n}, as_int(split.n_particles),
                     as_int(split.replicates), p->is, split.is_drift, split.time_twist,
                     split.sublevel_spacing, split.sublevel_depth, split.sublevel_top,
                     d.cfg.step, d.cfg.t_max, d.cfg.x_cap, d.cfg.max_dx, split.eps_cens, e.value,
                     e.log_value, e.std_error, e.log_std_error, e.ess, e.censored_fraction,
                     e.unreliable, e.extinct, std::int64_t{e.level_reached},
                     bounds::trivial_log_upper(d.n, d.lambda),
                     bounds::leading_log_order(d.n, d.lambda, p->beta), env.c, source, lo, hi,
                     inside, kVersion, as_int(c.seed)});
            }
            return t;
          }};
}

Command hitting_cdf_cmd(CLI::App& root, Common& c) {
  struct P {
    std::string kind = "x-constant", method = "direct", t;
    double lambda = 0.0, beta = 2.0;
    std::optional<double> a;
    std::size_t samples = 10000;
  };
  auto p = std::make_shared<P>();
  auto* app = root.add_subcommand("hitting-cdf", "P(tau <= t) for a first passage or explosion");
  app->add_option("--kind", p->kind)
      ->check(CLI::IsMember({"alpha-decaying", "alpha-constant", "x-constant", "y-family"}));
  app->add_option("--lambda", p->lambda)->required();
  app->add_option("--beta", p->beta, "alpha-decaying only");
  app->add_option("--a", p->a,
                  "y-family parameter, or the girsanov tilt (default -K^-1(lambda t / 4))");
  app->add_option("--t", p->t, "t grid")->required();
  app->add_option("--method", p->method)->check(CLI::IsMember({"direct", "girsanov"}));
  app->add_option("--samples", p->samples);
  add_sim_options(app, c, false);
  return {app, [p, &c](bool&) {
            Table t;
            t.columns = {"kind", "lambda", "beta", "a", "t", "method", "n_samples", "step",
                         "x_cap", "max_dx", "value", "log_value", "stderr", "log_stderr",
                         "ess", "censored_fraction", "unreliable", "tau_log_leading",
                         "lib_version", "seed"};
            const bool girsanov = p->method == "girsanov";
            if (girsanov && p->kind != "x-constant") {
              throw_config("--method girsanov needs --kind x-constant");
            }
            if (p->kind == "y-family" && !p->a) throw_config("--kind y-family needs --a");
            const auto ts = parse_real_grid(p->t);
            for (std::size_t r = 0; r < ts.size(); ++r) {
              const double tt = ts[r];
              DiffusionSpec spec;
              if (p->kind == "alpha-decaying") spec = DiffusionSpec::alpha_decaying(p->lambda, p->beta);
              else if (p->kind == "alpha-constant") spec = DiffusionSpec::alpha_constant(p->lambda);
              else if (p->kind == "x-constant") spec = DiffusionSpec::x_constant(p->lambda);
              else spec = DiffusionSpec::y_family(p->lambda, *p->a);
              double a = p->kind == "y-family" ? *p->a : 0.0;
              if (girsanov) {
                if (p->a) {
                  a = *p->a;
                } else {
                  const double x = p->lambda * tt / 4.0;
                  if (!(x < M_PI / 2.0)) throw_config("default tilt needs lambda t < 2 pi");
                  a = -specialfn::k_inverse(x);
                }
              }
              const SimConfig cfg = sim_config(c, p->lambda, tt, r);
              const Estimate e = est::estimate_hitting_cdf(
                  spec, tt, girsanov ? est::CdfMethod::GirsanovIS : est::CdfMethod::Direct, a,
                  p->samples, cfg, c.workers);
              const double lead =
                  p->lambda * tt < std::exp(-1.0) ? bounds::tau_log_leading(p->lambda, tt) : kNan;
              t.add({p->kind, p->lambda, p->beta, a, tt, p->method, as_int(p->samples), cfg.step,
                     cfg.x_cap, cfg.max_dx, e.value, e.log_value, e.std_error, e.log_std_error,
                     e.ess, e.censored_fraction, e.unreliable, lead, kVersion, as_int(c.seed)});
            }
            return t;
          }};
}

Command recursion_check_cmd(CLI::App& root, Common& c) {
  struct P {
    std::string lambda, n = "2";
    double beta = 2.0, eps = 1e-4;
    std::size_t samples = 10000;
  };
  auto p = std::make_shared<P>();
  auto* app = root.add_subcommand("recursion-check",
                                  "direct P(N >= n) against the first-passage decomposition");
  app->add_option("--lambda", p->lambda, "lambda grid")->required();
  app->add_option("--n", p->n, "n grid, n >= 2");
  app->add_option("--beta", p->beta);
  app->add_option("--samples", p->samples);
  app->add_option("--eps-cens", p->eps);
  add_sim_options(app, c);
  return {app, [p, &c](bool&) {
            Table t;
            t.columns = {"lambda", "beta", "n", "n_samples", "step", "t_max", "x_cap",
                         "eps_cens", "direct", "direct_stderr", "two_stage", "two_stage_stderr",
                         "difference", "combined_stderr", "z", "lib_version", "seed"};
            const auto lambdas = parse_real_grid(p->lambda);
            const auto ns = parse_int_grid(p->n);
            std::uint64_t row = 0;
            for (double lam : lambdas) {
              for (int n : ns) {
                // Each check uses two substreams (direct, two-stage).
                const SimConfig cfg =
                    sim_config(c, lam, SimConfig::counting_horizon(lam, p->beta, p->eps), 2 * row++);
                const auto [d, g] = est::recursion_check(lam, p->beta, n, p->samples, cfg, c.workers);
                const double diff = d.value - g.value;
                const double se = std::hypot(d.std_error, g.std_error);
                t.add({lam, p->beta, std::int64_t{n}, as_int(p->samples), cfg.step, cfg.t_max,
                       cfg.x_cap, p->eps, d.value, d.std_error, g.value, g.std_error, diff, se,
                       se > 0.0 ? diff / se : kNan, kVersion, as_int(c.seed)});
              }
            }
            return t;
          }};
}

Command mgf_check_cmd(CLI::App& root, Common& c) {
  struct P {
    std::string lambda, a;
    std::size_t samples = 10000;
  };
  auto p = std::make_shared<P>();
  auto* app = root.add_subcommand("mgf-check", "exponential moment of the 2 pi passage time");
  app->add_option("--lambda", p->lambda, "lambda grid")->required();
  app->add_option("--a", p->a, "a grid")->required();
  app->add_option("--samples", p->samples);
  add_sim_options(app, c);
  return {app, [p, &c](bool&) {
            Table t;
            t.columns = {"lambda", "a", "n_samples", "step", "t_max", "estimate", "stderr",
                         "censored_fraction", "ceiling", "z", "within_bound", "lib_version",
                         "seed"};
            std::uint64_t row = 0;
            for (double lam : parse_real_grid(p->lambda)) {
              for (double a : parse_real_grid(p->a)) {
                const SimConfig cfg = sim_config(c, lam, 50.0, row++);
                const auto [e, ceiling] = est::mgf_check(lam, a, p->samples, cfg, c.workers);
                const double z = e.std_error > 0.0 ? (e.value - ceiling) / e.std_error : kNan;
                t.add({lam, a, as_int(p->samples), cfg.step, cfg.t_max, e.value, e.std_error,
                       e.censored_fraction, ceiling, z,
                       e.value <= ceiling + 3.0 * e.std_error, kVersion, as_int(c.seed)});
              }
            }
            return t;
          }};
}

Command window_prob_cmd(CLI::App& root, Common& c) {
  struct P {
    std::string lambda, a;
    std::size_t samples = 10000;
  };
  auto p = std::make_shared<P>();
  auto* app = root.add_subcommand("window-prob",
                                  "P(lambda tau_Y in the blow-up window) against its floor");
  app->add_option("--lambda", p->lambda, "lambda grid")->required();
  app->add_option("--a", p->a, "a grid")->required();
  app->add_option("--samples", p->samples);
  add_sim_options(app, c);
  return {app, [p, &c](bool&) {
            Table t;
            t.columns = {"lambda", "a", "n_samples", "step", "t_max", "x_cap", "max_dx",
                         "window_lower", "window_upper", "value", "stderr",
                         "censored_fraction", "floor_bound", "above_floor", "lib_version",
                         "seed"};
            std::uint64_t row = 0;
            for (double lam : parse_real_grid(p->lambda)) {
              for (double a : parse_real_grid(p->a)) {
                const auto w = est::blowup_window(lam, a);
                // Paths still running past the window cannot count.
                const SimConfig cfg = sim_config(c, lam, 1.5 * w.upper / lam, row++);
                const Estimate e = est::window_probability(lam, a, p->samples, cfg, c.workers);
                t.add({lam, a, as_int(p->samples), cfg.step, cfg.t_max, cfg.x_cap, cfg.max_dx,
                       w.lower, w.upper, e.value, e.std_error, e.censored_fraction,
                       w.floor_bound, e.value >= w.floor_bound - 3.0 * e.std_error, kVersion,
                       as_int(c.seed)});
              }
            }
            return t;
          }};
}

Command bounds_table_cmd(CLI::App& root, Common& c) {
  struct P {
    std::string lambda, n;
    double beta = 2.0, lambda0 = 0.0;
    bounds::BoundEnvelope env;
  };
  auto p = std::make_shared<P>();
  auto* app = root.add_subcommand("bounds-table", "closed-form overcrowding bounds");
  app->add_option("--lambda", p->lambda, "lambda grid")->required();
  app->add_option("--n", p->n, "n grid")->required();
  app->add_option("--beta", p->beta);
  app->add_option("--c", p->env.c);
  app->add_option("--c1", p->env.c1);
  app->add_option("--lambda0", p->lambda0, "envelope range, 0 = largest lambda");
  app->add_option("--seed", c.seed, "recorded only");
  add_output_options(app, c);
  return {app, [p, &c](bool&) {
            Table t;
            t.columns = {"beta", "lambda", "n", "lambda0", "c", "c1", "leading_log_order",
                         "trivial_log_upper", "rescaled_trivial_log_upper",
                         "envelope_width_factor", "envelope_log_lower", "envelope_log_upper",
                         "lib_version", "seed"};
            const auto lambdas = parse_real_grid(p->lambda);
            bounds::BoundEnvelope env = p->env;
            env.beta = p->beta;
            env.lambda0 = p->lambda0 > 0.0 ? p->lambda0
                                           : *std::max_element(lambdas.begin(), lambdas.end());
            env.validate();
            for (double lam : lambdas) {
              for (int n : parse_int_grid(p->n)) {
                const auto iv = bounds::envelope_log_bounds(n, lam, env);
                t.add({p->beta, lam, std::int64_t{n}, env.lambda0, env.c, env.c1,
                       bounds::leading_log_order(n, lam, p->beta),
                       bounds::trivial_log_upper(n, lam),
                       bounds::rescaled_trivial_log_upper(n, lam, env.c1),
                       bounds::envelope_width_factor(n, lam), iv.lower, iv.upper, kVersion,
                       as_int(c.seed)});
              }
            }
            return t;
          }};
}

Command verify_cmd(CLI::App& root, Common& c) {
  auto* app = root.add_subcommand("verify-specialfn", "special-function residuals");
  app->add_option("--seed", c.seed, "recorded only");
  add_output_options(app, c);
  return {app, [&c](bool& failed) {
            Table t;
            t.columns = {"check", "parameter", "value", "reference", "residual", "tolerance",
                         "pass", "lib_version", "seed"};
            for (const Check& k : verify_specialfn()) {
              if (!k.pass) failed = true;
              t.add({k.name, k.parameter, k.value, k.reference, k.residual, k.tolerance, k.pass,
                     kVersion, as_int(c.seed)});
            }
            return t;
          }};
}

int write_table(const Table& t, const json& meta, const Common& c, std::ostream& out,
                std::ostream& err) {
  auto emit = [&](std::ostream& os) {
    if (c.format == "json") {
      write_json(os, t, meta);
    } else {
      write_csv(os, t);
    }
  };
  if (c.out == "-") {
    emit(out);
    out.flush();
    return kExitOk;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << c.out << '\n';
    return kExitConfig;
  }
  emit(f);
  return f ? kExitOk : kExitConfig;
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo experiments for the Sine_beta counting function", "sinebeta"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
      ->always_capture_default();

  Common common;
  std::vector<Command> cmds = {
      sample_counting_cmd(app, common), overcrowding_cmd(app, common),
      hitting_cdf_cmd(app, common),     recursion_check_cmd(app, common),
      mgf_check_cmd(app, common),       window_prob_cmd(app, common),
      bounds_table_cmd(app, common),    verify_cmd(app, common),
  };

  std::vector<std::string> args = args_in;
  try {
    if (auto path = find_config(args); path && !args.empty()) {
      auto extra = config_args(*path);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<const char*> argv{"sinebeta"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitConfig;
  }

  const Command* cmd = nullptr;
  for (const auto& k : cmds) {
    if (k.app->parsed()) cmd = &k;
  }

  json meta;
  meta["command"] = cmd->app->get_name();
  meta["lib_version"] = kVersion;
  meta["seed"] = common.seed;
  meta["options"] = effective_options(cmd->app);

  const auto start = std::chrono::steady_clock::now();
  Table table;
  bool failed = false;
  try {
    table = cmd->body(failed);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Numerical ? kExitNumerical : kExitConfig;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Wall time stays out of the rows so they are reproducible.
  err << cmd->app->get_name() << ": " << table.rows.size() << " rows in " << seconds << " s\n";

  const int code = write_table(table, meta, common, out, err);
  if (code != kExitOk) return code;
  if (failed) {
    err << "numerical failure (extinction, ess collapse or failed check)\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace sinebeta::cli
