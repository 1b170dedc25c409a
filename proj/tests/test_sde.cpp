#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sinebeta/error.hpp"
#include "sinebeta/sde.hpp"
#include "sinebeta/stats.hpp"

using namespace sinebeta;
using namespace sinebeta::sde;

namespace {

SimConfig config(double step, double t_max = 50.0) {
  SimConfig cfg;
  cfg.step = step;
  cfg.t_max = t_max;
  return cfg;
}

Estimate mean_time(const DiffusionSpec& spec, const SimConfig& cfg, int n, std::uint64_t seed) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) {
    NoiseStream noise(seed, i);
    const PathOutcome out = spec.alpha_chart() ? simulate_alpha(spec, 0.0, 1, cfg, noise)
                                               : simulate_x(spec, cfg, noise);
    EXPECT_NE(out.event, PathEvent::Censored);
    t.push_back(out.elapsed);
  }
  return mean_estimate(t);
}

}  // namespace

TEST(Sde, Validation) {
  EXPECT_THROW(DiffusionSpec::y_family(1.0, -1.0).validate(), Error);
  EXPECT_THROW(DiffusionSpec::alpha_decaying(1.0, 0.0).validate(), Error);
  EXPECT_THROW(config(1.0, 0.5).validate(), Error);
  SimConfig cfg = config(1e-3);
  cfg.x_cap = 2.0;
  EXPECT_THROW(cfg.validate(), Error);
  NoiseStream noise(0, 0);
  EXPECT_THROW(simulate_x(DiffusionSpec::alpha_constant(1.0), config(1e-3), noise), Error);
}

TEST(Sde, ChartMaps) {
  for (double x : {-5.0, -0.3, 0.0, 2.0, 7.0}) EXPECT_NEAR(alpha_to_x(x_to_alpha(x)), x, 1e-12);
  EXPECT_DOUBLE_EQ(x_to_alpha(0.0), M_PI);
}

TEST(Sde, ZeroDriftAlphaStaysAtZero) {
  NoiseStream noise(1, 1);
  const auto out = simulate_alpha(DiffusionSpec::alpha_decaying(0.0, 2.0), 0.0, std::nullopt,
                                  config(1e-2, 5.0), noise);
  EXPECT_EQ(out.terminal_value, 0.0);
  EXPECT_EQ(out.levels_crossed, 0);
}

// The alpha chart and the X chart describe the same first 2 pi passage.
TEST(Sde, ChartsAgreeOnPassageTime) {
  const Estimate a = mean_time(DiffusionSpec::alpha_constant(2.0), config(5e-4), 1500, 11);
  const Estimate x = mean_time(DiffusionSpec::x_constant(2.0), config(5e-4), 1500, 12);
  EXPECT_LT(std::abs(a.value - x.value), 4.0 * std::hypot(a.std_error, x.std_error))
      << a.value << " vs " << x.value;
}

TEST(Sde, StepHalving) {
  const auto spec = DiffusionSpec::x_constant(1.0);
  const Estimate h1 = mean_time(spec, config(2e-3), 1500, 5);
  const Estimate h2 = mean_time(spec, config(1e-3), 1500, 5);
  EXPECT_LT(std::abs(h1.value - h2.value), 4.0 * std::hypot(h1.std_error, h2.std_error));
}

TEST(Sde, CouplingOrdersPaths) {
  int ordered = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    const auto [lo, hi] =
        couple_pair(DiffusionSpec::alpha_decaying(3.0, 2.0), DiffusionSpec::alpha_decaying(6.0, 2.0),
                    config(1e-3, 8.0), NoiseStream(3, i));
    ordered += hi.terminal_value >= lo.terminal_value;
  }
  EXPECT_GE(ordered, 0.99 * n);
}

TEST(Sde, YFamilyAtZeroIsXConstant) {
  const auto [x, y] = couple_pair(DiffusionSpec::x_constant(2.0), DiffusionSpec::y_family(2.0, 0.0),
                                  config(1e-3), NoiseStream(4, 0));
  EXPECT_EQ(x, y);
}

TEST(Sde, GirsanovWeightVanishesAtZeroTilt) {
  NoiseStream noise(5, 0);
  const auto path = simulate_x_recorded(DiffusionSpec::y_family(2.0, 0.0), config(1e-3), noise);
  EXPECT_EQ(girsanov_log_weight(path, 2.0, 0.0), 0.0);
  ASSERT_EQ(path.x.size(), path.dB.size());
}

// The recorded path and the streaming tilted run use the same increments.
TEST(Sde, GirsanovRecordedMatchesStreaming) {
  const double lambda = 3.0, a = 5.0;
  NoiseStream n1(6, 2), n2(6, 2);
  const auto path = simulate_x_recorded(DiffusionSpec::y_family(lambda, a), config(1e-3), n1);
  const auto tilted = simulate_x_tilted({lambda, 0.0, 0.0}, a, config(1e-3), n2);
  EXPECT_NEAR(path.outcome.elapsed, tilted.outcome.elapsed, 1e-9);
  EXPECT_NEAR(girsanov_log_weight(path, lambda, a), tilted.log_weight, 1e-6);
}

// Stopping at an interior level and resuming from the reported state gives
// the uninterrupted run.
TEST(Sde, SegmentsRestartExactly) {
  const XChartModel model{2.0, 0.0, 0.0};
  for (int i = 0; i < 20; ++i) {
    NoiseStream whole(7, i), parts(7, i);
    const auto one = simulate_x_tilted(model, 4.0, config(1e-3), whole);
    const auto first = simulate_x_segment(model, 4.0, -12.0, 0.5, config(1e-3), parts);
    ASSERT_EQ(first.outcome.event, PathEvent::HitLevel);
    const auto second =
        simulate_x_segment(model, 4.0, first.outcome.terminal_value, 12.0, config(1e-3), parts);
    EXPECT_NEAR(first.outcome.elapsed + second.outcome.elapsed, one.outcome.elapsed, 1e-9);
    EXPECT_NEAR(first.log_weight + second.log_weight, one.log_weight, 1e-9);
    EXPECT_EQ(whole.cursor(), parts.cursor());
  }
}

TEST(Sde, TailTimesShrinkWithCap) {
  EXPECT_GT(x_exit_time(1.0, 0.0, 6.0), x_exit_time(1.0, 0.0, 12.0));
  EXPECT_GT(x_entrance_time(1.0, 3.0, 6.0), x_entrance_time(1.0, 3.0, 12.0));
  // Far out the drift is about (lambda/4) e^x, so the exit time is about 4 e^-x / lambda.
  EXPECT_NEAR(x_exit_time(1.0, 0.0, 12.0) / (4.0 * std::exp(-12.0)), 1.0, 1e-3);
}
