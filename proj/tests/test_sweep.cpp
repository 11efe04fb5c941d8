#include <cmath>
#include <cstring>
#include <optional>
#include <vector>

#include "doctest.h"
#include "galton/dos.hpp"
#include "galton/engine.hpp"
#include "galton/errors.hpp"
#include "galton/sweep.hpp"

using namespace galton;

namespace {

Checkerboard uniform_board(int m, double eta_off, double rate) {
  std::vector<double> fc(m * m), gap(m * m);
  const double g_off = gap_for_eta(eta_off, rate);
  const double g_anti = 30.0 * std::sqrt(rate);
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l <= m; ++l) {
      const int idx = (k - 1) * m + (l - 1);
      fc[idx] = 10.0 * k + 10.7 * l;
      gap[idx] = (l == m + 1 - k) ? g_anti : g_off;
    }
  return checkerboard_from_gaps(m, gap, fc);
}

}  // namespace

TEST_CASE("sweep spec validation") {
  SweepSpec ok{2900.0, 5.0, 0.13, SweepDirection::forward, 1};
  CHECK_NOTHROW(ok.validate());
  SweepSpec bad_df = ok;
  bad_df.delta_f = 0.0;
  CHECK_THROWS_AS(bad_df.validate(), InvalidConfig);
  SweepSpec bad_rate = ok;
  bad_rate.sweep_rate = -0.1;
  CHECK_THROWS_AS(bad_rate.validate(), NonpositiveRate);
  SweepSpec bad_reps = ok;
  bad_reps.n_sweeps = 0;
  CHECK_THROWS_AS(bad_reps.validate(), InvalidConfig);
  SweepSpec bad_f0 = ok;
  bad_f0.f0 = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad_f0.validate(), InvalidConfig);
}

TEST_CASE("a window covering the whole board equals the unwindowed walk") {
  const auto board = uniform_board(8, 0.5, 1.0);
  const auto init = PopulationVector::uniform_m0(8);
  SweepSpec spec;
  spec.f0 = board.f_min() - 1.0;
  spec.delta_f = board.f_max() - board.f_min() + 2.0;
  spec.sweep_rate = 1.0;
  const auto windowed = simulate_window_sweep(board, init, spec);
  const auto open = dp_sweep(board, init, 1.0);
  CHECK_FALSE(windowed.window_empty);
  for (int n = 1; n <= 8; ++n) {
    CHECK(windowed.populations.m0[n - 1] == open.exits.m0[n - 1]);
    CHECK(windowed.populations.m1[n - 1] == open.exits.m1[n - 1]);
  }
  CHECK(windowed.polarization == open.polarization());
  CHECK(windowed.polarization_history.size() == 1);
  CHECK(windowed.polarization_history[0] == windowed.polarization);
}

TEST_CASE("a window beyond every crossing leaves the populations alone") {
  const auto board = uniform_board(4, 0.5, 1.0);
  const auto init = PopulationVector::uniform_m0(4);
  SweepSpec spec;
  spec.f0 = board.f_max() + 50.0;
  spec.delta_f = 3.0;
  const auto result = simulate_window_sweep(board, init, spec);
  CHECK(result.window_empty);
  CHECK(result.polarization == 0.0);
  for (int n = 1; n <= 4; ++n)
    CHECK(result.populations.m0[n - 1] == init.m0[n - 1]);
}

TEST_CASE("repeated sweeps pump toward saturation: 1-spin closed form") {
  // lower window of a 2-state board: each pass moves eta_flip of the
  // remaining high-rank mass down, so P after s sweeps is 1 - eta_flip^s
  const double rate = 0.5;
  BoardSamplingOptions opts;
  opts.gap_scale = 2.0;
  opts.flip_ratio = 0.3;
  const auto sampled =
      sample_board_from_dos(DosModel::make_gaussian(0.0, 10.0), 2, opts);
  const double eta_flip = std::exp(-0.36 / rate);

  SweepSpec spec;
  spec.f0 = sampled.levels[0] - 1.0;
  spec.delta_f = 2.0;
  spec.sweep_rate = rate;
  spec.n_sweeps = 12;
  const auto result = simulate_window_sweep(
      sampled.board, PopulationVector::uniform_m0(2), spec);
  REQUIRE(result.polarization_history.size() == 12);
  for (int s = 1; s <= 12; ++s)
    CHECK(result.polarization_history[s - 1] ==
          doctest::Approx(1.0 - std::pow(eta_flip, s)).epsilon(1e-10));
  CHECK(result.polarization == result.polarization_history.back());
  // strictly increasing and bounded
  for (int s = 1; s < 12; ++s)
    CHECK(result.polarization_history[s] >
          result.polarization_history[s - 1]);
  CHECK(result.polarization < 1.0);
}

TEST_CASE("spectral map: grid layout, determinism, and parallel equality") {
  const auto board = uniform_board(8, 0.6, 0.8);
  auto factory = [&board]() { return board; };
  SweepSpec spec;
  spec.delta_f = 12.0;
  spec.sweep_rate = 0.8;

  const auto serial =
      map_spectrum(factory, board.f_min() - 5.0, board.f_max() + 5.0, 2.5,
                   spec, 1);
  REQUIRE(serial.f0.size() >= 2);
  CHECK(serial.n_jobs_used == 1);
  for (std::size_t i = 0; i < serial.f0.size(); ++i)
    CHECK(serial.f0[i] ==
          doctest::Approx(board.f_min() - 5.0 + 2.5 * i).epsilon(1e-12));
  for (std::size_t i = 0; i + 1 < serial.f0.size(); ++i)
    CHECK(serial.f0[i] < serial.f0[i + 1]);

  const auto parallel =
      map_spectrum(factory, board.f_min() - 5.0, board.f_max() + 5.0, 2.5,
                   spec, 4);
  CHECK(parallel.n_jobs_used > 1);
  REQUIRE(parallel.polarization.size() == serial.polarization.size());
  CHECK(std::memcmp(parallel.polarization.data(), serial.polarization.data(),
                    serial.polarization.size() * sizeof(double)) == 0);

  CHECK_THROWS_AS(map_spectrum(factory, 10.0, 5.0, 1.0, spec, 1),
                  EmptyRange);
  CHECK_THROWS_AS(map_spectrum(factory, 5.0, 10.0, 0.0, spec, 1),
                  EmptyRange);
}

TEST_CASE("buildup model: saturation, slope, and accumulation") {
  BuildupModel model{0.8, 0.2, 0.05};
  CHECK_NOTHROW(model.validate());
  CHECK(model.saturation() == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(model.initial_slope() == doctest::Approx(0.16).epsilon(1e-15));
  CHECK(model.evaluate(0.0) == 0.0);
  CHECK(model.evaluate(1e9) == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(model.evaluate(3.0) ==
        doctest::Approx(0.64 * (1.0 - std::exp(-0.25 * 3.0)))
            .epsilon(1e-14));
  // numerical slope at the origin
  const double h = 1e-7;
  CHECK(model.evaluate(h) / h ==
        doctest::Approx(0.16).epsilon(1e-6));

  // no pumping and no relaxation: stays at zero instead of 0/0
  BuildupModel idle{0.5, 0.0, 0.0};
  CHECK(idle.evaluate(5.0) == 0.0);

  const std::vector<double> times{0.0, 1.0, 2.0, 5.0};
  const auto curve = accumulate_buildup(model, times);
  REQUIRE(curve.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(curve[i] == model.evaluate(times[i]));
  for (std::size_t i = 1; i < 4; ++i) CHECK(curve[i] > curve[i - 1]);

  BuildupModel bad{1.5, 0.2, 0.05};
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
  BuildupModel bad_rate{0.5, -0.2, 0.05};
  CHECK_THROWS_AS(bad_rate.validate(), InvalidConfig);
  CHECK_THROWS_AS(accumulate_buildup(model, {0.0, -1.0}), InvalidConfig);
}
