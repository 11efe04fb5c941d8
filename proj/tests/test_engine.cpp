#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "doctest.h"
#include "galton/checkerboard.hpp"
#include "galton/dos.hpp"
#include "galton/engine.hpp"
#include "galton/errors.hpp"

using namespace galton;

namespace {

// Uniform-eta board: every off-anti-diagonal node shares one tunneling
// probability, the anti-diagonal is fully adiabatic (eta underflows to an
// exact 0.0).  Crossing frequencies use incommensurate strides so all nodes
// are distinct and the grid is monotone.
Checkerboard uniform_board(int m, double eta_off, double rate) {
  std::vector<double> fc(m * m), gap(m * m);
  const double g_anti = 30.0 * std::sqrt(rate);  // exp(-900) == 0.0 exactly
  const double g_off =
      eta_off > 0.0 ? gap_for_eta(eta_off, rate) : g_anti;
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l <= m; ++l) {
      const int idx = (k - 1) * m + (l - 1);
      fc[idx] = 10.0 * k + 10.7 * l;
      gap[idx] = (l == m + 1 - k) ? g_anti : g_off;
    }
  return checkerboard_from_gaps(m, gap, fc);
}

// Init-weighted path-sum reconstruction of every exit population: the
// independent oracle dp_sweep is checked against.
PopulationVector path_sum_exits(const Checkerboard& board,
                                const PopulationVector& init, double rate,
                                std::optional<Window> window = std::nullopt) {
  const int m = board.n_states();
  PopulationVector out;
  out.m0.assign(m, 0.0);
  out.m1.assign(m, 0.0);
  for (int r = 1; r <= m; ++r) {
    const double w0 = init.m0[r - 1];  // enters the top of column m+1-r
    if (w0 != 0.0) {
      for (int n = 1; n <= m; ++n) {
        if (n <= r)  // columns only grow along a path
          out.m0[n - 1] += w0 * path_probability(board, {0, m + 1 - r},
                                                 {m + 1, m + 1 - n}, rate,
                                                 window);
        out.m1[n - 1] +=
            w0 * path_probability(board, {0, m + 1 - r}, {n, m + 1}, rate,
                                  window);
      }
    }
    const double w1 = init.m1[r - 1];  // enters the left of row r
    if (w1 != 0.0) {
      for (int n = 1; n <= m; ++n) {
        out.m0[n - 1] += w1 * path_probability(board, {r, 0},
                                               {m + 1, m + 1 - n}, rate,
                                               window);
        if (n >= r)  // rows only grow along a path
          out.m1[n - 1] +=
              w1 * path_probability(board, {r, 0}, {n, m + 1}, rate, window);
      }
    }
  }
  return out;
}

PopulationVector random_init(std::mt19937_64& rng, int m,
                             bool include_m1 = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PopulationVector init;
  init.m0.assign(m, 0.0);
  init.m1.assign(m, 0.0);
  double mass = 0.0;
  for (int i = 0; i < m; ++i) {
    init.m0[i] = u(rng);
    if (include_m1) init.m1[i] = 0.3 * u(rng);
    mass += init.m0[i] + init.m1[i];
  }
  for (int i = 0; i < m; ++i) {
    init.m0[i] /= mass;
    init.m1[i] /= mass;
  }
  return init;
}

Checkerboard random_board(std::mt19937_64& rng, int m, double rate) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> fc(m * m), gap(m * m);
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l <= m; ++l) {
      const int idx = (k - 1) * m + (l - 1);
      fc[idx] = 10.0 * k + 10.7 * l + 0.5 * u(rng);
      const double eta = u(rng);
      gap[idx] = eta > 0.0 ? gap_for_eta(eta, rate)
                           : 30.0 * std::sqrt(rate);
    }
  return checkerboard_from_gaps(m, gap, fc);
}

}  // namespace

TEST_CASE("tunneling probability: exact limits and inversion") {
  CHECK(tunneling_probability(0.0, 0.5) == 1.0);  // zero gap: fully diabatic
  CHECK(tunneling_probability(std::sqrt(0.13), 0.13) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(tunneling_probability(2.0, 0.5) ==
        doctest::Approx(std::exp(-8.0)).epsilon(1e-14));
  // large gap underflows to an exact zero (fully adiabatic)
  CHECK(tunneling_probability(30.0, 1.0) == 0.0);

  CHECK_THROWS_AS(tunneling_probability(1.0, 0.0), NonpositiveRate);
  CHECK_THROWS_AS(tunneling_probability(1.0, -2.0), NonpositiveRate);
  CHECK_THROWS_AS(tunneling_probability(-0.1, 1.0), NegativeGap);

  for (double eta : {1e-6, 0.137, 0.5, 0.9, 1.0}) {
    const double rate = 0.37;
    CHECK(tunneling_probability(gap_for_eta(eta, rate), rate) ==
          doctest::Approx(eta).epsilon(1e-12));
  }
  CHECK(gap_for_eta(1.0, 2.0) == 0.0);
}

TEST_CASE("transfer matrix: doubly stochastic channel mixing") {
  const TransferMatrix t{0.3};
  const auto a = transfer_apply(t, {1.0, 0.0});
  CHECK(a[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(0.7).epsilon(1e-15));
  const auto b = transfer_apply(t, {0.25, 0.5});
  CHECK(b[0] + b[1] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(b[0] == doctest::Approx(0.25 * 0.3 + 0.5 * 0.7).epsilon(1e-15));
}

TEST_CASE("closed-form full sweep: frozen oracle values") {
  // one ball per state, fully adiabatic anti-diagonal
  SUBCASE("4 states, fully adiabatic off-diagonal nodes") {
    const auto pops = analytic_full_sweep(4, 0.0, 1.0);
    CHECK(hyperpolarization(pops) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("4 states, even splitting") {
    const auto pops = analytic_full_sweep(4, 0.5, 0.5);
    CHECK(hyperpolarization(pops) ==
          doctest::Approx(11.0 / 32.0).epsilon(1e-14));
  }
  SUBCASE("4 states, fully diabatic off-diagonal nodes") {
    // only the self-crossing swap acts: hand-computed totals
    const auto pops = analytic_full_sweep(4, 1.0, 0.0);
    REQUIRE(pops.n_states() == 4);
    CHECK(pops.m0[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(pops.m0[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(pops.m0[2] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(pops.m0[3] == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("16 and 256 states, even splitting") {
    CHECK(hyperpolarization(analytic_full_sweep(16, 0.5, 0.5)) ==
          doctest::Approx(0.252193128690124).epsilon(1e-12));
    CHECK(hyperpolarization(analytic_full_sweep(256, 0.5, 0.5)) ==
          doctest::Approx(0.070351327192068).epsilon(1e-12));
  }
  SUBCASE("state totals always sum to one") {
    for (int m : {2, 4, 16, 64}) {
      const auto pops = analytic_full_sweep(m, 0.3, 0.7);
      CHECK(pops.mass() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK_FALSE(pops.manifold_resolved);
    }
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(analytic_full_sweep(4, 1.2, -0.2), ProbabilityOutOfRange);
    CHECK_THROWS_AS(analytic_full_sweep(4, 0.5, 0.6), ProbabilityOutOfRange);
    CHECK_THROWS_AS(analytic_full_sweep(1 << 21, 0.5, 0.5),
                    DimensionTooLarge);
  }
}

TEST_CASE("grid walk matches the closed form on uniform boards") {
  const double rate = 1.0;
  for (int m : {4, 8, 16, 64}) {
    for (auto pq : {std::pair{0.5, 0.5}, std::pair{0.2, 0.8},
                    std::pair{0.85, 0.15}, std::pair{1.0, 0.0}}) {
      const auto [p, q] = pq;
      // the closed form assumes independent pegs: classical node rule;
      // eta carries the down-probability q
      const auto board = uniform_board(m, q, rate);
      const auto field =
          dp_sweep(board, PopulationVector::uniform_m0(m), rate, std::nullopt,
                   SweepDirection::forward, NodeModel::classical);
      const auto analytic = analytic_full_sweep(m, p, q);
      for (int n = 1; n <= m; ++n)
        CHECK(field.exits.total(n) ==
              doctest::Approx(analytic.m0[n - 1]).epsilon(1e-12));
    }
  }
  // large-board scale check against the exact-binomial closed form
  {
    const int m = 1024;
    const auto board = uniform_board(m, 0.7, rate);
    const auto field =
        dp_sweep(board, PopulationVector::uniform_m0(m), rate, std::nullopt,
                 SweepDirection::forward, NodeModel::classical);
    const auto analytic = analytic_full_sweep(m, 0.3, 0.7);
    double max_err = 0.0;
    for (int n = 1; n <= m; ++n)
      max_err = std::max(
          std::abs(field.exits.total(n) - analytic.m0[n - 1]), max_err);
    CHECK(max_err < 1e-10);
  }
}

TEST_CASE("persistent and classical rules agree at even splitting") {
  const double rate = 1.0;
  const auto board = uniform_board(16, 0.5, rate);
  const auto init = PopulationVector::uniform_m0(16);
  const auto a = dp_sweep(board, init, rate, std::nullopt,
                          SweepDirection::forward, NodeModel::persistent);
  const auto b = dp_sweep(board, init, rate, std::nullopt,
                          SweepDirection::forward, NodeModel::classical);
  for (int n = 1; n <= 16; ++n) {
    CHECK(a.exits.m0[n - 1] ==
          doctest::Approx(b.exits.m0[n - 1]).epsilon(1e-15));
    CHECK(a.exits.m1[n - 1] ==
          doctest::Approx(b.exits.m1[n - 1]).epsilon(1e-15));
  }
}

TEST_CASE("path-sum oracle reproduces every exit population") {
  std::mt19937_64 rng(0xE1A7u);
  const double rate = 0.8;
  for (int trial = 0; trial < 12; ++trial) {
    const int m = trial % 3 == 0 ? 2 : (trial % 3 == 1 ? 4 : 8);
    const auto board = random_board(rng, m, rate);
    const auto init = random_init(rng, m);
    const auto field = dp_sweep(board, init, rate);
    const auto oracle = path_sum_exits(board, init, rate);
    for (int n = 1; n <= m; ++n) {
      CHECK(field.exits.m0[n - 1] ==
            doctest::Approx(oracle.m0[n - 1]).epsilon(1e-12));
      CHECK(field.exits.m1[n - 1] ==
            doctest::Approx(oracle.m1[n - 1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("path-sum oracle with an active window") {
  std::mt19937_64 rng(77);
  const double rate = 0.8;
  for (int trial = 0; trial < 6; ++trial) {
    const int m = trial % 2 ? 2 : 4;
    const auto board = random_board(rng, m, rate);
    const auto init = random_init(rng, m);
    // window covering roughly half the crossings
    const Window w{board.f_min() - 0.1,
                   0.55 * (board.f_max() - board.f_min())};
    const auto field = dp_sweep(board, init, rate, w);
    const auto oracle = path_sum_exits(board, init, rate, w);
    for (int n = 1; n <= m; ++n) {
      CHECK(field.exits.m0[n - 1] ==
            doctest::Approx(oracle.m0[n - 1]).epsilon(1e-12));
      CHECK(field.exits.m1[n - 1] ==
            doctest::Approx(oracle.m1[n - 1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("path probability endpoints and guards") {
  const auto board = uniform_board(4, 0.5, 1.0);
  CHECK(path_probability(board, {0, 2}, {0, 2}, 1.0) == 1.0);
  CHECK_THROWS_AS(path_probability(board, {3, 2}, {1, 4}, 1.0),
                  InvalidEndpoints);
  CHECK_THROWS_AS(path_probability(board, {0, 9}, {5, 5}, 1.0),
                  InvalidEndpoints);
  const auto big = uniform_board(16, 0.5, 1.0);
  CHECK_THROWS_AS(path_probability(big, {0, 1}, {17, 16}, 1.0),
                  PathExplosion);
}

TEST_CASE("1-spin windowed sweeps: frozen closed forms, both directions") {
  const double rate = 0.5;
  BoardSamplingOptions opts;
  opts.gap_scale = 2.0;
  opts.flip_ratio = 0.3;
  const auto sampled =
      sample_board_from_dos(DosModel::make_gaussian(0.0, 10.0), 2, opts);
  const auto& board = sampled.board;
  const auto init = PopulationVector::uniform_m0(2);

  const double eta_flip = std::exp(-(2.0 * 0.3) * (2.0 * 0.3) / rate);
  const double eta_anti = std::exp(-2.0 * 2.0 / rate);
  const Window lower{sampled.levels[0] - 1.0, 2.0};
  const Window upper{sampled.levels[1] - 1.0, 2.0};

  const double p_fwd_lower =
      dp_sweep(board, init, rate, lower).polarization();
  const double p_fwd_upper =
      dp_sweep(board, init, rate, upper).polarization();
  CHECK(p_fwd_lower == doctest::Approx(1.0 - eta_flip).epsilon(1e-12));
  CHECK(p_fwd_lower == doctest::Approx(0.513247744040).epsilon(1e-10));
  CHECK(p_fwd_upper ==
        doctest::Approx(-eta_anti * (1.0 - eta_flip)).epsilon(1e-12));
  CHECK(p_fwd_upper == doctest::Approx(-0.000172175437).epsilon(1e-6));

  // reversing the sweep flips which window pumps and the sign of the leak
  const double p_rev_lower =
      dp_sweep(board, init, rate, lower, SweepDirection::reverse)
          .polarization();
  const double p_rev_upper =
      dp_sweep(board, init, rate, upper, SweepDirection::reverse)
          .polarization();
  CHECK(p_rev_lower ==
        doctest::Approx(eta_anti * (1.0 - eta_flip)).epsilon(1e-12));
  CHECK(p_rev_upper == doctest::Approx(-(1.0 - eta_flip)).epsilon(1e-12));
}

TEST_CASE("empty window acts as the identity and raises the flag") {
  const auto board = uniform_board(4, 0.4, 1.0);
  const auto init = PopulationVector::uniform_m0(4);
  const Window far_away{board.f_max() + 100.0, 5.0};
  const auto field = dp_sweep(board, init, 1.0, far_away);
  CHECK(field.window_empty);
  for (int n = 1; n <= 4; ++n) {
    CHECK(field.exits.m0[n - 1] == init.m0[n - 1]);
    CHECK(field.exits.m1[n - 1] == init.m1[n - 1]);
  }
  CHECK(field.polarization() == 0.0);
}

TEST_CASE("fully diabatic board is the identity; polarization exactly zero") {
  const int m = 16;
  std::vector<double> fc(m * m), gap(m * m, 0.0);
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l <= m; ++l)
      fc[(k - 1) * m + (l - 1)] = 10.0 * k + 10.7 * l;
  const auto board = checkerboard_from_gaps(m, gap, fc);
  const auto init = PopulationVector::uniform_m0(m);
  const auto field = dp_sweep(board, init, 1.0);
  for (int n = 1; n <= m; ++n) {
    CHECK(field.exits.m0[n - 1] == init.m0[n - 1]);
    CHECK(field.exits.m1[n - 1] == 0.0);
  }
  CHECK(field.polarization() == 0.0);
}

TEST_CASE("fully adiabatic board steers a rank-1 ball across the manifold") {
  const int m = 8;
  std::vector<double> fc(m * m), gap(m * m, 30.0);
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l <= m; ++l)
      fc[(k - 1) * m + (l - 1)] = 10.0 * k + 10.7 * l;
  const auto board = checkerboard_from_gaps(m, gap, fc);
  PopulationVector init;
  init.m0.assign(m, 0.0);
  init.m1.assign(m, 0.0);
  init.m0[0] = 1.0;  // single ball in the lowest-rank state
  const auto field = dp_sweep(board, init, 1.0);
  CHECK(field.exits.m1[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(field.polarization() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("population is conserved through every node update") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int m = trial % 2 ? 8 : 16;
    const auto board = random_board(rng, m, 0.5);
    const auto init = random_init(rng, m);
    std::optional<Window> w;
    if (trial % 3 != 0)
      w = Window{board.f_min() + u(rng) * (board.f_max() - board.f_min()),
                 0.3 * (board.f_max() - board.f_min())};
    const auto dir =
        trial % 2 ? SweepDirection::reverse : SweepDirection::forward;
    const auto field = dp_sweep(board, init, 0.5, w, dir);
    worst = std::max(worst, field.max_conservation_error);
    CHECK(field.exits.mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("reverse sweep equals the doubly flipped forward walk") {
  std::mt19937_64 rng(42);
  const int m = 8;
  const auto board = random_board(rng, m, 0.7);
  const auto init = random_init(rng, m);

  // flip the board geometry and rank-reverse the init by hand, sweep
  // forward, and rank-reverse the exits back
  std::vector<double> fc(m * m), gap(m * m);
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l <= m; ++l) {
      fc[(k - 1) * m + (l - 1)] = -board.f_cross(m + 1 - k, m + 1 - l);
      gap[(k - 1) * m + (l - 1)] = board.gap(m + 1 - k, m + 1 - l);
    }
  const auto flipped = checkerboard_from_gaps(m, gap, fc);
  PopulationVector flipped_init;
  flipped_init.m0.assign(m, 0.0);
  flipped_init.m1.assign(m, 0.0);
  for (int r = 1; r <= m; ++r) {
    flipped_init.m0[m - r] = init.m0[r - 1];
    flipped_init.m1[m - r] = init.m1[r - 1];
  }
  const auto rev = dp_sweep(board, init, 0.7, std::nullopt,
                            SweepDirection::reverse);
  const auto fwd = dp_sweep(flipped, flipped_init, 0.7);
  for (int n = 1; n <= m; ++n) {
    CHECK(rev.exits.m0[n - 1] ==
          doctest::Approx(fwd.exits.m0[m - n]).epsilon(1e-14));
    CHECK(rev.exits.m1[n - 1] ==
          doctest::Approx(fwd.exits.m1[m - n]).epsilon(1e-14));
  }
}

TEST_CASE("init and board validation") {
  const auto board = uniform_board(4, 0.5, 1.0);
  PopulationVector bad;
  bad.m0.assign(3, 0.25);
  bad.m1.assign(3, 0.0);
  CHECK_THROWS_AS(dp_sweep(board, bad, 1.0), InvalidConfig);
  PopulationVector unnormalized;
  unnormalized.m0.assign(4, 0.3);
  unnormalized.m1.assign(4, 0.0);
  CHECK_THROWS_AS(dp_sweep(board, unnormalized, 1.0), InvalidConfig);
  CHECK_THROWS_AS(dp_sweep(Checkerboard{}, PopulationVector::uniform_m0(4),
                           1.0),
                  BoardUninitialized);
  CHECK_THROWS_AS(checkerboard_from_gaps(3, std::vector<double>(9, 0.0),
                                         std::vector<double>(9, 0.0)),
                  ShapeMismatch);
  CHECK_THROWS_AS(checkerboard_from_gaps(4, std::vector<double>(16, -1.0),
                                         std::vector<double>(16, 0.0)),
                  NegativeGap);
}

TEST_CASE("negative secular coupling suppresses the readout") {
  const auto pops = analytic_full_sweep(16, 0.5, 0.5);
  const auto ok = hyperpolarization(pops, 2.1);
  CHECK_FALSE(ok.suppressed_negative_coupling);
  CHECK(ok.value == doctest::Approx(hyperpolarization(pops)).epsilon(1e-15));
  const auto suppressed = hyperpolarization(pops, -2.1);
  CHECK(suppressed.suppressed_negative_coupling);
  CHECK(suppressed.value == 0.0);
}
