#pragma once

#include <functional>
#include <vector>

#include "galton/checkerboard.hpp"
#include "galton/engine.hpp"

namespace galton {

// One windowed frequency sweep: the drive is active on [f0, f0 + delta_f]
// (f0 always labels the low-frequency edge, for both directions) and chirps
// at sweep_rate; n_sweeps > 1 repeats the sweep with an electronic reset in
// between (the nuclear state totals re-enter on the m_s=0 edge).
struct SweepSpec {
  double f0 = 0.0;         // MHz
  double delta_f = 0.0;    // MHz, > 0
  double sweep_rate = 1.0; // MHz^2, > 0
  SweepDirection direction = SweepDirection::forward;
  int n_sweeps = 1;

  void validate() const;
};

struct WindowSweepResult {
  PopulationField field;       // per-node field of the last sweep
  PopulationVector populations;  // exit populations after the last sweep
  std::vector<double> polarization_history;  // after each sweep
  double polarization = 0.0;   // final value
  bool window_empty = false;   // no crossing inside the window
};

// Drive one window sweep (or several, with electronic resets) through the
// board starting from init.
WindowSweepResult simulate_window_sweep(const Checkerboard& board,
                                        const PopulationVector& init,
                                        const SweepSpec& spec);

// Polarization response as a function of the window's low edge.
struct SpectralMapResult {
  std::vector<double> f0;            // MHz, ascending
  std::vector<double> polarization;  // one value per f0
  SweepSpec spec;                    // template (f0 replaced per point)
  int n_jobs_used = 1;
};

// Scan the window over [f0_lo, f0_hi] in increments of step, running the
// spec's sweep from a uniform m_s=0 start at every position.  board_factory
// is invoked once per worker thread, so it must be deterministic for the
// map to be; results merge in grid order regardless of scheduling.
// Throws EmptyRange when the grid is empty (f0_hi < f0_lo) or step <= 0.
SpectralMapResult map_spectrum(
    const std::function<Checkerboard()>& board_factory, double f0_lo,
    double f0_hi, double step, const SweepSpec& spec_template, int n_jobs = 1);

// Saturation kinetics of repeated sweeps against nuclear relaxation:
//   P(t) = p_max * r/(r + gamma1) * (1 - exp(-(r + gamma1) t)).
struct BuildupModel {
  double p_max = 0.0;   // per-sweep pumping asymptote, in [-1, 1]
  double rate = 0.0;    // polarization injection rate r, 1/s, >= 0
  double gamma1 = 0.0;  // nuclear spin-lattice relaxation rate, 1/s, >= 0

  void validate() const;
  double saturation() const;     // p_max * r/(r + gamma1)
  double initial_slope() const;  // dP/dt at t = 0, = p_max * r
  double evaluate(double t) const;
};

// Evaluate the buildup curve at the given times (each must be >= 0).
std::vector<double> accumulate_buildup(const BuildupModel& model,
                                       const std::vector<double>& times);

}  // namespace galton
