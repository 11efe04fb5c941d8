#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "galton/checkerboard.hpp"

namespace galton {

enum class DosKind { gaussian, tabulated };

// Density of states over crossing frequency (MHz). The gaussian width is the
// standard deviation; tabulated models are piecewise-linear and must be
// normalized to unit area (trapezoid rule) within 1e-6.
struct DosModel {
  DosKind kind = DosKind::gaussian;
  double center = 0.0;  // MHz (gaussian only)
  double width = 0.0;   // standard deviation, MHz (gaussian only)
  std::vector<std::pair<double, double>> table;  // (frequency, density)

  void validate() const;

  static DosModel make_gaussian(double center, double width);
  static DosModel make_tabulated(std::vector<std::pair<double, double>> rows);
};

// Integral of the density over [a, b]. Closed form (erf) for gaussian
// models; exact piecewise-linear integration for tabulated ones.
double integrate_dos(const DosModel& dos, double a, double b);

// Inverse CDF of the density at u in (0, 1).
double dos_quantile(const DosModel& dos, double u);

// Inverse standard-normal CDF (Acklam's rational approximation plus one
// Halley refinement step).
double norm_ppf(double u);

struct BoardSamplingOptions {
  double gap_scale = 1.0;        // MHz, anti-diagonal gap
  double flip_ratio = 0.15;      // single-neighbor gap = gap_scale * ratio
  double column_span_frac = 1e-3;  // column offsets span this fraction of width
  bool monte_carlo = false;      // default: deterministic quantile placement
  std::optional<std::int64_t> seed;  // required (non-negative) for monte_carlo
};

struct SampledBoard {
  Checkerboard board;
  std::vector<double> levels;  // sampled crossing frequencies, ascending
  std::uint64_t seed_used = 0;
  bool monte_carlo = false;
};

// Build a checkerboard whose row levels are drawn from the density:
// deterministic quantile placement by default, Monte-Carlo draws when
// options.monte_carlo (then a non-negative seed is required). Gaps follow the
// rank-separation parameterization: gap_scale on self-crossings, scaled by
// flip_ratio for single-rank flips, zero beyond.
SampledBoard sample_board_from_dos(const DosModel& dos, int n_states,
                                   const BoardSamplingOptions& options);
SampledBoard sample_board_from_dos(const DosModel& dos, int n_states,
                                   double gap_scale);

// Kolmogorov-Smirnov distance of samples against the model CDF, and the
// asymptotic p-value for that distance at sample size n.
double ks_statistic(std::vector<double> samples, const DosModel& dos);
double ks_p_value(double distance, std::size_t n);

}  // namespace galton
