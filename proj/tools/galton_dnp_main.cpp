// galton-dnp: command-line front end for the Landau-Zener cascade toolkit.
//
// Subcommands: levels, board, sweep, spectrum, buildup, fit, oracle-check.
// Validation problems exit 1, numerical failures exit 2, both with a
// machine-readable JSON error object on stderr.  Every --out write is
// accompanied by a <out>.manifest.json reproducibility sidecar.  Set
// GALTON_DNP_LOG=1 for progress logging on stderr.

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "galton/checkerboard.hpp"
#include "galton/config.hpp"
#include "galton/csv.hpp"
#include "galton/dos.hpp"
#include "galton/engine.hpp"
#include "galton/errors.hpp"
#include "galton/fit.hpp"
#include "galton/hamming.hpp"
#include "galton/manifest.hpp"
#include "galton/spin_model.hpp"
#include "galton/svg.hpp"
#include "galton/sweep.hpp"

namespace {

using galton::Checkerboard;
using galton::DosModel;
using galton::PopulationVector;
using galton::SweepDirection;
using galton::SweepSpec;

bool logging_enabled() {
  const char* v = std::getenv("GALTON_DNP_LOG");
  return v != nullptr && *v != '\0' && std::strcmp(v, "0") != 0;
}

void log_line(const std::string& msg) {
  if (logging_enabled()) std::cerr << "[galton-dnp] " << msg << "\n";
}

// ---------------------------------------------------------------------------
// merged run configuration (config file values overridden by CLI flags)

struct RunConfig {
  // generic
  std::string config_path;
  std::string out_path;
  std::string plot_path;
  std::string format = "csv";
  std::int64_t seed = -1;  // <0 = unset
  int jobs = 1;

  // spin system (optional; needed by levels and exact/perturbative boards)
  std::optional<galton::SpinSystemConfig> spin;

  // density of states (optional; needed by dos boards)
  std::optional<DosModel> dos;
  galton::BoardSamplingOptions sampling;
  int n_states = 256;

  // board source: exact | perturbative | dos
  std::string board_mode;

  // sweep
  SweepSpec sweep;
  bool window_given = false;

  // spectrum grid
  double f0_min = std::nan(""), f0_max = std::nan(""), f0_step = 0.25;

  // buildup
  galton::BuildupModel buildup;
  double t_max = 60.0;
  int n_points = 121;

  // fit
  std::string fit_model;
  std::string fit_input;
  int n_peaks = 1;
  double fit_t_max = 1.0;

  // oracle-check
  int oracle_n = 3;
  int oracle_trials = 100;

  nlohmann::json config_doc;  // raw config file content, for the manifest
};

// Resolve the board the current subcommand should run on.
Checkerboard make_board(RunConfig& rc) {
  std::string mode = rc.board_mode;
  if (mode.empty()) {
    if (rc.dos.has_value())
      mode = "dos";
    else if (rc.spin.has_value())
      mode = "exact";
    else
      throw galton::InvalidConfig(
          "no board source: give --dos flags, a config with a dos/spin "
          "section, or --mode");
  }
  if (mode == "dos") {
    if (!rc.dos.has_value())
      throw galton::InvalidConfig("board mode 'dos' needs a density model");
    if (rc.sampling.monte_carlo && rc.seed >= 0 && !rc.sampling.seed)
      rc.sampling.seed = rc.seed;
    log_line("sampling board from density (" + std::to_string(rc.n_states) +
             " states)");
    return galton::sample_board_from_dos(*rc.dos, rc.n_states, rc.sampling)
        .board;
  }
  if (!rc.spin.has_value())
    throw galton::InvalidConfig("board mode '" + mode +
                                "' needs a spin config");
  if (mode == "exact") {
    log_line("extracting gaps from the full Hamiltonian");
    return galton::locate_lacs(*rc.spin);
  }
  if (mode == "perturbative") {
    log_line("building perturbative board");
    return galton::perturbative_checkerboard(*rc.spin);
  }
  throw galton::InvalidConfig("unknown board mode '" + mode + "'");
}

// Window defaulting: without --f0/--df, cover the whole board.
SweepSpec resolve_sweep(const RunConfig& rc, const Checkerboard& board) {
  SweepSpec spec = rc.sweep;
  if (!rc.window_given) {
    spec.f0 = board.f_min() - 1.0;
    spec.delta_f = (board.f_max() - board.f_min()) + 2.0;
  }
  spec.validate();
  return spec;
}

void write_deliverable(const RunConfig& rc, const std::string& content,
                       galton::ManifestBuilder& manifest) {
  if (rc.out_path.empty()) {
    std::cout << content;
    return;
  }
  galton::write_text_file(rc.out_path, content);
  // manifests name files by basename: the sidecar lives next to the output
  manifest.add_output(std::filesystem::path(rc.out_path).filename().string(),
                      content);
  const std::string manifest_path = rc.out_path + ".manifest.json";
  galton::write_text_file(manifest_path, manifest.to_string());
  log_line("wrote " + rc.out_path + " and " + manifest_path);
}

void maybe_plot(const RunConfig& rc, const std::vector<galton::PlotSeries>& s,
                const std::string& title, const std::string& xl,
                const std::string& yl) {
  if (rc.plot_path.empty()) return;
  galton::write_text_file(rc.plot_path,
                          galton::render_line_plot(s, title, xl, yl));
  log_line("wrote plot " + rc.plot_path);
}

galton::ManifestBuilder start_manifest(const RunConfig& rc,
                                       const std::string& command,
                                       nlohmann::json params) {
  galton::ManifestBuilder manifest(command);
  if (rc.seed >= 0)
    manifest.set_seed(static_cast<std::uint64_t>(rc.seed));
  manifest.set_parameters(std::move(params));
  if (!rc.config_path.empty())
    manifest.add_input(
        std::filesystem::path(rc.config_path).filename().string(),
        rc.config_doc.dump(2));
  return manifest;
}

// ---------------------------------------------------------------------------
// subcommand implementations

void run_levels(RunConfig& rc) {
  if (!rc.spin.has_value())
    throw galton::InvalidConfig("levels needs a spin config (--config)");
  const double center = rc.spin->zero_field_splitting +
                        rc.spin->gyro_electron * rc.spin->bias_field;
  const double lo = std::isnan(rc.f0_min) ? center - 50.0 : rc.f0_min;
  const double hi = std::isnan(rc.f0_max) ? center + 50.0 : rc.f0_max;
  if (!(rc.f0_step > 0.0))
    throw galton::InvalidConfig("grid step must be > 0");
  std::vector<double> grid;
  for (double f = lo; f <= hi + 1e-9; f += rc.f0_step) grid.push_back(f);
  log_line("diagonalizing on " + std::to_string(grid.size()) +
           " grid points");
  const auto diagram = galton::build_levels(*rc.spin, grid);

  std::ostringstream os;
  galton::write_levels_csv(os, diagram);
  auto manifest = start_manifest(
      rc, "levels",
      {{"f0_min", lo}, {"f0_max", hi}, {"step", rc.f0_step}});
  write_deliverable(rc, os.str(), manifest);

  if (!rc.plot_path.empty()) {
    std::vector<galton::PlotSeries> series;
    const int m = static_cast<int>(diagram.energies0.front().size());
    for (int manifold = 0; manifold <= 1; ++manifold)
      for (int n = 0; n < m; ++n) {
        galton::PlotSeries s;
        if (n == 0)
          s.label = manifold == 0 ? "m_s=0" : "m_s=+1";
        s.x = diagram.f0_grid;
        for (std::size_t i = 0; i < diagram.f0_grid.size(); ++i)
          s.y.push_back(manifold == 0 ? diagram.energies0[i][n]
                                      : diagram.energies1[i][n]);
        series.push_back(std::move(s));
      }
    maybe_plot(rc, series, "Dressed levels", "drive frequency (MHz)",
               "energy (MHz)");
  }
}

void run_board(RunConfig& rc) {
  const Checkerboard board = make_board(rc);
  std::ostringstream os;
  galton::write_board_csv(os, board, rc.sweep.sweep_rate);
  auto manifest = start_manifest(
      rc, "board",
      {{"mode", rc.board_mode.empty() ? "auto" : rc.board_mode},
       {"n_states", board.n_states()},
       {"sweep_rate", rc.sweep.sweep_rate}});
  write_deliverable(rc, os.str(), manifest);
  if (board.degenerate_crossings())
    std::cerr << "warning: degenerate crossing frequencies on the board\n";
}

void run_sweep(RunConfig& rc) {
  const Checkerboard board = make_board(rc);
  const SweepSpec spec = resolve_sweep(rc, board);
  const auto init = PopulationVector::uniform_m0(board.n_states());
  log_line("running " + std::to_string(spec.n_sweeps) + " sweep(s)");
  const auto result = galton::simulate_window_sweep(board, init, spec);

  std::ostringstream os;
  galton::write_populations_csv(os, result.populations);
  nlohmann::json params{{"f0", spec.f0},
                        {"delta_f", spec.delta_f},
                        {"sweep_rate", spec.sweep_rate},
                        {"direction", spec.direction ==
                                              SweepDirection::forward
                                          ? "forward"
                                          : "reverse"},
                        {"n_sweeps", spec.n_sweeps}};
  auto manifest = start_manifest(rc, "sweep", params);

  if (rc.format == "json") {
    nlohmann::json j;
    j["populations"] = galton::to_json(result.populations);
    j["polarization"] = result.polarization;
    j["polarization_history"] = result.polarization_history;
    j["window_empty"] = result.window_empty;
    j["max_conservation_error"] = result.field.max_conservation_error;
    write_deliverable(rc, j.dump(2) + "\n", manifest);
  } else {
    write_deliverable(rc, os.str(), manifest);
    std::cerr << "polarization: "
              << galton::format_double(result.polarization) << "\n";
  }
  if (result.window_empty)
    std::cerr << "warning: no crossing inside the sweep window\n";

  if (!rc.plot_path.empty()) {
    galton::PlotSeries s;
    s.label = "state totals";
    const auto totals = result.populations.totals();
    for (std::size_t i = 0; i < totals.size(); ++i) {
      s.x.push_back(static_cast<double>(i + 1));
      s.y.push_back(totals[i]);
    }
    maybe_plot(rc, {s}, "Post-sweep populations", "Hamming rank",
               "population");
  }
}

void run_spectrum(RunConfig& rc) {
  if (!rc.dos.has_value() && rc.board_mode != "exact" &&
      rc.board_mode != "perturbative")
    throw galton::InvalidConfig("spectrum needs a density model (--dos)");
  // grid defaults: DOS center +/- 2.5 widths
  double lo = rc.f0_min, hi = rc.f0_max;
  if (std::isnan(lo) || std::isnan(hi)) {
    if (!rc.dos.has_value())
      throw galton::InvalidConfig(
          "give --f0-min/--f0-max explicitly for non-dos boards");
    const double span = rc.dos->kind == galton::DosKind::gaussian
                            ? 2.5 * rc.dos->width
                            : 0.5 * (rc.dos->table.back().first -
                                     rc.dos->table.front().first);
    const double center =
        rc.dos->kind == galton::DosKind::gaussian
            ? rc.dos->center
            : 0.5 * (rc.dos->table.front().first +
                     rc.dos->table.back().first);
    if (std::isnan(lo)) lo = center - span;
    if (std::isnan(hi)) hi = center + span;
  }
  if (!rc.window_given)
    throw galton::InvalidConfig("spectrum needs a window width (--df)");

  // resolve the board once; workers receive copies (thread-safe and still
  // deterministic regardless of --jobs)
  const Checkerboard proto = make_board(rc);
  auto factory = [&proto]() { return proto; };
  log_line("mapping spectrum on [" + galton::format_double(lo) + ", " +
           galton::format_double(hi) + "] step " +
           galton::format_double(rc.f0_step));
  const auto map = galton::map_spectrum(factory, lo, hi, rc.f0_step,
                                        rc.sweep, rc.jobs);

  nlohmann::json params{{"f0_min", lo},
                        {"f0_max", hi},
                        {"step", rc.f0_step},
                        {"delta_f", rc.sweep.delta_f},
                        {"sweep_rate", rc.sweep.sweep_rate},
                        {"direction", rc.sweep.direction ==
                                              SweepDirection::forward
                                          ? "forward"
                                          : "reverse"},
                        {"n_states", rc.n_states},
                        {"gap_scale", rc.sampling.gap_scale},
                        {"flip_ratio", rc.sampling.flip_ratio},
                        {"monte_carlo", rc.sampling.monte_carlo},
                        {"jobs", map.n_jobs_used}};
  auto manifest = start_manifest(rc, "spectrum", params);
  if (rc.format == "json") {
    write_deliverable(rc, galton::to_json(map).dump(2) + "\n", manifest);
  } else {
    std::ostringstream os;
    galton::write_map_csv(os, map);
    write_deliverable(rc, os.str(), manifest);
  }

  galton::PlotSeries s;
  s.label = rc.sweep.direction == SweepDirection::forward ? "forward"
                                                          : "reverse";
  s.x = map.f0;
  s.y = map.polarization;
  maybe_plot(rc, {s}, "Spectral map", "window low edge f0 (MHz)",
             "polarization");
}

void run_buildup(RunConfig& rc) {
  rc.buildup.validate();
  if (!(rc.t_max > 0.0)) throw galton::InvalidConfig("t_max must be > 0");
  if (rc.n_points < 2)
    throw galton::InvalidConfig("need at least 2 time points");
  std::vector<double> times(rc.n_points);
  for (int i = 0; i < rc.n_points; ++i)
    times[i] = rc.t_max * i / (rc.n_points - 1);
  const auto values = galton::accumulate_buildup(rc.buildup, times);

  std::ostringstream os;
  galton::write_buildup_csv(os, times, values);
  auto manifest = start_manifest(rc, "buildup",
                                 {{"p_max", rc.buildup.p_max},
                                  {"rate", rc.buildup.rate},
                                  {"gamma1", rc.buildup.gamma1},
                                  {"t_max", rc.t_max},
                                  {"points", rc.n_points}});
  if (rc.format == "json") {
    nlohmann::json j{{"time", times},
                     {"polarization", values},
                     {"saturation", rc.buildup.saturation()},
                     {"initial_slope", rc.buildup.initial_slope()}};
    write_deliverable(rc, j.dump(2) + "\n", manifest);
  } else {
    write_deliverable(rc, os.str(), manifest);
  }

  galton::PlotSeries s;
  s.label = "buildup";
  s.x = times;
  s.y = values;
  maybe_plot(rc, {s}, "Polarization buildup", "time (s)", "polarization");
}

void run_fit(RunConfig& rc) {
  if (rc.fit_input.empty())
    throw galton::InvalidConfig("fit needs an input file (--in)");
  const auto data = galton::read_xy_csv_file(rc.fit_input);
  log_line("fitting model '" + rc.fit_model + "' to " +
           std::to_string(data.x.size()) + " points");

  galton::FitResult fit;
  if (rc.fit_model == "gaussian") {
    galton::Spectrum spec{data.x, data.y};
    fit = galton::fit_gaussian(spec, rc.n_peaks);
  } else if (rc.fit_model == "biexponential") {
    fit = galton::fit_biexponential(data.x, data.y);
  } else if (rc.fit_model == "relaxation") {
    fit = galton::fit_relaxation(data.x, data.y);
  } else if (rc.fit_model == "short-time-rate") {
    fit = galton::short_time_rate(data.x, data.y, rc.fit_t_max);
  } else if (rc.fit_model == "gyro") {
    fit = galton::center_vs_field(data.x, data.y);
  } else {
    throw galton::InvalidConfig(
        "unknown fit model '" + rc.fit_model +
        "' (gaussian|biexponential|relaxation|short-time-rate|gyro)");
  }

  auto manifest = start_manifest(
      rc, "fit", {{"model", rc.fit_model}, {"peaks", rc.n_peaks}});
  manifest.add_input_file(
      std::filesystem::path(rc.fit_input).filename().string(), rc.fit_input);
  write_deliverable(rc, galton::to_json(fit).dump(2) + "\n", manifest);

  if (!rc.plot_path.empty()) {
    galton::PlotSeries points;
    points.label = "data";
    points.x = data.x;
    points.y = data.y;
    galton::PlotSeries curve;
    curve.label = "fit";
    const double lo = data.x.front(), hi = data.x.back();
    for (int i = 0; i <= 400; ++i) {
      const double x = lo + (hi - lo) * i / 400.0;
      double y = 0.0;
      if (rc.fit_model == "gaussian") {
        for (int k = 0; k < rc.n_peaks; ++k) {
          const double a = fit.params[3 * k];
          const double c = fit.params[3 * k + 1];
          const double s = fit.params[3 * k + 2] / 2.3548200450309493;
          if (s > 0.0) y += a * std::exp(-0.5 * (x - c) * (x - c) / (s * s));
        }
      } else if (rc.fit_model == "biexponential") {
        y = fit.params[0] * std::exp(-x / fit.params[1]) +
            fit.params[2] * std::exp(-x / fit.params[3]);
      } else if (rc.fit_model == "relaxation") {
        y = fit.params[1] +
            (fit.params[0] - fit.params[1]) * std::exp(-x / fit.params[2]);
      } else {
        y = fit.params[0] + fit.params[1] * x;
      }
      curve.x.push_back(x);
      curve.y.push_back(y);
    }
    maybe_plot(rc, {points, curve}, "Model fit", "x", "y");
  }
}

// Self-contained consistency battery over the engine's independent oracles.
void run_oracle_check(RunConfig& rc) {
  if (rc.oracle_n < 1 || rc.oracle_n > 10)
    throw galton::InvalidConfig("--n must lie in [1, 10]");
  if (rc.oracle_trials < 1)
    throw galton::InvalidConfig("--trials must be >= 1");
  const int n = rc.oracle_n;
  const int m = 1 << n;
  const std::uint64_t seed = rc.seed >= 0 ? rc.seed : 12345;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int failures = 0;
  auto report = [&](const std::string& name, bool ok,
                    const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
    if (!ok) ++failures;
  };

  // synthetic uniform board: every node at distinct frequency, eta from rate
  auto uniform_board = [&](double eta_target) {
    std::vector<double> fc(static_cast<std::size_t>(m) * m);
    std::vector<double> gaps(fc.size());
    for (int k = 1; k <= m; ++k)
      for (int l = 1; l <= m; ++l) {
        const std::size_t idx = static_cast<std::size_t>(k - 1) * m + (l - 1);
        fc[idx] = 10.0 * k + 10.7 * l;
        gaps[idx] = k == m + 1 - l
                        ? galton::gap_for_eta(1e-14, 1.0)
                        : galton::gap_for_eta(eta_target, 1.0);
      }
    return Checkerboard(m, fc, gaps);
  };

  {  // closed form vs DP, independent-peg mode, p = q = 1/2
    const auto board = uniform_board(0.5);
    const auto field = galton::dp_sweep(
        board, PopulationVector::uniform_m0(m), 1.0, std::nullopt,
        SweepDirection::forward, galton::NodeModel::classical);
    const auto analytic = galton::analytic_full_sweep(m, 0.5, 0.5);
    double max_diff = 0.0;
    const auto totals = field.exits.totals();
    for (int i = 0; i < m; ++i)
      max_diff = std::max(max_diff,
                          std::abs(totals[i] - analytic.m0[i]));
    report("closed-form-vs-dp-even", max_diff < 1e-9,
           "max state diff " + galton::format_double(max_diff));
  }

  {  // closed form vs DP at random asymmetric (p, q)
    double worst = 0.0;
    for (int t = 0; t < rc.oracle_trials; ++t) {
      const double q = 0.02 + 0.96 * unit(rng);
      const auto board = uniform_board(q);
      const auto field = galton::dp_sweep(
          board, PopulationVector::uniform_m0(m), 1.0, std::nullopt,
          SweepDirection::forward, galton::NodeModel::classical);
      const auto analytic = galton::analytic_full_sweep(m, 1.0 - q, q);
      const auto totals = field.exits.totals();
      for (int i = 0; i < m; ++i)
        worst = std::max(worst, std::abs(totals[i] - analytic.m0[i]));
    }
    report("closed-form-vs-dp-random", worst < 1e-9,
           std::to_string(rc.oracle_trials) + " trials, max diff " +
               galton::format_double(worst));
  }

  if (n <= 3) {  // path enumeration vs DP (persistent mode)
    double worst = 0.0;
    const int path_trials = std::min(rc.oracle_trials, 20);
    for (int t = 0; t < path_trials; ++t) {
      const double eta = 0.05 + 0.9 * unit(rng);
      const auto board = uniform_board(eta);
      const auto field =
          galton::dp_sweep(board, PopulationVector::uniform_m0(m), 1.0);
      for (int rank = 1; rank <= m; ++rank) {
        double from_paths = 0.0;
        for (int src = rank; src <= m; ++src)  // columns only grow
          from_paths += galton::path_probability(board, {0, m + 1 - src},
                                                 {m + 1, m + 1 - rank},
                                                 1.0) /
                        m;
        worst = std::max(worst,
                         std::abs(from_paths - field.exits.m0[rank - 1]));
      }
    }
    report("path-sum-vs-dp", worst < 1e-9,
           std::to_string(path_trials) + " boards, max exit diff " +
               galton::format_double(worst));
  } else {
    std::cout << "SKIP path-sum-vs-dp (path count explodes past n = 3)\n";
  }

  {  // conservation audit across random windowed sweeps
    double worst = 0.0;
    for (int t = 0; t < rc.oracle_trials; ++t) {
      const double eta = 0.05 + 0.9 * unit(rng);
      const auto board = uniform_board(eta);
      const double span = board.f_max() - board.f_min();
      const double a = board.f_min() + span * unit(rng);
      const double w = 0.2 + span * unit(rng);
      const auto dir = unit(rng) < 0.5 ? SweepDirection::forward
                                       : SweepDirection::reverse;
      const auto field =
          galton::dp_sweep(board, PopulationVector::uniform_m0(m), 1.0,
                           galton::Window{a, w}, dir);
      worst = std::max(worst, field.max_conservation_error);
      worst = std::max(worst, std::abs(field.exits.mass() - 1.0));
    }
    report("conservation", worst < 1e-12,
           std::to_string(rc.oracle_trials) + " windowed sweeps, max |1-sum| " +
               galton::format_double(worst));
  }

  {  // forward/reverse antisymmetry on a symmetric quantile board
    const auto dos = DosModel::make_gaussian(2900.0, 13.5);
    galton::BoardSamplingOptions options;
    options.gap_scale = 2.0;
    const auto sampled = galton::sample_board_from_dos(dos, m, options);
    SweepSpec spec;
    spec.delta_f = 10.0;
    spec.sweep_rate = 0.13;
    const auto init = PopulationVector::uniform_m0(m);
    double worst = 0.0;
    for (int t = 0; t < std::min(rc.oracle_trials, 25); ++t) {
      const double f0 = 2900.0 - 20.0 + 40.0 * unit(rng);
      spec.f0 = f0;
      spec.direction = SweepDirection::forward;
      const double p_fwd =
          galton::simulate_window_sweep(sampled.board, init, spec)
              .polarization;
      // mirror window about the density center
      spec.f0 = 2.0 * 2900.0 - f0 - spec.delta_f;
      spec.direction = SweepDirection::reverse;
      const double p_rev =
          galton::simulate_window_sweep(sampled.board, init, spec)
              .polarization;
      worst = std::max(worst, std::abs(p_fwd + p_rev));
    }
    report("forward-reverse-antisymmetry", worst < 1e-12,
           "max |P_fwd + P_rev(mirror)| " + galton::format_double(worst));
  }

  std::cout << (failures == 0 ? "ok: all oracle checks passed\n"
                              : std::to_string(failures) + " check(s) failed\n");
  if (failures > 0)
    throw galton::NoConvergence("oracle cross-checks failed");
}

// ---------------------------------------------------------------------------

void emit_error_json(const std::string& kind, int code,
                     const std::string& message) {
  nlohmann::json j{{"error", kind}, {"code", code}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Anti-crossing cascade simulator: electron-to-nuclear spectral "
      "mapping through swept Landau-Zener transitions"};
  app.require_subcommand(1);

  RunConfig rc;
  rc.sweep.sweep_rate = 0.13;  // canonical chirp rate for the doc examples
  std::function<void(RunConfig&)> action;

  std::string dos_kind_flag = "gaussian";
  double center_flag = 2900.0, width_flag = 13.5;
  std::string direction_flag = "forward";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", rc.config_path,
                    "JSON config file (spin/dos/sampling/sweep/buildup)");
    sub->add_option("--out", rc.out_path,
                    "output file (stdout when omitted); a .manifest.json "
                    "sidecar is written next to it");
    sub->add_option("--format", rc.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", rc.seed, "random seed (>= 0)");
    sub->add_option("--jobs", rc.jobs, "worker threads (0 = hardware)");
    sub->add_option("--plot", rc.plot_path, "write an SVG plot here");
  };
  auto add_board_source = [&](CLI::App* sub) {
    sub->add_option("--mode", rc.board_mode,
                    "board source: exact | perturbative | dos");
    sub->add_option("--dos", dos_kind_flag,
                    "density kind: gaussian (flags) or tabulated "
                    "(config file)");
    sub->add_option("--center", center_flag,
                    "gaussian density center (MHz)");
    sub->add_option("--width", width_flag,
                    "gaussian density standard deviation (MHz)");
    sub->add_option("--n-states", rc.n_states,
                    "board dimension (power of two)");
    sub->add_option("--gap-scale", rc.sampling.gap_scale,
                    "self-crossing gap (MHz)");
    sub->add_option("--flip-ratio", rc.sampling.flip_ratio,
                    "single-flip gap / self-crossing gap");
    sub->add_flag("--mc", rc.sampling.monte_carlo,
                  "Monte-Carlo level placement (needs --seed)");
  };
  auto add_sweep_flags = [&](CLI::App* sub) {
    sub->add_option("--f0", rc.sweep.f0,
                    "window low edge (MHz, both directions)");
    sub->add_option("--df", rc.sweep.delta_f, "window width (MHz)");
    sub->add_option("--rate", rc.sweep.sweep_rate, "sweep rate (MHz^2)");
    sub->add_option("--sweep,--direction", direction_flag,
                    "sweep direction")
        ->check(CLI::IsMember({"forward", "reverse"}));
    sub->add_option("--n-sweeps", rc.sweep.n_sweeps,
                    "sweeps with electronic reset in between");
  };

  // levels ------------------------------------------------------------------
  auto* levels = app.add_subcommand(
      "levels", "Dressed-state energies against drive frequency");
  add_common(levels);
  levels->add_option("--f0-min", rc.f0_min, "grid start (MHz)");
  levels->add_option("--f0-max", rc.f0_max, "grid end (MHz)");
  levels->add_option("--step", rc.f0_step, "grid step (MHz)");
  levels->callback([&] { action = run_levels; });

  // board -------------------------------------------------------------------
  auto* board = app.add_subcommand(
      "board", "Anti-crossing board: positions, gaps, tunneling");
  add_common(board);
  add_board_source(board);
  board->add_option("--rate", rc.sweep.sweep_rate,
                    "sweep rate for the eta column (MHz^2)");
  board->callback([&] { action = run_board; });

  // sweep -------------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "Single windowed sweep: exit populations and polarization");
  add_common(sweep);
  add_board_source(sweep);
  add_sweep_flags(sweep);
  sweep->callback([&] { action = run_sweep; });

  // spectrum ----------------------------------------------------------------
  auto* spectrum = app.add_subcommand(
      "spectrum", "Polarization vs window position (the spectral map)");
  add_common(spectrum);
  add_board_source(spectrum);
  add_sweep_flags(spectrum);
  spectrum->add_option("--f0-min", rc.f0_min, "scan start (MHz)");
  spectrum->add_option("--f0-max", rc.f0_max, "scan end (MHz)");
  spectrum->add_option("--step", rc.f0_step, "scan step (MHz)");
  spectrum->callback([&] { action = run_spectrum; });

  // buildup -----------------------------------------------------------------
  auto* buildup = app.add_subcommand(
      "buildup", "Saturation kinetics of repeated sweeps");
  add_common(buildup);
  buildup->add_option("--p-max", rc.buildup.p_max, "per-sweep asymptote");
  buildup->add_option("--rate", rc.buildup.rate, "injection rate (1/s)");
  buildup->add_option("--gamma1", rc.buildup.gamma1,
                      "relaxation rate (1/s)");
  buildup->add_option("--t-max", rc.t_max, "last time point (s)");
  buildup->add_option("--points", rc.n_points, "number of time points");
  buildup->callback([&] { action = run_buildup; });

  // fit ---------------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Fit a model to x,y[,sigma] data");
  add_common(fit);
  fit->add_option("--model", rc.fit_model,
                  "gaussian | biexponential | relaxation | short-time-rate "
                  "| gyro")
      ->required();
  fit->add_option("--in", rc.fit_input, "input CSV (x,y[,sigma] + header)")
      ->required();
  fit->add_option("--peaks", rc.n_peaks, "gaussian peak count");
  fit->add_option("--t-max", rc.fit_t_max,
                  "short-time-rate cutoff (s)");
  fit->callback([&] { action = run_fit; });

  // oracle-check --------------------------------------------------------------
  auto* oracle = app.add_subcommand(
      "oracle-check", "Cross-check the engine against independent oracles");
  add_common(oracle);
  oracle->add_option("--n", rc.oracle_n, "nuclear spin count for the checks");
  oracle->add_option("--trials", rc.oracle_trials, "randomized trials");
  oracle->callback([&] { action = run_oracle_check; });

  try {
    app.parse(argc, argv);

    // true when the active subcommand actually received this flag
    auto flag_given = [&](const std::string& name) {
      for (CLI::App* sub : app.get_subcommands()) {
        const CLI::Option* opt = sub->get_option_no_throw(name);
        if (opt != nullptr && opt->count() > 0) return true;
      }
      return false;
    };

    // merge: config file values fill in wherever no CLI flag was passed
    if (!rc.config_path.empty()) {
      rc.config_doc = galton::load_json_file(rc.config_path);
      const auto& doc = rc.config_doc;
      if (!doc.is_object())
        throw galton::InvalidConfig("config root must be a JSON object");
      for (const auto& item : doc.items())
        if (item.key() != "spin" && item.key() != "dos" &&
            item.key() != "sampling" && item.key() != "sweep" &&
            item.key() != "buildup")
          throw galton::InvalidConfig("unknown config section '" +
                                      item.key() + "'");
      if (doc.contains("spin"))
        rc.spin = galton::spin_config_from_json(doc.at("spin"));
      if (doc.contains("dos")) rc.dos = galton::dos_from_json(doc.at("dos"));
      if (doc.contains("sampling")) {
        const auto& sj = doc.at("sampling");
        auto from_file = galton::sampling_from_json(sj);
        if (sj.contains("n_states") && !flag_given("--n-states")) {
          if (!sj.at("n_states").is_number_integer())
            throw galton::InvalidConfig("'n_states' must be an integer");
          rc.n_states = sj.at("n_states").get<int>();
        }
        if (!flag_given("--gap-scale"))
          rc.sampling.gap_scale = from_file.gap_scale;
        if (!flag_given("--flip-ratio"))
          rc.sampling.flip_ratio = from_file.flip_ratio;
        rc.sampling.column_span_frac = from_file.column_span_frac;
        if (from_file.monte_carlo) rc.sampling.monte_carlo = true;
        if (from_file.seed) rc.sampling.seed = from_file.seed;
      }
      if (doc.contains("sweep")) {
        auto spec = galton::sweep_spec_from_json(doc.at("sweep"));
        if (!flag_given("--f0")) rc.sweep.f0 = spec.f0;
        if (!flag_given("--df")) rc.sweep.delta_f = spec.delta_f;
        if (!flag_given("--rate")) rc.sweep.sweep_rate = spec.sweep_rate;
        if (!flag_given("--sweep")) rc.sweep.direction = spec.direction;
        if (!flag_given("--n-sweeps")) rc.sweep.n_sweeps = spec.n_sweeps;
        rc.window_given = true;
      }
      if (doc.contains("buildup"))
        rc.buildup = galton::buildup_from_json(doc.at("buildup"));
    }
    if (flag_given("--dos")) {
      if (dos_kind_flag == "gaussian")
        rc.dos = DosModel::make_gaussian(center_flag, width_flag);
      else if (dos_kind_flag == "tabulated") {
        if (!rc.dos.has_value() ||
            rc.dos->kind != galton::DosKind::tabulated)
          throw galton::InvalidConfig(
              "tabulated densities come from the config file's dos section");
      } else
        throw galton::InvalidConfig("dos kind must be gaussian or tabulated");
    } else if (flag_given("--center") || flag_given("--width")) {
      rc.dos = DosModel::make_gaussian(center_flag, width_flag);
    }
    if (flag_given("--sweep"))
      rc.sweep.direction = direction_flag == "reverse"
                               ? SweepDirection::reverse
                               : SweepDirection::forward;
    if (flag_given("--f0") || flag_given("--df")) rc.window_given = true;
    if (rc.seed >= 0 && rc.sampling.monte_carlo && !rc.sampling.seed)
      rc.sampling.seed = rc.seed;

    if (!action) throw galton::InvalidConfig("no subcommand given");
    action(rc);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error_json("UsageError", 1, e.what());
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const galton::Error& e) {
    emit_error_json(e.code(), e.exit_status(), e.what());
    return e.exit_status();
  } catch (const std::exception& e) {
    emit_error_json("Internal", 2, e.what());
    return 2;
  }
}
