// Python bindings for the core operations: board construction, sweep
// propagation, spectral mapping, buildup kinetics, and the fit family.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "galton/checkerboard.hpp"
#include "galton/dos.hpp"
#include "galton/engine.hpp"
#include "galton/errors.hpp"
#include "galton/fit.hpp"
#include "galton/hamming.hpp"
#include "galton/spin_model.hpp"
#include "galton/sweep.hpp"

namespace py = pybind11;
using namespace galton;

namespace {

SweepDirection direction_from_string(const std::string& name) {
  if (name == "forward") return SweepDirection::forward;
  if (name == "reverse") return SweepDirection::reverse;
  throw InvalidConfig("direction must be 'forward' or 'reverse'");
}

NodeModel model_from_string(const std::string& name) {
  if (name == "persistent") return NodeModel::persistent;
  if (name == "classical") return NodeModel::classical;
  throw InvalidConfig("node model must be 'persistent' or 'classical'");
}

DosModel dos_from_args(const std::string& kind, double center, double width,
                       const std::vector<std::pair<double, double>>& table) {
  if (kind == "gaussian") return DosModel::make_gaussian(center, width);
  if (kind == "tabulated") return DosModel::make_tabulated(table);
  throw InvalidConfig("dos kind must be 'gaussian' or 'tabulated'");
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "Landau-Zener cascade simulator: checkerboard boards, sweep "
      "propagation, spectral mapping, and fitting";

  py::register_exception<Error>(mod, "GaltonError");

  py::class_<Checkerboard>(mod, "Checkerboard")
      .def(py::init<>())
      .def_property_readonly("n_states", &Checkerboard::n_states)
      .def_property_readonly("n_spins", &Checkerboard::n_spins)
      .def_property_readonly("grid_monotone", &Checkerboard::grid_monotone)
      .def_property_readonly("degenerate_crossings",
                             &Checkerboard::degenerate_crossings)
      .def_property_readonly("f_min", &Checkerboard::f_min)
      .def_property_readonly("f_max", &Checkerboard::f_max)
      .def("f_cross", &Checkerboard::f_cross, py::arg("k"), py::arg("l"))
      .def("gap", &Checkerboard::gap, py::arg("k"), py::arg("l"))
      .def_property_readonly("f_cross_table",
                             &Checkerboard::f_cross_table)
      .def_property_readonly("gap_table", &Checkerboard::gap_table);

  py::class_<PopulationVector>(mod, "PopulationVector")
      .def(py::init<>())
      .def_readwrite("m0", &PopulationVector::m0)
      .def_readwrite("m1", &PopulationVector::m1)
      .def_readwrite("manifold_resolved",
                     &PopulationVector::manifold_resolved)
      .def_property_readonly("n_states", &PopulationVector::n_states)
      .def("totals", &PopulationVector::totals)
      .def("mass", &PopulationVector::mass)
      .def_static("uniform_m0", &PopulationVector::uniform_m0,
                  py::arg("n_states"))
      .def_static("state_totals", &PopulationVector::state_totals,
                  py::arg("values"));

  py::class_<PopulationField>(mod, "PopulationField")
      .def_readonly("n_states", &PopulationField::n_states)
      .def_readonly("exits", &PopulationField::exits)
      .def_readonly("window_empty", &PopulationField::window_empty)
      .def_readonly("max_conservation_error",
                    &PopulationField::max_conservation_error)
      .def("polarization", &PopulationField::polarization);

  mod.def("tunneling_probability", &tunneling_probability, py::arg("gap"),
          py::arg("sweep_rate"),
          "Landau-Zener passage probability exp(-gap^2/sweep_rate)");
  mod.def("gap_for_eta", &gap_for_eta, py::arg("eta"),
          py::arg("sweep_rate"));
  mod.def("hamming_order", &hamming_order, py::arg("n_spins"));
  mod.def("hamming_index", &hamming_index, py::arg("state"),
          py::arg("n_spins"));
  mod.def("hamming_state", &hamming_state, py::arg("rank"),
          py::arg("n_spins"));

  mod.def("checkerboard_from_gaps", &checkerboard_from_gaps,
          py::arg("n_states"), py::arg("gaps"), py::arg("crossings"));

  mod.def(
      "dp_sweep",
      [](const Checkerboard& board, const PopulationVector& init,
         double sweep_rate, std::optional<std::pair<double, double>> window,
         const std::string& direction, const std::string& model) {
        std::optional<Window> w;
        if (window) w = Window{window->first, window->second};
        return dp_sweep(board, init, sweep_rate, w,
                        direction_from_string(direction),
                        model_from_string(model));
      },
      py::arg("board"), py::arg("init"), py::arg("sweep_rate"),
      py::arg("window") = std::nullopt, py::arg("direction") = "forward",
      py::arg("model") = "persistent");

  mod.def("analytic_full_sweep", &analytic_full_sweep, py::arg("n_states"),
          py::arg("p"), py::arg("q"));
  mod.def("hyperpolarization",
          py::overload_cast<const PopulationVector&>(&hyperpolarization),
          py::arg("populations"));
  mod.def(
      "path_probability",
      [](const Checkerboard& board, std::pair<int, int> from,
         std::pair<int, int> to, double sweep_rate,
         std::optional<std::pair<double, double>> window) {
        std::optional<Window> w;
        if (window) w = Window{window->first, window->second};
        return path_probability(board, from, to, sweep_rate, w);
      },
      py::arg("board"), py::arg("from_vertex"), py::arg("to_vertex"),
      py::arg("sweep_rate"), py::arg("window") = std::nullopt);

  mod.def(
      "sample_board_from_dos",
      [](const std::string& kind, double center, double width,
         const std::vector<std::pair<double, double>>& table, int n_states,
         double gap_scale, double flip_ratio, double column_span_frac,
         bool monte_carlo, std::optional<std::int64_t> seed) {
        BoardSamplingOptions opts;
        opts.gap_scale = gap_scale;
        opts.flip_ratio = flip_ratio;
        opts.column_span_frac = column_span_frac;
        opts.monte_carlo = monte_carlo;
        opts.seed = seed;
        const auto sampled = sample_board_from_dos(
            dos_from_args(kind, center, width, table), n_states, opts);
        return py::make_tuple(sampled.board, sampled.levels,
                              sampled.seed_used, sampled.monte_carlo);
      },
      py::arg("kind"), py::arg("center") = 0.0, py::arg("width") = 0.0,
      py::arg("table") = std::vector<std::pair<double, double>>{},
      py::arg("n_states") = 256, py::arg("gap_scale") = 1.0,
      py::arg("flip_ratio") = 0.15, py::arg("column_span_frac") = 1e-3,
      py::arg("monte_carlo") = false, py::arg("seed") = std::nullopt,
      "Returns (board, levels, seed_used, monte_carlo)");

  py::class_<WindowSweepResult>(mod, "WindowSweepResult")
      .def_readonly("populations", &WindowSweepResult::populations)
      .def_readonly("polarization_history",
                    &WindowSweepResult::polarization_history)
      .def_readonly("polarization", &WindowSweepResult::polarization)
      .def_readonly("window_empty", &WindowSweepResult::window_empty);

  mod.def(
      "simulate_window_sweep",
      [](const Checkerboard& board, const PopulationVector& init, double f0,
         double delta_f, double sweep_rate, const std::string& direction,
         int n_sweeps) {
        SweepSpec spec;
        spec.f0 = f0;
        spec.delta_f = delta_f;
        spec.sweep_rate = sweep_rate;
        spec.direction = direction_from_string(direction);
        spec.n_sweeps = n_sweeps;
        return simulate_window_sweep(board, init, spec);
      },
      py::arg("board"), py::arg("init"), py::arg("f0"), py::arg("delta_f"),
      py::arg("sweep_rate"), py::arg("direction") = "forward",
      py::arg("n_sweeps") = 1);
  // convenience overload: start from the uniform ground-manifold state
  mod.def(
      "simulate_window_sweep",
      [](const Checkerboard& board, double f0, double delta_f,
         double sweep_rate, const std::string& direction, int n_sweeps) {
        SweepSpec spec;
        spec.f0 = f0;
        spec.delta_f = delta_f;
        spec.sweep_rate = sweep_rate;
        spec.direction = direction_from_string(direction);
        spec.n_sweeps = n_sweeps;
        return simulate_window_sweep(
            board, PopulationVector::uniform_m0(board.n_states()), spec);
      },
      py::arg("board"), py::arg("f0"), py::arg("delta_f"),
      py::arg("sweep_rate"), py::arg("direction") = "forward",
      py::arg("n_sweeps") = 1);

  mod.def(
      "map_spectrum",
      [](const Checkerboard& board, double f0_lo, double f0_hi, double step,
         double delta_f, double sweep_rate, const std::string& direction,
         int n_sweeps, int n_jobs) {
        SweepSpec spec;
        spec.delta_f = delta_f;
        spec.sweep_rate = sweep_rate;
        spec.direction = direction_from_string(direction);
        spec.n_sweeps = n_sweeps;
        auto factory = [board]() { return board; };
        const auto result =
            map_spectrum(factory, f0_lo, f0_hi, step, spec, n_jobs);
        return py::make_tuple(result.f0, result.polarization);
      },
      py::arg("board"), py::arg("f0_min"), py::arg("f0_max"), py::arg("step"),
      py::arg("delta_f"), py::arg("sweep_rate"),
      py::arg("direction") = "forward", py::arg("n_sweeps") = 1,
      py::arg("n_jobs") = 1, "Returns (f0_list, polarization_list)");

  mod.def(
      "accumulate_buildup",
      [](double p_max, double rate, double gamma1,
         const std::vector<double>& times) {
        return accumulate_buildup(BuildupModel{p_max, rate, gamma1}, times);
      },
      py::arg("p_max"), py::arg("rate"), py::arg("gamma1"),
      py::arg("times"));

  py::class_<FitResult>(mod, "FitResult")
      .def_readonly("model", &FitResult::model)
      .def_readonly("param_names", &FitResult::param_names)
      .def_readonly("params", &FitResult::params)
      .def_readonly("param_errors", &FitResult::param_errors)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("n_iterations", &FitResult::n_iterations)
      .def_readonly("residual_norm", &FitResult::residual_norm)
      .def_readonly("flags", &FitResult::flags)
      .def("param", &FitResult::param, py::arg("name"))
      .def("has_flag", &FitResult::has_flag, py::arg("name"));

  mod.def(
      "fit_gaussian",
      [](const std::vector<double>& frequencies,
         const std::vector<double>& values, int n_peaks) {
        Spectrum s;
        s.frequencies = frequencies;
        s.values = values;
        return fit_gaussian(s, n_peaks);
      },
      py::arg("frequencies"), py::arg("values"), py::arg("n_peaks") = 1);
  mod.def("fit_biexponential", &fit_biexponential, py::arg("times"),
          py::arg("values"));
  mod.def("fit_relaxation", &fit_relaxation, py::arg("times"),
          py::arg("values"));
  mod.def("short_time_rate", &short_time_rate, py::arg("times"),
          py::arg("values"), py::arg("t_max") = 1.0);
  mod.def("center_vs_field", &center_vs_field, py::arg("fields"),
          py::arg("centers"));

  mod.def(
      "locate_lacs",
      [](double zero_field_splitting, double gyro_electron,
         double bias_field, double rabi,
         const std::vector<std::tuple<double, double, double, double>>&
             nuclei) {
        SpinSystemConfig cfg;
        cfg.zero_field_splitting = zero_field_splitting;
        cfg.gyro_electron = gyro_electron;
        cfg.bias_field = bias_field;
        cfg.rabi = rabi;
        for (const auto& [w0, w1, theta, ap] : nuclei)
          cfg.nuclei.push_back(NuclearSpinParams{w0, w1, theta, ap});
        cfg.n_nuclei = static_cast<int>(cfg.nuclei.size());
        return locate_lacs(cfg);
      },
      py::arg("zero_field_splitting"), py::arg("gyro_electron"),
      py::arg("bias_field"), py::arg("rabi"), py::arg("nuclei"),
      "nuclei: list of (omega0, omega1, theta, a_parallel) tuples");

  mod.def(
      "perturbative_checkerboard",
      [](double zero_field_splitting, double gyro_electron,
         double bias_field, double rabi,
         const std::vector<std::tuple<double, double, double, double>>&
             nuclei) {
        SpinSystemConfig cfg;
        cfg.zero_field_splitting = zero_field_splitting;
        cfg.gyro_electron = gyro_electron;
        cfg.bias_field = bias_field;
        cfg.rabi = rabi;
        for (const auto& [w0, w1, theta, ap] : nuclei)
          cfg.nuclei.push_back(NuclearSpinParams{w0, w1, theta, ap});
        cfg.n_nuclei = static_cast<int>(cfg.nuclei.size());
        return perturbative_checkerboard(cfg);
      },
      py::arg("zero_field_splitting"), py::arg("gyro_electron"),
      py::arg("bias_field"), py::arg("rabi"), py::arg("nuclei"));
}
