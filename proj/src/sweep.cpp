#include "galton/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "galton/errors.hpp"

namespace galton {

void SweepSpec::validate() const {
  if (!std::isfinite(f0)) throw InvalidConfig("window edge must be finite");
  if (!(delta_f > 0.0) || !std::isfinite(delta_f))
    throw InvalidConfig("window width must be > 0");
  if (!(sweep_rate > 0.0) || !std::isfinite(sweep_rate))
    throw NonpositiveRate("sweep rate must be > 0");
  if (n_sweeps < 1) throw InvalidConfig("n_sweeps must be >= 1");
}

WindowSweepResult simulate_window_sweep(const Checkerboard& board,
                                        const PopulationVector& init,
                                        const SweepSpec& spec) {
  spec.validate();
  WindowSweepResult out;
  PopulationVector current = init;
  const Window window{spec.f0, spec.delta_f};
  for (int s = 0; s < spec.n_sweeps; ++s) {
    if (s > 0) {
      // electronic reset: the nuclear totals re-enter on the m_s=0 edge
      PopulationVector next;
      next.m0 = out.populations.totals();
      next.m1.assign(next.m0.size(), 0.0);
      current = std::move(next);
    }
    out.field = dp_sweep(board, current, spec.sweep_rate, window,
                         spec.direction);
    out.populations = out.field.exits;
    out.polarization_history.push_back(out.field.polarization());
  }
  out.polarization = out.polarization_history.back();
  out.window_empty = out.field.window_empty;
  return out;
}

SpectralMapResult map_spectrum(
    const std::function<Checkerboard()>& board_factory, double f0_lo,
    double f0_hi, double step, const SweepSpec& spec_template, int n_jobs) {
  if (!board_factory) throw InvalidConfig("board factory is empty");
  if (!(step > 0.0) || !std::isfinite(step))
    throw EmptyRange("scan step must be > 0");
  if (!(f0_hi >= f0_lo))
    throw EmptyRange("scan range is empty (f0_hi < f0_lo)");
  {
    SweepSpec probe = spec_template;
    probe.f0 = f0_lo;
    probe.validate();
  }
  if (n_jobs < 0) throw InvalidConfig("n_jobs must be >= 0");

  const std::size_t n_pts =
      static_cast<std::size_t>(std::floor((f0_hi - f0_lo) / step + 1e-9)) + 1;
  SpectralMapResult out;
  out.spec = spec_template;
  out.f0.resize(n_pts);
  out.polarization.resize(n_pts);
  for (std::size_t i = 0; i < n_pts; ++i) out.f0[i] = f0_lo + step * i;

  unsigned workers = n_jobs == 0
                         ? std::max(1u, std::thread::hardware_concurrency())
                         : static_cast<unsigned>(n_jobs);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n_pts));
  out.n_jobs_used = static_cast<int>(workers);

  auto run_chunk = [&](const Checkerboard& board, std::size_t begin,
                       std::size_t stride) {
    const PopulationVector init =
        PopulationVector::uniform_m0(board.n_states());
    for (std::size_t i = begin; i < n_pts; i += stride) {
      SweepSpec spec = spec_template;
      spec.f0 = out.f0[i];
      out.polarization[i] =
          simulate_window_sweep(board, init, spec).polarization;
    }
  };

  if (workers <= 1) {
    run_chunk(board_factory(), 0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const Checkerboard board = board_factory();
        run_chunk(board, w, workers);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return out;
}

void BuildupModel::validate() const {
  if (!(p_max >= -1.0 && p_max <= 1.0))
    throw InvalidConfig("p_max must lie in [-1, 1]");
  if (rate < 0.0 || !std::isfinite(rate))
    throw InvalidConfig("buildup rate must be >= 0");
  if (gamma1 < 0.0 || !std::isfinite(gamma1))
    throw InvalidConfig("relaxation rate must be >= 0");
}

double BuildupModel::saturation() const {
  const double total = rate + gamma1;
  return total > 0.0 ? p_max * rate / total : 0.0;
}

double BuildupModel::initial_slope() const { return p_max * rate; }

double BuildupModel::evaluate(double t) const {
  const double total = rate + gamma1;
  if (total <= 0.0) return 0.0;
  return saturation() * (1.0 - std::exp(-total * t));
}

std::vector<double> accumulate_buildup(const BuildupModel& model,
                                       const std::vector<double>& times) {
  model.validate();
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 0.0 || !std::isfinite(t))
      throw InvalidConfig("buildup times must be >= 0");
    out.push_back(model.evaluate(t));
  }
  return out;
}

}  // namespace galton
