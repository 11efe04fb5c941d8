#include "galton/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "galton/errors.hpp"

namespace galton {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

// residuals(params) -> r and optionally J (rows = points, cols = params)
using ResidualFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                       Eigen::MatrixXd*)>;

struct LmOptions {
  int max_iterations = 400;
  double gtol = 1e-8;    // max |J^T r| convergence target
  double step_tol = 1e-14;
};

struct LmOutcome {
  Eigen::VectorXd params;
  bool converged = false;
  int n_iterations = 0;
  double ssr = std::numeric_limits<double>::infinity();
  double gradient_norm = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd jtj;  // at the solution, for covariance errors
};

double ssr_of(const Eigen::VectorXd& r) {
  const double s = r.squaredNorm();
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

// Damped Gauss-Newton (Levenberg-Marquardt) with analytic Jacobians.
LmOutcome levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p,
                              const LmOptions& opts = {}) {
  LmOutcome out;
  const int np = static_cast<int>(p.size());
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  fn(p, r, &j);
  double ssr = ssr_of(r);
  double lambda = 1e-3;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    out.gradient_norm = g.cwiseAbs().maxCoeff();
    out.jtj = jtj;
    if (out.gradient_norm < opts.gtol) {
      out.converged = true;
      break;
    }
    // Marquardt scaling; floor the diagonal so flat directions stay damped
    Eigen::VectorXd diag = jtj.diagonal();
    for (int i = 0; i < np; ++i) diag(i) = std::max(diag(i), 1e-12);
    bool stepped = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      const Eigen::VectorXd delta = a.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      const Eigen::VectorXd trial = p + delta;
      Eigen::VectorXd r_trial;
      fn(trial, r_trial, nullptr);
      const double ssr_trial = ssr_of(r_trial);
      if (ssr_trial < ssr) {
        const double rel_step =
            delta.norm() / std::max(p.norm(), 1.0);
        p = trial;
        fn(p, r, &j);
        ssr = ssr_of(r);
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (rel_step < opts.step_tol) iter = opts.max_iterations;  // stall
        break;
      }
      lambda *= 4.0;
    }
    if (!stepped) break;  // no downhill step found at any damping
  }
  // refresh gradient bookkeeping at the final point
  fn(p, r, &j);
  const Eigen::VectorXd g = j.transpose() * r;
  out.gradient_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  out.jtj = j.transpose() * j;
  if (out.gradient_norm < opts.gtol) out.converged = true;
  out.params = p;
  out.ssr = ssr_of(r);
  out.n_iterations = std::min(iter + 1, opts.max_iterations);
  return out;
}

// 1-sigma parameter errors from the residual-scaled covariance.
std::vector<double> covariance_errors(const LmOutcome& lm, int n_points,
                                      std::vector<std::string>* flags) {
  const int np = static_cast<int>(lm.params.size());
  std::vector<double> errors(np, 0.0);
  const int dof = n_points - np;
  if (dof <= 0) {
    flags->push_back("undefined_errors");
    return errors;
  }
  const double s2 = lm.ssr / dof;
  Eigen::MatrixXd cov =
      lm.jtj.completeOrthogonalDecomposition().pseudoInverse() * s2;
  for (int i = 0; i < np; ++i)
    errors[i] = cov(i, i) > 0.0 ? std::sqrt(cov(i, i)) : 0.0;
  return errors;
}

LmOutcome best_of_starts(const ResidualFn& fn,
                         const std::vector<Eigen::VectorXd>& starts,
                         const LmOptions& opts = {}) {
  LmOutcome best;
  bool have = false;
  for (const auto& p0 : starts) {
    LmOutcome lm = levenberg_marquardt(fn, p0, opts);
    const bool better =
        !have ||
        (lm.converged && !best.converged) ||
        (lm.converged == best.converged && lm.ssr < best.ssr);
    if (better) {
      best = lm;
      have = true;
    }
  }
  return best;
}

struct AffineFit {
  double intercept = 0.0, slope = 0.0;
  double intercept_error = 0.0, slope_error = 0.0;
  double ssr = 0.0;
  bool undefined_errors = false;
};

AffineFit affine_fit(const std::vector<double>& x,
                     const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0)
    throw InsufficientData("affine fit needs at least two distinct x values");
  AffineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    out.ssr += r * r;
  }
  if (n > 2) {
    const double s2 = out.ssr / (n - 2);
    out.slope_error = std::sqrt(s2 / sxx);
    out.intercept_error = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  } else {
    out.undefined_errors = true;
  }
  return out;
}

}  // namespace

void Spectrum::validate() const {
  if (frequencies.size() != values.size())
    throw InvalidConfig("spectrum frequency/value lengths differ");
  if (frequencies.empty()) throw InsufficientData("spectrum is empty");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!std::isfinite(frequencies[i]) || !std::isfinite(values[i]))
      throw InvalidConfig("spectrum contains non-finite entries");
    if (i > 0 && frequencies[i] <= frequencies[i - 1])
      throw InvalidConfig("spectrum frequencies must be strictly increasing");
  }
}

bool FitResult::has_flag(const std::string& name) const {
  return std::find(flags.begin(), flags.end(), name) != flags.end();
}

double FitResult::param(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i)
    if (param_names[i] == name) return params[i];
  throw InvalidConfig("no fitted parameter named " + name);
}

bool is_effectively_constant(const std::vector<double>& values,
                             double rel_tol) {
  if (values.empty()) return true;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double scale =
      std::max({std::abs(*lo), std::abs(*hi), 1.0});
  return (*hi - *lo) <= rel_tol * scale;
}

FitResult fit_gaussian(const Spectrum& spectrum, int n_peaks) {
  spectrum.validate();
  if (n_peaks < 1) throw InvalidConfig("n_peaks must be >= 1");
  const int n = static_cast<int>(spectrum.frequencies.size());
  if (n < 4 * n_peaks)
    throw InsufficientData("need at least 4 points per fitted peak");
  const auto& x = spectrum.frequencies;
  const auto& y = spectrum.values;

  FitResult out;
  out.model = "gaussian_sum";
  for (int i = 1; i <= n_peaks; ++i) {
    const std::string suffix = "_" + std::to_string(i);
    out.param_names.push_back("amplitude" + suffix);
    out.param_names.push_back("center" + suffix);
    out.param_names.push_back("fwhm" + suffix);
  }

  if (is_effectively_constant(y, 1e-14)) {
    // nothing to fit: zero amplitude at evenly spread centers
    out.converged = true;
    out.flags.push_back("zero_amplitude");
    out.params.assign(3 * n_peaks, 0.0);
    out.param_errors.assign(3 * n_peaks, 0.0);
    for (int i = 0; i < n_peaks; ++i)
      out.params[3 * i + 1] =
          x.front() + (x.back() - x.front()) * (i + 1.0) / (n_peaks + 1.0);
    out.flags.push_back("undefined_errors");
    return out;
  }

  // peak seeding: strongest |y| maxima with an exclusion window
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(y[a]) > std::abs(y[b]); });
  const int excl = std::max(3, n / (4 * n_peaks));
  std::vector<int> peaks;
  for (int idx : order) {
    bool clear = true;
    for (int c : peaks)
      if (std::abs(idx - c) <= excl) clear = false;
    if (clear) peaks.push_back(idx);
    if (static_cast<int>(peaks.size()) == n_peaks) break;
  }
  while (static_cast<int>(peaks.size()) < n_peaks)
    peaks.push_back(n / (n_peaks + 1) *
                    (static_cast<int>(peaks.size()) + 1));

  auto sigma_seed = [&](int peak) {
    const double half = std::abs(y[peak]) / 2.0;
    int lo = peak, hi = peak;
    while (lo > 0 && std::abs(y[lo]) > half) --lo;
    while (hi < n - 1 && std::abs(y[hi]) > half) ++hi;
    const double width = x[hi] - x[lo];
    if (width > 0.0) return width / kFwhmPerSigma;
    return (x.back() - x.front()) / (6.0 * n_peaks);
  };

  Eigen::VectorXd seed(3 * n_peaks);
  for (int i = 0; i < n_peaks; ++i) {
    seed(3 * i) = y[peaks[i]];
    seed(3 * i + 1) = x[peaks[i]];
    seed(3 * i + 2) = sigma_seed(peaks[i]);
  }

  ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac) {
    r.resize(n);
    if (jac) jac->resize(n, 3 * n_peaks);
    for (int i = 0; i < n; ++i) {
      double model = 0.0;
      for (int k = 0; k < n_peaks; ++k) {
        const double a = p(3 * k);
        const double c = p(3 * k + 1);
        const double s = std::abs(p(3 * k + 2)) + 1e-300;
        const double z = (x[i] - c) / s;
        const double g = std::exp(-0.5 * z * z);
        model += a * g;
        if (jac) {
          (*jac)(i, 3 * k) = g;
          (*jac)(i, 3 * k + 1) = a * g * z / s;
          (*jac)(i, 3 * k + 2) =
              a * g * z * z / s * (p(3 * k + 2) < 0 ? -1.0 : 1.0);
        }
      }
      r(i) = model - y[i];
    }
  };

  std::vector<Eigen::VectorXd> starts;
  const double width_factors[5] = {1.0, 0.4, 2.5, 0.15, 6.0};
  for (double wf : width_factors) {
    Eigen::VectorXd s0 = seed;
    for (int k = 0; k < n_peaks; ++k) s0(3 * k + 2) *= wf;
    starts.push_back(s0);
  }
  LmOutcome lm = best_of_starts(fn, starts);

  out.converged = lm.converged;
  out.n_iterations = lm.n_iterations;
  out.residual_norm = std::sqrt(lm.ssr);
  out.gradient_norm = lm.gradient_norm;
  std::vector<double> errors = covariance_errors(
      lm, n, &out.flags);
  // report widths as FWHM; order peaks by center for a stable layout
  std::vector<int> perm(n_peaks);
  for (int i = 0; i < n_peaks; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    return lm.params(3 * a + 1) < lm.params(3 * b + 1);
  });
  for (int i = 0; i < n_peaks; ++i) {
    const int k = perm[i];
    out.params.push_back(lm.params(3 * k));
    out.params.push_back(lm.params(3 * k + 1));
    out.params.push_back(std::abs(lm.params(3 * k + 2)) * kFwhmPerSigma);
    out.param_errors.push_back(errors[3 * k]);
    out.param_errors.push_back(errors[3 * k + 1]);
    out.param_errors.push_back(errors[3 * k + 2] * kFwhmPerSigma);
  }
  return out;
}

FitResult fit_biexponential(const std::vector<double>& times,
                            const std::vector<double>& values) {
  if (times.size() != values.size())
    throw InvalidConfig("time/value lengths differ");
  const int n = static_cast<int>(times.size());
  if (n < 6) throw InsufficientData("biexponential fit needs >= 6 points");
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
      throw InvalidConfig("fit data contains non-finite entries");

  const double t_lo = *std::min_element(times.begin(), times.end());
  const double t_hi = *std::max_element(times.begin(), times.end());
  const double t_range = std::max(t_hi - t_lo, 1e-12);

  ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac) {
    r.resize(n);
    if (jac) jac->resize(n, 4);
    for (int i = 0; i < n; ++i) {
      const double t = times[i];
      double model = 0.0;
      for (int k = 0; k < 2; ++k) {
        const double a = p(2 * k);
        const double tau = std::abs(p(2 * k + 1)) + 1e-300;
        const double e = std::exp(-t / tau);
        model += a * e;
        if (jac) {
          (*jac)(i, 2 * k) = e;
          (*jac)(i, 2 * k + 1) =
              a * e * t / (tau * tau) * (p(2 * k + 1) < 0 ? -1.0 : 1.0);
        }
      }
      r(i) = model - values[i];
    }
  };

  // amplitude seeds: linear least squares at the seed decay times
  auto amplitude_seed = [&](double tau1, double tau2) {
    Eigen::MatrixXd m(n, 2);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      m(i, 0) = std::exp(-times[i] / tau1);
      m(i, 1) = std::exp(-times[i] / tau2);
      b(i) = values[i];
    }
    const Eigen::Vector2d a =
        m.colPivHouseholderQr().solve(b);
    Eigen::VectorXd p(4);
    p << a(0), tau1, a(1), tau2;
    return p;
  };

  const double tau_pairs[5][2] = {{0.15, 0.8}, {0.05, 0.5}, {0.3, 2.0},
                                  {0.02, 0.2}, {0.5, 4.0}};
  std::vector<Eigen::VectorXd> starts;
  for (const auto& tp : tau_pairs)
    starts.push_back(amplitude_seed(tp[0] * t_range, tp[1] * t_range));
  LmOutcome lm = best_of_starts(fn, starts);

  FitResult out;
  out.model = "biexponential";
  out.param_names = {"amplitude_1", "tau_1", "amplitude_2", "tau_2"};
  out.converged = lm.converged;
  out.n_iterations = lm.n_iterations;
  out.residual_norm = std::sqrt(lm.ssr);
  out.gradient_norm = lm.gradient_norm;
  std::vector<double> errors = covariance_errors(lm, n, &out.flags);
  double a1 = lm.params(0), tau1 = std::abs(lm.params(1));
  double a2 = lm.params(2), tau2 = std::abs(lm.params(3));
  double e_a1 = errors[0], e_t1 = errors[1];
  double e_a2 = errors[2], e_t2 = errors[3];
  if (tau1 > tau2) {
    std::swap(a1, a2);
    std::swap(tau1, tau2);
    std::swap(e_a1, e_a2);
    std::swap(e_t1, e_t2);
  }
  out.params = {a1, tau1, a2, tau2};
  out.param_errors = {e_a1, e_t1, e_a2, e_t2};
  return out;
}

FitResult short_time_rate(const std::vector<double>& times,
                          const std::vector<double>& values, double t_max) {
  if (times.size() != values.size())
    throw InvalidConfig("time/value lengths differ");
  if (!(t_max > 0.0)) throw InvalidConfig("t_max must be > 0");
  std::vector<double> t, v;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
      throw InvalidConfig("fit data contains non-finite entries");
    if (times[i] <= t_max) {
      t.push_back(times[i]);
      v.push_back(values[i]);
    }
  }
  if (t.size() < 3)
    throw InsufficientData(
        "short-time rate needs >= 3 points at or below t_max");
  const AffineFit af = affine_fit(t, v);
  FitResult out;
  out.model = "affine";
  out.param_names = {"intercept", "rate"};
  out.params = {af.intercept, af.slope};
  out.param_errors = {af.intercept_error, af.slope_error};
  out.converged = true;
  out.n_iterations = 1;
  out.residual_norm = std::sqrt(af.ssr);
  if (af.undefined_errors) out.flags.push_back("undefined_errors");
  return out;
}

FitResult fit_relaxation(const std::vector<double>& times,
                         const std::vector<double>& values) {
  if (times.size() != values.size())
    throw InvalidConfig("time/value lengths differ");
  const int n = static_cast<int>(times.size());
  if (n < 4) throw InsufficientData("relaxation fit needs >= 4 points");
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
      throw InvalidConfig("fit data contains non-finite entries");

  FitResult out;
  out.model = "relaxation";
  out.param_names = {"y0", "y_inf", "t1"};

  if (is_effectively_constant(values)) {
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / n;
    out.params = {mean, mean, std::numeric_limits<double>::infinity()};
    out.param_errors = {0.0, 0.0, 0.0};
    out.converged = true;
    out.flags.push_back("infinite_t1");
    out.flags.push_back("undefined_errors");
    return out;
  }

  const double t_lo = *std::min_element(times.begin(), times.end());
  const double t_hi = *std::max_element(times.begin(), times.end());
  const double t_range = std::max(t_hi - t_lo, 1e-12);

  ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac) {
    r.resize(n);
    if (jac) jac->resize(n, 3);
    for (int i = 0; i < n; ++i) {
      const double t = times[i];
      const double e = std::exp(-t / p(2));
      r(i) = p(1) + (p(0) - p(1)) * e - values[i];
      if (jac) {
        (*jac)(i, 0) = e;
        (*jac)(i, 1) = 1.0 - e;
        (*jac)(i, 2) = (p(0) - p(1)) * e * t / (p(2) * p(2));
      }
    }
  };

  std::vector<Eigen::VectorXd> starts;
  for (double tf : {0.3, 0.06, 1.5, 0.012, 7.5}) {
    // both signs: growing signals live at negative decay times
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd p(3);
      p << values.front(), values.back(), sign * tf * t_range;
      starts.push_back(p);
    }
  }
  LmOutcome lm = best_of_starts(fn, starts);

  out.converged = lm.converged;
  out.n_iterations = lm.n_iterations;
  out.residual_norm = std::sqrt(lm.ssr);
  out.gradient_norm = lm.gradient_norm;
  out.param_errors = covariance_errors(lm, n, &out.flags);
  out.params = {lm.params(0), lm.params(1), lm.params(2)};
  if (lm.params(2) < 0.0) out.flags.push_back("negative_rate");
  return out;
}

FitResult center_vs_field(const std::vector<double>& fields,
                          const std::vector<double>& centers) {
  if (fields.size() != centers.size())
    throw InvalidConfig("field/center lengths differ");
  if (fields.size() < 2)
    throw InsufficientData("gyromagnetic regression needs >= 2 fields");
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (!std::isfinite(fields[i]) || !std::isfinite(centers[i]))
      throw InvalidConfig("fit data contains non-finite entries");
  const AffineFit af = affine_fit(fields, centers);
  FitResult out;
  out.model = "affine";
  out.param_names = {"intercept", "gyro"};
  out.params = {af.intercept, af.slope};
  out.param_errors = {af.intercept_error, af.slope_error};
  out.converged = true;
  out.n_iterations = 1;
  out.residual_norm = std::sqrt(af.ssr);
  if (af.undefined_errors) out.flags.push_back("undefined_errors");
  return out;
}

}  // namespace galton
