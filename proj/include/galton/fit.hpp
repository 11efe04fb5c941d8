#pragma once

#include <string>
#include <vector>

namespace galton {

// A sampled response curve; frequencies must be strictly increasing.
struct Spectrum {
  std::vector<double> frequencies;  // MHz
  std::vector<double> values;

  void validate() const;
};

// Outcome of a model fit.  params/param_errors/param_names are parallel;
// errors are 1-sigma from the residual-scaled covariance (zero, with the
// "undefined_errors" flag, when there are no spare degrees of freedom).
// converged reports the optimizer's own verdict and is never patched up.
struct FitResult {
  std::string model;
  std::vector<std::string> param_names;
  std::vector<double> params;
  std::vector<double> param_errors;
  bool converged = false;
  int n_iterations = 0;
  double residual_norm = 0.0;  // sqrt(sum of squared residuals)
  double gradient_norm = 0.0;  // max |J^T r| at the solution
  std::vector<std::string> flags;

  bool has_flag(const std::string& name) const;
  double param(const std::string& name) const;  // lookup by name
};

// Sum of n_peaks Gaussians, A_i * exp(-(f - c_i)^2 / (2 sigma_i^2)).
// Reported linewidths are FWHM.  Needs at least 4 points per peak.
// A perfectly flat spectrum converges to zero amplitude and is flagged
// "zero_amplitude" rather than treated as an error.
FitResult fit_gaussian(const Spectrum& spectrum, int n_peaks = 1);

// A1 exp(-t/tau1) + A2 exp(-t/tau2); the result is ordered tau1 <= tau2.
// Needs at least 6 points.
FitResult fit_biexponential(const std::vector<double>& times,
                            const std::vector<double>& values);

// Affine fit P(t) = intercept + rate * t restricted to t <= t_max;
// the short-time injection-rate estimator.  Needs >= 3 points in range.
FitResult short_time_rate(const std::vector<double>& times,
                          const std::vector<double>& values,
                          double t_max = 1.0);

// Single-exponential relaxation y_inf + (y0 - y_inf) exp(-t/t1).
// Constant series short-circuit to an infinite-T1 flagged result; a fitted
// negative time constant is flagged "negative_rate".
FitResult fit_relaxation(const std::vector<double>& times,
                         const std::vector<double>& values);

// Affine regression of fitted spectral centers against bias field; the
// slope estimates the electronic gyromagnetic ratio.  Two points fit
// exactly but carry the "undefined_errors" flag.
FitResult center_vs_field(const std::vector<double>& fields,
                          const std::vector<double>& centers);

// True when the series spread is negligible against its magnitude.
bool is_effectively_constant(const std::vector<double>& values,
                             double rel_tol = 1e-9);

}  // namespace galton
