#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "galton/errors.hpp"
#include "galton/fit.hpp"

using namespace galton;

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;

Spectrum gaussian_spectrum(const std::vector<double>& amps,
                           const std::vector<double>& centers,
                           const std::vector<double>& sigmas, double lo,
                           double hi, double step) {
  Spectrum s;
  for (double x = lo; x <= hi + 1e-12; x += step) {
    double y = 0.0;
    for (std::size_t p = 0; p < amps.size(); ++p) {
      const double z = (x - centers[p]) / sigmas[p];
      y += amps[p] * std::exp(-0.5 * z * z);
    }
    s.frequencies.push_back(x);
    s.values.push_back(y);
  }
  return s;
}

}  // namespace

TEST_CASE("gaussian fit: noiseless single peak recovered to 1e-6") {
  const auto s = gaussian_spectrum({2.1}, {2900.0}, {13.5}, 2830.0, 2970.0,
                                   1.0);
  const auto fit = fit_gaussian(s);
  REQUIRE(fit.converged);
  CHECK(fit.param("amplitude_1") == doctest::Approx(2.1).epsilon(1e-6));
  CHECK(fit.param("center_1") == doctest::Approx(2900.0).epsilon(1e-6));
  CHECK(fit.param("fwhm_1") ==
        doctest::Approx(13.5 * kFwhmPerSigma).epsilon(1e-6));
  CHECK(fit.residual_norm < 1e-6);
  CHECK(fit.param_errors.size() == 3);
}

TEST_CASE("gaussian fit: negative-going peak (polarization dips)") {
  const auto s = gaussian_spectrum({-0.7}, {10.0}, {2.0}, 0.0, 20.0, 0.1);
  const auto fit = fit_gaussian(s);
  REQUIRE(fit.converged);
  CHECK(fit.param("amplitude_1") == doctest::Approx(-0.7).epsilon(1e-6));
  CHECK(fit.param("center_1") == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("gaussian fit: two noiseless peaks, centers sorted ascending") {
  const auto s = gaussian_spectrum({1.0, 0.02}, {0.0, 30.0}, {5.0, 5.0},
                                   -25.0, 55.0, 0.1);
  const auto fit = fit_gaussian(s, 2);
  REQUIRE(fit.converged);
  CHECK(fit.param("center_1") == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(fit.param("amplitude_1") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.param("center_2") == doctest::Approx(30.0).epsilon(1e-6));
  CHECK(fit.param("amplitude_2") == doctest::Approx(0.02).epsilon(1e-6));
}

TEST_CASE("gaussian fit: 2% satellite peak survives noise at SNR 100") {
  auto s = gaussian_spectrum({1.0, 0.02}, {0.0, 30.0}, {5.0, 5.0}, -25.0,
                             55.0, 0.02);
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> noise(0.0, 0.01);  // SNR 100 on the main
  for (auto& v : s.values) v += noise(rng);
  const auto fit = fit_gaussian(s, 2);
  REQUIRE(fit.converged);
  CHECK(fit.param("amplitude_2") == doctest::Approx(0.02).epsilon(0.05));
  CHECK(fit.param("center_2") == doctest::Approx(30.0).epsilon(0.01));
  CHECK(fit.param("amplitude_1") == doctest::Approx(1.0).epsilon(0.005));
}

TEST_CASE("gaussian fit: flat input flags zero amplitude") {
  Spectrum s;
  for (int i = 0; i < 32; ++i) {
    s.frequencies.push_back(i * 0.5);
    s.values.push_back(0.25);
  }
  const auto fit = fit_gaussian(s);
  CHECK(fit.converged);
  CHECK(fit.has_flag("zero_amplitude"));
  CHECK(fit.param("amplitude_1") == 0.0);
}

TEST_CASE("gaussian fit guards") {
  Spectrum short_s;
  short_s.frequencies = {0.0, 1.0, 2.0};
  short_s.values = {0.1, 0.9, 0.1};
  CHECK_THROWS_AS(fit_gaussian(short_s), InsufficientData);
  Spectrum mismatched;
  mismatched.frequencies = {0.0, 1.0, 2.0, 3.0};
  mismatched.values = {0.1, 0.9};
  CHECK_THROWS_AS(fit_gaussian(mismatched), InvalidConfig);
  Spectrum unsorted;
  unsorted.frequencies = {0.0, 2.0, 1.0, 3.0};
  unsorted.values = {0.1, 0.9, 0.4, 0.1};
  CHECK_THROWS_AS(fit_gaussian(unsorted), InvalidConfig);
}

TEST_CASE("biexponential fit: noiseless round trip and time ordering") {
  std::vector<double> t, y;
  for (int i = 0; i <= 1000; ++i) {
    const double ti = 0.02 * i;
    t.push_back(ti);
    y.push_back(3.0 * std::exp(-ti / 0.5) + 1.2 * std::exp(-ti / 5.0));
  }
  const auto fit = fit_biexponential(t, y);
  REQUIRE(fit.converged);
  CHECK(fit.param("amplitude_1") == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(fit.param("tau_1") == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.param("amplitude_2") == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(fit.param("tau_2") == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(fit.param("tau_1") <= fit.param("tau_2"));

  CHECK_THROWS_AS(fit_biexponential({0.0, 1.0}, {1.0, 0.5}),
                  InsufficientData);
}

TEST_CASE("relaxation fit: noiseless round trip") {
  std::vector<double> t, y;
  for (int i = 0; i <= 300; ++i) {
    const double ti = 0.5 * i;
    t.push_back(ti);
    y.push_back(0.9 + (-0.3 - 0.9) * std::exp(-ti / 30.0));
  }
  const auto fit = fit_relaxation(t, y);
  REQUIRE(fit.converged);
  CHECK(fit.param("y0") == doctest::Approx(-0.3).epsilon(1e-6));
  CHECK(fit.param("y_inf") == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(fit.param("t1") == doctest::Approx(30.0).epsilon(1e-6));
}

TEST_CASE("relaxation fit: constant input means no decay at all") {
  std::vector<double> t, y;
  for (int i = 0; i < 20; ++i) {
    t.push_back(i * 1.0);
    y.push_back(0.42);
  }
  const auto fit = fit_relaxation(t, y);
  CHECK(fit.converged);
  CHECK(fit.has_flag("infinite_t1"));
  CHECK(fit.param("y0") == doctest::Approx(0.42).epsilon(1e-12));
  CHECK(std::isinf(fit.param("t1")));
}

TEST_CASE("relaxation fit: growing signal flags a negative rate") {
  std::vector<double> t, y;
  for (int i = 0; i <= 100; ++i) {
    const double ti = 0.1 * i;
    t.push_back(ti);
    y.push_back(2.0 - std::exp(ti / 20.0));  // diverges: T1 = -20
  }
  const auto fit = fit_relaxation(t, y);
  CHECK(fit.has_flag("negative_rate"));
}

TEST_CASE("short-time rate: affine pull-out below the cutoff") {
  std::vector<double> t, y;
  for (int i = 0; i <= 50; ++i) {
    const double ti = 0.02 * i;  // all below t_max = 1.0
    t.push_back(ti);
    y.push_back(0.05 + 0.3 * ti);
  }
  // points past the cutoff must be ignored entirely
  t.push_back(2.0);
  y.push_back(99.0);
  t.push_back(3.0);
  y.push_back(-99.0);
  const auto fit = short_time_rate(t, y, 1.0);
  REQUIRE(fit.converged);
  CHECK(fit.param("intercept") == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(fit.param("rate") == doctest::Approx(0.3).epsilon(1e-10));

  CHECK_THROWS_AS(short_time_rate({5.0, 6.0, 7.0}, {1.0, 1.0, 1.0}, 1.0),
                  InsufficientData);  // nothing below the cutoff
}

TEST_CASE("center-vs-field fit: slope is the gyromagnetic ratio") {
  const std::vector<double> fields{0.0, 0.5, 1.0, 2.0, 3.5};
  std::vector<double> centers;
  for (double b : fields) centers.push_back(2870.0 + 28.03 * b);
  const auto fit = center_vs_field(fields, centers);
  REQUIRE(fit.converged);
  CHECK(fit.param("gyro") == doctest::Approx(28.03).epsilon(1e-10));
  CHECK(fit.param("intercept") == doctest::Approx(2870.0).epsilon(1e-10));

  // two points: exact line, but no residual dof for error bars
  const auto two = center_vs_field({0.0, 1.0}, {2870.0, 2898.03});
  CHECK(two.param("gyro") == doctest::Approx(28.03).epsilon(1e-10));
  CHECK(two.has_flag("undefined_errors"));

  CHECK_THROWS_AS(center_vs_field({1.0}, {2.0}), InsufficientData);
}
