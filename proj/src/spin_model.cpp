#include "galton/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "galton/errors.hpp"
#include "galton/hamming.hpp"

namespace galton {

void SpinSystemConfig::validate() const {
  if (n_nuclei < 1)
    throw InvalidConfig("n_nuclei must be >= 1");
  if (static_cast<int>(nuclei.size()) != n_nuclei)
    throw InvalidConfig("nuclei list length does not match n_nuclei");
  if (!(zero_field_splitting > 0.0))
    throw InvalidConfig("zero_field_splitting must be > 0");
  if (bias_field < 0.0) throw InvalidConfig("bias_field must be >= 0");
  if (rabi < 0.0) throw InvalidConfig("rabi must be >= 0");
  for (const auto& nuc : nuclei) {
    if (!(nuc.omega0 > 0.0))
      throw InvalidConfig("nuclear omega0 must be > 0");
    if (nuc.theta < 0.0 || nuc.theta >= M_PI)
      throw InvalidConfig("tilt angle must lie in [0, pi)");
  }
}

std::vector<double> manifold_offsets(const SpinSystemConfig& config,
                                     int manifold) {
  config.validate();
  const int n = config.n_nuclei;
  const auto order = hamming_order(n);
  std::vector<double> offs(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    double e = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w =
          manifold == 0 ? config.nuclei[j].omega0 : config.nuclei[j].omega1;
      e += (order[r] >> j & 1u) ? 0.5 * w : -0.5 * w;
    }
    offs[r] = e;
  }
  return offs;
}

std::vector<double> hamiltonian_matrix(const SpinSystemConfig& config,
                                       double f0) {
  config.validate();
  const int n = config.n_nuclei;
  const int m = 1 << n;
  const int dim = 2 * m;
  std::vector<double> h(static_cast<std::size_t>(dim) * dim, 0.0);
  auto at = [&](int r, int c) -> double& {
    return h[static_cast<std::size_t>(r) * dim + c];
  };
  const double detuning = config.zero_field_splitting - f0 +
                          config.gyro_electron * config.bias_field;
  for (int s = 0; s < m; ++s) {
    // electronic part: detuning on the m_s=+1 block, transverse drive
    at(m + s, m + s) += detuning;
    at(s, m + s) += 0.5 * config.rabi;
    at(m + s, s) += 0.5 * config.rabi;
    for (int j = 0; j < n; ++j) {
      const auto& nuc = config.nuclei[j];
      const double sz = (s >> j & 1) ? 0.5 : -0.5;  // bit set = spin up
      at(s, s) += nuc.omega0 * sz;                       // m_s=0 manifold
      at(m + s, m + s) += nuc.omega1 * std::cos(nuc.theta) * sz;
      const int sf = s ^ (1 << j);  // sigma_x flips nucleus j
      at(m + s, m + sf) += 0.5 * nuc.omega1 * std::sin(nuc.theta);
    }
  }
  return h;
}

LevelDiagram build_levels(const SpinSystemConfig& config,
                          const std::vector<double>& f0_grid) {
  config.validate();
  if (f0_grid.empty()) throw GridEmpty("frequency grid is empty");
  if (!std::is_sorted(f0_grid.begin(), f0_grid.end()))
    throw InvalidConfig("frequency grid must be sorted ascending");
  if (config.n_nuclei > 12)
    throw DimensionTooLarge("build_levels supports at most 12 nuclei");

  const int m = 1 << config.n_nuclei;
  const int dim = 2 * m;
  LevelDiagram diagram;
  diagram.f0_grid = f0_grid;
  diagram.energies0.reserve(f0_grid.size());
  diagram.energies1.reserve(f0_grid.size());

  Eigen::MatrixXd h(dim, dim);
  for (double f0 : f0_grid) {
    const auto raw = hamiltonian_matrix(config, f0);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        h(r, c) = raw[static_cast<std::size_t>(r) * dim + c];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);

    // dominant electronic character: weight of each eigenvector on the
    // m_s=+1 block; the m strongest go to manifold 1, the rest to 0
    std::vector<std::pair<double, double>> weighted(dim);  // (weight1, energy)
    for (int i = 0; i < dim; ++i) {
      const auto v = es.eigenvectors().col(i);
      double w1 = 0.0;
      for (int r = m; r < dim; ++r) w1 += v(r) * v(r);
      weighted[i] = {w1, es.eigenvalues()(i)};
    }
    std::vector<int> idx(dim);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return weighted[a].first > weighted[b].first;
    });
    std::vector<double> e0, e1;
    e1.reserve(m);
    e0.reserve(m);
    for (int i = 0; i < m; ++i) e1.push_back(weighted[idx[i]].second);
    for (int i = m; i < dim; ++i) e0.push_back(weighted[idx[i]].second);
    std::sort(e0.begin(), e0.end());
    std::sort(e1.begin(), e1.end());
    diagram.energies0.push_back(std::move(e0));
    diagram.energies1.push_back(std::move(e1));
  }
  return diagram;
}

namespace {

// Gap between the adjacent eigenvalues straddling the reference energy.
double eigen_gap_at(const SpinSystemConfig& config, double f0,
                    double reference) {
  const int dim = 2 << config.n_nuclei;
  const auto raw = hamiltonian_matrix(config, f0);
  Eigen::MatrixXd h(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      h(r, c) = raw[static_cast<std::size_t>(r) * dim + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double below = -std::numeric_limits<double>::infinity();
  double above = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim; ++i) {
    const double e = ev(i);
    if (e <= reference)
      below = std::max(below, e);
    else
      above = std::min(above, e);
  }
  if (!std::isfinite(below) || !std::isfinite(above))
    throw CrossingNotFound("no eigenvalue pair straddles the crossing level");
  return above - below;
}

// Golden-section minimization of the eigen-gap over [lo, hi] to 1e-6 MHz.
double minimize_gap(const SpinSystemConfig& config, double lo, double hi,
                    double reference) {
  constexpr double kInvPhi = 0.6180339887498949;
  constexpr double kTol = 1e-6;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eigen_gap_at(config, c, reference);
  double fd = eigen_gap_at(config, d, reference);
  int guard = 0;
  while (b - a > kTol) {
    if (++guard > 300)
      throw MinimizationDiverged("gap minimization failed to converge");
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eigen_gap_at(config, c, reference);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eigen_gap_at(config, d, reference);
    }
  }
  return eigen_gap_at(config, 0.5 * (a + b), reference);
}

std::vector<double> crossing_table(const SpinSystemConfig& config) {
  const int m = 1 << config.n_nuclei;
  const auto e0 = manifold_offsets(config, 0);
  const auto e1 = manifold_offsets(config, 1);
  const double base = config.zero_field_splitting +
                      config.gyro_electron * config.bias_field;
  std::vector<double> fc(static_cast<std::size_t>(m) * m);
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l <= m; ++l)
      // row k carries rank k; column l carries rank m+1-l
      fc[static_cast<std::size_t>(k - 1) * m + (l - 1)] =
          base + e1[k - 1] - e0[m - l];
  return fc;
}

}  // namespace

Checkerboard locate_lacs(const SpinSystemConfig& config) {
  config.validate();
  if (config.n_nuclei > 6)
    throw DimensionTooLarge(
        "exact gap extraction supports at most 6 nuclei; use the "
        "perturbative constructor beyond that");
  if (!(config.rabi > 0.0))
    throw InvalidConfig("gap extraction requires rabi > 0");

  const int m = 1 << config.n_nuclei;
  const auto e0 = manifold_offsets(config, 0);
  {
    auto sorted = e0;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] - sorted[i - 1] < 1e-9)
        throw CrossingNotFound(
            "degenerate m_s=0 manifold levels; crossings cannot be isolated");
  }

  const auto fc = crossing_table(config);
  std::vector<double> gaps(fc.size());
  for (int k = 1; k <= m; ++k) {
    for (int l = 1; l <= m; ++l) {
      const std::size_t idx = static_cast<std::size_t>(k - 1) * m + (l - 1);
      const double fstar = fc[idx];
      const double reference = e0[m - l];  // flat level of this column
      gaps[idx] = minimize_gap(config, fstar - 3.0 * config.rabi,
                               fstar + 3.0 * config.rabi, reference);
    }
  }
  return Checkerboard(m, fc, gaps);
}

Checkerboard perturbative_checkerboard(const SpinSystemConfig& config) {
  config.validate();
  if (config.n_nuclei > 10)
    throw DimensionTooLarge(
        "dense board storage supports at most 10 nuclei (4^N nodes)");
  const int n = config.n_nuclei;
  const int m = 1 << n;
  const auto order = hamming_order(n);
  const auto fc = crossing_table(config);
  std::vector<double> gaps(fc.size());
  for (int k = 1; k <= m; ++k) {
    const std::uint32_t srow = order[k - 1];
    for (int l = 1; l <= m; ++l) {
      const std::uint32_t scol = order[m - l];  // rank m+1-l
      double overlap = 1.0;
      for (int j = 0; j < n; ++j) {
        const double half = 0.5 * config.nuclei[j].theta;
        overlap *= ((srow ^ scol) >> j & 1u) ? std::sin(half) : std::cos(half);
      }
      gaps[static_cast<std::size_t>(k - 1) * m + (l - 1)] =
          config.rabi * std::abs(overlap);
    }
  }
  return Checkerboard(m, fc, gaps);
}

}  // namespace galton
