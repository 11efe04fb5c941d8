#pragma once

#include <vector>

#include "galton/checkerboard.hpp"

namespace galton {

// One spin-1/2 nucleus coupled to the electron.  omega0/omega1 are the
// nuclear precession frequencies in the m_s=0 and m_s=+1 manifolds, theta
// the angle between the m_s=0 quantization axis and the tilted m_s=+1 axis,
// a_parallel the signed secular hyperfine coupling (its sign gates the
// hyperpolarization readout, see engine.hpp).
struct NuclearSpinParams {
  double omega0 = 0.0;      // MHz, > 0
  double omega1 = 0.0;      // MHz
  double theta = 0.0;       // rad, in [0, pi)
  double a_parallel = 0.0;  // MHz, signed
};

// Electron + N nuclei in the {m_s=0, m_s=+1} manifold pair, rotating frame.
struct SpinSystemConfig {
  double zero_field_splitting = 2870.0;  // MHz
  double gyro_electron = 28.03;          // MHz/mT
  double bias_field = 0.0;               // mT, >= 0
  double rabi = 0.0;                     // MHz, >= 0 (drive amplitude)
  int n_nuclei = 0;
  std::vector<NuclearSpinParams> nuclei;

  void validate() const;  // throws InvalidConfig on violated invariants
};

// Eigenlevels of the driven system on a grid of drive frequencies.  The
// m_s=0 manifold is frequency independent; the m_s=+1 manifold is affine in
// f0 with common slope -1 (rotating-frame detuning).  Levels within each
// manifold are sorted ascending; manifold assignment is by dominant
// electronic character of the eigenvector.
struct LevelDiagram {
  std::vector<double> f0_grid;               // MHz
  std::vector<std::vector<double>> energies0;  // [grid point][level]
  std::vector<std::vector<double>> energies1;
};

// Dense diagonalization of the 2*2^N rotating-frame Hamiltonian on a sorted
// frequency grid.  Throws GridEmpty / DimensionTooLarge (N > 12).
LevelDiagram build_levels(const SpinSystemConfig& config,
                          const std::vector<double>& f0_grid);

// Explicit Hamiltonian at one drive frequency (row-major, dimension
// 2*2^N; basis = electron manifold x nuclear bit patterns).  Exposed for
// tests (trace identities).
std::vector<double> hamiltonian_matrix(const SpinSystemConfig& config,
                                       double f0);

// Locate all 2^(2N) anti-crossings and extract their gaps by bracketed
// minimization of the exact eigen-gap around each crossing frequency
// (bracket +-3*rabi, converged to 1e-6 MHz).  Requires rabi > 0 and
// N <= 6.  Board orientation: rows sorted by m_s=+1 level energy ascending,
// columns carry the same state sequence reversed so that the anti-diagonal
// holds the self-crossings of each nuclear state.
Checkerboard locate_lacs(const SpinSystemConfig& config);

// First-order perturbative board for any N <= 12: gap = rabi * product of
// per-nucleus overlap factors (cos(theta/2) for matching bits, sin(theta/2)
// for flipped bits).  Agrees with locate_lacs to ~10% in the perturbative
// regime (gaps small against level spacings).
Checkerboard perturbative_checkerboard(const SpinSystemConfig& config);

// Nuclear level offsets (sum of +-omega/2 per the bit pattern, bit 0 =
// spin down = -omega/2), indexed by Hamming rank.  Exposed for tests.
std::vector<double> manifold_offsets(const SpinSystemConfig& config,
                                     int manifold);

}  // namespace galton
