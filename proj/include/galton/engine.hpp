#pragma once

#include <array>
#include <optional>
#include <vector>

#include "galton/checkerboard.hpp"

namespace galton {

enum class SweepDirection { forward, reverse };

// Node bifurcation rule.
//  persistent: the 2x2 transfer matrix [[eta, 1-eta], [1-eta, eta]] acts on
//    the (channel-1, channel-2) pair — a ball's exit depends on how it
//    arrived.  This is the physical Landau-Zener rule.
//  classical:  the independent-peg combinatorics assumed by the closed-form
//    binomial solution — every arrival at an off-anti-diagonal node goes
//    down with probability eta and right with 1-eta regardless of arrival
//    channel, while the fully adiabatic anti-diagonal still deterministically
//    transfers balls across manifolds (persistent swap).  Both rules agree
//    when eta = 0.5 everywhere off the anti-diagonal.
enum class NodeModel { persistent, classical };

// Frequency window [f0, f0 + df]; nodes crossing outside it are untouched by
// the drive and act as perfect pass-throughs (eta = 1).
struct Window {
  double f0 = 0.0;
  double df = 0.0;
};

// Landau-Zener tunneling probability exp(-gap^2 / sweep_rate).
// Throws NonpositiveRate if sweep_rate <= 0, NegativeGap if gap < 0.
double tunneling_probability(double gap, double sweep_rate);

// Gap that produces a given tunneling probability at a given sweep rate
// (inverse of the above; handy for synthesizing boards with prescribed eta).
double gap_for_eta(double eta, double sweep_rate);

// Doubly stochastic 2x2 node matrix parameterized by eta.
struct TransferMatrix {
  double eta = 1.0;
  double entry(int row, int col) const {
    return row == col ? eta : 1.0 - eta;
  }
};

// Apply a transfer matrix to a two-channel population (channel 1 = riding a
// flat m_s=0 line, channel 2 = riding a descending m_s=+1 line).
std::array<double, 2> transfer_apply(const TransferMatrix& t,
                                     const std::array<double, 2>& p_in);

// Per-manifold nuclear occupations in Hamming order (index n-1 holds rank n).
struct PopulationVector {
  std::vector<double> m0;  // m_s = 0 manifold
  std::vector<double> m1;  // m_s = +1 manifold
  // False when only state totals are known (closed-form results); the
  // totals are then carried on the m0 side.
  bool manifold_resolved = true;

  int n_states() const { return static_cast<int>(m0.size()); }
  double total(int rank) const { return m0[rank - 1] + m1[rank - 1]; }
  std::vector<double> totals() const;
  double mass() const;

  static PopulationVector uniform_m0(int n_states);
  static PopulationVector state_totals(std::vector<double> values);
};

// Full two-channel population field over the board: per-node inputs and
// outputs plus the exit-edge populations.  Node arrays are row-major with
// grid indices (k-1, l-1); exits are resolved to Hamming ranks.
struct PopulationField {
  int n_states = 0;
  SweepDirection direction = SweepDirection::forward;
  std::vector<double> in1, in2;    // per node, channel 1 / channel 2 inputs
  std::vector<double> out1, out2;  // per node outputs
  PopulationVector exits;          // m0 = bottom-edge, m1 = right-edge mass
  bool window_empty = false;       // window given but no node inside
  // Max deviation of the implied total population from 1 over the node-by-
  // node update sequence (conservation audit).
  double max_conservation_error = 0.0;

  double polarization() const;  // half-split readout of the exits
};

// Propagate an initial population through the board.
//   board      geometry and gaps (see Checkerboard for orientation).
//   init       entry populations; the m0 side enters at the top of the
//              columns, the m1 side at the left of the rows.
//   sweep_rate Landau-Zener rate scale (MHz^2); eta = exp(-gap^2/rate).
//   window     optional active-frequency interval (pass-through outside).
//   direction  forward = ascending crossing frequencies, reverse = descending.
//   model      node bifurcation rule (see NodeModel).
// Throws BoardUninitialized on an empty board, InvalidConfig on a
// mis-sized or unnormalized init.
PopulationField dp_sweep(const Checkerboard& board,
                         const PopulationVector& init, double sweep_rate,
                         std::optional<Window> window = std::nullopt,
                         SweepDirection direction = SweepDirection::forward,
                         NodeModel model = NodeModel::persistent);

// Exit populations only (no field storage) from a caller-precomputed eta
// table (row-major, eta already includes the rate).  The fast path behind
// spectral mapping; dp_sweep delegates to the same node loop.
PopulationVector propagate_eta(int n_states, const std::vector<double>& eta,
                               const std::vector<double>& f_cross,
                               const PopulationVector& init,
                               std::optional<Window> window,
                               SweepDirection direction,
                               NodeModel model = NodeModel::persistent,
                               PopulationField* field = nullptr);

// Sum over monotone lattice paths between two vertices of the product of
// interior-vertex coefficients (eta to pass straight through a node, 1-eta
// to turn).  Endpoints contribute no factor; virtual boundary vertices (row
// or column 0 and n_states+1) express edge-to-edge traversals so that every
// physical node a ball passes gets exactly one factor.  The independent
// enumeration oracle for dp_sweep.
// Throws InvalidEndpoints for non-monotone or out-of-range endpoints and
// PathExplosion when the path count exceeds 10^6.
double path_probability(const Checkerboard& board, std::pair<int, int> from,
                        std::pair<int, int> to, double sweep_rate,
                        std::optional<Window> window = std::nullopt);

// Closed-form state totals after a full sweep of a uniform board whose
// anti-diagonal is fully adiabatic and whose other nodes redistribute
// independently with right-probability p and down-probability q = 1 - p.
// Exact integer binomials below n_spins = 15, log-space above.  The result
// carries state totals only (manifold_resolved = false).
// Throws ProbabilityOutOfRange unless p, q in [0,1] and p + q = 1,
// DimensionTooLarge for n_spins > 20.
PopulationVector analytic_full_sweep(int n_states, double p, double q);

// Half-split hyperpolarization readout: sum of the lower-half Hamming-rank
// state totals minus the upper half.
double hyperpolarization(const PopulationVector& pops);

// Sign-aware variant: a negative secular hyperfine coupling produces no
// hyperpolarization in this manifold pair; the readout is then 0 and the
// suppression is flagged.
struct HyperpolarizationResult {
  double value = 0.0;
  bool suppressed_negative_coupling = false;
};
HyperpolarizationResult hyperpolarization(const PopulationVector& pops,
                                          double a_parallel);

}  // namespace galton
