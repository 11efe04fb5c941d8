#pragma once

#include <utility>
#include <vector>

namespace galton {

// One anti-crossing node of the board.  k is the (1-based) row index along
// the descending m_s=+1 lines, l the column index along the flat m_s=0
// lines; both run 1..2^N in geometric order (ascending crossing frequency
// along each line).  Row k carries the nuclear state of Hamming rank k,
// column l the state of rank 2^N+1-l, so the anti-diagonal l = 2^N+1-k holds
// the self-crossings of each nuclear state.
struct LacNode {
  int k = 0;
  int l = 0;
  double f_cross = 0.0;  // MHz
  double gap = 0.0;      // MHz, >= 0
};

// Dense 2^N x 2^N table of anti-crossing nodes plus the traversal order a
// forward frequency sweep visits them in.
class Checkerboard {
public:
  Checkerboard() = default;
  Checkerboard(int n_states, std::vector<double> f_cross,
               std::vector<double> gap);

  int n_states() const { return n_states_; }
  int n_spins() const { return n_spins_; }
  bool initialized() const { return n_states_ > 0; }

  double f_cross(int k, int l) const { return f_cross_[idx(k, l)]; }
  double gap(int k, int l) const { return gap_[idx(k, l)]; }
  LacNode node(int k, int l) const {
    return LacNode{k, l, f_cross(k, l), gap(k, l)};
  }

  const std::vector<double>& f_cross_table() const { return f_cross_; }
  const std::vector<double>& gap_table() const { return gap_; }

  // All nodes sorted by f_cross; ties within 1e-9 MHz fall back to
  // lexicographic (k,l) order and raise the degeneracy flag.
  const std::vector<std::pair<int, int>>& traversal_order() const {
    return order_;
  }
  bool degenerate_crossings() const { return degenerate_; }

  // True when f_cross increases with k at fixed l and with l at fixed k, so
  // the grid-adjacency recursion and the frequency ordering agree (the
  // tilted-board premise).  Boards violating it are still usable but the
  // sequential-traversal picture no longer matches the grid walk.
  bool grid_monotone() const { return grid_monotone_; }

  double f_min() const { return f_min_; }
  double f_max() const { return f_max_; }

private:
  int idx(int k, int l) const { return (k - 1) * n_states_ + (l - 1); }

  int n_states_ = 0;
  int n_spins_ = 0;
  std::vector<double> f_cross_;
  std::vector<double> gap_;
  std::vector<std::pair<int, int>> order_;
  bool degenerate_ = false;
  bool grid_monotone_ = true;
  double f_min_ = 0.0, f_max_ = 0.0;
};

// Build a board from user-supplied tables (row-major, dimension 2^N x 2^N).
// Throws ShapeMismatch unless both tables are square with a power-of-two
// side, NegativeGap on any gap < 0.
Checkerboard checkerboard_from_gaps(int n_states,
                                    const std::vector<double>& gaps,
                                    const std::vector<double>& crossings);

}  // namespace galton
