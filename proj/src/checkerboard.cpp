#include "galton/checkerboard.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "galton/errors.hpp"

namespace galton {

namespace {
constexpr double kTieTolMHz = 1e-9;
}

Checkerboard::Checkerboard(int n_states, std::vector<double> f_cross,
                           std::vector<double> gap)
    : n_states_(n_states), f_cross_(std::move(f_cross)), gap_(std::move(gap)) {
  if (n_states_ < 2 || std::popcount(static_cast<unsigned>(n_states_)) != 1)
    throw ShapeMismatch("n_states must be a power of two >= 2, got " +
                        std::to_string(n_states_));
  n_spins_ = std::countr_zero(static_cast<unsigned>(n_states_));
  const std::size_t expect =
      static_cast<std::size_t>(n_states_) * static_cast<std::size_t>(n_states_);
  if (f_cross_.size() != expect || gap_.size() != expect)
    throw ShapeMismatch("board tables must hold n_states^2 entries");
  for (double g : gap_)
    if (!(g >= 0.0)) throw NegativeGap("gap entries must be >= 0");
  for (double f : f_cross_)
    if (!std::isfinite(f)) throw ShapeMismatch("crossing frequencies must be finite");

  // the parameter shadows the accessor inside this scope; index directly
  const auto fc_at = [this](int k, int l) {
    return f_cross_[static_cast<std::size_t>(k - 1) * n_states_ + (l - 1)];
  };

  order_.reserve(expect);
  for (int k = 1; k <= n_states_; ++k)
    for (int l = 1; l <= n_states_; ++l) order_.emplace_back(k, l);
  std::sort(order_.begin(), order_.end(),
            [&](const std::pair<int, int>& a, const std::pair<int, int>& b) {
              const double fa = fc_at(a.first, a.second);
              const double fb = fc_at(b.first, b.second);
              if (std::abs(fa - fb) > kTieTolMHz) return fa < fb;
              return a < b;  // deterministic tie-break, flagged below
            });
  for (std::size_t i = 1; i < order_.size(); ++i) {
    const double fa = fc_at(order_[i - 1].first, order_[i - 1].second);
    const double fb = fc_at(order_[i].first, order_[i].second);
    if (std::abs(fa - fb) <= kTieTolMHz) {
      degenerate_ = true;
      break;
    }
  }

  f_min_ = std::numeric_limits<double>::infinity();
  f_max_ = -std::numeric_limits<double>::infinity();
  for (double f : f_cross_) {
    f_min_ = std::min(f_min_, f);
    f_max_ = std::max(f_max_, f);
  }

  for (int k = 1; k <= n_states_ && grid_monotone_; ++k)
    for (int l = 2; l <= n_states_; ++l)
      if (fc_at(k, l) < fc_at(k, l - 1)) {
        grid_monotone_ = false;
        break;
      }
  for (int l = 1; l <= n_states_ && grid_monotone_; ++l)
    for (int k = 2; k <= n_states_; ++k)
      if (fc_at(k, l) < fc_at(k - 1, l)) {
        grid_monotone_ = false;
        break;
      }
}

Checkerboard checkerboard_from_gaps(int n_states,
                                    const std::vector<double>& gaps,
                                    const std::vector<double>& crossings) {
  if (n_states < 2 || std::popcount(static_cast<unsigned>(n_states)) != 1)
    throw ShapeMismatch("n_states must be a power of two >= 2, got " +
                        std::to_string(n_states));
  const std::size_t expect =
      static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_states);
  if (gaps.size() != expect)
    throw ShapeMismatch("gap table is not square of dimension n_states (" +
                        std::to_string(gaps.size()) + " entries for n_states " +
                        std::to_string(n_states) + ")");
  if (crossings.size() != expect)
    throw ShapeMismatch("crossing table is not square of dimension n_states");
  return Checkerboard(n_states, crossings, gaps);
}

}  // namespace galton
