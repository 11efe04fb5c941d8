#include "galton/hamming.hpp"

#include <algorithm>
#include <bit>

#include "galton/errors.hpp"

namespace galton {

std::vector<std::uint32_t> hamming_order(int n_spins) {
  if (n_spins < 1 || n_spins > 20)
    throw InvalidConfig("n_spins must be in [1,20], got " +
                        std::to_string(n_spins));
  const std::uint32_t m = 1u << n_spins;
  std::vector<std::uint32_t> states(m);
  for (std::uint32_t s = 0; s < m; ++s) states[s] = s;
  std::stable_sort(states.begin(), states.end(),
                   [](std::uint32_t a, std::uint32_t b) {
                     const int wa = std::popcount(a), wb = std::popcount(b);
                     return wa != wb ? wa < wb : a < b;
                   });
  return states;
}

int hamming_index(std::uint32_t state_bits, int n_spins) {
  if (n_spins < 1 || n_spins > 20 || (state_bits >> n_spins) != 0)
    throw LengthMismatch("state bits do not fit a register of " +
                         std::to_string(n_spins) + " spins");
  // Rank = (#states of lower weight) + (#same-weight states of lower value).
  const int w = std::popcount(state_bits);
  const std::uint32_t m = 1u << n_spins;
  int rank = 0;
  for (std::uint32_t s = 0; s < m; ++s) {
    const int ws = std::popcount(s);
    if (ws < w || (ws == w && s < state_bits)) ++rank;
  }
  return rank + 1;
}

std::uint32_t hamming_state(int index, int n_spins) {
  const auto order = hamming_order(n_spins);
  if (index < 1 || index > static_cast<int>(order.size()))
    throw LengthMismatch("Hamming index out of range: " +
                         std::to_string(index));
  return order[index - 1];
}

}  // namespace galton
