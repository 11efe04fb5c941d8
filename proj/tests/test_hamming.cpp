#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "galton/errors.hpp"
#include "galton/hamming.hpp"

using namespace galton;

TEST_CASE("hamming order for three spins groups states by set-bit count") {
  // rank order: weight first, numeric value inside each weight class
  const std::vector<std::uint32_t> expected{0b000, 0b001, 0b010, 0b100,
                                            0b011, 0b101, 0b110, 0b111};
  CHECK(hamming_order(3) == expected);
}

TEST_CASE("hamming order is a permutation for every supported size") {
  for (int n = 1; n <= 10; ++n) {
    auto order = hamming_order(n);
    REQUIRE(order.size() == (1u << n));
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
    // weights never decrease along the ranking
    for (std::size_t i = 1; i < order.size(); ++i)
      CHECK(__builtin_popcount(order[i]) >= __builtin_popcount(order[i - 1]));
  }
}

TEST_CASE("hamming index round-trips with hamming state") {
  for (int n = 1; n <= 6; ++n)
    for (int rank = 1; rank <= (1 << n); ++rank) {
      const auto bits = hamming_state(rank, n);
      CHECK(hamming_index(bits, n) == rank);
    }
}

TEST_CASE("hamming index examples") {
  // |000> is rank 1, |111> is rank 8, |010> sits inside the weight-1 block
  CHECK(hamming_index(0b000, 3) == 1);
  CHECK(hamming_index(0b111, 3) == 8);
  CHECK(hamming_index(0b010, 3) == 3);
}

TEST_CASE("hamming index rejects out-of-range states") {
  CHECK_THROWS_AS(hamming_index(0b1000, 3), LengthMismatch);
  CHECK_THROWS_AS(hamming_state(0, 3), LengthMismatch);
  CHECK_THROWS_AS(hamming_state(9, 3), LengthMismatch);
}
