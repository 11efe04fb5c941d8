#pragma once

#include <cstdint>
#include <vector>

namespace galton {

// Nuclear basis states of N spin-1/2 nuclei are bit patterns (bit j set =
// nucleus j flipped up).  Populations, board rows and board columns are all
// indexed in "Hamming order": states sorted by Hamming weight, ties broken
// by ascending binary value.  Indices are 1-based throughout, matching the
// k/l/n conventions of the transfer-matrix formalism.

// 1-based Hamming index of a bit pattern (throws LengthMismatch if the
// pattern has bits above position n_spins-1).
int hamming_index(std::uint32_t state_bits, int n_spins);

// Inverse map: Hamming index (1..2^N) -> bit pattern.
std::uint32_t hamming_state(int index, int n_spins);

// Full table: entry [i] is the bit pattern with Hamming index i+1.
std::vector<std::uint32_t> hamming_order(int n_spins);

}  // namespace galton
