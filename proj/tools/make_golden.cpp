// One-off generator for tests/data/n4_exit_profile_golden.csv.
//
// Independently recomputes the manifold-resolved exit profile of a full
// forward sweep (16 states, adiabatic anti-diagonal, eta = 1/2 elsewhere,
// uniform m_s=0 entry) by brute-force enumeration of every monotone
// ball path, with no use of the dynamic-programming engine: each path's
// weight is the product of its interior-vertex factors (eta to continue
// straight, 1-eta to turn) and paths are walked recursively from every
// entry column.  The resulting file is committed as a regression anchor;
// the test suite compares engine output against it bit-for-bit tolerances.
//
// Usage: galton-golden-gen > tests/data/n4_exit_profile_golden.csv

#include <cstdio>
#include <vector>

namespace {

constexpr int kStates = 16;
// eta on the anti-diagonal (self-crossings, fully adiabatic) and elsewhere
constexpr double kEtaAnti = 0.0;
constexpr double kEtaOff = 0.5;

double eta_at(int k, int l) {
  return (l == kStates + 1 - k) ? kEtaAnti : kEtaOff;
}

struct Exits {
  std::vector<double> m0 = std::vector<double>(kStates, 0.0);
  std::vector<double> m1 = std::vector<double>(kStates, 0.0);
};

// dir: 0 = moving down a column (channel 1), 1 = moving right along a row
// (channel 2).  (k, l) is the node the ball is about to enter.
void walk(int k, int l, int dir, double weight, Exits& exits) {
  if (weight == 0.0) return;  // pruned: straight through an adiabatic node
  if (k == kStates + 1) {     // bottom edge: m_s=0 exit of column l
    exits.m0[kStates - l] += weight;  // column l carries rank kStates+1-l
    return;
  }
  if (l == kStates + 1) {  // right edge: m_s=+1 exit of row k
    exits.m1[k - 1] += weight;
    return;
  }
  const double eta = eta_at(k, l);
  if (dir == 0) {
    walk(k + 1, l, 0, weight * eta, exits);        // straight: keep falling
    walk(k, l + 1, 1, weight * (1.0 - eta), exits);  // turn: ride the row
  } else {
    walk(k, l + 1, 1, weight * eta, exits);        // straight: keep riding
    walk(k + 1, l, 0, weight * (1.0 - eta), exits);  // turn: fall
  }
}

}  // namespace

int main() {
  Exits exits;
  const double entry_weight = 1.0 / kStates;
  // uniform entry on the m_s=0 edge: rank r enters at the top of column
  // kStates+1-r and immediately meets node (1, l); every real node the path
  // visits contributes one factor, the virtual source edge contributes none.
  for (int l = 1; l <= kStates; ++l) walk(1, l, 0, entry_weight, exits);

  std::printf("manifold,index,population\n");
  for (int manifold = 0; manifold <= 1; ++manifold)
    for (int n = 1; n <= kStates; ++n)
      std::printf("%d,%d,%.17g\n", manifold, n,
                  manifold == 0 ? exits.m0[n - 1] : exits.m1[n - 1]);
  return 0;
}
