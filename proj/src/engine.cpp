#include "galton/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "galton/errors.hpp"

namespace galton {

double tunneling_probability(double gap, double sweep_rate) {
  if (!(sweep_rate > 0.0))
    throw NonpositiveRate("sweep_rate must be > 0, got " +
                          std::to_string(sweep_rate));
  if (gap < 0.0) throw NegativeGap("gap must be >= 0");
  return std::exp(-gap * gap / sweep_rate);
}

double gap_for_eta(double eta, double sweep_rate) {
  if (!(sweep_rate > 0.0))
    throw NonpositiveRate("sweep_rate must be > 0");
  if (!(eta > 0.0) || eta > 1.0)
    throw ProbabilityOutOfRange("eta must be in (0,1] to invert");
  return std::sqrt(-sweep_rate * std::log(eta));
}

std::array<double, 2> transfer_apply(const TransferMatrix& t,
                                     const std::array<double, 2>& p_in) {
  return {t.eta * p_in[0] + (1.0 - t.eta) * p_in[1],
          (1.0 - t.eta) * p_in[0] + t.eta * p_in[1]};
}

std::vector<double> PopulationVector::totals() const {
  std::vector<double> out(m0.size());
  for (std::size_t i = 0; i < m0.size(); ++i) out[i] = m0[i] + m1[i];
  return out;
}

double PopulationVector::mass() const {
  return std::accumulate(m0.begin(), m0.end(), 0.0) +
         std::accumulate(m1.begin(), m1.end(), 0.0);
}

PopulationVector PopulationVector::uniform_m0(int n_states) {
  PopulationVector v;
  v.m0.assign(n_states, 1.0 / n_states);
  v.m1.assign(n_states, 0.0);
  return v;
}

PopulationVector PopulationVector::state_totals(std::vector<double> values) {
  PopulationVector v;
  v.m1.assign(values.size(), 0.0);
  v.m0 = std::move(values);
  v.manifold_resolved = false;
  return v;
}

double PopulationField::polarization() const { return hyperpolarization(exits); }

// ---------------------------------------------------------------------------
// Node-by-node propagation.
//
// The forward grid is visited top-to-bottom (k) and left-to-right (l);
// channel 1 flows down the columns, channel 2 flows right along the rows.
// A reverse sweep visits the same physical nodes in descending crossing
// frequency, which is the identical walk on the doubly flipped grid: visit
// coordinates (kp, lp) then address the original node (M+1-kp, M+1-lp), and
// the rank labels of the flipped rows/columns swap ends accordingly.
// ---------------------------------------------------------------------------
PopulationVector propagate_eta(int n_states, const std::vector<double>& eta,
                               const std::vector<double>& f_cross,
                               const PopulationVector& init,
                               std::optional<Window> window,
                               SweepDirection direction, NodeModel model,
                               PopulationField* field) {
  const int m = n_states;
  if (m < 2) throw BoardUninitialized("board has no nodes");
  if (static_cast<int>(init.m0.size()) != m ||
      static_cast<int>(init.m1.size()) != m)
    throw InvalidConfig("init population has wrong dimension");
  const double mass_in = init.mass();
  if (std::abs(mass_in - 1.0) > 1e-6)
    throw InvalidConfig("init population must be normalized to 1, mass = " +
                        std::to_string(mass_in));

  const bool rev = direction == SweepDirection::reverse;
  const double wlo = window ? window->f0 : 0.0;
  const double whi = window ? window->f0 + window->df : 0.0;

  if (field) {
    field->n_states = m;
    field->direction = direction;
    field->in1.assign(static_cast<std::size_t>(m) * m, 0.0);
    field->in2.assign(static_cast<std::size_t>(m) * m, 0.0);
    field->out1.assign(static_cast<std::size_t>(m) * m, 0.0);
    field->out2.assign(static_cast<std::size_t>(m) * m, 0.0);
  }

  // channel-1 values flowing down into the next visited row, by visit column
  std::vector<double> above(m);
  for (int lp = 1; lp <= m; ++lp) {
    const int rank = rev ? lp : m + 1 - lp;  // rank carried by visit column lp
    above[lp - 1] = init.m0[rank - 1];
  }

  PopulationVector out;
  out.m0.assign(m, 0.0);
  out.m1.assign(m, 0.0);

  bool any_active = !window.has_value();
  double running = 0.0;  // implied total minus the initial mass
  double max_dev = 0.0;

  for (int kp = 1; kp <= m; ++kp) {
    const int gk = rev ? m + 1 - kp : kp;          // original grid row
    const int row_rank = rev ? m + 1 - kp : kp;    // rank carried by this row
    double left = init.m1[row_rank - 1];           // channel-2 inflow
    for (int lp = 1; lp <= m; ++lp) {
      const int gl = rev ? m + 1 - lp : lp;        // original grid column
      const std::size_t idx =
          static_cast<std::size_t>(gk - 1) * m + (gl - 1);
      const double i1 = above[lp - 1];
      const double i2 = left;

      bool active = true;
      if (window) {
        const double fc = f_cross[idx];
        active = fc >= wlo && fc <= whi;
        any_active = any_active || active;
      }

      double o1, o2;
      if (!active) {
        o1 = i1;  // pass-through: the drive never touches this node
        o2 = i2;
      } else {
        const double e = eta[idx];
        const bool anti = (gl == m + 1 - gk);
        if (model == NodeModel::classical && !anti) {
          // independent peg: down with probability eta, right with 1-eta
          o1 = e * (i1 + i2);
          o2 = (1.0 - e) * (i1 + i2);
        } else {
          o1 = e * i1 + (1.0 - e) * i2;
          o2 = (1.0 - e) * i1 + e * i2;
        }
      }

      running += (o1 + o2) - (i1 + i2);
      max_dev = std::max(max_dev, std::abs(running));

      if (field) {
        field->in1[idx] = i1;
        field->in2[idx] = i2;
        field->out1[idx] = o1;
        field->out2[idx] = o2;
      }

      above[lp - 1] = o1;
      left = o2;
    }
    out.m1[row_rank - 1] = left;  // right-edge exit of this row
  }
  for (int lp = 1; lp <= m; ++lp) {
    const int rank = rev ? lp : m + 1 - lp;
    out.m0[rank - 1] = above[lp - 1];  // bottom-edge exit of this column
  }

  if (field) {
    field->exits = out;
    field->window_empty = window.has_value() && !any_active;
    field->max_conservation_error = max_dev;
  }
  return out;
}

PopulationField dp_sweep(const Checkerboard& board,
                         const PopulationVector& init, double sweep_rate,
                         std::optional<Window> window, SweepDirection direction,
                         NodeModel model) {
  if (!board.initialized()) throw BoardUninitialized("board has no nodes");
  const int m = board.n_states();
  std::vector<double> eta(static_cast<std::size_t>(m) * m);
  const auto& gaps = board.gap_table();
  for (std::size_t i = 0; i < eta.size(); ++i)
    eta[i] = tunneling_probability(gaps[i], sweep_rate);
  PopulationField field;
  propagate_eta(m, eta, board.f_cross_table(), init, window, direction, model,
                &field);
  return field;
}

// ---------------------------------------------------------------------------
// Path-sum oracle
// ---------------------------------------------------------------------------
namespace {

double lattice_path_count(int dk, int dl) {
  return std::exp(std::lgamma(dk + dl + 1.0) - std::lgamma(dk + 1.0) -
                  std::lgamma(dl + 1.0));
}

}  // namespace

double path_probability(const Checkerboard& board, std::pair<int, int> from,
                        std::pair<int, int> to, double sweep_rate,
                        std::optional<Window> window) {
  if (!board.initialized()) throw BoardUninitialized("board has no nodes");
  const int m = board.n_states();
  const auto [ki, li] = from;
  const auto [kf, lf] = to;
  auto in_extended = [m](int k, int l) {
    return k >= 0 && k <= m + 1 && l >= 0 && l <= m + 1;
  };
  if (!in_extended(ki, li) || !in_extended(kf, lf))
    throw InvalidEndpoints("endpoints must lie in [0, n_states+1]^2");
  if (kf < ki || lf < li)
    throw InvalidEndpoints("target must lie down-right of the source");
  if (lattice_path_count(kf - ki, lf - li) > 1e6)
    throw PathExplosion("more than 1e6 lattice paths between the endpoints");

  const double wlo = window ? window->f0 : 0.0;
  const double whi = window ? window->f0 + window->df : 0.0;
  auto eta_at = [&](int k, int l) {
    if (window) {
      const double fc = board.f_cross(k, l);
      if (fc < wlo || fc > whi) return 1.0;  // pass-through outside the window
    }
    return tunneling_probability(board.gap(k, l), sweep_rate);
  };

  // Depth-first sum over monotone paths.  `arrived` is the move that entered
  // the current vertex (0 = down, 1 = right, -1 = path start); the current
  // vertex contributes eta when the departure repeats the arrival and 1-eta
  // when the path turns.  Endpoints contribute no factor.
  std::function<double(int, int, int)> go = [&](int k, int l,
                                                int arrived) -> double {
    if (k == kf && l == lf) return 1.0;
    double acc = 0.0;
    for (int dir = 0; dir < 2; ++dir) {
      const int nk = k + (dir == 0 ? 1 : 0);
      const int nl = l + (dir == 1 ? 1 : 0);
      if (nk > kf || nl > lf) continue;
      const bool is_end = (nk == kf && nl == lf);
      const bool real = nk >= 1 && nk <= m && nl >= 1 && nl <= m;
      if (!real && !is_end) continue;  // virtual vertices only at endpoints
      double factor = 1.0;
      const bool at_start = (k == ki && l == li);
      if (!at_start) {
        const double e = eta_at(k, l);
        factor = (dir == arrived) ? e : 1.0 - e;
      }
      if (factor != 0.0) acc += factor * go(nk, nl, dir);
    }
    return acc;
  };
  return go(ki, li, -1);
}

// ---------------------------------------------------------------------------
// Closed-form full-sweep solution
// ---------------------------------------------------------------------------
namespace {

using bigint = boost::multiprecision::cpp_int;

// log2 of a positive big integer, exact to double precision
long double log2_of(const bigint& v) {
  const std::size_t bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 63) return std::log2(static_cast<long double>(v.convert_to<std::uint64_t>()));
  const std::size_t shift = bits - 53;
  const auto top = (v >> shift).convert_to<std::uint64_t>();
  return std::log2(static_cast<long double>(top)) +
         static_cast<long double>(shift);
}

// value of C * p^pe * q^qe computed without intermediate over/underflow;
// log2c = log2 of the (exact) binomial coefficient
long double binomial_term(long double log2c, double p, int pe, double q,
                          int qe) {
  if (p == 0.0 && pe > 0) return 0.0L;
  if (q == 0.0 && qe > 0) return 0.0L;
  long double lg = log2c;
  if (pe > 0) lg += pe * std::log2(static_cast<long double>(p));
  if (qe > 0) lg += qe * std::log2(static_cast<long double>(q));
  return std::exp2(lg);
}

long double lgamma_log2_binomial(long long a, long long b) {
  static const long double kLog2e = 1.4426950408889634074L;
  return (std::lgammal(a + 1.0L) - std::lgammal(b + 1.0L) -
          std::lgammal(a - b + 1.0L)) *
         kLog2e;
}

}  // namespace

PopulationVector analytic_full_sweep(int n_states, double p, double q) {
  if (n_states < 2 || (n_states & (n_states - 1)) != 0)
    throw ShapeMismatch("n_states must be a power of two >= 2");
  int n_spins = 0;
  for (int v = n_states; v > 1; v >>= 1) ++n_spins;
  if (n_spins > 20)
    throw DimensionTooLarge("closed form supported up to 2^20 states");
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0 || std::abs(p + q - 1.0) > 1e-12)
    throw ProbabilityOutOfRange("need p, q in [0,1] with p + q = 1");

  const int m = n_states;
  const bool exact_binomials = n_spins < 15;
  std::vector<double> totals(m, 0.0);

  for (int n = 1; n <= m; ++n) {
    long double acc = (n == 1) ? 1.0L : 0.0L;

    // first family: C((n-2) + (m-l-1), n-2) p^(m-l) q^(n-2), l = 1..m-1.
    // Walk l downward so the binomial grows by one row per step.
    if (n >= 2) {
      const int b = n - 2;
      bigint c = 1;  // C(b, b) at l = m-1
      long double log2c = 0.0L;
      for (int l = m - 1; l >= 1; --l) {
        const int a = b + (m - l - 1);
        if (l < m - 1) {
          if (exact_binomials) {
            c *= a;
            c /= a - b;
            log2c = log2_of(c);
          } else {
            log2c = lgamma_log2_binomial(a, b);
          }
        }
        acc += binomial_term(log2c, p, m - l, q, b);
      }
    }

    // second family: C((m-n-l) + (m-2), m-n-l) p^(m-n-l) q^(m-1); the
    // binomial vanishes once m-n-l < 0, so l only runs to m-n.
    {
      bigint c = 1;  // C(m-2, 0) at l = m-n
      long double log2c = 0.0L;
      for (int l = m - n; l >= 1; --l) {
        const int b = m - n - l;
        const int a = b + (m - 2);
        if (b > 0) {
          if (exact_binomials) {
            c *= a;
            c /= b;
            log2c = log2_of(c);
          } else {
            log2c = lgamma_log2_binomial(a, b);
          }
        }
        acc += binomial_term(log2c, p, b, q, m - 1);
      }
    }

    totals[n - 1] = static_cast<double>(acc / m);
  }
  return PopulationVector::state_totals(std::move(totals));
}

double hyperpolarization(const PopulationVector& pops) {
  const int m = pops.n_states();
  double lower = 0.0, upper = 0.0;
  for (int n = 1; n <= m; ++n) {
    if (n <= m / 2)
      lower += pops.total(n);
    else
      upper += pops.total(n);
  }
  return lower - upper;
}

HyperpolarizationResult hyperpolarization(const PopulationVector& pops,
                                          double a_parallel) {
  if (a_parallel < 0.0) return {0.0, true};
  return {hyperpolarization(pops), false};
}

}  // namespace galton
