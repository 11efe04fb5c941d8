#include "galton/dos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "galton/errors.hpp"

namespace galton {

void DosModel::validate() const {
  if (kind == DosKind::gaussian) {
    if (!std::isfinite(center)) throw InvalidConfig("gaussian center not finite");
    if (!(width >= 0.0) || !std::isfinite(width))
      throw InvalidConfig("gaussian width must be >= 0");
    return;
  }
  if (table.size() < 2)
    throw InvalidConfig("tabulated density needs at least two rows");
  double area = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!std::isfinite(table[i].first) || !std::isfinite(table[i].second))
      throw InvalidConfig("tabulated density has non-finite entries");
    if (table[i].second < 0.0)
      throw InvalidConfig("tabulated density must be non-negative");
    if (i > 0) {
      if (table[i].first <= table[i - 1].first)
        throw InvalidConfig("tabulated frequencies must be strictly increasing");
      area += 0.5 * (table[i].second + table[i - 1].second) *
              (table[i].first - table[i - 1].first);
    }
  }
  if (std::abs(area - 1.0) > 1e-6)
    throw UnnormalizedTable("tabulated density integrates to " +
                            std::to_string(area) + ", expected 1");
}

DosModel DosModel::make_gaussian(double center, double width) {
  DosModel dos;
  dos.kind = DosKind::gaussian;
  dos.center = center;
  dos.width = width;
  dos.validate();
  return dos;
}

DosModel DosModel::make_tabulated(
    std::vector<std::pair<double, double>> rows) {
  DosModel dos;
  dos.kind = DosKind::tabulated;
  dos.table = std::move(rows);
  dos.validate();
  return dos;
}

double integrate_dos(const DosModel& dos, double a, double b) {
  dos.validate();
  if (!(a <= b)) throw InvalidConfig("integration bounds must satisfy a <= b");
  if (dos.kind == DosKind::gaussian) {
    if (dos.width == 0.0)  // delta mass at the center
      return (a < dos.center && dos.center <= b) ? 1.0 : 0.0;
    const double s = dos.width * std::sqrt(2.0);
    return 0.5 * (std::erf((b - dos.center) / s) -
                  std::erf((a - dos.center) / s));
  }
  // exact integral of the piecewise-linear interpolant over [a, b]
  double total = 0.0;
  for (std::size_t i = 1; i < dos.table.size(); ++i) {
    const double x0 = dos.table[i - 1].first;
    const double x1 = dos.table[i].first;
    const double lo = std::max(a, x0);
    const double hi = std::min(b, x1);
    if (hi <= lo) continue;
    const double g0 = dos.table[i - 1].second;
    const double g1 = dos.table[i].second;
    const double slope = (g1 - g0) / (x1 - x0);
    auto antiderivative = [&](double x) {
      const double t = x - x0;
      return g0 * t + 0.5 * slope * t * t;
    };
    total += antiderivative(hi) - antiderivative(lo);
  }
  return total;
}

namespace {

// Acklam's rational approximation, restricted to u in (0, 0.5];
// the public wrapper reflects the upper half so that the quantile
// is antisymmetric about 0.5 by construction.
double norm_ppf_lower(double u) {
  static const double pa[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
  static const double pb[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
  static const double pc[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
  static const double pd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((pc[0] * q + pc[1]) * q + pc[2]) * q + pc[3]) * q + pc[4]) * q +
         pc[5]) /
        ((((pd[0] * q + pd[1]) * q + pd[2]) * q + pd[3]) * q + 1.0);
  } else {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((pa[0] * r + pa[1]) * r + pa[2]) * r + pa[3]) * r + pa[4]) * r +
         pa[5]) *
        q /
        (((((pb[0] * r + pb[1]) * r + pb[2]) * r + pb[3]) * r + pb[4]) * r +
         1.0);
  }
  // one Halley step against the exact CDF
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
  const double d = 0.3989422804014327 * std::exp(-0.5 * x * x);  // pdf(x)
  x -= e / (d + 0.5 * x * e);
  return x;
}

}  // namespace

double norm_ppf(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw InvalidConfig("quantile argument must lie in (0, 1)");
  if (u > 0.5) return -norm_ppf_lower(1.0 - u);
  return norm_ppf_lower(u);
}

double dos_quantile(const DosModel& dos, double u) {
  dos.validate();
  if (!(u > 0.0 && u < 1.0))
    throw InvalidConfig("quantile argument must lie in (0, 1)");
  if (dos.kind == DosKind::gaussian)
    return dos.center + dos.width * norm_ppf(u);
  double cdf = 0.0;
  for (std::size_t i = 1; i < dos.table.size(); ++i) {
    const double x0 = dos.table[i - 1].first;
    const double x1 = dos.table[i].first;
    const double g0 = dos.table[i - 1].second;
    const double g1 = dos.table[i].second;
    const double mass = 0.5 * (g0 + g1) * (x1 - x0);
    if (u > cdf + mass && i + 1 < dos.table.size()) {
      cdf += mass;
      continue;
    }
    const double r = u - cdf;  // mass to absorb inside this segment
    const double slope = (g1 - g0) / (x1 - x0);
    if (std::abs(slope) < 1e-300) {
      if (g0 <= 0.0) return x0;  // mass-free segment
      return x0 + r / g0;
    }
    const double disc = g0 * g0 + 2.0 * slope * r;
    const double h = (-g0 + std::sqrt(std::max(disc, 0.0))) / slope;
    return std::min(std::max(x0 + h, x0), x1);
  }
  return dos.table.back().first;
}

namespace {

Checkerboard board_from_levels(const std::vector<double>& levels,
                               const DosModel& dos,
                               const BoardSamplingOptions& options) {
  const int m = static_cast<int>(levels.size());
  const double span =
      options.column_span_frac *
      (dos.kind == DosKind::gaussian
           ? dos.width
           : dos.table.back().first - dos.table.front().first);
  std::vector<double> fc(static_cast<std::size_t>(m) * m);
  std::vector<double> gaps(fc.size());
  auto column_offset = [&](int rank) {
    // flat-manifold offsets, symmetric, ascending with rank
    if (m == 1) return 0.0;
    return span * (static_cast<double>(rank - 1) / (m - 1) - 0.5);
  };
  for (int k = 1; k <= m; ++k) {
    for (int l = 1; l <= m; ++l) {
      const int rank = m + 1 - l;  // state carried by column l
      const std::size_t idx = static_cast<std::size_t>(k - 1) * m + (l - 1);
      fc[idx] = levels[k - 1] - column_offset(rank);
      const int d = std::abs(k - rank);
      gaps[idx] = d == 0   ? options.gap_scale
                  : d == 1 ? options.gap_scale * options.flip_ratio
                           : 0.0;
    }
  }
  return Checkerboard(m, fc, gaps);
}

}  // namespace

SampledBoard sample_board_from_dos(const DosModel& dos, int n_states,
                                   const BoardSamplingOptions& options) {
  dos.validate();
  if (n_states < 2 || (n_states & (n_states - 1)) != 0)
    throw ShapeMismatch("state count must be a power of two >= 2");
  if (!(options.gap_scale >= 0.0))
    throw InvalidConfig("gap_scale must be >= 0");
  if (options.flip_ratio < 0.0)
    throw InvalidConfig("flip_ratio must be >= 0");
  if (options.column_span_frac < 0.0)
    throw InvalidConfig("column_span_frac must be >= 0");

  SampledBoard out{Checkerboard(), {}, 0, options.monte_carlo};
  std::vector<double> levels(static_cast<std::size_t>(n_states));
  if (options.monte_carlo) {
    if (!options.seed.has_value() || *options.seed < 0)
      throw BadSeed("monte-carlo placement requires a non-negative seed");
    out.seed_used = static_cast<std::uint64_t>(*options.seed);
    std::mt19937_64 rng(out.seed_used);
    std::uniform_real_distribution<double> unit(
        std::numeric_limits<double>::min(), 1.0);
    for (auto& lv : levels) lv = dos_quantile(dos, unit(rng));
    std::sort(levels.begin(), levels.end());
  } else {
    if (dos.kind == DosKind::gaussian && dos.width == 0.0) {
      std::fill(levels.begin(), levels.end(), dos.center);  // delta density
    } else {
      for (int i = 1; i <= n_states; ++i)
        levels[i - 1] = dos_quantile(dos, (i - 0.5) / n_states);
    }
  }
  out.levels = levels;
  out.board = board_from_levels(levels, dos, options);
  return out;
}

SampledBoard sample_board_from_dos(const DosModel& dos, int n_states,
                                   double gap_scale) {
  BoardSamplingOptions options;
  options.gap_scale = gap_scale;
  return sample_board_from_dos(dos, n_states, options);
}

namespace {

double model_cdf(const DosModel& dos, double x) {
  if (dos.kind == DosKind::gaussian) {
    if (dos.width == 0.0) return x >= dos.center ? 1.0 : 0.0;
    return 0.5 * std::erfc(-(x - dos.center) / (dos.width * std::sqrt(2.0)));
  }
  const double lo = dos.table.front().first;
  const double hi = dos.table.back().first;
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return integrate_dos(dos, lo, x);
}

}  // namespace

double ks_statistic(std::vector<double> samples, const DosModel& dos) {
  dos.validate();
  if (samples.empty()) throw InsufficientData("no samples for the KS test");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = model_cdf(dos, samples[i]);
    dmax = std::max(dmax, std::abs(cdf - (i + 1) / n));
    dmax = std::max(dmax, std::abs(cdf - i / n));
  }
  return dmax;
}

double ks_p_value(double distance, std::size_t n) {
  if (n == 0) throw InsufficientData("empty sample for the KS p-value");
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * distance;
  if (lambda < 1e-6) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) *
                        std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::min(std::max(sum, 0.0), 1.0);
}

}  // namespace galton
