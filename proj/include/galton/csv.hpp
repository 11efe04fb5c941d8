#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "galton/checkerboard.hpp"
#include "galton/engine.hpp"
#include "galton/spin_model.hpp"
#include "galton/sweep.hpp"

namespace galton {

// Shortest round-trip-safe decimal rendering (%.12g, C locale, '.' decimal
// point); all CSV output is comma-separated, LF-terminated, with a header
// row, so identical inputs produce byte-identical files.
std::string format_double(double value);

// f0,manifold,index,energy — one row per level per grid point.
void write_levels_csv(std::ostream& os, const LevelDiagram& diagram);

// k,l,f_cross,gap,eta — row-major over the board; eta evaluated at the
// given sweep rate.
void write_board_csv(std::ostream& os, const Checkerboard& board,
                     double sweep_rate);

// manifold,index,population.  Resolved vectors write manifold 0 and 1;
// totals-only vectors (closed-form results) write manifold "total".
void write_populations_csv(std::ostream& os, const PopulationVector& pops);

// f0,polarization.
void write_map_csv(std::ostream& os, const SpectralMapResult& map);

// time,polarization.
void write_buildup_csv(std::ostream& os, const std::vector<double>& times,
                       const std::vector<double>& values);

// Two- or three-column numeric input (x,y[,sigma]) with a header row.
struct XyData {
  std::vector<double> x, y, sigma;
  bool has_sigma = false;
};
XyData read_xy_csv(std::istream& is);
XyData read_xy_csv_file(const std::string& path);  // IoError on failure

void write_text_file(const std::string& path, const std::string& content);

}  // namespace galton
