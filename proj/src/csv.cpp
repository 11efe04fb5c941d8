#include "galton/csv.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "galton/errors.hpp"

namespace galton {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_levels_csv(std::ostream& os, const LevelDiagram& diagram) {
  os << "f0,manifold,index,energy\n";
  for (std::size_t i = 0; i < diagram.f0_grid.size(); ++i) {
    const std::string f0 = format_double(diagram.f0_grid[i]);
    for (int manifold = 0; manifold <= 1; ++manifold) {
      const auto& levels =
          manifold == 0 ? diagram.energies0[i] : diagram.energies1[i];
      for (std::size_t n = 0; n < levels.size(); ++n)
        os << f0 << ',' << manifold << ',' << n + 1 << ','
           << format_double(levels[n]) << '\n';
    }
  }
}

void write_board_csv(std::ostream& os, const Checkerboard& board,
                     double sweep_rate) {
  os << "k,l,f_cross,gap,eta\n";
  for (int k = 1; k <= board.n_states(); ++k)
    for (int l = 1; l <= board.n_states(); ++l) {
      const double gap = board.gap(k, l);
      os << k << ',' << l << ',' << format_double(board.f_cross(k, l)) << ','
         << format_double(gap) << ','
         << format_double(tunneling_probability(gap, sweep_rate)) << '\n';
    }
}

void write_populations_csv(std::ostream& os, const PopulationVector& pops) {
  os << "manifold,index,population\n";
  if (!pops.manifold_resolved) {
    for (int n = 1; n <= pops.n_states(); ++n)
      os << "total," << n << ',' << format_double(pops.m0[n - 1]) << '\n';
    return;
  }
  for (int manifold = 0; manifold <= 1; ++manifold) {
    const auto& side = manifold == 0 ? pops.m0 : pops.m1;
    for (int n = 1; n <= pops.n_states(); ++n)
      os << manifold << ',' << n << ',' << format_double(side[n - 1]) << '\n';
  }
}

void write_map_csv(std::ostream& os, const SpectralMapResult& map) {
  os << "f0,polarization\n";
  for (std::size_t i = 0; i < map.f0.size(); ++i)
    os << format_double(map.f0[i]) << ','
       << format_double(map.polarization[i]) << '\n';
}

void write_buildup_csv(std::ostream& os, const std::vector<double>& times,
                       const std::vector<double>& values) {
  os << "time,polarization\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    os << format_double(times[i]) << ',' << format_double(values[i]) << '\n';
}

XyData read_xy_csv(std::istream& is) {
  XyData out;
  std::string line;
  bool first = true;
  std::size_t n_cols = 0;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {  // header row
      first = false;
      continue;
    }
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() &&
               std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        fields.push_back(v);
      } catch (const std::exception&) {
        throw IoError("non-numeric cell '" + cell + "' on line " +
                      std::to_string(line_no));
      }
    }
    if (fields.size() != 2 && fields.size() != 3)
      throw IoError("expected 2 or 3 columns on line " +
                    std::to_string(line_no) + ", found " +
                    std::to_string(fields.size()));
    if (n_cols == 0) n_cols = fields.size();
    if (fields.size() != n_cols)
      throw IoError("inconsistent column count on line " +
                    std::to_string(line_no));
    out.x.push_back(fields[0]);
    out.y.push_back(fields[1]);
    if (fields.size() == 3) out.sigma.push_back(fields[2]);
  }
  if (first) throw IoError("input has no header row");
  if (out.x.empty()) throw IoError("input has no data rows");
  out.has_sigma = n_cols == 3;
  return out;
}

XyData read_xy_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_xy_csv(is);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw IoError("write to '" + path + "' failed");
}

}  // namespace galton
