#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "galton/csv.hpp"
#include "galton/engine.hpp"
#include "galton/errors.hpp"
#include "galton/manifest.hpp"
#include "galton/svg.hpp"

using namespace galton;

TEST_CASE("double formatting: round-trip-safe, locale-free") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.5) == "1.5");
  CHECK(format_double(-0.25) == "-0.25");
  CHECK(format_double(2900.0) == "2900");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(1e-12) == "1e-12");
}

TEST_CASE("population CSV: manifold-resolved and totals-only forms") {
  PopulationVector pops;
  pops.m0 = {0.5, 0.25};
  pops.m1 = {0.125, 0.125};
  std::ostringstream os;
  write_populations_csv(os, pops);
  CHECK(os.str() ==
        "manifold,index,population\n"
        "0,1,0.5\n"
        "0,2,0.25\n"
        "1,1,0.125\n"
        "1,2,0.125\n");

  const auto totals = PopulationVector::state_totals({0.75, 0.25});
  std::ostringstream os2;
  write_populations_csv(os2, totals);
  CHECK(os2.str() ==
        "manifold,index,population\n"
        "total,1,0.75\n"
        "total,2,0.25\n");
}

TEST_CASE("board CSV carries the tunneling probability column") {
  const std::vector<double> fc{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> gap{0.0, 1.0, 1.0, 0.0};
  const auto board = checkerboard_from_gaps(2, gap, fc);
  std::ostringstream os;
  write_board_csv(os, board, 1.0);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,l,f_cross,gap,eta");
  std::getline(is, line);
  CHECK(line == "1,1,1,0,1");  // zero gap: eta = 1
  std::getline(is, line);
  const std::string eta = format_double(std::exp(-1.0));
  CHECK(line == "1,2,2,1," + eta);
}

TEST_CASE("map and buildup CSV headers") {
  SpectralMapResult map;
  map.f0 = {10.0, 12.5};
  map.polarization = {0.25, -0.5};
  std::ostringstream os;
  write_map_csv(os, map);
  CHECK(os.str() ==
        "f0,polarization\n"
        "10,0.25\n"
        "12.5,-0.5\n");

  std::ostringstream os2;
  write_buildup_csv(os2, {0.0, 1.0}, {0.0, 0.5});
  CHECK(os2.str() ==
        "time,polarization\n"
        "0,0\n"
        "1,0.5\n");
}

TEST_CASE("xy reader: round trip, third column, and malformed input") {
  {
    std::istringstream is("f0,polarization\n10,0.25\n12.5,-0.5\n");
    const auto data = read_xy_csv(is);
    REQUIRE(data.x.size() == 2);
    CHECK(data.x[1] == 12.5);
    CHECK(data.y[1] == -0.5);
    CHECK_FALSE(data.has_sigma);
  }
  {
    std::istringstream is("t,y,sigma\n0,1,0.1\n1,0.5,0.1\n");
    const auto data = read_xy_csv(is);
    CHECK(data.has_sigma);
    REQUIRE(data.sigma.size() == 2);
    CHECK(data.sigma[0] == 0.1);
  }
  {
    std::istringstream is("x,y\n1,2\nbroken,3\n");
    CHECK_THROWS_AS(read_xy_csv(is), IoError);
  }
  {
    std::istringstream is("x,y\n1,2\n3\n");  // inconsistent column count
    CHECK_THROWS_AS(read_xy_csv(is), IoError);
  }
  {
    std::istringstream is("");  // no header at all
    CHECK_THROWS_AS(read_xy_csv(is), IoError);
  }

  // file round trip
  const std::string path = "io_test_roundtrip.csv";
  write_text_file(path, "x,y\n1,2\n3,4\n");
  const auto data = read_xy_csv_file(path);
  CHECK(data.x == std::vector<double>{1.0, 3.0});
  CHECK(data.y == std::vector<double>{2.0, 4.0});
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_xy_csv_file("definitely/not/here.csv"), IoError);
}

TEST_CASE("svg renderer: deterministic, embeds labels, rejects bad series") {
  PlotSeries s;
  s.label = "polarization";
  s.x = {0.0, 1.0, 2.0};
  s.y = {0.0, 0.5, 0.25};
  const auto svg = render_line_plot({s}, "a title", "f0 (MHz)", "P");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("a title") != std::string::npos);
  CHECK(svg.find("f0 (MHz)") != std::string::npos);
  CHECK(svg.find("polarization") != std::string::npos);
  // XML-escapes label text
  const auto escaped = render_line_plot({s}, "a < b & c", "x", "y");
  CHECK(escaped.find("a < b & c") == std::string::npos);
  CHECK(escaped.find("a &lt; b &amp; c") != std::string::npos);
  // deterministic output
  CHECK(svg == render_line_plot({s}, "a title", "f0 (MHz)", "P"));

  CHECK_THROWS_AS(render_line_plot({}, "t", "x", "y"), EmptySeries);
  PlotSeries bad;
  bad.x = {0.0, 1.0};
  bad.y = {0.0};
  CHECK_THROWS_AS(render_line_plot({bad}, "t", "x", "y"), InvalidConfig);
}

TEST_CASE("manifest: stable hashing and layout") {
  // FNV-1a 64-bit reference values
  CHECK(fnv1a_hash("") == 14695981039346656037ull);
  CHECK(fnv1a_hash("a") == 12638187200555641996ull);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");

  ManifestBuilder mb("sweep --f0 10");
  mb.set_seed(42);
  mb.set_parameters({{"delta_f", 2.0}});
  mb.add_input("config", "{}");
  mb.add_output("populations.csv", "manifold,index,population\n");
  const auto doc = mb.build();
  CHECK(doc["tool"] == kToolName);
  CHECK(doc["version"] == kToolVersion);
  CHECK(doc["command"] == "sweep --f0 10");
  CHECK(doc["seed"] == 42);
  CHECK(doc["parameters"]["delta_f"] == 2.0);
  REQUIRE(doc["inputs"].size() == 1);
  CHECK(doc["inputs"][0]["name"] == "config");
  CHECK(doc["inputs"][0]["fnv1a"] == fnv1a_hex("{}"));
  CHECK(doc["inputs"][0]["bytes"] == 2);
  REQUIRE(doc["outputs"].size() == 1);

  // identical builds yield identical text; seed defaults to null
  ManifestBuilder a("x"), b("x");
  CHECK(a.to_string() == b.to_string());
  CHECK(a.build()["seed"].is_null());
  CHECK(a.to_string().back() == '\n');
}
