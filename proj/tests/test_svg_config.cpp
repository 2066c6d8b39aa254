#include <doctest.h>

#include <sstream>

#include "cdice/config.hpp"
#include "cdice/errors.hpp"
#include "cdice/svg.hpp"

using namespace cdice;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("svg_config") {

TEST_CASE("chart output is deterministic") {
  const svg::Line flat{"flat", {0, 1, 2, 3}, {2, 2, 2, 2}};
  const svg::ChartStyle style{"constant", "year", "K"};
  const auto a = svg::render_chart({flat}, {}, style);
  const auto b = svg::render_chart({flat}, {}, style);
  CHECK(a == b);
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("nan") == std::string::npos);
}

TEST_CASE("one polyline per series and one polygon per band") {
  std::vector<svg::Line> lines;
  for (int i = 0; i < 5; ++i) lines.push_back({"s" + std::to_string(i), {0, 1, 2}, {0.0 + i, 1.0 + i, 4.0 - i}});
  const std::vector<svg::Band> bands{{"a", {0, 1, 2}, {0, 0, 0}, {1, 2, 3}},
                                     {"b", {0, 1, 2}, {-1, -1, -1}, {0, 0, 0}}};
  const auto text = svg::render_chart(lines, bands, {"five", "x", "y"});
  CHECK(count(text, "<polyline") == 5);
  CHECK(count(text, "<polygon") == 2);
  CHECK(text.find("s4") != std::string::npos);
}

TEST_CASE("bad chart input is rejected") {
  CHECK_THROWS_AS(svg::render_chart({}, {}, {}), ValidationError);
  CHECK_THROWS_AS(svg::render_chart({{"x", {0, 1}, {1}}}, {}, {}), ValidationError);
  CHECK_THROWS_AS(svg::render_chart({}, {{"b", {0, 1}, {0, 0}, {1}}}, {}), ValidationError);
}

TEST_CASE("config round trip") {
  RunConfig cfg;
  cfg.preset = "DICE-2016";
  cfg.dt = 5;
  cfg.horizon = 700;
  cfg.rho = 0.001;
  cfg.damage = "howard-sterner";
  cfg.fex = "proportional";
  cfg.out_dir = "results/x";
  cfg.format = "both";
  cfg.execution = "serial";
  std::stringstream text;
  write_config(text, cfg);
  RunConfig back;
  apply_values(back, parse_key_values(text));
  CHECK(back == cfg);
}

TEST_CASE("later values override earlier ones") {
  std::istringstream file("# base\npreset = CDICE-GISS-E2-R\nrho = 0.05\n\n");
  RunConfig cfg;
  apply_values(cfg, parse_key_values(file));
  apply_values(cfg, {{"rho", "0.015"}});
  CHECK(cfg.preset == "CDICE-GISS-E2-R");
  CHECK(cfg.rho == 0.015);
}

TEST_CASE("config errors") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_values(cfg, {{"colour", "red"}}), ValidationError);
  CHECK_THROWS_AS(apply_values(cfg, {{"rho", "fast"}}), ValidationError);
  std::istringstream bad("preset CDICE\n");
  CHECK_THROWS_AS(parse_key_values(bad), ValidationError);
  cfg.format = "png";
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

}
