#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdice/climate.hpp"

namespace cdice::drivers {

enum class Unit { GtCPerYear, Ppm, Kelvin, Fraction };

std::string_view unit_name(Unit u);
Unit parse_unit(std::string_view text);

struct Envelope {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// A reference curve on an integer year axis. Comment lines of the source
/// file are kept so the series re-serializes to the same bytes.
struct BenchmarkSeries {
  std::string name;
  Unit unit = Unit::Fraction;
  std::vector<int> years;
  std::vector<double> values;
  std::optional<Envelope> envelope;
  std::vector<std::string> notes;

  std::size_t size() const { return years.size(); }
  int first_year() const { return years.front(); }
  int last_year() const { return years.back(); }

  /// Linear interpolation inside the year axis; throws outside it.
  double at(double year) const;
  double lower_at(double year) const;
  double upper_at(double year) const;

  /// Same series on every integer year between the first and the last.
  BenchmarkSeries annual() const;

  void validate() const;
};

BenchmarkSeries parse_series(std::istream& in, Unit expected, std::string name);
BenchmarkSeries load_series(const std::filesystem::path& path, Unit expected);
void write_series(std::ostream& out, const BenchmarkSeries& s);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

double concentration_to_mass(double ppm);
double mass_to_concentration(double mass);

/// Forcing CO2 concentration reference and doubling forcing of the
/// concentration-driven CMIP5 protocols.
inline constexpr double kPreindustrialPpm = 285.0;
inline constexpr double kCmipF2x = 3.68;

std::vector<double> co2_forcing_series(const std::vector<double>& ppm, double base_ppm, double f2x);

climate::TempParams geoffroy_params(std::string_view model);
/// Reads the same table from `data/geoffroy/params.csv`.
climate::TempParams load_geoffroy_params(const std::filesystem::path& data_dir, std::string_view model);

enum class Rcp { RCP26, RCP45, RCP60, RCP85, Historical };

std::string_view rcp_name(Rcp id);
Rcp parse_rcp(std::string_view text);
const std::vector<Rcp>& future_rcps();

/// Historical record spliced with an RCP extension, resampled to annual
/// resolution 1850-2100 (1850-2005 for the historical record alone).
struct ScenarioInputs {
  Rcp id = Rcp::Historical;
  BenchmarkSeries emissions;       // GtC/yr
  BenchmarkSeries concentrations;  // ppm
  std::vector<double> co2_forcing;  // W/m2, aligned with concentrations

  void validate() const;
};

std::filesystem::path default_data_dir();

ScenarioInputs load_scenario(const std::filesystem::path& data_dir, Rcp id);
BenchmarkSeries load_cmip5_temperature(const std::filesystem::path& data_dir, Rcp id);
BenchmarkSeries load_joos_envelope(const std::filesystem::path& data_dir);

}  // namespace cdice::drivers
