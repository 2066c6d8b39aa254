#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cdice/climate.hpp"
#include "cdice/drivers.hpp"
#include "cdice/table.hpp"

namespace cdice::scenarios {

enum class FexMode { None, Proportional, LinearRamp };

FexMode parse_fex_mode(std::string_view text);
std::string_view fex_mode_name(FexMode m);

struct SpinUpResult {
  climate::ClimateState state;
  int year = 0;
};

/// Integrates from the 1850 equilibrium under the annual emission record
/// (GtC/yr) and returns the first state at or above `target_ppm`.
SpinUpResult spin_up_1850(const climate::ClimatePreset& preset,
                          const drivers::BenchmarkSeries& emissions, double target_ppm,
                          FexMode fex = FexMode::Proportional, int dt = 0);

struct TemperatureRun {
  std::string preset;
  int dt = 1;
  std::vector<double> years;  // years since the start of the protocol
  std::vector<double> ppm;
  std::vector<double> t_at;
  std::vector<double> t_oc;

  double t_at_year(double year) const;
  Table table() const;
};

/// Concentration pinned at four times the forcing reference from year 0.
TemperatureRun test_abrupt_4xco2(const climate::ClimatePreset& preset, int horizon_years = 1000,
                                 int dt = 0);

struct RampRun {
  TemperatureRun run;
  double tcr = 0.0;          // T_AT at year 70
  double t_quadruple = 0.0;  // T_AT at year 140
};

/// Concentration rising 1 %/yr from the pre-industrial value.
RampRun test_1pct_ramp(const climate::ClimatePreset& preset, int horizon_years = 140, int dt = 0);

struct PulseRun {
  std::string preset;
  int dt = 1;
  double pulse_gtc = 100.0;
  std::vector<double> years;  // years after the pulse
  std::vector<double> airborne_fraction;
  std::vector<double> t_anomaly;
  std::vector<double> control_m_at;
  std::vector<double> control_emissions;  // 1000 GtC per year

  double peak_anomaly() const;
  double peak_year() const;
  Table table() const;
};

/// Instantaneous pulse on top of a control run held at the initial
/// atmospheric mass. Starts from the preset's 2015 state unless `start`
/// is supplied.
PulseRun test_pulse_100gtc(const climate::ClimatePreset& preset, double pulse_gtc = 100.0,
                           int horizon_years = 1000, int dt = 0);
PulseRun test_pulse_100gtc(const climate::ClimatePreset& preset, const climate::ClimateState& start,
                           double pulse_gtc, int horizon_years, int dt);

enum class RcpMode { ConcentrationDriven, EmissionDriven };

struct RcpRun {
  std::string preset;
  drivers::Rcp rcp = drivers::Rcp::RCP85;
  RcpMode mode = RcpMode::EmissionDriven;
  int dt = 1;
  std::vector<double> years;  // calendar years
  std::vector<double> ppm;
  std::vector<double> prescribed_ppm;
  std::vector<double> t_at;
  std::vector<double> t_oc;

  double ppm_at(double year) const;
  double t_at_year(double year) const;
  Table table() const;
};

/// Runs 1850-2100 from the preset's equilibrium.
RcpRun test_rcp(const climate::ClimatePreset& preset, const drivers::ScenarioInputs& inputs,
                RcpMode mode, FexMode fex = FexMode::Proportional, int dt = 0);

/// Non-CO2 forcing used by the linear-ramp mode of historical runs at a
/// calendar year: zero in 1850, rising to the 2015 value, then the DICE ramp.
double historical_linear_fex(double year);

struct Check {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool passed() const { return value >= lower && value <= upper; }
};

/// Conformance rows for the four protocols against the fixture data.
std::vector<Check> conformance(const TemperatureRun& abrupt, const RampRun& ramp,
                               const PulseRun& pulse, const std::vector<RcpRun>& rcp_conc,
                               const std::vector<RcpRun>& rcp_emis,
                               const drivers::BenchmarkSeries& joos,
                               const std::vector<drivers::BenchmarkSeries>& cmip5,
                               double ecs);

void write_conformance(std::ostream& out, const std::vector<Check>& checks);

}  // namespace cdice::scenarios
