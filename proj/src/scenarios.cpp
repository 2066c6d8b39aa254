#include "cdice/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cdice/errors.hpp"
#include "cdice/econ.hpp"

namespace cdice::scenarios {

using climate::ClimatePreset;
using climate::ClimateState;

FexMode parse_fex_mode(std::string_view text) {
  if (text == "none") return FexMode::None;
  if (text == "proportional") return FexMode::Proportional;
  if (text == "linear") return FexMode::LinearRamp;
  throw ValidationError("unknown forcing mode '" + std::string(text) +
                        "' (expected none, proportional or linear)");
}

std::string_view fex_mode_name(FexMode m) {
  switch (m) {
    case FexMode::None: return "none";
    case FexMode::Proportional: return "proportional";
    case FexMode::LinearRamp: return "linear";
  }
  return "?";
}

double historical_linear_fex(double year) {
  const auto exo = econ::dice2016_exogenous(1);
  if (year <= 2015.0) return exo.f_ex0 * std::max(0.0, year - 1850.0) / (2015.0 - 1850.0);
  return econ::exogenous_forcing(year - 2015.0, exo, econ::ForcingMode::LinearRamp);
}

namespace {

double interp_axis(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (x.empty() || at < x.front() || at > x.back()) {
    throw ValidationError("requested year outside the simulated range");
  }
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.end()) return y.back();
  const auto i = static_cast<std::size_t>(it - x.begin());
  const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

// Mean annual emissions (1000 GtC/yr) over [year, year + dt).
double step_emissions(const drivers::BenchmarkSeries& annual_gtc, int year, int dt) {
  double sum = 0.0;
  for (int y = year; y < year + dt; ++y) sum += annual_gtc.at(std::min(y, annual_gtc.last_year()));
  return sum / dt / 1000.0;
}

void apply_fex(climate::ClimateDrive& drive, FexMode fex, const std::vector<double>& step_years) {
  switch (fex) {
    case FexMode::None: break;
    case FexMode::Proportional: drive.co2_share = econ::kProportionalNonCo2; break;
    case FexMode::LinearRamp:
      for (double y : step_years) drive.f_ex.push_back(historical_linear_fex(y));
      break;
  }
}

TemperatureRun concentration_run(const ClimatePreset& preset, const std::vector<double>& mass,
                                 int dt) {
  const int n = static_cast<int>(mass.size()) - 1;
  climate::ClimateDrive drive;
  drive.kind = climate::DriveKind::Concentration;
  drive.values = mass;
  const auto states = climate::run_climate(preset, preset.equilibrium(), drive, dt, n);
  TemperatureRun r;
  r.preset = preset.name;
  r.dt = dt;
  for (int k = 0; k <= n; ++k) {
    const auto& s = states[static_cast<std::size_t>(k)];
    r.years.push_back(static_cast<double>(k) * dt);
    r.ppm.push_back(drivers::mass_to_concentration(s.m.at));
    r.t_at.push_back(s.t.at);
    r.t_oc.push_back(s.t.oc);
  }
  return r;
}

}  // namespace

SpinUpResult spin_up_1850(const ClimatePreset& preset, const drivers::BenchmarkSeries& emissions,
                          double target_ppm, FexMode fex, int dt) {
  dt = preset.resolve_dt(dt);
  if (emissions.unit != drivers::Unit::GtCPerYear) {
    throw ValidationError("spin-up: emissions must be in GtC/yr");
  }
  if (emissions.first_year() > 1850) throw ValidationError("spin-up: record must start in 1850");
  ClimateState s = preset.equilibrium();
  int year = 1850;
  while (true) {
    if (drivers::mass_to_concentration(s.m.at) >= target_ppm) return {s, year};
    if (year + dt > emissions.last_year()) break;
    const double f_co2 = climate::forcing(s.m.at, preset.m_base, 0.0, preset.temp);
    double f_ex = 0.0;
    if (fex == FexMode::Proportional) f_ex = econ::kProportionalNonCo2 * f_co2;
    if (fex == FexMode::LinearRamp) f_ex = historical_linear_fex(year);
    ClimateState next;
    next.t = climate::step_temperature(s.t, f_co2 + f_ex, preset.temp, dt);
    next.m = climate::step_carbon(s.m, preset.carbon, step_emissions(emissions, year, dt), dt);
    s = next;
    year += dt;
  }
  throw ValidationError("spin-up: target " + drivers::format_number(target_ppm) +
                        " ppm never reached within the historical record");
}

double TemperatureRun::t_at_year(double year) const { return interp_axis(years, t_at, year); }

Table TemperatureRun::table() const {
  Table t({"year", "ppm", "t_at", "t_oc"});
  for (std::size_t i = 0; i < years.size(); ++i) t.add_row({years[i], ppm[i], t_at[i], t_oc[i]});
  return t;
}

TemperatureRun test_abrupt_4xco2(const ClimatePreset& preset, int horizon_years, int dt) {
  dt = preset.resolve_dt(dt);
  if (horizon_years < dt) throw ValidationError("4xCO2: horizon shorter than one step");
  const int n = horizon_years / dt;
  std::vector<double> mass(static_cast<std::size_t>(n) + 1, 4.0 * preset.m_base);
  return concentration_run(preset, mass, dt);
}

RampRun test_1pct_ramp(const ClimatePreset& preset, int horizon_years, int dt) {
  dt = preset.resolve_dt(dt);
  if (horizon_years < 140) throw ValidationError("1% ramp: horizon must cover 140 years");
  const int n = horizon_years / dt;
  std::vector<double> mass;
  for (int k = 0; k <= n; ++k) mass.push_back(preset.m_base * std::pow(1.01, k * dt));
  RampRun r;
  r.run = concentration_run(preset, mass, dt);
  // Reported concentration follows the protocol's 285 ppm start.
  for (int k = 0; k <= n; ++k) {
    r.run.ppm[static_cast<std::size_t>(k)] = drivers::kPreindustrialPpm * std::pow(1.01, k * dt);
  }
  r.tcr = r.run.t_at_year(70.0);
  r.t_quadruple = r.run.t_at_year(140.0);
  return r;
}

double PulseRun::peak_anomaly() const {
  return *std::max_element(t_anomaly.begin(), t_anomaly.end());
}

double PulseRun::peak_year() const {
  const auto it = std::max_element(t_anomaly.begin(), t_anomaly.end());
  return years[static_cast<std::size_t>(it - t_anomaly.begin())];
}

Table PulseRun::table() const {
  Table t({"year", "airborne_fraction", "t_anomaly", "control_m_at", "control_emissions"});
  for (std::size_t i = 0; i < years.size(); ++i) {
    t.add_row({years[i], airborne_fraction[i], t_anomaly[i], control_m_at[i],
               i < control_emissions.size() ? control_emissions[i] : std::nan("")});
  }
  return t;
}

PulseRun test_pulse_100gtc(const ClimatePreset& preset, double pulse_gtc, int horizon_years,
                           int dt) {
  return test_pulse_100gtc(preset, preset.initial, pulse_gtc, horizon_years, dt);
}

PulseRun test_pulse_100gtc(const ClimatePreset& preset, const ClimateState& start,
                           double pulse_gtc, int horizon_years, int dt) {
  dt = preset.resolve_dt(dt);
  if (!(pulse_gtc > 0.0)) throw ValidationError("pulse: size must be positive");
  if (horizon_years < dt) throw ValidationError("pulse: horizon shorter than one step");
  const int n = horizon_years / dt;
  const auto& cp = preset.carbon;
  const double m_star = start.m.at;
  const double pulse = pulse_gtc / 1000.0;

  PulseRun r;
  r.preset = preset.name;
  r.dt = dt;
  r.pulse_gtc = pulse_gtc;

  ClimateState ctrl = start;
  ClimateState pert = start;
  pert.m.at += pulse;
  auto record = [&](int k) {
    r.years.push_back(static_cast<double>(k) * dt);
    r.airborne_fraction.push_back((pert.m.at - ctrl.m.at) / pulse);
    r.t_anomaly.push_back(pert.t.at - ctrl.t.at);
    r.control_m_at.push_back(ctrl.m.at);
  };
  record(0);
  for (int k = 0; k < n; ++k) {
    // Inflow that keeps the control atmosphere at its starting mass.
    const double e = cp.b12 * m_star - cp.b12 * cp.r1() * ctrl.m.uo;
    if (e < -m_star) {
      throw ValidationError("pulse: control emissions diverge; check the carbon-cycle parameters");
    }
    r.control_emissions.push_back(e);
    for (ClimateState* s : {&ctrl, &pert}) {
      const double f = climate::forcing(s->m.at, preset.m_base, 0.0, preset.temp);
      s->t = climate::step_temperature(s->t, f, preset.temp, dt);
      s->m = climate::step_carbon(s->m, cp, e, dt);
    }
    record(k + 1);
  }
  return r;
}

double RcpRun::ppm_at(double year) const { return interp_axis(years, ppm, year); }
double RcpRun::t_at_year(double year) const { return interp_axis(years, t_at, year); }

Table RcpRun::table() const {
  Table t({"year", "ppm", "prescribed_ppm", "t_at", "t_oc"});
  for (std::size_t i = 0; i < years.size(); ++i) {
    t.add_row({years[i], ppm[i], prescribed_ppm[i], t_at[i], t_oc[i]});
  }
  return t;
}

RcpRun test_rcp(const ClimatePreset& preset, const drivers::ScenarioInputs& inputs, RcpMode mode,
                FexMode fex, int dt) {
  dt = preset.resolve_dt(dt);
  inputs.validate();
  constexpr int kStart = 1850;
  const int end = inputs.id == drivers::Rcp::Historical ? 2005 : 2100;
  const int n = (end - kStart) / dt;

  climate::ClimateDrive drive;
  std::vector<double> step_years;
  for (int k = 0; k < n; ++k) step_years.push_back(kStart + k * dt);
  if (mode == RcpMode::ConcentrationDriven) {
    drive.kind = climate::DriveKind::Concentration;
    for (int k = 0; k <= n; ++k) {
      drive.values.push_back(drivers::concentration_to_mass(inputs.concentrations.at(kStart + k * dt)));
    }
  } else {
    drive.kind = climate::DriveKind::Emissions;
    for (int k = 0; k < n; ++k) drive.values.push_back(step_emissions(inputs.emissions, kStart + k * dt, dt));
  }
  apply_fex(drive, fex, step_years);
  // Prescribed concentrations are measured against the protocol's 285 ppm.
  ClimatePreset run_preset = preset;
  if (mode == RcpMode::ConcentrationDriven) {
    run_preset.m_base = drivers::concentration_to_mass(drivers::kPreindustrialPpm);
  }
  const auto states = climate::run_climate(run_preset, preset.equilibrium(), drive, dt, n);

  RcpRun r;
  r.preset = preset.name;
  r.rcp = inputs.id;
  r.mode = mode;
  r.dt = dt;
  for (int k = 0; k <= n; ++k) {
    const auto& s = states[static_cast<std::size_t>(k)];
    const int year = kStart + k * dt;
    r.years.push_back(year);
    r.ppm.push_back(drivers::mass_to_concentration(s.m.at));
    r.prescribed_ppm.push_back(inputs.concentrations.at(year));
    r.t_at.push_back(s.t.at);
    r.t_oc.push_back(s.t.oc);
  }
  return r;
}

std::vector<Check> conformance(const TemperatureRun& abrupt, const RampRun& ramp,
                               const PulseRun& pulse, const std::vector<RcpRun>& rcp_conc,
                               const std::vector<RcpRun>& rcp_emis,
                               const drivers::BenchmarkSeries& joos,
                               const std::vector<drivers::BenchmarkSeries>& cmip5, double ecs) {
  std::vector<Check> out;
  const double eq4x = 2.0 * ecs;
  out.push_back({"test1 T_AT(end)/(2 ECS)", abrupt.t_at.back() / eq4x, 0.975, 1.025});
  out.push_back({"test2 TCR [K]", ramp.tcr, 1.3, 2.3});
  out.push_back({"test2 T_AT(140)/(2 ECS)", ramp.t_quadruple / eq4x, 0.0, std::nextafter(1.0, 0.0)});
  out.push_back({"test2 2 ECS/T_AT(140) - 1", eq4x / ramp.t_quadruple - 1.0, 0.4, 0.7});
  for (int y = 10; y <= 100 && y <= static_cast<int>(pulse.years.back()); y += 10) {
    const double f = interp_axis(pulse.years, pulse.airborne_fraction, y);
    out.push_back({"test3 airborne fraction year " + std::to_string(y), f, joos.lower_at(y),
                   joos.upper_at(y)});
  }
  out.push_back({"test3 peak anomaly [K]", pulse.peak_anomaly(), 0.15, 0.25});
  out.push_back({"test3 peak year", pulse.peak_year(), 4.0, 10.0});
  for (std::size_t i = 0; i < rcp_conc.size() && i < cmip5.size(); ++i) {
    const auto& r = rcp_conc[i];
    out.push_back({"test4 " + std::string(drivers::rcp_name(r.rcp)) + " conc-driven T_AT(2100) [K]",
                   r.t_at_year(2100.0), cmip5[i].lower_at(2100.0), cmip5[i].upper_at(2100.0)});
  }
  for (const auto& r : rcp_emis) {
    out.push_back({"test4 " + std::string(drivers::rcp_name(r.rcp)) + " emission-driven ppm(2100) ratio",
                   r.ppm_at(2100.0) / r.prescribed_ppm.back(), 0.95, 1.05});
  }
  return out;
}

void write_conformance(std::ostream& out, const std::vector<Check>& checks) {
  out << "check,value,lower,upper,status\n";
  for (const auto& c : checks) {
    out << c.name << ',' << format_cell(c.value) << ',' << format_cell(c.lower) << ','
        << format_cell(c.upper) << ',' << (c.passed() ? "pass" : "fail") << '\n';
  }
}

}  // namespace cdice::scenarios
