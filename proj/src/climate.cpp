#include "cdice/climate.hpp"

#include <cmath>
#include <stdexcept>

#include "cdice/errors.hpp"

namespace cdice::climate {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void CarbonParams::validate() const {
  require(std::isfinite(b12) && b12 >= 0.0 && b12 < 1.0, "carbon: b12 must lie in [0, 1)");
  require(std::isfinite(b23) && b23 >= 0.0 && b23 < 1.0, "carbon: b23 must lie in [0, 1)");
  require(finite_positive(m_eq.at) && finite_positive(m_eq.uo) && finite_positive(m_eq.lo),
          "carbon: equilibrium masses must be positive");
}

void TempParams::validate() const {
  require(finite_positive(c1), "temperature: c1 must be positive");
  require(finite_positive(c3), "temperature: c3 must be positive");
  require(finite_positive(c4), "temperature: c4 must be positive");
  require(finite_positive(f2xco2), "temperature: F2xCO2 must be positive");
  require(finite_positive(t2xco2), "temperature: climate sensitivity must be positive");
}

Reservoirs TransferMatrix::apply(const Reservoirs& m) const {
  const auto& b = *this;
  return {b(0, 0) * m.at + b(0, 1) * m.uo + b(0, 2) * m.lo,
          b(1, 0) * m.at + b(1, 1) * m.uo + b(1, 2) * m.lo,
          b(2, 0) * m.at + b(2, 1) * m.uo + b(2, 2) * m.lo};
}

TransferMatrix build_transfer_matrix(const CarbonParams& p, int dt) {
  p.validate();
  require(dt >= 1, "carbon: step length must be a positive number of years");
  const double f12 = dt * p.b12;
  const double f23 = dt * p.b23;
  const double f21 = f12 * p.r1();
  const double f32 = f23 * p.r2();

  TransferMatrix b;
  b(0, 0) = 1.0 - f12;
  b(1, 0) = f12;
  b(0, 1) = f21;
  b(1, 1) = 1.0 - f21 - f23;
  b(2, 1) = f23;
  b(1, 2) = f32;
  b(2, 2) = 1.0 - f32;
  for (double v : b.a) {
    require(v >= 0.0, "carbon: transfer matrix has a negative entry at this step length");
  }
  return b;
}

Reservoirs step_carbon(const Reservoirs& m, const CarbonParams& p, double e, int dt) {
  require(dt >= 1, "carbon: step length must be a positive number of years");
  require(std::isfinite(e), "carbon: emissions must be finite");
  require(dt * (p.b12 * (1.0 + p.r1()) + p.b23) < 1.0,
          "carbon: step length too long for the transfer coefficients");
  Reservoirs next = build_transfer_matrix(p, dt).apply(m);
  next.at += dt * e;
  require(next.at >= 0.0 && next.uo >= 0.0 && next.lo >= 0.0,
          "carbon: reservoir mass became negative");
  return next;
}

double forcing(double m_at, double m_base, double f_ex, const TempParams& p) {
  if (!(m_at > 0.0) || !(m_base > 0.0)) {
    throw std::domain_error("forcing: atmospheric and reference mass must be positive");
  }
  return p.f2xco2 * std::log2(m_at / m_base) + f_ex;
}

Temperatures step_temperature(const Temperatures& t, double f, const TempParams& p, int dt) {
  require(dt >= 1, "temperature: step length must be a positive number of years");
  require(std::isfinite(f), "temperature: forcing must be finite");
  require(dt * p.c1 * (p.lambda() + p.c3) < 2.0,
          "temperature: step length too long for the energy balance coefficients");
  const double lam = p.lambda();
  return {t.at + dt * p.c1 * (f - lam * t.at - p.c3 * (t.at - t.oc)),
          t.oc + dt * p.c4 * (t.at - t.oc)};
}

void check_step_stability(const CarbonParams& c, const TempParams& t, int dt) {
  require(dt >= 1, "step length must be a positive number of years");
  require(dt * (c.b12 * (1.0 + c.r1()) + c.b23) < 1.0,
          "carbon cycle unstable at dt=" + std::to_string(dt));
  require(dt * t.c1 * (t.lambda() + t.c3) < 2.0,
          "energy balance unstable at dt=" + std::to_string(dt));
  build_transfer_matrix(c, dt);
}

int ClimatePreset::resolve_dt(int requested) const {
  const int dt = requested == 0 ? native_dt : requested;
  require(dt >= 1, name + ": step length must be a positive number of years");
  if (dt_locked && dt != native_dt) {
    throw ValidationError(name + ": coefficients are only valid at dt=" +
                          std::to_string(native_dt));
  }
  check_step_stability(carbon, temp, dt);
  return dt;
}

void ClimatePreset::validate() const {
  carbon.validate();
  temp.validate();
  require(native_dt >= 1, name + ": native step must be positive");
  require(finite_positive(m_base), name + ": forcing reference mass must be positive");
  check_step_stability(carbon, temp, native_dt);
}

namespace {

ClimatePreset make_cdice() {
  ClimatePreset p;
  p.name = "CDICE";
  p.carbon = {0.053, 0.0042, {0.607, 0.600, 1.772}};
  p.temp = {0.137, 0.73, 0.00689, 3.45, 3.25};
  p.native_dt = 1;
  p.initial = {{0.85009, 0.7649, 1.79912}, {1.2778, 0.3132}};
  p.m_base = 0.607;
  return p;
}

ClimatePreset make_dice2016() {
  ClimatePreset p;
  p.name = "DICE-2016";
  // Annual-rate storage of the 5-year coefficients; only valid at dt = 5.
  p.carbon = {0.024, 0.0014, {0.588, 0.360, 1.720}};
  p.temp = {0.0201, 0.088, 0.005, 3.6813, 3.1};
  p.native_dt = 5;
  p.dt_locked = true;
  p.initial = {{0.851, 0.460, 1.740}, {0.85, 0.0068}};
  p.m_base = 0.588;
  return p;
}

ClimatePreset make_dice2016_bf() {
  ClimatePreset p = make_dice2016();
  p.name = "DICE-2016-BF";
  p.temp.c1 = 0.1005;
  p.temp.c3 = 0.876;
  p.temp.c4 = 0.005;
  p.native_dt = 1;
  p.dt_locked = false;
  return p;
}

ClimatePreset make_geoffroy(const std::string& model, TempParams t) {
  ClimatePreset p = make_cdice();
  p.name = "CDICE-" + model;
  p.temp = t;
  return p;
}

ClimatePreset make_dice2007() {
  ClimatePreset p;
  p.name = "DICE-2007";
  p.carbon = {0.0189288, 0.005, {0.587473, 1.143894, 18.340}};
  p.temp = {0.022, 0.3, 0.01, 3.8, 3.0};
  p.native_dt = 10;
  p.initial = {{0.8089, 1.255, 18.365}, {0.7307, 0.0068}};
  p.m_base = 0.5964;
  return p;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "CDICE", "CDICE-HadGEM2-ES", "CDICE-GISS-E2-R", "DICE-2016", "DICE-2016-BF", "DICE-2007"};
  return names;
}

ClimatePreset preset(std::string_view name) {
  if (name == "CDICE") return make_cdice();
  if (name == "CDICE-HadGEM2-ES") return make_geoffroy("HadGEM2-ES", {0.154, 0.55, 0.00671, 2.95, 4.55});
  if (name == "CDICE-GISS-E2-R") return make_geoffroy("GISS-E2-R", {0.213, 1.16, 0.00921, 3.65, 2.15});
  if (name == "DICE-2016") return make_dice2016();
  if (name == "DICE-2016-BF") return make_dice2016_bf();
  if (name == "DICE-2007") return make_dice2007();
  throw ValidationError("unknown climate preset: " + std::string(name));
}

std::vector<ClimateState> run_climate(const ClimatePreset& preset, const ClimateState& initial,
                                      const ClimateDrive& drive, int dt, int n_steps) {
  require(n_steps >= 0, "run_climate: negative step count");
  check_step_stability(preset.carbon, preset.temp, dt);
  const bool conc = drive.kind == DriveKind::Concentration;
  const auto needed = static_cast<std::size_t>(conc ? n_steps + 1 : n_steps);
  require(drive.values.size() >= needed, "run_climate: driver path shorter than the run");
  require(drive.f_ex.empty() || drive.f_ex.size() >= static_cast<std::size_t>(n_steps),
          "run_climate: exogenous forcing path shorter than the run");

  std::vector<ClimateState> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 1);
  ClimateState s = initial;
  if (conc) s.m.at = drive.values[0];
  out.push_back(s);
  for (int k = 0; k < n_steps; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double f_co2 = forcing(s.m.at, preset.m_base, 0.0, preset.temp);
    const double f_ex = (drive.f_ex.empty() ? 0.0 : drive.f_ex[ku]) + drive.co2_share * f_co2;
    ClimateState next;
    next.t = step_temperature(s.t, f_co2 + f_ex, preset.temp, dt);
    if (conc) {
      next.m = s.m;
      next.m.at = drive.values[ku + 1];
    } else {
      next.m = step_carbon(s.m, preset.carbon, drive.values[ku], dt);
    }
    s = next;
    out.push_back(s);
  }
  return out;
}

}  // namespace cdice::climate
