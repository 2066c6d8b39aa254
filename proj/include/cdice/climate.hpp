#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace cdice::climate {

/// Carbon masses of the three reservoirs, in 1000 GtC.
struct Reservoirs {
  double at = 0.0;
  double uo = 0.0;
  double lo = 0.0;

  double total() const { return at + uo + lo; }
};

/// Temperature anomalies above pre-industrial, in K.
struct Temperatures {
  double at = 0.0;
  double oc = 0.0;
};

struct ClimateState {
  Reservoirs m;
  Temperatures t;
};

/// 1000 GtC of atmospheric carbon per ppm CO2 (851 GtC <-> 400 ppm).
inline constexpr double kMassPerPpm = 2.1275e-3;

/// Three-box carbon cycle. Transfer coefficients are annual rates; the
/// equilibrium masses fix the return flows through r1 and r2.
struct CarbonParams {
  double b12 = 0.0;  // atmosphere -> upper ocean, 1/yr
  double b23 = 0.0;  // upper ocean -> lower ocean, 1/yr
  Reservoirs m_eq;

  double r1() const { return m_eq.at / m_eq.uo; }
  double r2() const { return m_eq.uo / m_eq.lo; }

  void validate() const;
};

/// Two-layer energy balance model.
struct TempParams {
  double c1 = 0.0;      // K per (W/m2) per year
  double c3 = 0.0;      // W/m2 per K
  double c4 = 0.0;      // 1/yr
  double f2xco2 = 0.0;  // W/m2
  double t2xco2 = 0.0;  // K, equilibrium climate sensitivity

  double lambda() const { return f2xco2 / t2xco2; }

  void validate() const;
};

/// Column-stochastic 3x3 mass transfer matrix. Entry (dst, src) is the
/// fraction of reservoir `src` that ends up in `dst` after one step.
/// Index 0 = AT, 1 = UO, 2 = LO.
struct TransferMatrix {
  std::array<double, 9> a{};

  double operator()(int dst, int src) const { return a[3 * dst + src]; }
  double& operator()(int dst, int src) { return a[3 * dst + src]; }

  Reservoirs apply(const Reservoirs& m) const;
};

/// Assembles the transfer matrix for a step of `dt` years. Throws
/// ValidationError if any entry would be negative.
TransferMatrix build_transfer_matrix(const CarbonParams& p, int dt = 1);

/// One explicit step of the carbon cycle; `e` is the atmospheric inflow
/// in 1000 GtC per year, applied for the whole step.
Reservoirs step_carbon(const Reservoirs& m, const CarbonParams& p, double e, int dt);

/// Total radiative forcing: CO2 (logarithmic in mass) plus `f_ex`.
double forcing(double m_at, double m_base, double f_ex, const TempParams& p);

Temperatures step_temperature(const Temperatures& t, double f, const TempParams& p, int dt);

/// Throws ValidationError when explicit Euler would be unstable at `dt`.
void check_step_stability(const CarbonParams& c, const TempParams& t, int dt);

struct ClimatePreset {
  std::string name;
  CarbonParams carbon;
  TempParams temp;
  int native_dt = 1;
  bool dt_locked = false;  // true: coefficients only valid at native_dt
  ClimateState initial;    // 2015 state
  double m_base = 0.0;     // forcing reference mass, 1000 GtC

  /// Resolves a requested step (0 = native) and checks it is admissible.
  int resolve_dt(int requested) const;
  ClimateState equilibrium() const { return {carbon.m_eq, {0.0, 0.0}}; }
  void validate() const;
};

ClimatePreset preset(std::string_view name);
const std::vector<std::string>& preset_names();

enum class DriveKind { Emissions, Concentration };

/// Inputs of a climate-only run. `values` are atmospheric inflows (1000 GtC
/// per year, one per step) or prescribed atmospheric masses (1000 GtC, one
/// per recorded state including the initial one).
struct ClimateDrive {
  DriveKind kind = DriveKind::Emissions;
  std::vector<double> values;
  std::vector<double> f_ex;  // W/m2 per step; empty = none
  double co2_share = 0.0;    // adds co2_share * F_CO2 to the exogenous forcing
};

/// Integrates n_steps steps of dt years and returns n_steps + 1 states.
std::vector<ClimateState> run_climate(const ClimatePreset& preset, const ClimateState& initial,
                                      const ClimateDrive& drive, int dt, int n_steps);

}  // namespace cdice::climate
