#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "cdice/climate.hpp"
#include "cdice/drivers.hpp"
#include "cdice/parallel.hpp"

namespace cdice::calibrate {

/// Eigen-structure of the per-step transfer matrix. The unit eigenvalue
/// carries total mass; the other two set the decay of a perturbation.
struct CarbonEigen {
  double unit_ev = 1.0;
  double ev_fast = 1.0;
  double ev_slow = 1.0;
  double half_life_fast = 0.0;  // years; +inf when the mode does not decay
  double half_life_slow = 0.0;
  bool real = true;

  bool finite() const;
};

/// Closed form. Throws ValidationError if the discriminant is negative.
CarbonEigen carbon_eigen(const climate::CarbonParams& p, int dt);

/// Eigenvalues of the assembled matrix from a general-purpose solver,
/// sorted ascending.
std::array<double, 3> carbon_eigen_numeric(const climate::CarbonParams& p, int dt);

struct EbmTimescales {
  double fast = 0.0;  // years
  double slow = 0.0;  // years
};

/// From the continuous-time two-layer system matrix.
EbmTimescales ebm_timescales(const climate::TempParams& p);

struct FitTargets {
  std::vector<int> pulse_years;         // years after the pulse
  std::vector<double> pulse_fraction;   // remaining airborne fraction
  std::vector<double> rcp_ppm_2100;     // one per entry of `rcp_inputs`
  std::vector<drivers::ScenarioInputs> rcp_inputs;
};

struct FitWeights {
  double pulse = 1.0;
  double rcp = 1.0;
};

struct FitOptions {
  double initial_step = 0.5;  // in log-parameter units
  double min_step = 1e-6;
  int max_iterations = 2000;
  parallel::Execution execution = parallel::Execution::Parallel;
};

struct FitReport {
  climate::CarbonParams initial;
  climate::CarbonParams fitted;
  double objective_initial = 0.0;
  double objective_final = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  CarbonEigen eigen_before;
  CarbonEigen eigen_after;
  std::vector<double> history;  // objective after every accepted or rejected poll

  void write_text(std::ostream& out) const;
  void write_csv(std::ostream& out) const;
};

/// Airborne fraction of a unit pulse after `years` under annual stepping.
double pulse_fraction(const climate::CarbonParams& p, int years);

/// Emission-driven atmospheric concentration (ppm) in 2100 for a scenario
/// started from the parameters' own equilibrium in 1850.
double concentration_2100(const climate::CarbonParams& p, const drivers::ScenarioInputs& in);

/// Weighted sum of squared relative deviations from the targets.
double fit_objective(const climate::CarbonParams& p, const FitTargets& t, const FitWeights& w);

/// Compass search over log(b12), log(b23), log(M_EQ^UO), log(M_EQ^LO) with
/// M_EQ^AT held fixed. The objective never increases between iterations;
/// the search stops when the step falls below `min_step`.
FitReport fit_carbon(const climate::CarbonParams& initial, const FitTargets& targets,
                     const FitWeights& weights, const FitOptions& options = {});

/// Targets produced by the given parameters themselves.
FitTargets synthetic_targets(const climate::CarbonParams& truth, const std::vector<int>& pulse_years,
                             const std::vector<drivers::ScenarioInputs>& rcps);

}  // namespace cdice::calibrate
