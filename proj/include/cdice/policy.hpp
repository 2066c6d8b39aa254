#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdice/climate.hpp"
#include "cdice/econ.hpp"
#include "cdice/parallel.hpp"
#include "cdice/table.hpp"

namespace cdice::policy {

enum class Scenario { Bau, Optimal };

/// Reported social cost of carbon and carbon tax are divided by this
/// carbon-to-CO2 mass ratio (the backstop price is quoted per ton of CO2).
inline constexpr double kReportDivisor = 3.666;

/// Discount weight beyond the continuation tail that make_problem accepts.
inline constexpr double kTruncationWeight = 1e-4;

struct PolicyProblem {
  climate::ClimatePreset climate;
  econ::EconParams econ;
  econ::ExogenousParams exo;
  econ::ForcingMode fex_mode = econ::ForcingMode::LinearRamp;
  Scenario scenario = Scenario::Optimal;
  int horizon_years = 600;
  int continuation_years = 400;
  int first_period = 0;  // offset into the exogenous laws
  int start_year = 2015;
  climate::ClimateState x0;
  double k0 = 0.0;
  double mu_upper = 1.0;
  double s_lower = 0.0;
  double s_upper = 0.99;
  int max_iterations = 20000;
  double tolerance = 1e-7;

  int dt() const { return econ.t_step; }
  int periods() const { return horizon_years / dt(); }
  int continuation_periods() const { return continuation_years / dt(); }
  int total_periods() const { return periods() + continuation_periods(); }
  void validate() const;
};

/// Standard problem for a named climate preset: DICE-2007 pairs with the
/// 2007 economy, every other preset with the 2016 economy. 600 optimized
/// years (1000 for rho < 0.005) plus a held-policy tail of at least 400
/// years, extended until the discount weight left out is kTruncationWeight.
PolicyProblem make_problem(const std::string& preset, double rho, Scenario scenario,
                           bool howard_sterner = false,
                           econ::ForcingMode fex = econ::ForcingMode::LinearRamp, int dt = 0);

/// Per-period record; vectors have one entry per optimized period.
struct Trajectory {
  std::vector<double> year;
  std::vector<climate::ClimateState> climate;
  std::vector<double> k, c, y_gross, y_net, damage_frac, abate_frac, emissions, mu, s;
  std::vector<double> scc;          // reported units
  std::vector<double> carbon_tax;   // reported units
  std::vector<char> tax_flagged;    // mu at its upper bound; tax understates the SCC
  double welfare = 0.0;
  bool converged = false;

  std::size_t size() const { return year.size(); }
  double at_year(const std::vector<double>& series, double y) const;
  Table table() const;
};

struct SolveInfo {
  int iterations = 0;
  int evaluations = 0;
  double residual = 0.0;
  bool converged = false;
  std::string message;
  double objective_scale = 1.0;  // scaled utils per unit of welfare
};

struct Solution {
  Trajectory trajectory;
  std::vector<double> controls;  // [s_0..s_{N-1}, mu_0..mu_{N-1}]
  SolveInfo info;
};

/// Costates (derivatives of welfare from period t onward with respect to
/// the state at t) along a simulated path.
struct Costates {
  std::vector<double> k;
  std::vector<std::array<double, 3>> m;
  std::vector<std::array<double, 2>> t;
};

/// Forward model, welfare and adjoint gradient for a fixed problem.
class Model {
 public:
  explicit Model(PolicyProblem problem);

  const PolicyProblem& problem() const { return p_; }
  std::size_t periods() const { return n_; }
  std::size_t controls_size() const { return 2 * n_; }

  /// Discounted welfare; `grad` (if non-empty) receives dW/du.
  double welfare(std::span<const double> u, std::span<double> grad = {}) const;
  double welfare_from(std::span<const double> u, const climate::ClimateState& x0, double k0) const;
  Costates costates(std::span<const double> u) const;
  Trajectory simulate(std::span<const double> u) const;

  std::vector<double> initial_controls() const;
  std::vector<double> lower_bounds() const;
  std::vector<double> upper_bounds() const;

 private:
  struct Path;
  Path forward(std::span<const double> u, const climate::ClimateState& x0, double k0) const;
  void backward(const Path& path, std::span<const double> u, std::span<double> grad,
                Costates* co) const;

  PolicyProblem p_;
  std::size_t n_ = 0;
  std::size_t total_ = 0;
  econ::ExogenousPath exo_;
  std::vector<double> discount_;
};

/// Throws ConvergenceError if the iteration cap is hit.
Solution solve(const PolicyProblem& problem, std::optional<std::vector<double>> warm_start = {});
Solution solve_bau(const PolicyProblem& problem);
Solution solve_optimal(const PolicyProblem& problem);

/// State-based SCC series in reported units from the costates.
std::vector<double> scc(const PolicyProblem& problem, const Trajectory& trajectory);
std::vector<double> carbon_tax(const Trajectory& trajectory, const econ::ExogenousPath& exo,
                               const econ::EconParams& econ);

/// SCC at t = 0 from central differences of the re-optimized welfare.
double scc_finite_difference(const PolicyProblem& problem, const Solution& base, double rel_step = 1e-4);

enum class SweepAxis { Rho, Damage, Forcing };

struct SweepCell {
  std::string preset;
  double rho = 0.015;
  bool howard_sterner = false;
  econ::ForcingMode fex = econ::ForcingMode::LinearRamp;
};

struct SweepResult {
  SweepCell cell;
  Solution solution;
};

std::vector<SweepCell> sweep_cells(const std::vector<std::string>& presets,
                                   const std::vector<double>& rhos,
                                   const std::vector<bool>& damages,
                                   const std::vector<econ::ForcingMode>& forcings);

std::vector<SweepResult> sweep(const std::vector<SweepCell>& cells, Scenario scenario,
                               parallel::Execution exec = parallel::Execution::Parallel);

void write_sweep_summary(std::ostream& out, const std::vector<SweepResult>& results);

}  // namespace cdice::policy
