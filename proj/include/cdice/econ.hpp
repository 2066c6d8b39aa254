#pragma once

#include <optional>
#include <vector>

namespace cdice::econ {

enum class DamageForm { Multiplicative2007, Subtractive2016 };
enum class UtilityScale { PerCapita2007, PerCapitaThousands2016 };
enum class IntensityForm { Dice2007, Dice2016 };
enum class BackstopForm { Dice2007, Dice2016 };
enum class ForcingMode { LinearRamp, Proportional };

/// Share of total forcing attributed to non-CO2 agents in proportional mode,
/// expressed relative to the CO2 forcing.
inline constexpr double kProportionalNonCo2 = 0.3;

struct EconParams {
  double delta_k = 0.1;   // capital depreciation, 1/yr
  double alpha = 0.3;     // capital share
  double psi1 = 0.0;      // linear damage coefficient, 1/K
  double psi2 = 0.00236;  // quadratic damage coefficient, 1/K^2
  double theta2 = 2.6;    // abatement cost exponent
  double ies = 0.67;      // intertemporal elasticity of substitution
  double rho = 0.015;     // pure rate of time preference, 1/yr
  int t_step = 1;         // years per period
  double labor_divisor = 1000.0;  // L is divided by this inside the production function
  double k0 = 223.0;              // initial capital, trillions USD
  DamageForm damage_form = DamageForm::Subtractive2016;
  UtilityScale utility_scale = UtilityScale::PerCapitaThousands2016;

  void validate() const;
};

/// Generating constants of the exogenous drivers.
struct ExogenousParams {
  int t_step = 1;
  // labor, millions
  double l0 = 7403.0, l_inf = 11500.0, delta_l = 0.0268;
  // total factor productivity
  double a0 = 5.115, g_a0 = 0.0152, delta_a = 0.005;
  // carbon intensity, 1000 GtC per trillion USD
  IntensityForm intensity_form = IntensityForm::Dice2016;
  double sigma0 = 0.00009556, g_sigma0 = -0.0152, delta_sigma = 0.001;
  // backstop price
  BackstopForm backstop_form = BackstopForm::Dice2016;
  double p_back0 = 0.55, g_back = 0.005, c2co2 = 3.666;
  // land-use emissions, 1000 GtC per year
  double e_land0 = 0.000709, delta_land = 0.023;
  // non-CO2 forcing ramp, W/m2
  double f_ex0 = 0.5, f_ex1 = 1.0, f_ex_years = 85.0;

  void validate() const;
};

/// Per-period exogenous arrays.
struct ExogenousPath {
  std::vector<double> labor;
  std::vector<double> tfp;
  std::vector<double> sigma;
  std::vector<double> theta1;
  std::vector<double> e_land;
  std::vector<double> f_ex;  // linear-ramp values

  std::size_t size() const { return labor.size(); }
};

double labor(double t, const ExogenousParams& p);
double growth_labor(double t, const ExogenousParams& p);
double tfp(double t, const ExogenousParams& p);
double carbon_intensity(double t, const ExogenousParams& p);
double abatement_coeff(double t, const ExogenousParams& p, double theta2);
double land_emissions(double t, const ExogenousParams& p);

/// Non-CO2 forcing at period t. Proportional mode needs the current CO2
/// forcing and throws ValidationError without it.
double exogenous_forcing(double t, const ExogenousParams& p, ForcingMode mode,
                         std::optional<double> f_co2 = std::nullopt);

ExogenousPath build_exogenous_path(const ExogenousParams& p, double theta2, int n_periods,
                                   int first_period = 0);

double gross_output(double k, double labor, double tfp, const EconParams& p);
double damages(double t_at, const EconParams& p);
double abatement_cost(double mu, double theta1, double theta2);

struct EconState {
  double k = 0.0;
  int period = 0;
};

struct Controls {
  double mu = 0.0;
  double s = 0.0;
};

struct EconStep {
  double k_next = 0.0;
  double consumption = 0.0;
  double investment = 0.0;
  double y_gross = 0.0;
  double y_net = 0.0;
  double damage_frac = 0.0;
  double abate_frac = 0.0;
  double e_industrial = 0.0;
  double emissions = 0.0;  // industrial + land, 1000 GtC per year
};

/// Advances capital by one period. Index `t` is relative to `exo`.
EconStep step_economy(const EconState& state, const Controls& u, double t_at, std::size_t t,
                      const EconParams& p, const ExogenousPath& exo);

/// Instantaneous utility of aggregate consumption `c` shared by `l` people,
/// already multiplied by `l`.
double period_utility(double c, double l, const EconParams& p);
double discount_factor(const EconParams& p);

/// Ratio applied to C/L before entering the felicity function.
double consumption_scale(const EconParams& p);

EconParams dice2016_econ(int t_step = 1);
EconParams dice2007_econ(int t_step = 10);
EconParams howard_sterner(EconParams base);
ExogenousParams dice2016_exogenous(int t_step = 1);
ExogenousParams dice2007_exogenous(int t_step = 10);

}  // namespace cdice::econ
