#include "cdice/econ.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdice/errors.hpp"

namespace cdice::econ {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

void EconParams::validate() const {
  require(alpha > 0.0 && alpha < 1.0, "econ: alpha must lie in (0, 1)");
  require(delta_k > 0.0 && delta_k < 1.0, "econ: capital depreciation must lie in (0, 1)");
  require(rho > 0.0, "econ: rate of time preference must be positive");
  require(theta2 > 1.0, "econ: abatement cost exponent must exceed 1");
  require(psi2 >= 0.0 && psi1 >= 0.0, "econ: damage coefficients must be non-negative");
  require(ies > 0.0, "econ: elasticity of substitution must be positive");
  require(t_step >= 1, "econ: period length must be a positive number of years");
  require(labor_divisor > 0.0, "econ: labor divisor must be positive");
  require(k0 > 0.0, "econ: initial capital must be positive");
}

void ExogenousParams::validate() const {
  require(t_step >= 1, "exogenous: period length must be a positive number of years");
  require(l0 > 0.0 && l_inf >= l0 && delta_l >= 0.0, "exogenous: invalid labor constants");
  require(a0 > 0.0 && delta_a > 0.0, "exogenous: invalid productivity constants");
  require(sigma0 > 0.0 && delta_sigma > 0.0, "exogenous: invalid carbon intensity constants");
  require(p_back0 > 0.0 && c2co2 > 0.0, "exogenous: invalid backstop constants");
  require(e_land0 >= 0.0 && delta_land >= 0.0, "exogenous: invalid land emission constants");
  require(f_ex_years > 0.0, "exogenous: forcing ramp length must be positive");
}

double labor(double t, const ExogenousParams& p) {
  return p.l0 + (p.l_inf - p.l0) * (1.0 - std::exp(-p.t_step * p.delta_l * t));
}

double growth_labor(double t, const ExogenousParams& p) {
  return labor(t + 1.0, p) / labor(t, p) - 1.0;
}

double tfp(double t, const ExogenousParams& p) {
  const double ts = p.t_step;
  return p.a0 * std::exp(ts * p.g_a0 * (1.0 - std::exp(-ts * p.delta_a * t)) / (ts * p.delta_a));
}

double carbon_intensity(double t, const ExogenousParams& p) {
  const double ts = p.t_step;
  if (p.intensity_form == IntensityForm::Dice2007) {
    return p.sigma0 *
           std::exp(ts * p.g_sigma0 * (1.0 - std::exp(-ts * p.delta_sigma * t)) / (ts * p.delta_sigma));
  }
  const double base = 1.0 + ts * p.delta_sigma;
  return p.sigma0 * std::exp(ts * p.g_sigma0 / std::log(base) * (std::pow(base, t) - 1.0));
}

double abatement_coeff(double t, const ExogenousParams& p, double theta2) {
  const double decay = std::exp(-p.t_step * p.g_back * t);
  const double sigma = carbon_intensity(t, p);
  if (p.backstop_form == BackstopForm::Dice2007) {
    return p.p_back0 * (1.0 + decay) * 1000.0 * sigma / theta2;
  }
  return p.p_back0 * decay * 1000.0 * p.c2co2 * sigma / theta2;
}

double land_emissions(double t, const ExogenousParams& p) {
  return p.e_land0 * std::exp(-p.t_step * p.delta_land * t);
}

double exogenous_forcing(double t, const ExogenousParams& p, ForcingMode mode,
                         std::optional<double> f_co2) {
  if (mode == ForcingMode::Proportional) {
    require(f_co2.has_value(), "exogenous forcing: proportional mode needs the CO2 forcing");
    return kProportionalNonCo2 * *f_co2;
  }
  const double ramp = p.f_ex_years / p.t_step;
  return p.f_ex0 + (p.f_ex1 - p.f_ex0) * std::min(t, ramp) / ramp;
}

ExogenousPath build_exogenous_path(const ExogenousParams& p, double theta2, int n_periods,
                                   int first_period) {
  p.validate();
  require(n_periods >= 0 && first_period >= 0, "exogenous: negative period count");
  ExogenousPath out;
  const auto n = static_cast<std::size_t>(n_periods);
  out.labor.resize(n);
  out.tfp.resize(n);
  out.sigma.resize(n);
  out.theta1.resize(n);
  out.e_land.resize(n);
  out.f_ex.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(first_period) + static_cast<double>(i);
    out.labor[i] = labor(t, p);
    out.tfp[i] = tfp(t, p);
    out.sigma[i] = carbon_intensity(t, p);
    out.theta1[i] = abatement_coeff(t, p, theta2);
    out.e_land[i] = land_emissions(t, p);
    out.f_ex[i] = exogenous_forcing(t, p, ForcingMode::LinearRamp);
  }
  return out;
}

double gross_output(double k, double labor, double tfp, const EconParams& p) {
  require(k > 0.0, "econ: capital must be positive");
  return tfp * std::pow(labor / p.labor_divisor, 1.0 - p.alpha) * std::pow(k, p.alpha);
}

double damages(double t_at, const EconParams& p) {
  const double poly = p.psi1 * t_at + p.psi2 * t_at * t_at;
  if (p.damage_form == DamageForm::Multiplicative2007) return 1.0 - 1.0 / (1.0 + poly);
  return poly;
}

double abatement_cost(double mu, double theta1, double theta2) {
  return theta1 * std::pow(mu, theta2);
}

EconStep step_economy(const EconState& state, const Controls& u, double t_at, std::size_t t,
                      const EconParams& p, const ExogenousPath& exo) {
  require(t < exo.size(), "econ: period beyond the exogenous path");
  require(u.mu >= 0.0 && u.mu <= 1.0, "econ: mitigation rate must lie in [0, 1]");
  require(u.s >= 0.0 && u.s <= 1.0, "econ: savings rate must lie in [0, 1]");
  EconStep r;
  r.y_gross = gross_output(state.k, exo.labor[t], exo.tfp[t], p);
  r.damage_frac = damages(t_at, p);
  r.abate_frac = abatement_cost(u.mu, exo.theta1[t], p.theta2);
  if (p.damage_form == DamageForm::Multiplicative2007) {
    r.y_net = r.y_gross * (1.0 - r.damage_frac) * (1.0 - r.abate_frac);
  } else {
    r.y_net = r.y_gross * (1.0 - r.damage_frac - r.abate_frac);
  }
  r.investment = u.s * r.y_net;
  r.consumption = (1.0 - u.s) * r.y_net;
  require(r.consumption > 0.0, "econ: consumption must stay positive");
  r.k_next = std::pow(1.0 - p.delta_k, p.t_step) * state.k + p.t_step * r.investment;
  require(r.k_next >= 0.0, "econ: capital became negative");
  r.e_industrial = exo.sigma[t] * r.y_gross * (1.0 - u.mu);
  r.emissions = r.e_industrial + exo.e_land[t];
  return r;
}

double consumption_scale(const EconParams& p) {
  return p.utility_scale == UtilityScale::PerCapitaThousands2016 ? 1.0 / 1000.0 : 1.0;
}

double period_utility(double c, double l, const EconParams& p) {
  require(c > 0.0 && l > 0.0, "utility: consumption and population must be positive");
  const double x = c / l * consumption_scale(p);
  const double e = 1.0 - 1.0 / p.ies;
  if (std::abs(e) < 1e-12) return l * std::log(x);
  return l * (std::pow(x, e) - 1.0) / e;
}

double discount_factor(const EconParams& p) { return std::pow(1.0 + p.rho, -p.t_step); }

EconParams dice2016_econ(int t_step) {
  EconParams p;
  p.t_step = t_step;
  return p;
}

EconParams dice2007_econ(int t_step) {
  EconParams p;
  p.t_step = t_step;
  p.psi1 = 0.0;
  p.psi2 = 0.0028388;
  p.theta2 = 2.8;
  p.ies = 0.5;
  p.labor_divisor = 1.0;
  p.k0 = 137.0;
  p.damage_form = DamageForm::Multiplicative2007;
  p.utility_scale = UtilityScale::PerCapita2007;
  return p;
}

EconParams howard_sterner(EconParams base) {
  base.psi1 = 0.0;
  base.psi2 = 0.007438;
  base.damage_form = DamageForm::Subtractive2016;
  return base;
}

ExogenousParams dice2016_exogenous(int t_step) {
  ExogenousParams p;
  p.t_step = t_step;
  return p;
}

ExogenousParams dice2007_exogenous(int t_step) {
  ExogenousParams p;
  p.t_step = t_step;
  p.l0 = 6514.0;
  p.l_inf = 8600.0;
  p.delta_l = 0.035;
  p.a0 = 0.02722;
  p.g_a0 = 0.0092;
  p.delta_a = 0.001;
  p.intensity_form = IntensityForm::Dice2007;
  p.sigma0 = 0.00013418;
  p.g_sigma0 = -0.0073;
  p.delta_sigma = 0.003;
  p.backstop_form = BackstopForm::Dice2007;
  p.p_back0 = 0.585;
  p.g_back = 0.005;
  p.e_land0 = 0.0011;
  p.delta_land = 0.01;
  p.f_ex0 = -0.06;
  p.f_ex1 = 0.3;
  p.f_ex_years = 100.0;
  return p;
}

}  // namespace cdice::econ
