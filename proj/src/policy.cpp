#include "cdice/policy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>

#include "cdice/errors.hpp"
#include "cdice/optimizer.hpp"

namespace cdice::policy {

using climate::ClimateState;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

double co2_share(econ::ForcingMode mode) {
  return mode == econ::ForcingMode::Proportional ? econ::kProportionalNonCo2 : 0.0;
}

}  // namespace

void PolicyProblem::validate() const {
  econ.validate();
  exo.validate();
  require(econ.t_step == exo.t_step, "policy: economy and exogenous laws use different periods");
  climate.resolve_dt(econ.t_step);
  require(horizon_years >= 500, "policy: horizon must cover at least 500 years");
  require(continuation_years >= 0, "policy: negative continuation");
  require(periods() >= 2, "policy: horizon shorter than two periods");
  require(first_period >= 0, "policy: negative period offset");
  require(k0 > 0.0, "policy: initial capital must be positive");
  require(x0.m.at > 0.0 && x0.m.uo >= 0.0 && x0.m.lo >= 0.0, "policy: invalid initial carbon masses");
  require(mu_upper >= 0.0 && mu_upper <= 1.0, "policy: mitigation bound must lie in [0, 1]");
  require(s_lower >= 0.0 && s_lower <= s_upper && s_upper < 1.0, "policy: invalid savings bounds");
  require(max_iterations > 0 && tolerance > 0.0, "policy: invalid solver settings");
  // Weight of the discarded tail relative to the first period.
  require(std::pow(econ::discount_factor(econ), total_periods()) <= 0.3,
          "policy: horizon too short for the discount rate");
}

PolicyProblem make_problem(const std::string& preset, double rho, Scenario scenario,
                           bool howard_sterner, econ::ForcingMode fex, int dt) {
  require(rho > 0.0 && rho < 1.0, "policy: discount rate must lie in (0, 1)");
  PolicyProblem p;
  p.climate = climate::preset(preset);
  dt = p.climate.resolve_dt(dt);
  const bool v2007 = preset == "DICE-2007";
  p.econ = v2007 ? econ::dice2007_econ(dt) : econ::dice2016_econ(dt);
  p.exo = v2007 ? econ::dice2007_exogenous(dt) : econ::dice2016_exogenous(dt);
  p.econ.rho = rho;
  if (howard_sterner) p.econ = econ::howard_sterner(p.econ);
  p.fex_mode = fex;
  p.scenario = scenario;
  p.horizon_years = rho < 0.005 ? 1000 : 600;
  // Held-policy tail long enough that the discount weight left out is
  // below kTruncationWeight; 400 years at minimum.
  const int needed = static_cast<int>(std::ceil(std::log(kTruncationWeight) / -std::log1p(rho)));
  p.continuation_years = std::max(400, (needed - p.horizon_years + dt - 1) / dt * dt);
  p.x0 = p.climate.initial;
  p.k0 = p.econ.k0;
  p.validate();
  return p;
}

struct Model::Path {
  std::vector<double> k;
  std::vector<std::array<double, 3>> m;
  std::vector<std::array<double, 2>> t;
  std::vector<double> yg, om, th, yn, c, x, e, util;
};

Model::Model(PolicyProblem problem) : p_(std::move(problem)) {
  p_.validate();
  n_ = static_cast<std::size_t>(p_.periods());
  total_ = static_cast<std::size_t>(p_.total_periods());
  exo_ = econ::build_exogenous_path(p_.exo, p_.econ.theta2, static_cast<int>(total_), p_.first_period);
  const double beta = econ::discount_factor(p_.econ);
  discount_.resize(total_);
  double w = 1.0;
  for (std::size_t t = 0; t < total_; ++t) {
    discount_[t] = w;
    w *= beta;
  }
}

std::vector<double> Model::initial_controls() const {
  std::vector<double> u(2 * n_);
  for (std::size_t t = 0; t < n_; ++t) {
    u[t] = std::clamp(0.25, p_.s_lower, p_.s_upper);
    const double year = static_cast<double>(t) * p_.dt();
    const double mu = p_.scenario == Scenario::Bau ? 0.0 : 0.03 * std::pow(1.01, year);
    u[n_ + t] = std::clamp(mu, 0.0, p_.scenario == Scenario::Bau ? 0.0 : p_.mu_upper);
  }
  return u;
}

std::vector<double> Model::lower_bounds() const {
  std::vector<double> lo(2 * n_, 0.0);
  for (std::size_t t = 0; t < n_; ++t) lo[t] = p_.s_lower;
  return lo;
}

std::vector<double> Model::upper_bounds() const {
  std::vector<double> hi(2 * n_);
  for (std::size_t t = 0; t < n_; ++t) {
    hi[t] = p_.s_upper;
    hi[n_ + t] = p_.scenario == Scenario::Bau ? 0.0 : p_.mu_upper;
  }
  return hi;
}

Model::Path Model::forward(std::span<const double> u, const ClimateState& x0, double k0) const {
  require(u.size() == 2 * n_, "policy: control vector has the wrong size");
  const auto& ep = p_.econ;
  const auto& cp = p_.climate;
  const int dt = ep.t_step;
  const auto b = climate::build_transfer_matrix(cp.carbon, dt);
  const double share = co2_share(p_.fex_mode);
  const double lam = cp.temp.lambda();
  const double dep = std::pow(1.0 - ep.delta_k, dt);
  const double ex = 1.0 - 1.0 / ep.ies;
  const double cscale = econ::consumption_scale(ep);

  Path P;
  const std::size_t T = total_;
  P.k.resize(T + 1);
  P.m.resize(T + 1);
  P.t.resize(T + 1);
  for (auto* v : {&P.yg, &P.om, &P.th, &P.yn, &P.c, &P.x, &P.e, &P.util}) v->resize(T);
  P.k[0] = k0;
  P.m[0] = {x0.m.at, x0.m.uo, x0.m.lo};
  P.t[0] = {x0.t.at, x0.t.oc};

  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t j = std::min(t, n_ - 1);
    const double s = u[j];
    const double mu = u[n_ + j];
    const double K = P.k[t];
    if (!(K > 0.0)) throw ValidationError("policy: capital became non-positive");
    const auto& M = P.m[t];
    const auto& Tm = P.t[t];
    const double L = exo_.labor[t];
    const double yg = exo_.tfp[t] * std::pow(L / ep.labor_divisor, 1.0 - ep.alpha) * std::pow(K, ep.alpha);
    const double om = econ::damages(Tm[0], ep);
    const double th = exo_.theta1[t] * std::pow(mu, ep.theta2);
    const double yn = ep.damage_form == econ::DamageForm::Multiplicative2007
                          ? yg * (1.0 - om) * (1.0 - th)
                          : yg * (1.0 - om - th);
    const double c = (1.0 - s) * yn;
    if (!(c > 0.0)) throw ValidationError("policy: consumption became non-positive");
    const double x = c / L * cscale;
    const double e = exo_.sigma[t] * yg * (1.0 - mu) + exo_.e_land[t];
    P.yg[t] = yg;
    P.om[t] = om;
    P.th[t] = th;
    P.yn[t] = yn;
    P.c[t] = c;
    P.x[t] = x;
    P.e[t] = e;
    const double felicity = std::abs(ex) < 1e-12 ? std::log(x) : (std::pow(x, ex) - 1.0) / ex;
    P.util[t] = discount_[t] * dt * L * felicity;

    P.k[t + 1] = dep * K + dt * s * yn;
    const climate::Reservoirs next = b.apply({M[0], M[1], M[2]});
    P.m[t + 1] = {next.at + dt * e, next.uo, next.lo};
    if (!(M[0] > 0.0)) throw ValidationError("policy: atmospheric carbon became non-positive");
    const double f_co2 = cp.temp.f2xco2 * std::log2(M[0] / cp.m_base);
    const double f_ex = p_.fex_mode == econ::ForcingMode::Proportional ? share * f_co2 : exo_.f_ex[t];
    const double f = f_co2 + f_ex;
    P.t[t + 1] = {Tm[0] + dt * cp.temp.c1 * (f - lam * Tm[0] - cp.temp.c3 * (Tm[0] - Tm[1])),
                  Tm[1] + dt * cp.temp.c4 * (Tm[0] - Tm[1])};
  }
  return P;
}

void Model::backward(const Path& P, std::span<const double> u, std::span<double> grad,
                     Costates* co) const {
  const auto& ep = p_.econ;
  const auto& cp = p_.climate;
  const int dt = ep.t_step;
  const auto b = climate::build_transfer_matrix(cp.carbon, dt);
  const double share = co2_share(p_.fex_mode);
  const double lam = cp.temp.lambda();
  const double dep = std::pow(1.0 - ep.delta_k, dt);
  const double ex = 1.0 - 1.0 / ep.ies;
  const double cscale = econ::consumption_scale(ep);
  const double kappa = cp.temp.f2xco2 / std::numbers::ln2 * (1.0 + share);
  const bool mult = ep.damage_form == econ::DamageForm::Multiplicative2007;
  const std::size_t T = total_;

  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  if (co) {
    co->k.assign(T + 1, 0.0);
    co->m.assign(T + 1, {0.0, 0.0, 0.0});
    co->t.assign(T + 1, {0.0, 0.0});
  }
  double lk = 0.0;
  std::array<double, 3> lm{0.0, 0.0, 0.0};
  std::array<double, 2> lt{0.0, 0.0};

  for (std::size_t t = T; t-- > 0;) {
    const std::size_t j = std::min(t, n_ - 1);
    const double s = u[j];
    const double mu = u[n_ + j];
    const double K = P.k[t];
    const double Tat = P.t[t][0];
    const double yg = P.yg[t];
    const double om = P.om[t];
    const double th = P.th[t];
    const double yn = P.yn[t];
    const double sigma = exo_.sigma[t];

    const double du_dc = discount_[t] * dt * cscale * std::pow(P.x[t], ex - 1.0);
    const double a_yn = du_dc * (1.0 - s) + lk * dt * s;
    const double a_e = lm[0] * dt;

    const double poly = ep.psi1 * Tat + ep.psi2 * Tat * Tat;
    const double dpoly = ep.psi1 + 2.0 * ep.psi2 * Tat;
    const double dom = mult ? dpoly / ((1.0 + poly) * (1.0 + poly)) : dpoly;
    const double dth = exo_.theta1[t] * ep.theta2 * std::pow(mu, ep.theta2 - 1.0);
    double dyn_dyg, dyn_dt, dyn_dmu;
    if (mult) {
      dyn_dyg = (1.0 - om) * (1.0 - th);
      dyn_dt = -yg * dom * (1.0 - th);
      dyn_dmu = -yg * (1.0 - om) * dth;
    } else {
      dyn_dyg = 1.0 - om - th;
      dyn_dt = -yg * dom;
      dyn_dmu = -yg * dth;
    }
    const double a_yg = a_yn * dyn_dyg + a_e * sigma * (1.0 - mu);

    if (!grad.empty()) {
      grad[j] += -du_dc * yn + lk * dt * yn;
      grad[n_ + j] += a_yn * dyn_dmu - a_e * sigma * yg;
    }

    const double nk = a_yg * ep.alpha * yg / K + lk * dep;
    std::array<double, 3> nm{};
    for (int c = 0; c < 3; ++c) {
      nm[static_cast<std::size_t>(c)] = b(0, c) * lm[0] + b(1, c) * lm[1] + b(2, c) * lm[2];
    }
    nm[0] += lt[0] * dt * cp.temp.c1 * kappa / P.m[t][0];
    const std::array<double, 2> nt{
        a_yn * dyn_dt + lt[0] * (1.0 - dt * cp.temp.c1 * (lam + cp.temp.c3)) + lt[1] * dt * cp.temp.c4,
        lt[0] * dt * cp.temp.c1 * cp.temp.c3 + lt[1] * (1.0 - dt * cp.temp.c4)};
    lk = nk;
    lm = nm;
    lt = nt;
    if (co) {
      co->k[t] = lk;
      co->m[t] = lm;
      co->t[t] = lt;
    }
  }
}

double Model::welfare(std::span<const double> u, std::span<double> grad) const {
  const Path P = forward(u, p_.x0, p_.k0);
  double w = 0.0;
  for (double v : P.util) w += v;
  if (!grad.empty()) {
    require(grad.size() == 2 * n_, "policy: gradient buffer has the wrong size");
    backward(P, u, grad, nullptr);
  }
  return w;
}

double Model::welfare_from(std::span<const double> u, const ClimateState& x0, double k0) const {
  const Path P = forward(u, x0, k0);
  double w = 0.0;
  for (double v : P.util) w += v;
  return w;
}

Costates Model::costates(std::span<const double> u) const {
  const Path P = forward(u, p_.x0, p_.k0);
  Costates co;
  backward(P, u, {}, &co);
  return co;
}

Trajectory Model::simulate(std::span<const double> u) const {
  const Path P = forward(u, p_.x0, p_.k0);
  Costates co;
  backward(P, u, {}, &co);
  Trajectory tr;
  const double dt = p_.dt();
  for (std::size_t t = 0; t < n_; ++t) {
    tr.year.push_back(p_.start_year + static_cast<double>(t) * dt);
    tr.climate.push_back({{P.m[t][0], P.m[t][1], P.m[t][2]}, {P.t[t][0], P.t[t][1]}});
    tr.k.push_back(P.k[t]);
    tr.c.push_back(P.c[t]);
    tr.y_gross.push_back(P.yg[t]);
    tr.y_net.push_back(P.yn[t]);
    tr.damage_frac.push_back(P.om[t]);
    tr.abate_frac.push_back(P.th[t]);
    tr.emissions.push_back(P.e[t]);
    tr.s.push_back(u[t]);
    tr.mu.push_back(u[n_ + t]);
    tr.scc.push_back(-co.m[t][0] / co.k[t] / kReportDivisor);
    tr.welfare += P.util[t];
  }
  for (std::size_t t = n_; t < total_; ++t) tr.welfare += P.util[t];
  tr.carbon_tax = carbon_tax(tr, exo_, p_.econ);
  for (double mu : tr.mu) tr.tax_flagged.push_back(mu >= 0.99 ? 1 : 0);
  return tr;
}

double Trajectory::at_year(const std::vector<double>& series, double y) const {
  require(!year.empty() && y >= year.front() && y <= year.back(), "trajectory: year out of range");
  const auto it = std::upper_bound(year.begin(), year.end(), y);
  if (it == year.end()) return series.back();
  const auto i = static_cast<std::size_t>(it - year.begin());
  const double w = (y - year[i - 1]) / (year[i] - year[i - 1]);
  return series[i - 1] + w * (series[i] - series[i - 1]);
}

Table Trajectory::table() const {
  Table t({"year", "m_at", "m_uo", "m_lo", "t_at", "t_oc", "k", "c", "y_gross", "y_net",
           "damage_frac", "mu", "s", "emissions", "scc", "carbon_tax"});
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& x = climate[i];
    t.add_row({year[i], x.m.at, x.m.uo, x.m.lo, x.t.at, x.t.oc, k[i], c[i], y_gross[i], y_net[i],
               damage_frac[i], mu[i], s[i], emissions[i], scc[i], carbon_tax[i]});
  }
  return t;
}

std::vector<double> carbon_tax(const Trajectory& tr, const econ::ExogenousPath& exo,
                               const econ::EconParams& ep) {
  require(exo.size() >= tr.size(), "carbon tax: exogenous path shorter than the trajectory");
  std::vector<double> out;
  out.reserve(tr.size());
  for (std::size_t t = 0; t < tr.size(); ++t) {
    const double mu = tr.mu[t];
    out.push_back(exo.theta1[t] * ep.theta2 * std::pow(mu, ep.theta2 - 1.0) / exo.sigma[t] /
                  kReportDivisor);
  }
  return out;
}

namespace {

// Preconditioner: period-t controls carry discount weight beta^t.
std::vector<double> control_scaling(const PolicyProblem& p, std::size_t n) {
  const double beta = econ::discount_factor(p.econ);
  std::vector<double> d(2 * n);
  for (std::size_t t = 0; t < n; ++t) {
    d[t] = d[n + t] = std::pow(beta, -static_cast<double>(t));
  }
  return d;
}

}  // namespace

Solution solve(const PolicyProblem& problem, std::optional<std::vector<double>> warm_start) {
  const Model model(problem);
  const std::size_t n = model.periods();
  opt::Box box{model.lower_bounds(), model.upper_bounds()};
  std::vector<double> u0 = warm_start ? *warm_start : model.initial_controls();
  require(u0.size() == 2 * n, "policy: warm start has the wrong size");
  box.project(u0);

  opt::LbfgsOptions o;
  o.max_iterations = problem.max_iterations;
  o.tolerance = problem.tolerance;
  o.scaling = control_scaling(problem, n);

  // Objective scale: unit preconditioned gradient at the start point.
  std::vector<double> g(2 * n);
  model.welfare(u0, g);
  double gmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (box.lower[i] < box.upper[i]) gmax = std::max(gmax, o.scaling[i] * std::abs(g[i]));
  }
  const double scale = gmax > 0.0 ? 1.0 / gmax : 1.0;
  const opt::Objective f = [&](std::span<const double> u, std::span<double> grad) {
    const double w = model.welfare(u, grad);
    for (double& v : grad) v *= -scale;
    return -scale * w;
  };
  auto r = opt::minimize_box(f, u0, box, o);

  Solution sol;
  sol.info.iterations = r.iterations;
  sol.info.evaluations = r.evaluations;
  sol.info.residual = r.residual;
  sol.info.message = r.message;
  sol.info.objective_scale = scale;
  // A stalled line search this close to stationarity is rounding-limited.
  sol.info.converged = r.converged || r.residual <= 100.0 * problem.tolerance;
  if (!sol.info.converged) {
    throw ConvergenceError("policy solver did not converge (" + r.message + ", residual " +
                           format_cell(r.residual) + " after " + std::to_string(r.iterations) +
                           " iterations)");
  }
  sol.controls = std::move(r.x);
  sol.trajectory = model.simulate(sol.controls);
  sol.trajectory.converged = true;
  return sol;
}

Solution solve_bau(const PolicyProblem& problem) {
  require(problem.scenario == Scenario::Bau, "solve_bau: problem is not a BAU problem");
  return solve(problem);
}

Solution solve_optimal(const PolicyProblem& problem) {
  require(problem.scenario == Scenario::Optimal, "solve_optimal: problem is not an optimal-policy problem");
  return solve(problem);
}

std::vector<double> scc(const PolicyProblem& problem, const Trajectory& trajectory) {
  if (!trajectory.converged) throw ValidationError("scc: trajectory is not a converged optimum");
  const Model model(problem);
  const std::size_t n = model.periods();
  require(trajectory.size() == n, "scc: trajectory does not match the problem horizon");
  std::vector<double> u(2 * n);
  for (std::size_t t = 0; t < n; ++t) {
    u[t] = trajectory.s[t];
    u[n + t] = trajectory.mu[t];
  }
  const auto co = model.costates(u);
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = -co.m[t][0] / co.k[t] / kReportDivisor;
  return out;
}

double scc_finite_difference(const PolicyProblem& problem, const Solution& base, double rel_step) {
  auto value = [&](double dm, double dk) {
    PolicyProblem p = problem;
    p.x0.m.at += dm;
    p.k0 += dk;
    return solve(p, base.controls).trajectory.welfare;
  };
  const double hm = rel_step * problem.x0.m.at;
  const double hk = rel_step * problem.k0;
  const double dv_dm = (value(hm, 0.0) - value(-hm, 0.0)) / (2.0 * hm);
  const double dv_dk = (value(0.0, hk) - value(0.0, -hk)) / (2.0 * hk);
  return -dv_dm / dv_dk / kReportDivisor;
}

std::vector<SweepCell> sweep_cells(const std::vector<std::string>& presets,
                                   const std::vector<double>& rhos, const std::vector<bool>& damages,
                                   const std::vector<econ::ForcingMode>& forcings) {
  std::vector<SweepCell> out;
  for (const auto& p : presets) {
    for (double r : rhos) {
      for (bool hs : damages) {
        for (auto f : forcings) out.push_back({p, r, hs, f});
      }
    }
  }
  return out;
}

std::vector<SweepResult> sweep(const std::vector<SweepCell>& cells, Scenario scenario,
                               parallel::Execution exec) {
  return parallel::map_indices<SweepResult>(
      cells.size(),
      [&](std::size_t i) {
        const auto& c = cells[i];
        const auto problem = make_problem(c.preset, c.rho, scenario, c.howard_sterner, c.fex);
        return SweepResult{c, solve(problem)};
      },
      exec);
}

void write_sweep_summary(std::ostream& out, const std::vector<SweepResult>& results) {
  out << "preset,rho,damage,fex,scc_start,scc_2020,t_at_2100,t_at_peak_300y,mu_2050,iterations\n";
  for (const auto& r : results) {
    const auto& tr = r.solution.trajectory;
    double peak = 0.0;
    for (std::size_t i = 0; i < tr.size() && tr.year[i] <= tr.year.front() + 300.0; ++i) {
      peak = std::max(peak, tr.climate[i].t.at);
    }
    std::vector<double> t_at;
    for (const auto& x : tr.climate) t_at.push_back(x.t.at);
    out << r.cell.preset << ',' << format_cell(r.cell.rho) << ','
        << (r.cell.howard_sterner ? "howard-sterner" : "nordhaus") << ','
        << (r.cell.fex == econ::ForcingMode::Proportional ? "proportional" : "linear") << ','
        << format_cell(tr.scc.front()) << ',' << format_cell(tr.at_year(tr.scc, 2020.0)) << ','
        << format_cell(tr.at_year(t_at, 2100.0)) << ',' << format_cell(peak) << ','
        << format_cell(tr.at_year(tr.mu, 2050.0)) << ',' << r.solution.info.iterations << '\n';
  }
}

}  // namespace cdice::policy
