#include "cdice/calibrate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cdice/errors.hpp"
#include "cdice/table.hpp"

namespace cdice::calibrate {

using climate::CarbonParams;

namespace {

double half_life(double ev, int dt) {
  if (ev >= 1.0) return std::numeric_limits<double>::infinity();
  if (ev <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return dt * std::log(0.5) / std::log(ev);
}

}  // namespace

bool CarbonEigen::finite() const {
  return real && std::isfinite(half_life_fast) && std::isfinite(half_life_slow);
}

CarbonEigen carbon_eigen(const CarbonParams& p, int dt) {
  p.validate();
  if (dt < 1) throw ValidationError("eigen: step length must be positive");
  const double a = dt * p.b12;
  const double c = dt * p.b23;
  const double r1 = p.r1();
  const double r2 = p.r2();
  const double g = 1.0 - a * (1.0 + r1) - c * (1.0 + r2);
  const double f = a * c * (1.0 + r2 * (1.0 + r1));
  const double disc = (1.0 - g) * (1.0 - g) - 4.0 * f;
  if (disc < 0.0) throw ValidationError("eigen: complex eigenvalues (negative discriminant)");
  const double h = std::sqrt(disc);
  CarbonEigen e;
  e.ev_fast = (1.0 + g - h) / 2.0;
  e.ev_slow = (1.0 + g + h) / 2.0;
  e.half_life_fast = half_life(e.ev_fast, dt);
  e.half_life_slow = half_life(e.ev_slow, dt);
  return e;
}

std::array<double, 3> carbon_eigen_numeric(const CarbonParams& p, int dt) {
  const auto b = climate::build_transfer_matrix(p, dt);
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = b(i, j);
  }
  Eigen::EigenSolver<Eigen::Matrix3d> solver(m, false);
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const auto ev = solver.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-12) throw ValidationError("eigen: complex eigenvalue");
    out[static_cast<std::size_t>(i)] = ev.real();
  }
  std::sort(out.begin(), out.end());
  return out;
}

EbmTimescales ebm_timescales(const climate::TempParams& p) {
  if (!(p.c1 > 0.0) || !(p.f2xco2 > 0.0) || !(p.t2xco2 > 0.0) || p.c3 < 0.0 || p.c4 < 0.0) {
    throw ValidationError("timescales: invalid energy balance parameters");
  }
  const double a11 = -p.c1 * (p.lambda() + p.c3);
  const double a12 = p.c1 * p.c3;
  const double a21 = p.c4;
  const double a22 = -p.c4;
  const double tr = a11 + a22;
  const double det = a11 * a22 - a12 * a21;
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) throw ValidationError("timescales: complex eigenvalues");
  const double h = std::sqrt(disc);
  const double fast_ev = (tr - h) / 2.0;
  const double slow_ev = (tr + h) / 2.0;
  EbmTimescales t;
  t.fast = -1.0 / fast_ev;
  t.slow = slow_ev < 0.0 ? -1.0 / slow_ev : std::numeric_limits<double>::infinity();
  return t;
}

double pulse_fraction(const CarbonParams& p, int years) {
  const auto b = climate::build_transfer_matrix(p, 1);
  climate::Reservoirs m{1.0, 0.0, 0.0};
  for (int y = 0; y < years; ++y) m = b.apply(m);
  return m.at;
}

double concentration_2100(const CarbonParams& p, const drivers::ScenarioInputs& in) {
  const auto b = climate::build_transfer_matrix(p, 1);
  climate::Reservoirs m = p.m_eq;
  for (int y = 1850; y < 2100; ++y) {
    m = b.apply(m);
    m.at += in.emissions.at(y) / 1000.0;
  }
  return drivers::mass_to_concentration(m.at);
}

namespace {

bool admissible(const CarbonParams& p) {
  if (!(p.b12 > 0.0 && p.b12 < 1.0 && p.b23 > 0.0 && p.b23 < 1.0)) return false;
  if (!(p.m_eq.uo > 0.0 && p.m_eq.lo > 0.0 && std::isfinite(p.m_eq.uo) && std::isfinite(p.m_eq.lo))) {
    return false;
  }
  return p.b12 * (1.0 + p.r1()) + p.b23 < 1.0;
}

}  // namespace

double fit_objective(const CarbonParams& p, const FitTargets& t, const FitWeights& w) {
  if (t.pulse_years.size() != t.pulse_fraction.size() ||
      t.rcp_inputs.size() != t.rcp_ppm_2100.size()) {
    throw ValidationError("fit: targets are not aligned");
  }
  double pulse = 0.0;
  if (w.pulse != 0.0 && !t.pulse_years.empty()) {
    // One pass through the pulse decay covering all target years.
    const auto b = climate::build_transfer_matrix(p, 1);
    climate::Reservoirs m{1.0, 0.0, 0.0};
    int year = 0;
    for (std::size_t i = 0; i < t.pulse_years.size(); ++i) {
      if (t.pulse_years[i] < year) throw ValidationError("fit: pulse years must be increasing");
      for (; year < t.pulse_years[i]; ++year) m = b.apply(m);
      const double d = m.at - t.pulse_fraction[i];
      pulse += d * d;
    }
    pulse /= static_cast<double>(t.pulse_years.size());
  }
  double rcp = 0.0;
  if (w.rcp != 0.0 && !t.rcp_inputs.empty()) {
    for (std::size_t i = 0; i < t.rcp_inputs.size(); ++i) {
      const double d = concentration_2100(p, t.rcp_inputs[i]) / t.rcp_ppm_2100[i] - 1.0;
      rcp += d * d;
    }
    rcp /= static_cast<double>(t.rcp_inputs.size());
  }
  return w.pulse * pulse + w.rcp * rcp;
}

namespace {

using Coords = std::array<double, 4>;

Coords to_coords(const CarbonParams& p) {
  return {std::log(p.b12), std::log(p.b23), std::log(p.m_eq.uo), std::log(p.m_eq.lo)};
}

CarbonParams from_coords(const Coords& x, double m_eq_at) {
  CarbonParams p;
  p.b12 = std::exp(x[0]);
  p.b23 = std::exp(x[1]);
  p.m_eq = {m_eq_at, std::exp(x[2]), std::exp(x[3])};
  return p;
}

}  // namespace

FitReport fit_carbon(const CarbonParams& initial, const FitTargets& targets,
                     const FitWeights& weights, const FitOptions& options) {
  if (!admissible(initial)) throw ValidationError("fit: initial parameters outside the feasible set");
  if (weights.pulse < 0.0 || weights.rcp < 0.0) throw ValidationError("fit: weights must be non-negative");
  if (!(options.initial_step > 0.0) || !(options.min_step > 0.0)) {
    throw ValidationError("fit: step sizes must be positive");
  }
  const double m_at = initial.m_eq.at;
  auto objective = [&](const CarbonParams& p) {
    if (!admissible(p)) return std::numeric_limits<double>::infinity();
    return fit_objective(p, targets, weights);
  };

  FitReport rep;
  rep.initial = initial;
  rep.eigen_before = carbon_eigen(initial, 1);
  Coords x = to_coords(initial);
  double fx = objective(initial);
  if (!std::isfinite(fx)) throw ValidationError("fit: objective is not finite at the initial point");
  rep.objective_initial = fx;
  rep.evaluations = 1;

  double step = options.initial_step;
  bool moved = false;
  while (step >= options.min_step && rep.iterations < options.max_iterations) {
    ++rep.iterations;
    const auto trial = [&](std::size_t k) {
      Coords y = x;
      y[k / 2] += (k % 2 == 0 ? step : -step);
      return y;
    };
    const auto values = parallel::map_indices<double>(
        8, [&](std::size_t k) { return objective(from_coords(trial(k), m_at)); }, options.execution);
    rep.evaluations += 8;
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
      if (values[k] < values[best]) best = k;
    }
    if (values[best] < fx) {
      x = trial(best);
      fx = values[best];
      moved = true;
    } else {
      step /= 2.0;
    }
    rep.history.push_back(fx);
  }
  rep.converged = step < options.min_step;
  rep.fitted = moved ? from_coords(x, m_at) : initial;
  rep.objective_final = fx;
  rep.fitted.validate();
  rep.eigen_after = carbon_eigen(rep.fitted, 1);
  return rep;
}

FitTargets synthetic_targets(const CarbonParams& truth, const std::vector<int>& pulse_years,
                             const std::vector<drivers::ScenarioInputs>& rcps) {
  FitTargets t;
  t.pulse_years = pulse_years;
  for (int y : pulse_years) t.pulse_fraction.push_back(pulse_fraction(truth, y));
  t.rcp_inputs = rcps;
  for (const auto& r : rcps) t.rcp_ppm_2100.push_back(concentration_2100(truth, r));
  return t;
}

void FitReport::write_text(std::ostream& out) const {
  auto line = [&](const char* label, const CarbonParams& p, const CarbonEigen& e) {
    out << label << ": b12=" << format_cell(p.b12) << " b23=" << format_cell(p.b23)
        << " M_EQ=(" << format_cell(p.m_eq.at) << ", " << format_cell(p.m_eq.uo) << ", "
        << format_cell(p.m_eq.lo) << ") half-lives " << format_cell(e.half_life_fast) << " / "
        << format_cell(e.half_life_slow) << " yr\n";
  };
  line("initial", initial, eigen_before);
  line("fitted ", fitted, eigen_after);
  out << "objective " << format_cell(objective_initial) << " -> " << format_cell(objective_final)
      << " after " << iterations << " iterations, " << evaluations << " evaluations"
      << (converged ? "" : " (iteration cap reached)") << '\n';
}

void FitReport::write_csv(std::ostream& out) const {
  Table t({"which", "b12", "b23", "m_eq_at", "m_eq_uo", "m_eq_lo", "half_life_fast",
           "half_life_slow", "objective"});
  t.add_row({0, initial.b12, initial.b23, initial.m_eq.at, initial.m_eq.uo, initial.m_eq.lo,
             eigen_before.half_life_fast, eigen_before.half_life_slow, objective_initial});
  t.add_row({1, fitted.b12, fitted.b23, fitted.m_eq.at, fitted.m_eq.uo, fitted.m_eq.lo,
             eigen_after.half_life_fast, eigen_after.half_life_slow, objective_final});
  t.write_csv(out);
}

}  // namespace cdice::calibrate
