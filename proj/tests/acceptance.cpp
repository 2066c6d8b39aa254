// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed
// here and nowhere else. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cdice/calibrate.hpp"
#include "cdice/cli.hpp"
#include "cdice/climate.hpp"
#include "cdice/drivers.hpp"
#include "cdice/policy.hpp"
#include "cdice/scenarios.hpp"

using namespace cdice;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "[x] ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

std::vector<double> t_at(const policy::Trajectory& tr) {
  std::vector<double> v;
  for (const auto& s : tr.climate) v.push_back(s.t.at);
  return v;
}

double peak(const std::vector<double>& v, std::size_t n) {
  return *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(n, v.size())));
}

Outcome eigen_diagnostics() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = calibrate::carbon_eigen(climate::preset("DICE-2016").carbon, 5);
  const auto c = calibrate::carbon_eigen(climate::preset("CDICE").carbon, 1);
  std::ostringstream out, err;
  const char* argv[] = {"cdice", "calibrate", "eigen", "--preset", "DICE-2016", "--out-dir", "acceptance_out"};
  const int code = cli::run(7, argv, out, err);
  const double secs = seconds_since(t0);
  o.require(round4(d.ev_fast) == 0.6796 && round4(d.ev_slow) == 0.9959,
            fmt("DICE-2016 EVs %.4f %.4f", d.ev_fast, d.ev_slow));
  o.require(std::abs(d.half_life_fast - 9) <= 1 && std::abs(d.half_life_slow - 851) <= 1,
            fmt("half-lives %.2f %.2f", d.half_life_fast, d.half_life_slow));
  o.require(round4(c.ev_fast) == 0.8912 && round4(c.ev_slow) == 0.9966,
            fmt("CDICE EVs %.4f %.4f", c.ev_fast, c.ev_slow));
  o.require(std::abs(c.half_life_fast - 6) <= 1 && std::abs(c.half_life_slow - 201) <= 1,
            fmt("half-lives %.2f %.2f", c.half_life_fast, c.half_life_slow));
  o.require(code == 0 && out.str().find("0.6796 0.9959") != std::string::npos, "cli report");
  o.require(secs < 1.0, fmt("%.3f s", secs));
  return o;
}

Outcome ebm_timescales() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = calibrate::ebm_timescales(climate::preset("CDICE").temp);
  const auto d = calibrate::ebm_timescales(climate::preset("DICE-2016").temp);
  const double secs = seconds_since(t0);
  // Compared as reported, in whole years.
  auto near = [](double v, double ref, double tol) { return std::abs(std::round(v) - ref) <= tol; };
  o.require(near(c.fast, 4, 1) && near(c.slow, 249, 1), fmt("CDICE %.2f / %.2f yr", c.fast, c.slow));
  o.require(near(d.fast, 40, 2) && near(d.slow, 219, 2), fmt("DICE-2016 %.2f / %.2f yr", d.fast, d.slow));
  o.require(secs < 1.0, fmt("%.3f s", secs));
  return o;
}

Outcome abrupt_4x() {
  Outcome o;
  std::vector<scenarios::TemperatureRun> runs;
  double worst = 0.0;
  for (const char* name : {"CDICE-GISS-E2-R", "CDICE", "CDICE-HadGEM2-ES"}) {
    const auto t0 = std::chrono::steady_clock::now();
    runs.push_back(scenarios::test_abrupt_4xco2(climate::preset(name)));
    worst = std::max(worst, seconds_since(t0));
  }
  const double t1000 = runs[1].t_at_year(1000);
  o.require(std::abs(t1000 - 6.5) <= 0.025 * 6.5, fmt("CDICE T(1000) = %.4f K", t1000));
  bool ordered = true;
  for (std::size_t i = 1; i < runs[1].t_at.size(); ++i) {
    ordered = ordered && runs[0].t_at[i] < runs[1].t_at[i] && runs[1].t_at[i] < runs[2].t_at[i];
  }
  o.require(ordered, "GISS < MMM < HadGEM2 every year");
  o.require(worst < 1.0, fmt("slowest preset %.3f s", worst));
  return o;
}

Outcome ramp_1pct() {
  Outcome o;
  for (const auto& name : climate::preset_names()) {
    const auto p = climate::preset(name);
    const auto r = scenarios::test_1pct_ramp(p);
    const double twice_ecs = 2.0 * p.temp.t2xco2;
    o.require(r.t_quadruple < twice_ecs, name + fmt(" T(140) %.3f < %.3f", r.t_quadruple, twice_ecs));
    if (name == "CDICE") o.require(r.tcr >= 1.3 && r.tcr <= 2.3, fmt("CDICE TCR %.3f K", r.tcr));
    if (name == "CDICE" || name == "CDICE-HadGEM2-ES" || name == "CDICE-GISS-E2-R") {
      const double gap = twice_ecs / r.t_quadruple - 1.0;
      o.require(gap >= 0.4 && gap <= 0.7, name + fmt(" gap %.1f%%", 100 * gap));
    }
  }
  return o;
}

Outcome pulse() {
  Outcome o;
  const auto joos = drivers::load_joos_envelope(drivers::default_data_dir());
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = scenarios::test_pulse_100gtc(climate::preset("CDICE"));
  const double secs = seconds_since(t0);
  const auto d = scenarios::test_pulse_100gtc(climate::preset("DICE-2016"));
  bool inside = true;
  for (int y = 0; y <= 100; y += 10) {
    const double f = c.airborne_fraction[static_cast<std::size_t>(y / c.dt)];
    // The year-0 band is the single point 1.
    inside = inside && f >= joos.lower_at(y) - 1e-12 && f <= joos.upper_at(y) + 1e-12;
  }
  o.require(inside, "CDICE inside envelope to year 100");
  o.require(std::abs(c.peak_anomaly() - 0.2) <= 0.05, fmt("peak %.3f K", c.peak_anomaly()));
  o.require(std::abs(c.peak_year() - 7) <= 3, fmt("at year %.0f", c.peak_year()));
  const double d100 = d.airborne_fraction[static_cast<std::size_t>(100 / d.dt)];
  o.require(d100 > joos.upper_at(100), fmt("DICE-2016 year-100 fraction %.3f > %.3f", d100, joos.upper_at(100)));
  o.require(secs < 1.0, fmt("%.3f s", secs));
  return o;
}

Outcome rcp_conformance() {
  Outcome o;
  const auto dir = drivers::default_data_dir();
  const auto t0 = std::chrono::steady_clock::now();
  const auto rcp85 = drivers::load_scenario(dir, drivers::Rcp::RCP85);
  const double c = scenarios::test_rcp(climate::preset("CDICE"), rcp85, scenarios::RcpMode::EmissionDriven).ppm_at(2100);
  const double d =
      scenarios::test_rcp(climate::preset("DICE-2016"), rcp85, scenarios::RcpMode::EmissionDriven).ppm_at(2100);
  o.require(std::abs(c / 935.0 - 1.0) <= 0.05, fmt("CDICE RCP85 2100 %.1f ppm (%+.1f%%)", c, 100 * (c / 935 - 1)));
  o.require(std::abs(d / 935.0 - 1.0) <= 0.20, fmt("DICE-2016 %.1f ppm (%+.1f%%)", d, 100 * (d / 935 - 1)));
  for (auto id : drivers::future_rcps()) {
    const auto in = drivers::load_scenario(dir, id);
    const auto band = drivers::load_cmip5_temperature(dir, id);
    const double t = scenarios::test_rcp(climate::preset("CDICE"), in, scenarios::RcpMode::ConcentrationDriven)
                         .t_at_year(2100);
    o.require(t >= band.lower_at(2100) && t <= band.upper_at(2100),
              std::string(drivers::rcp_name(id)) + fmt(" %.2f K", t));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, fmt("%.2f s", secs));
  return o;
}

Outcome scc_2020() {
  Outcome o;
  const std::vector<std::pair<std::string, double>> expected{
      {"CDICE", 24.63}, {"DICE-2016", 30.02}, {"CDICE-HadGEM2-ES", 41.90}, {"CDICE-GISS-E2-R", 11.89}};
  double worst = 0.0;
  for (const auto& [name, ref] : expected) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = policy::solve(policy::make_problem(name, 0.015, policy::Scenario::Bau));
    worst = std::max(worst, seconds_since(t0));
    const double v = sol.trajectory.at_year(sol.trajectory.scc, 2020);
    o.require(std::abs(v / ref - 1.0) <= 0.10, name + fmt(" %.2f (%+.1f%%)", v, 100 * (v / ref - 1)));
  }
  o.require(worst < 300.0, fmt("slowest solve %.2f s", worst));
  return o;
}

Outcome optimal_orderings() {
  Outcome o;
  auto solve = [](const char* name, double rho) {
    return policy::solve(policy::make_problem(name, rho, policy::Scenario::Optimal)).trajectory;
  };
  const auto d = solve("DICE-2016", 0.015);
  const auto h = solve("CDICE-HadGEM2-ES", 0.015);
  // Compared on DICE-2016's five-year grid; crossing located by linear
  // interpolation of the difference.
  const auto dt = t_at(d), ht = t_at(h);
  double cross = -1.0;
  double prev = dt[0] - h.at_year(ht, d.year[0]);
  for (std::size_t i = 1; i < dt.size(); ++i) {
    const double diff = dt[i] - h.at_year(ht, d.year[i]);
    if (prev <= 0.0 && diff > 0.0) {
      const double y = d.year[i - 1] + (d.year[i] - d.year[i - 1]) * (-prev) / (diff - prev);
      cross = y - d.year[0];
      break;
    }
    prev = diff;
  }
  o.require(cross >= 80 && cross <= 110, fmt("crossing after %.0f years", cross));
  for (double rho : {0.05, 0.001}) {
    const auto dd = solve("DICE-2016", rho);
    const auto hh = solve("CDICE-HadGEM2-ES", rho);
    const double pd = peak(t_at(dd), 300), ph = peak(t_at(hh), 300);
    const bool ok = rho > 0.01 ? pd > ph : pd < ph;
    o.require(ok, fmt("rho %.3f", rho) + fmt(" peaks DICE-2016 %.2f vs HadGEM2 %.2f", pd, ph));
  }
  return o;
}

Outcome howard_sterner() {
  Outcome o;
  const auto tr = policy::solve(policy::make_problem("CDICE", 0.015, policy::Scenario::Optimal, true)).trajectory;
  const double p = peak(t_at(tr), tr.size());
  o.require(p < 2.5, fmt("peak %.3f K", p));
  return o;
}

Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(20240917);

  // Carbon mass conservation under random emissions.
  {
    const auto p = climate::preset("CDICE");
    std::uniform_real_distribution<double> e(0.0, 0.03);
    climate::ClimateDrive drive;
    for (int i = 0; i < 1000; ++i) drive.values.push_back(e(rng));
    const auto path = climate::run_climate(p, p.initial, drive, 1, 1000);
    double worst = 0.0, added = 0.0;
    const double m0 = p.initial.m.at + p.initial.m.uo + p.initial.m.lo;
    for (std::size_t i = 1; i < path.size(); ++i) {
      added += drive.values[i - 1];
      const double total = path[i].m.at + path[i].m.uo + path[i].m.lo;
      worst = std::max(worst, std::abs(total - (m0 + added)) / (m0 + added));
    }
    o.require(worst <= 1e-10, fmt("mass drift %.1e", worst));
  }

  // Equilibrium is a fixed point.
  {
    double worst = 0.0;
    for (const auto& name : climate::preset_names()) {
      auto p = climate::preset(name);
      p.m_base = p.carbon.m_eq.at;
      const int dt = p.resolve_dt(0);
      climate::ClimateDrive none;
      none.values.assign(static_cast<std::size_t>(200 / dt), 0.0);
      const auto path = climate::run_climate(p, p.equilibrium(), none, dt, 200 / dt);
      for (const auto& s : path) {
        worst = std::max({worst, std::abs(s.m.at / p.carbon.m_eq.at - 1), std::abs(s.m.uo / p.carbon.m_eq.uo - 1),
                          std::abs(s.m.lo / p.carbon.m_eq.lo - 1), std::abs(s.t.at), std::abs(s.t.oc)});
      }
    }
    o.require(worst <= 1e-12, fmt("equilibrium drift %.1e", worst));
  }

  // Analytic gradient against central differences.
  const auto problem = policy::make_problem("CDICE", 0.015, policy::Scenario::Optimal);
  {
    const policy::Model model(problem);
    const std::size_t n = model.periods();
    std::uniform_real_distribution<double> s(0.15, 0.35), mu(0.05, 0.9), dir(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      std::vector<double> u(2 * n), g(2 * n), d(2 * n);
      for (std::size_t t = 0; t < n; ++t) {
        u[t] = s(rng);
        u[n + t] = mu(rng);
      }
      for (auto& v : d) v = dir(rng);
      model.welfare(u, g);
      const double h = 1e-5;
      std::vector<double> up = u, dn = u;
      double an = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) {
        up[j] += h * d[j];
        dn[j] -= h * d[j];
        an += g[j] * d[j];
      }
      const double fd = (model.welfare(up) - model.welfare(dn)) / (2 * h);
      worst = std::max(worst, std::abs(fd - an) / std::abs(fd));
    }
    o.require(worst <= 1e-5, fmt("gradient error %.1e", worst));
  }

  // Costate SCC against re-optimized finite differences.
  {
    const auto bau_problem = policy::make_problem("CDICE", 0.015, policy::Scenario::Bau);
    const auto base = policy::solve(bau_problem);
    const double fd = policy::scc_finite_difference(bau_problem, base);
    const double rel = std::abs(base.trajectory.scc.front() / fd - 1.0);
    o.require(rel <= 1e-3, fmt("SCC costate vs FD %.1e", rel));
  }

  // Re-solving from a later state reproduces the remaining plan.
  {
    const auto base = policy::solve(problem);
    const std::size_t k = 50;
    auto p = problem;
    p.first_period = static_cast<int>(k);
    p.start_year += static_cast<int>(k);
    p.horizon_years -= static_cast<int>(k);
    p.x0 = base.trajectory.climate[k];
    p.k0 = base.trajectory.k[k];
    const auto tail = policy::solve(p);
    double worst = 0.0;
    for (std::size_t t = 0; t < 200; ++t) {
      worst = std::max({worst, std::abs(tail.trajectory.s[t] - base.trajectory.s[k + t]),
                        std::abs(tail.trajectory.mu[t] - base.trajectory.mu[k + t])});
    }
    o.require(worst < 1e-4, fmt("re-solve control gap %.1e", worst));
  }

  // Carbon-cycle fit recovers known parameters.
  {
    const auto dir = drivers::default_data_dir();
    const std::vector<drivers::ScenarioInputs> rcps{drivers::load_scenario(dir, drivers::Rcp::RCP26),
                                                    drivers::load_scenario(dir, drivers::Rcp::RCP85)};
    const auto truth = climate::preset("CDICE").carbon;
    const auto targets = calibrate::synthetic_targets(truth, {10, 20, 30, 40, 50, 60, 70, 80, 90, 100}, rcps);
    auto start = climate::preset("DICE-2016").carbon;
    start.m_eq.at = truth.m_eq.at;
    const auto r = calibrate::fit_carbon(start, targets, {});
    const double e12 = std::abs(r.fitted.b12 / truth.b12 - 1), e23 = std::abs(r.fitted.b23 / truth.b23 - 1);
    o.require(r.objective_final < 1e-4 && e12 < 0.1 && e23 < 0.1,
              fmt("fit b12 %.1f%%", 100 * e12) + fmt(", b23 %.1f%%", 100 * e23));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 carbon-cycle eigen diagnostics", eigen_diagnostics},
      {"AC2 energy-balance timescales", ebm_timescales},
      {"AC3 abrupt 4xCO2", abrupt_4x},
      {"AC4 1%/yr concentration ramp", ramp_1pct},
      {"AC5 100 GtC pulse", pulse},
      {"AC6 RCP conformance", rcp_conformance},
      {"AC7 business-as-usual SCC at 2020", scc_2020},
      {"AC8 optimal warming orderings", optimal_orderings},
      {"AC9 Howard-Sterner peak warming", howard_sterner},
      {"AC10 property suites", properties},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed;
}
