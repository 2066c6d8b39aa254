#include "cdice/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "cdice/calibrate.hpp"
#include "cdice/config.hpp"
#include "cdice/drivers.hpp"
#include "cdice/errors.hpp"
#include "cdice/parallel.hpp"
#include "cdice/policy.hpp"
#include "cdice/scenarios.hpp"
#include "cdice/svg.hpp"

namespace cdice::cli {

namespace fs = std::filesystem;

namespace {

// Raw flag text keyed like the config file, so both go through one parser.
struct FlagSet {
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  std::string config_path;

  void attach(CLI::App& app) {
    auto add = [&](const std::string& key, const std::string& flag, const std::string& help) {
      opts[key] = app.add_option(flag, raw[key], help);
    };
    add("preset", "--preset", "climate preset (comma-separated for sweeps)");
    add("dt", "--dt", "time step in years, 0 for the preset's native step");
    add("horizon", "--horizon", "horizon in years, 0 for the protocol default");
    add("rho", "--rho", "pure rate of time preference");
    add("damage", "--damage", "nordhaus | howard-sterner");
    add("fex", "--fex", "non-CO2 forcing: default | none | proportional | linear");
    add("data_dir", "--data-dir", "fixture directory");
    add("out_dir", "--out-dir", "output directory");
    add("format", "--format", "csv | svg | both");
    add("execution", "--execution", "serial | parallel");
    app.add_option("--config", config_path, "key = value file; flags override it");
  }

  RunConfig resolve() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    std::map<std::string, std::string> given;
    for (const auto& [key, opt] : opts) {
      if (opt->count() > 0) given[key] = raw.at(key);
    }
    apply_values(cfg, given);
    cfg.validate();
    return cfg;
  }
};

struct Context {
  RunConfig cfg;
  fs::path data_dir;
  fs::path out_dir;
  parallel::Execution exec = parallel::Execution::Parallel;
  std::ostream& out;

  Context(RunConfig c, std::ostream& o) : cfg(std::move(c)), out(o) {
    data_dir = cfg.data_dir.empty() ? drivers::default_data_dir() : fs::path(cfg.data_dir);
    out_dir = cfg.out_dir;
    exec = parallel::parse_execution(cfg.execution);
    fs::create_directories(out_dir);
  }

  void save_table(const Table& t, const std::string& stem) const {
    if (cfg.wants_csv()) t.save_csv((out_dir / (stem + ".csv")).string());
  }
  void save_svg(const std::string& stem, const std::vector<svg::Line>& lines,
                const std::vector<svg::Band>& bands, const svg::ChartStyle& style) const {
    if (cfg.wants_svg()) svg::save_chart(out_dir / (stem + ".svg"), lines, bands, style);
  }
  void save_config(const std::string& stem) const {
    std::ofstream f(out_dir / (stem + ".cfg"));
    write_config(f, cfg);
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ValidationError("empty preset list");
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<double> to_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

scenarios::FexMode bench_fex(const RunConfig& cfg) {
  return cfg.fex == "default" ? scenarios::FexMode::Proportional : scenarios::parse_fex_mode(cfg.fex);
}

econ::ForcingMode policy_fex(const std::string& fex) {
  if (fex == "default" || fex == "linear") return econ::ForcingMode::LinearRamp;
  if (fex == "proportional") return econ::ForcingMode::Proportional;
  throw ValidationError("policy runs need --fex linear or proportional");
}

std::string fex_tag(econ::ForcingMode m) {
  return m == econ::ForcingMode::LinearRamp ? "linear" : "proportional";
}

// ---- bench ----------------------------------------------------------------

struct BenchResults {
  std::optional<scenarios::TemperatureRun> abrupt;
  std::optional<scenarios::RampRun> ramp;
  std::optional<scenarios::PulseRun> pulse;
  std::vector<scenarios::RcpRun> conc;
  std::vector<scenarios::RcpRun> emis;
};

void emit_abrupt(const Context& ctx, const scenarios::TemperatureRun& r) {
  const std::string stem = r.preset + "_test1_abrupt4x";
  ctx.save_table(r.table(), stem);
  ctx.save_svg(stem, {{"T_AT", r.years, r.t_at}, {"T_OC", r.years, r.t_oc}}, {},
               {"Abrupt 4xCO2: " + r.preset, "years", "temperature anomaly [K]"});
  ctx.out << "test1 " << r.preset << ": T_AT(" << r.years.back() << ") = " << format_cell(r.t_at.back())
          << " K\n";
}

void emit_ramp(const Context& ctx, const scenarios::RampRun& r) {
  const std::string stem = r.run.preset + "_test2_ramp1pct";
  ctx.save_table(r.run.table(), stem);
  ctx.save_svg(stem, {{"T_AT", r.run.years, r.run.t_at}, {"T_OC", r.run.years, r.run.t_oc}}, {},
               {"1% per year CO2: " + r.run.preset, "years", "temperature anomaly [K]"});
  ctx.out << "test2 " << r.run.preset << ": TCR = " << format_cell(r.tcr)
          << " K, T_AT(140) = " << format_cell(r.t_quadruple) << " K\n";
}

void emit_pulse(const Context& ctx, const scenarios::PulseRun& r, const drivers::BenchmarkSeries& joos) {
  const std::string stem = r.preset + "_test3_pulse";
  ctx.save_table(r.table(), stem);
  std::vector<svg::Band> bands;
  if (joos.envelope) bands.push_back({"benchmark range", to_double(joos.years), joos.envelope->lower, joos.envelope->upper});
  ctx.save_svg(stem, {{"airborne fraction", r.years, r.airborne_fraction}}, bands,
               {"100 GtC pulse: " + r.preset, "years after pulse", "fraction remaining"});
  ctx.out << "test3 " << r.preset << ": peak anomaly " << format_cell(r.peak_anomaly()) << " K in year "
          << format_cell(r.peak_year()) << '\n';
}

void emit_rcp(const Context& ctx, const scenarios::RcpRun& r, const drivers::BenchmarkSeries* cmip5) {
  const bool conc = r.mode == scenarios::RcpMode::ConcentrationDriven;
  const std::string stem = r.preset + "_test4_" + lower(std::string(drivers::rcp_name(r.rcp))) +
                           (conc ? "_concentration" : "_emission");
  ctx.save_table(r.table(), stem);
  const std::string title = std::string(drivers::rcp_name(r.rcp)) + (conc ? " concentration-driven: " : " emission-driven: ") + r.preset;
  if (conc) {
    std::vector<svg::Line> lines{{"T_AT", r.years, r.t_at}};
    std::vector<svg::Band> bands;
    if (cmip5) {
      lines.push_back({"CMIP5 mean", to_double(cmip5->years), cmip5->values});
      if (cmip5->envelope) bands.push_back({"CMIP5 range", to_double(cmip5->years), cmip5->envelope->lower, cmip5->envelope->upper});
    }
    ctx.save_svg(stem, lines, bands, {title, "year", "temperature anomaly [K]"});
    ctx.out << "test4 " << r.preset << ' ' << drivers::rcp_name(r.rcp) << " concentration-driven: T_AT(2100) = "
            << format_cell(r.t_at_year(2100.0)) << " K\n";
  } else {
    std::vector<svg::Band> bands(2);
    bands[0].label = "+-20%";
    bands[1].label = "+-5%";
    for (double f : r.prescribed_ppm) {
      bands[0].lower.push_back(0.8 * f);
      bands[0].upper.push_back(1.2 * f);
      bands[1].lower.push_back(0.95 * f);
      bands[1].upper.push_back(1.05 * f);
    }
    bands[0].x = bands[1].x = r.years;
    ctx.save_svg(stem, {{"computed", r.years, r.ppm}, {"prescribed", r.years, r.prescribed_ppm}}, bands,
                 {title, "year", "CO2 [ppm]"});
    ctx.out << "test4 " << r.preset << ' ' << drivers::rcp_name(r.rcp) << " emission-driven: ppm(2100) = "
            << format_cell(r.ppm_at(2100.0)) << " (prescribed " << format_cell(r.prescribed_ppm.back()) << ")\n";
  }
}

int cmd_bench(const Context& ctx, const std::string& which) {
  const bool all = which == "all";
  if (!all && which != "test1" && which != "test2" && which != "test3" && which != "test4") {
    throw ValidationError("bench: unknown test '" + which + "'");
  }
  const auto cp = climate::preset(ctx.cfg.preset);
  const int dt = ctx.cfg.dt;
  const int horizon = ctx.cfg.horizon;
  const auto fex = bench_fex(ctx.cfg);
  const bool need_rcp = all || which == "test4";
  const bool need_joos = all || which == "test3";

  const auto& rcps = drivers::future_rcps();
  std::vector<drivers::ScenarioInputs> inputs;
  std::vector<drivers::BenchmarkSeries> cmip5;
  if (need_rcp) {
    for (auto id : rcps) {
      inputs.push_back(drivers::load_scenario(ctx.data_dir, id));
      cmip5.push_back(drivers::load_cmip5_temperature(ctx.data_dir, id));
    }
  }
  drivers::BenchmarkSeries joos;
  if (need_joos) joos = drivers::load_joos_envelope(ctx.data_dir);

  BenchResults res;
  res.conc.resize(inputs.size());
  res.emis.resize(inputs.size());
  std::vector<std::function<void()>> tasks;
  if (all || which == "test1") tasks.push_back([&] { res.abrupt = scenarios::test_abrupt_4xco2(cp, horizon ? horizon : 1000, dt); });
  if (all || which == "test2") tasks.push_back([&] { res.ramp = scenarios::test_1pct_ramp(cp, horizon ? horizon : 140, dt); });
  if (all || which == "test3") tasks.push_back([&] { res.pulse = scenarios::test_pulse_100gtc(cp, 100.0, horizon ? horizon : 1000, dt); });
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    tasks.push_back([&, i] { res.conc[i] = scenarios::test_rcp(cp, inputs[i], scenarios::RcpMode::ConcentrationDriven, fex, dt); });
    tasks.push_back([&, i] { res.emis[i] = scenarios::test_rcp(cp, inputs[i], scenarios::RcpMode::EmissionDriven, fex, dt); });
  }
  parallel::for_each_index(tasks.size(), [&](std::size_t i) { tasks[i](); }, ctx.exec);

  if (res.abrupt) emit_abrupt(ctx, *res.abrupt);
  if (res.ramp) emit_ramp(ctx, *res.ramp);
  if (res.pulse) emit_pulse(ctx, *res.pulse, joos);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    emit_rcp(ctx, res.conc[i], &cmip5[i]);
    emit_rcp(ctx, res.emis[i], nullptr);
  }
  ctx.save_config("bench_" + which + "_" + cp.name);

  if (all) {
    const auto checks = scenarios::conformance(*res.abrupt, *res.ramp, *res.pulse, res.conc, res.emis, joos,
                                               cmip5, cp.temp.t2xco2);
    std::ofstream f(ctx.out_dir / (cp.name + "_conformance.csv"));
    scenarios::write_conformance(f, checks);
    int passed = 0;
    ctx.out << "conformance " << cp.name << ":\n";
    for (const auto& c : checks) {
      passed += c.passed();
      ctx.out << "  " << (c.passed() ? "pass " : "FAIL ") << c.name << " = " << format_cell(c.value) << " in ["
              << format_cell(c.lower) << ", " << format_cell(c.upper) << "]\n";
    }
    ctx.out << passed << "/" << checks.size() << " checks passed\n";
  }
  return kExitOk;
}

// ---- policy ---------------------------------------------------------------

std::string policy_stem(const std::string& preset, policy::Scenario sc, double rho, bool hs,
                        econ::ForcingMode fex) {
  return preset + (sc == policy::Scenario::Bau ? "_bau" : "_optimal") + "_rho" + drivers::format_number(rho) +
         (hs ? "_howard-sterner" : "_nordhaus") + "_" + fex_tag(fex);
}

std::vector<double> t_at_series(const policy::Trajectory& tr) {
  std::vector<double> v;
  for (const auto& x : tr.climate) v.push_back(x.t.at);
  return v;
}

void report_solution(const Context& ctx, const std::string& stem, const policy::Solution& s) {
  const auto& tr = s.trajectory;
  const auto t_at = t_at_series(tr);
  double peak = 0.0;
  for (double v : t_at) peak = std::max(peak, v);
  ctx.out << stem << ": iterations " << s.info.iterations << ", residual " << format_cell(s.info.residual)
          << "\n  SCC " << format_cell(tr.year.front()) << " = " << format_cell(tr.scc.front())
          << ", SCC 2020 = " << format_cell(tr.at_year(tr.scc, 2020.0))
          << ", T_AT 2100 = " << format_cell(tr.at_year(t_at, 2100.0))
          << " K, peak T_AT = " << format_cell(peak) << " K\n";
}

void emit_solution(const Context& ctx, const std::string& stem, const policy::Solution& s) {
  ctx.save_table(s.trajectory.table(), stem);
  const auto& tr = s.trajectory;
  ctx.save_svg(stem, {{"T_AT", tr.year, t_at_series(tr)}}, {}, {stem, "year", "temperature anomaly [K]"});
}

int cmd_policy(const Context& ctx, const std::string& which, const std::string& axis) {
  const bool hs = ctx.cfg.damage == "howard-sterner";
  const auto fex = policy_fex(ctx.cfg.fex);
  if (which == "bau" || which == "optimal") {
    const auto sc = which == "bau" ? policy::Scenario::Bau : policy::Scenario::Optimal;
    auto problem = policy::make_problem(ctx.cfg.preset, ctx.cfg.rho, sc, hs, fex, ctx.cfg.dt);
    if (ctx.cfg.horizon > 0) {
      problem.horizon_years = ctx.cfg.horizon;
      problem.validate();
    }
    const auto sol = policy::solve(problem);
    const std::string stem = policy_stem(problem.climate.name, sc, ctx.cfg.rho, hs, fex);
    emit_solution(ctx, stem, sol);
    report_solution(ctx, stem, sol);
    ctx.save_config("policy_" + stem);
    return kExitOk;
  }
  if (which != "sweep") throw ValidationError("policy: unknown mode '" + which + "'");

  std::vector<double> rhos{ctx.cfg.rho};
  std::vector<bool> damages{hs};
  std::vector<econ::ForcingMode> forcings{fex};
  if (axis == "rho") rhos = {0.001, 0.015, 0.05};
  else if (axis == "damage") damages = {false, true};
  else if (axis == "fex") forcings = {econ::ForcingMode::LinearRamp, econ::ForcingMode::Proportional};
  else throw ValidationError("policy sweep: unknown axis '" + axis + "'");

  const auto cells = policy::sweep_cells(split_list(ctx.cfg.preset), rhos, damages, forcings);
  const auto results = policy::sweep(cells, policy::Scenario::Optimal, ctx.exec);
  std::vector<svg::Line> lines;
  for (const auto& r : results) {
    const std::string stem = policy_stem(r.cell.preset, policy::Scenario::Optimal, r.cell.rho,
                                         r.cell.howard_sterner, r.cell.fex);
    ctx.save_table(r.solution.trajectory.table(), stem);
    report_solution(ctx, stem, r.solution);
    lines.push_back({stem, r.solution.trajectory.year, t_at_series(r.solution.trajectory)});
  }
  {
    std::ofstream f(ctx.out_dir / ("sweep_" + axis + "_summary.csv"));
    policy::write_sweep_summary(f, results);
  }
  ctx.save_svg("sweep_" + axis, lines, {}, {"Optimal T_AT, sweep over " + axis, "year", "temperature anomaly [K]"});
  ctx.save_config("sweep_" + axis);
  return kExitOk;
}

// ---- calibrate ------------------------------------------------------------

int cmd_calibrate(const Context& ctx, const std::string& which, const std::string& target) {
  const auto cp = climate::preset(ctx.cfg.preset);
  if (which == "eigen") {
    const int dt = cp.native_dt;
    const auto e = calibrate::carbon_eigen(cp.carbon, dt);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: eigenvalues %.4f %.4f %.4f; half-lives %.0f and %.0f years (%.2f, %.2f)\n",
                  cp.name.c_str(), e.unit_ev, e.ev_fast, e.ev_slow, e.half_life_fast, e.half_life_slow,
                  e.half_life_fast, e.half_life_slow);
    ctx.out << buf;
    Table t({"dt", "unit_ev", "ev_fast", "ev_slow", "half_life_fast", "half_life_slow"});
    t.add_row({double(dt), e.unit_ev, e.ev_fast, e.ev_slow, e.half_life_fast, e.half_life_slow});
    ctx.save_table(t, cp.name + "_eigen");
    ctx.save_config("calibrate_eigen_" + cp.name);
    return kExitOk;
  }
  if (which == "timescales") {
    const auto ts = calibrate::ebm_timescales(cp.temp);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: response timescales %.0f and %.0f years (%.2f, %.2f)\n", cp.name.c_str(),
                  ts.fast, ts.slow, ts.fast, ts.slow);
    ctx.out << buf;
    Table t({"tau_fast", "tau_slow"});
    t.add_row({ts.fast, ts.slow});
    ctx.save_table(t, cp.name + "_timescales");
    ctx.save_config("calibrate_timescales_" + cp.name);
    return kExitOk;
  }
  if (which != "fit") throw ValidationError("calibrate: unknown mode '" + which + "'");

  std::vector<drivers::ScenarioInputs> rcps{drivers::load_scenario(ctx.data_dir, drivers::Rcp::RCP26),
                                            drivers::load_scenario(ctx.data_dir, drivers::Rcp::RCP85)};
  calibrate::FitTargets targets;
  if (target == "joos") {
    const auto joos = drivers::load_joos_envelope(ctx.data_dir);
    if (!joos.envelope) throw ValidationError("calibrate fit: benchmark fixture has no envelope");
    for (std::size_t i = 0; i < joos.size(); ++i) {
      if (joos.years[i] <= 0) continue;
      targets.pulse_years.push_back(joos.years[i]);
      targets.pulse_fraction.push_back(0.5 * (joos.envelope->lower[i] + joos.envelope->upper[i]));
    }
    for (const auto& in : rcps) targets.rcp_ppm_2100.push_back(in.concentrations.at(2100.0));
    targets.rcp_inputs = rcps;
  } else if (target == "synthetic") {
    targets = calibrate::synthetic_targets(climate::preset("CDICE").carbon, {10, 20, 30, 40, 50, 60, 70, 80, 90, 100}, rcps);
  } else {
    throw ValidationError("calibrate fit: unknown target '" + target + "'");
  }
  calibrate::FitOptions opts;
  opts.execution = ctx.exec;
  const auto report = calibrate::fit_carbon(cp.carbon, targets, {}, opts);
  report.write_text(ctx.out);
  const std::string stem = "fit_" + cp.name + "_" + target;
  {
    std::ofstream f(ctx.out_dir / (stem + ".txt"));
    report.write_text(f);
  }
  if (ctx.cfg.wants_csv()) {
    std::ofstream f(ctx.out_dir / (stem + ".csv"));
    report.write_csv(f);
  }
  if (ctx.cfg.wants_svg()) {
    std::vector<double> x(report.history.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = double(i);
    std::vector<double> y;
    for (double v : report.history) y.push_back(std::log10(std::max(v, 1e-300)));
    svg::save_chart(ctx.out_dir / (stem + ".svg"), {{"log10 objective", x, y}}, {},
                    {"Carbon-cycle fit: " + cp.name, "poll", "log10 objective"});
  }
  ctx.save_config("calibrate_" + stem);
  return kExitOk;
}

// ---- spinup ---------------------------------------------------------------

int cmd_spinup(const Context& ctx, double target_ppm) {
  const auto cp = climate::preset(ctx.cfg.preset);
  const auto hist = drivers::load_scenario(ctx.data_dir, drivers::Rcp::Historical);
  const auto r = scenarios::spin_up_1850(cp, hist.emissions, target_ppm, bench_fex(ctx.cfg), ctx.cfg.dt);
  const double ppm = drivers::mass_to_concentration(r.state.m.at);
  ctx.out << cp.name << ": " << format_cell(ppm) << " ppm reached in " << r.year << "; M = ("
          << format_cell(r.state.m.at) << ", " << format_cell(r.state.m.uo) << ", " << format_cell(r.state.m.lo)
          << "), T = (" << format_cell(r.state.t.at) << ", " << format_cell(r.state.t.oc) << ")\n";
  Table t({"year", "ppm", "m_at", "m_uo", "m_lo", "t_at", "t_oc"});
  t.add_row({double(r.year), ppm, r.state.m.at, r.state.m.uo, r.state.m.lo, r.state.t.at, r.state.t.oc});
  ctx.save_table(t, cp.name + "_spinup");
  ctx.save_config("spinup_" + cp.name);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Climate-economy model: climate benchmarks, optimal policy and calibration"};
  app.require_subcommand(1);

  FlagSet bench_flags, policy_flags, cal_flags, spin_flags;
  std::string bench_which, policy_which, cal_which, axis = "rho", target = "joos";
  double target_ppm = 400.0;

  auto* bench = app.add_subcommand("bench", "run climate benchmark protocols");
  bench->add_option("test", bench_which, "test1 | test2 | test3 | test4 | all")->required();
  bench_flags.attach(*bench);

  auto* pol = app.add_subcommand("policy", "solve business-as-usual or optimal policy");
  pol->add_option("mode", policy_which, "bau | optimal | sweep")->required();
  pol->add_option("--axis", axis, "sweep axis: rho | damage | fex");
  policy_flags.attach(*pol);

  auto* cal = app.add_subcommand("calibrate", "carbon-cycle and temperature diagnostics");
  cal->add_option("mode", cal_which, "eigen | timescales | fit")->required();
  cal->add_option("--target", target, "fit target: joos | synthetic");
  cal_flags.attach(*cal);

  auto* spin = app.add_subcommand("spinup", "integrate from the 1850 equilibrium to a target concentration");
  spin->add_option("--target-ppm", target_ppm, "target concentration");
  spin_flags.attach(*spin);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (bench->parsed()) return cmd_bench(Context(bench_flags.resolve(), out), bench_which);
    if (pol->parsed()) return cmd_policy(Context(policy_flags.resolve(), out), policy_which, axis);
    if (cal->parsed()) return cmd_calibrate(Context(cal_flags.resolve(), out), cal_which, target);
    return cmd_spinup(Context(spin_flags.resolve(), out), target_ppm);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace cdice::cli
