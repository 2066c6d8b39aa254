// Serial vs parallel wall time for the three fan-out workloads.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "cdice/calibrate.hpp"
#include "cdice/climate.hpp"
#include "cdice/drivers.hpp"
#include "cdice/parallel.hpp"
#include "cdice/policy.hpp"
#include "cdice/scenarios.hpp"

using namespace cdice;
using parallel::Execution;

namespace {

double time_it(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, const std::function<void(Execution)>& work) {
  const double serial = time_it([&] { work(Execution::Serial); });
  const double par = time_it([&] { work(Execution::Parallel); });
  std::printf("%-16s serial %8.3f s  parallel %8.3f s  speedup %.2fx\n", name, serial, par, serial / par);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", parallel::max_threads());
  const auto dir = drivers::default_data_dir();
  std::vector<drivers::ScenarioInputs> rcps;
  for (auto id : drivers::future_rcps()) rcps.push_back(drivers::load_scenario(dir, id));

  report("bench protocols", [&](Execution exec) {
    const auto& names = climate::preset_names();
    parallel::for_each_index(
        names.size() * rcps.size(),
        [&](std::size_t i) {
          const auto p = climate::preset(names[i / rcps.size()]);
          scenarios::test_rcp(p, rcps[i % rcps.size()], scenarios::RcpMode::EmissionDriven);
          scenarios::test_rcp(p, rcps[i % rcps.size()], scenarios::RcpMode::ConcentrationDriven);
          if (i % rcps.size() == 0) {
            scenarios::test_abrupt_4xco2(p);
            scenarios::test_pulse_100gtc(p);
          }
        },
        exec);
  });

  report("policy sweep", [&](Execution exec) {
    const auto cells = policy::sweep_cells({"CDICE", "DICE-2016", "CDICE-HadGEM2-ES", "CDICE-GISS-E2-R"},
                                           {0.015, 0.05}, {false}, {econ::ForcingMode::LinearRamp});
    policy::sweep(cells, policy::Scenario::Optimal, exec);
  });

  report("carbon fit", [&](Execution exec) {
    const std::vector<drivers::ScenarioInputs> fit_rcps{rcps.front(), rcps.back()};
    const auto targets = calibrate::synthetic_targets(climate::preset("CDICE").carbon, {10, 50, 100}, fit_rcps);
    auto start = climate::preset("DICE-2016").carbon;
    start.m_eq.at = 0.607;
    calibrate::FitOptions opt;
    opt.execution = exec;
    calibrate::fit_carbon(start, targets, {}, opt);
  });
}
