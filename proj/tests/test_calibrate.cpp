#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "cdice/calibrate.hpp"
#include "cdice/climate.hpp"
#include "cdice/drivers.hpp"
#include "cdice/errors.hpp"

using namespace cdice;
using namespace cdice::calibrate;
using climate::CarbonParams;
using climate::preset;

namespace {

double log_distance(double a_fast, double a_slow, double b_fast, double b_slow) {
  return std::hypot(std::log(a_fast / b_fast), std::log(a_slow / b_slow));
}

std::vector<drivers::ScenarioInputs> fit_scenarios() {
  const auto dir = drivers::default_data_dir();
  return {drivers::load_scenario(dir, drivers::Rcp::RCP26), drivers::load_scenario(dir, drivers::Rcp::RCP85)};
}

CarbonParams dice2016_start() {
  auto p = preset("DICE-2016").carbon;
  p.m_eq.at = 0.607;
  return p;
}

}  // namespace

TEST_SUITE("calibrate") {

TEST_CASE("published eigenvalues and half-lives") {
  const auto d = carbon_eigen(preset("DICE-2016").carbon, 5);
  CHECK(std::round(d.ev_fast * 1e4) / 1e4 == doctest::Approx(0.6796));
  CHECK(std::round(d.ev_slow * 1e4) / 1e4 == doctest::Approx(0.9959));
  CHECK(std::abs(d.half_life_fast - 9) <= 1.0);
  CHECK(std::abs(d.half_life_slow - 851) <= 1.0);
  CHECK(d.unit_ev == doctest::Approx(1.0).epsilon(1e-14));

  const auto c = carbon_eigen(preset("CDICE").carbon, 1);
  CHECK(std::round(c.ev_fast * 1e4) / 1e4 == doctest::Approx(0.8912));
  CHECK(std::round(c.ev_slow * 1e4) / 1e4 == doctest::Approx(0.9966));
  CHECK(std::abs(c.half_life_fast - 6) <= 1.0);
  CHECK(std::abs(c.half_life_slow - 201) <= 1.0);
}

TEST_CASE("no transfer means no decay") {
  const auto e = carbon_eigen(CarbonParams{0.0, 0.0, {0.6, 0.6, 1.7}}, 1);
  CHECK(e.ev_fast == 1.0);
  CHECK(e.ev_slow == 1.0);
  CHECK(std::isinf(e.half_life_fast));
  CHECK(std::isinf(e.half_life_slow));
  CHECK_FALSE(e.finite());
}

TEST_CASE("closed form matches a general eigen-solver") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> b12(0.001, 0.3), b23(0.0005, 0.1), mass(0.2, 20.0);
  int done = 0;
  while (done < 1000) {
    const CarbonParams p{b12(rng), b23(rng), {mass(rng), mass(rng), mass(rng)}};
    if (p.b12 * (1 + p.r1()) + p.b23 >= 1.0 || p.b12 * p.r1() + p.b23 >= 1.0 || p.b23 * p.r2() >= 1.0) continue;
    const auto e = carbon_eigen(p, 1);
    const auto num = carbon_eigen_numeric(p, 1);
    std::array<double, 3> closed{e.ev_fast, e.ev_slow, e.unit_ev};
    std::sort(closed.begin(), closed.end());
    for (int i = 0; i < 3; ++i) CHECK(std::abs(closed[i] - num[i]) < 1e-10);
    ++done;
  }
}

TEST_CASE("a single decaying mode halves on the predicted schedule") {
  const auto cp = preset("CDICE").carbon;
  const auto b = climate::build_transfer_matrix(cp, 1);
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = b(i, j);
  }
  Eigen::EigenSolver<Eigen::Matrix3d> es(m);
  const auto e = carbon_eigen(cp, 1);
  for (double target : {e.ev_fast, e.ev_slow}) {
    int k = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(es.eigenvalues()[i].real() - target) < std::abs(es.eigenvalues()[k].real() - target)) k = i;
    }
    const Eigen::Vector3d v = es.eigenvectors().col(k).real();
    climate::Reservoirs m0{cp.m_eq.at + 0.01 * v[0], cp.m_eq.uo + 0.01 * v[1], cp.m_eq.lo + 0.01 * v[2]};
    const double d0 = m0.at - cp.m_eq.at;
    double prev = d0;
    auto s = m0;
    double crossing = -1.0;
    for (int t = 1; t < 5000 && crossing < 0.0; ++t) {
      s = climate::step_carbon(s, cp, 0.0, 1);
      const double d = s.at - cp.m_eq.at;
      if (d / d0 <= 0.5) {
        // Log-linear interpolation between the bracketing years.
        const double a = std::log(prev / d0), c = std::log(d / d0);
        crossing = (t - 1) + (std::log(0.5) - a) / (c - a);
      }
      prev = d;
    }
    const double predicted = target == e.ev_fast ? e.half_life_fast : e.half_life_slow;
    CHECK(crossing == doctest::Approx(predicted).epsilon(0.02));
  }
}

TEST_CASE("energy balance timescales") {
  const auto c = ebm_timescales(preset("CDICE").temp);
  CHECK(std::abs(std::round(c.fast) - 4) <= 1.0);
  CHECK(std::abs(std::round(c.slow) - 248) <= 1.0);
  const auto d = ebm_timescales(preset("DICE-2016").temp);
  CHECK(std::abs(d.fast - 40) <= 2.0);
  CHECK(std::abs(d.slow - 219) <= 2.0);

  climate::TempParams decoupled{0.137, 1e-12, 1e-12, 3.45, 3.25};
  const auto one = ebm_timescales(decoupled);
  CHECK(one.fast == doctest::Approx(1.0 / (0.137 * decoupled.lambda())).epsilon(1e-9));
}

TEST_CASE("fit recovers parameters that generated its targets") {
  const auto truth = preset("CDICE").carbon;
  const auto targets = synthetic_targets(truth, {10, 20, 30, 40, 50, 60, 70, 80, 90, 100}, fit_scenarios());
  const auto r = fit_carbon(dice2016_start(), targets, {});
  CHECK(r.objective_final < 1e-4);
  CHECK(r.objective_final <= r.objective_initial);
  CHECK(r.fitted.b12 == doctest::Approx(truth.b12).epsilon(0.10));
  CHECK(r.fitted.b23 == doctest::Approx(truth.b23).epsilon(0.10));
  CHECK(r.fitted.m_eq.at == 0.607);
  CHECK_NOTHROW(r.fitted.validate());
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("zero weights leave the start point unchanged") {
  const auto targets = synthetic_targets(preset("CDICE").carbon, {10, 50, 100}, fit_scenarios());
  const auto start = dice2016_start();
  const auto r = fit_carbon(start, targets, {0.0, 0.0});
  CHECK(r.fitted.b12 == start.b12);
  CHECK(r.fitted.b23 == start.b23);
  CHECK(r.fitted.m_eq.uo == start.m_eq.uo);
  CHECK(r.fitted.m_eq.lo == start.m_eq.lo);
}

TEST_CASE("fitting the pulse benchmark moves half-lives toward the recalibration") {
  const auto joos = drivers::load_joos_envelope(drivers::default_data_dir());
  FitTargets t;
  for (std::size_t i = 0; i < joos.size(); ++i) {
    if (joos.years[i] == 0) continue;
    t.pulse_years.push_back(joos.years[i]);
    t.pulse_fraction.push_back(0.5 * (joos.envelope->lower[i] + joos.envelope->upper[i]));
  }
  t.rcp_inputs = fit_scenarios();
  for (const auto& in : t.rcp_inputs) t.rcp_ppm_2100.push_back(in.concentrations.at(2100));
  const auto r = fit_carbon(dice2016_start(), t, {});
  const auto& e = r.eigen_after;
  CHECK(log_distance(e.half_life_fast, e.half_life_slow, 6, 201) <
        log_distance(e.half_life_fast, e.half_life_slow, 9, 851));
  CHECK_NOTHROW(r.fitted.validate());
}

TEST_CASE("fit input validation") {
  FitTargets t;
  t.pulse_years = {10, 20};
  t.pulse_fraction = {0.5};
  CHECK_THROWS_AS(fit_carbon(dice2016_start(), t, {}), ValidationError);
  CHECK_THROWS_AS(fit_carbon(dice2016_start(), {}, {-1.0, 1.0}), ValidationError);
}

}
