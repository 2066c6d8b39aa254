#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "cdice/climate.hpp"
#include "cdice/errors.hpp"

using namespace cdice;
using namespace cdice::climate;

TEST_SUITE("climate") {

TEST_CASE("transfer matrix entries for a hand-checked parameter set") {
  const CarbonParams p{0.12, 0.007, {0.588, 0.360, 1.720}};
  const auto b = build_transfer_matrix(p);
  // Reference values were computed with r1 and r2 rounded to three digits.
  CHECK(std::abs(b(0, 1) - 0.19596) < 5e-5);
  CHECK(std::abs(b(1, 1) - 0.79704) < 5e-5);
  CHECK(std::abs(b(1, 2) - 0.0014630) < 5e-6);
  CHECK(std::abs(b(2, 2) - 0.9985370) < 5e-6);
  CHECK(b(0, 0) == doctest::Approx(0.88));
  CHECK(b(0, 2) == 0.0);
  CHECK(b(2, 0) == 0.0);
}

TEST_CASE("zero transfer gives the identity") {
  const CarbonParams p{0.0, 0.0, {0.6, 0.5, 1.7}};
  const auto b = build_transfer_matrix(p);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(b(i, j) == (i == j ? 1.0 : 0.0));
  }
}

TEST_CASE("every preset has a column-stochastic matrix") {
  for (const auto& name : preset_names()) {
    const auto cp = preset(name);
    const auto b = build_transfer_matrix(cp.carbon, cp.native_dt);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(b(0, j) + b(1, j) + b(2, j) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("a step length that makes a diagonal negative is rejected") {
  const auto cp = preset("CDICE");
  CHECK_THROWS_AS(build_transfer_matrix(cp.carbon, 40), ValidationError);
  CHECK_THROWS_AS(step_carbon(cp.initial.m, cp.carbon, 0.0, 15), ValidationError);
  CHECK_THROWS_AS(cp.resolve_dt(20), ValidationError);
  CHECK_THROWS_AS(preset("DICE-2016").resolve_dt(1), ValidationError);
}

TEST_CASE("one carbon step matches the hand evaluation") {
  const auto cp = preset("CDICE");
  const auto next = step_carbon(cp.initial.m, cp.carbon, 0.010, 1);
  const double expected = 0.85009 + 0.010 - 0.053 * 0.85009 + 0.053 * (0.607 / 0.600) * 0.7649;
  CHECK(std::abs(next.at - expected) < 1e-12);
  CHECK(std::abs(next.total() - cp.initial.m.total() - 0.010) < 1e-12);
}

TEST_CASE("forcing") {
  const auto t = preset("CDICE").temp;
  CHECK(forcing(0.607, 0.607, 0.0, t) == 0.0);
  CHECK(forcing(2 * 0.607, 0.607, 0.0, t) == doctest::Approx(3.45).epsilon(1e-12));
  CHECK(forcing(4 * 0.607, 0.607, 0.0, t) == doctest::Approx(6.90).epsilon(1e-12));
  CHECK(forcing(0.607, 0.607, 0.5, t) == doctest::Approx(0.5));
  CHECK_THROWS_AS(forcing(0.0, 0.607, 0.0, t), std::domain_error);
  CHECK_THROWS_AS(forcing(0.5, -1.0, 0.0, t), std::domain_error);
}

TEST_CASE("temperature step") {
  const auto t = preset("CDICE").temp;
  const auto zero = step_temperature({0.0, 0.0}, 0.0, t, 1);
  CHECK(zero.at == 0.0);
  CHECK(zero.oc == 0.0);
  const auto one = step_temperature({0.0, 0.0}, 6.9, t, 1);
  CHECK(one.at == doctest::Approx(0.9453).epsilon(1e-12));
  CHECK(one.oc == 0.0);
}

TEST_CASE("constant quadrupled forcing settles at twice the climate sensitivity") {
  for (const char* name : {"CDICE", "CDICE-HadGEM2-ES", "CDICE-GISS-E2-R"}) {
    const auto t = preset(name).temp;
    Temperatures s{0.0, 0.0};
    // Twenty slow timescales.
    for (int i = 0; i < 6000; ++i) s = step_temperature(s, 2.0 * t.f2xco2, t, 1);
    CHECK(s.at == doctest::Approx(2.0 * t.t2xco2).epsilon(1e-9));
    CHECK(s.oc == doctest::Approx(2.0 * t.t2xco2).epsilon(1e-9));
  }
}

TEST_CASE("constant forcing settles at F / lambda") {
  const auto t = preset("CDICE").temp;
  Temperatures s{0.3, -0.1};
  const double f = 1.7;
  for (int i = 0; i < 6000; ++i) s = step_temperature(s, f, t, 1);
  CHECK(s.at == doctest::Approx(f / t.lambda()).epsilon(1e-9));
  CHECK(s.oc == doctest::Approx(f / t.lambda()).epsilon(1e-9));
}

TEST_CASE("pre-industrial equilibrium is stationary for every preset") {
  for (const auto& name : preset_names()) {
    const auto cp = preset(name);
    const int dt = cp.native_dt;
    const int n = 1000 / dt;
    ClimateDrive drive;
    drive.values.assign(n, 0.0);
    // Forcing is measured against each preset's own equilibrium here.
    auto eq_preset = cp;
    eq_preset.m_base = cp.carbon.m_eq.at;
    const auto path = run_climate(eq_preset, cp.equilibrium(), drive, dt, n);
    for (const auto& s : path) {
      CHECK(std::abs(s.m.at - cp.carbon.m_eq.at) <= 1e-12 * cp.carbon.m_eq.at);
      CHECK(std::abs(s.m.uo - cp.carbon.m_eq.uo) <= 1e-12 * cp.carbon.m_eq.uo);
      CHECK(std::abs(s.m.lo - cp.carbon.m_eq.lo) <= 1e-12 * cp.carbon.m_eq.lo);
      CHECK(std::abs(s.t.at) <= 1e-12);
      CHECK(std::abs(s.t.oc) <= 1e-12);
    }
  }
}

TEST_CASE("carbon mass is conserved along random emission paths") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> emis(-0.002, 0.03);
  for (const auto& name : preset_names()) {
    const auto cp = preset(name);
    const int dt = cp.native_dt;
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 1000 / dt;
      ClimateDrive drive;
      double added = 0.0;
      for (int k = 0; k < n; ++k) {
        drive.values.push_back(emis(rng));
        added += dt * drive.values.back();
      }
      const auto path = run_climate(cp, cp.initial, drive, dt, n);
      const double expected = cp.initial.m.total() + added;
      CHECK(std::abs(path.back().m.total() - expected) <= 1e-10 * expected);
    }
  }
}

TEST_CASE("warming is ordered by climate sensitivity under a common forcing path") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> inc(0.0, 0.02);
  std::vector<double> f_ex{0.0};
  for (int k = 1; k < 500; ++k) f_ex.push_back(f_ex.back() + inc(rng));
  ClimateDrive drive;
  drive.kind = DriveKind::Concentration;
  drive.values.assign(501, 0.607);
  drive.f_ex = f_ex;
  auto run = [&](double ecs) {
    auto p = preset("CDICE");
    p.temp.t2xco2 = ecs;
    return run_climate(p, p.equilibrium(), drive, 1, 500);
  };
  const auto low = run(2.15);
  const auto mid = run(3.25);
  const auto high = run(4.55);
  for (std::size_t i = 0; i < low.size(); ++i) {
    CHECK(low[i].t.at <= mid[i].t.at);
    CHECK(mid[i].t.at <= high[i].t.at);
  }
}

TEST_CASE("model presets are not ordered in the first years of a forcing step") {
  // The GISS-E2-R surface layer responds faster, so it leads for three years.
  ClimateDrive drive;
  drive.kind = DriveKind::Concentration;
  drive.values.assign(11, 4 * 0.607);
  auto run = [&](const char* name) { return run_climate(preset(name), preset(name).equilibrium(), drive, 1, 10); };
  const auto giss = run("CDICE-GISS-E2-R");
  const auto mmm = run("CDICE");
  const auto had = run("CDICE-HadGEM2-ES");
  CHECK(giss[1].t.at == doctest::Approx(0.213 * 2 * 3.65));
  CHECK(giss[1].t.at > mmm[1].t.at);
  CHECK(mmm[1].t.at > had[1].t.at);
  CHECK(giss[4].t.at < mmm[4].t.at);
  CHECK(mmm[4].t.at < had[4].t.at);
}

TEST_CASE("annual and five-year steps agree on the 1 percent ramp") {
  const auto cp = preset("CDICE");
  const int years = 300;
  auto drive_for = [&](int dt) {
    ClimateDrive d;
    d.kind = DriveKind::Concentration;
    for (int k = 0; k <= years / dt; ++k) d.values.push_back(cp.m_base * std::pow(1.01, k * dt));
    return d;
  };
  const auto fine = run_climate(cp, cp.equilibrium(), drive_for(1), 1, years);
  const auto coarse = run_climate(cp, cp.equilibrium(), drive_for(5), 5, years / 5);
  double worst = 0.0;
  for (int k = 0; k <= years / 5; ++k) worst = std::max(worst, std::abs(fine[5 * k].t.at - coarse[k].t.at));
  // First-order lag of the explicit scheme puts this at about 0.053 K.
  CHECK(worst < 0.05);
}

TEST_CASE("concentration-driven runs overwrite atmospheric carbon") {
  const auto cp = preset("CDICE");
  ClimateDrive d;
  d.kind = DriveKind::Concentration;
  d.values = {0.7, 0.8, 0.9};
  const auto path = run_climate(cp, cp.initial, d, 1, 2);
  REQUIRE(path.size() == 3);
  CHECK(path[0].m.at == 0.7);
  CHECK(path[2].m.at == 0.9);
  d.values.pop_back();
  CHECK_THROWS_AS(run_climate(cp, cp.initial, d, 1, 2), ValidationError);
}

TEST_CASE("preset values") {
  const auto c = preset("CDICE");
  CHECK(c.temp.c1 == 0.137);
  CHECK(c.temp.c3 == 0.73);
  CHECK(c.temp.c4 == 0.00689);
  CHECK(c.temp.t2xco2 == 3.25);
  CHECK(c.temp.f2xco2 == 3.45);
  CHECK(c.carbon.b12 == 0.053);
  CHECK(c.carbon.b23 == 0.0042);
  CHECK(c.carbon.m_eq.at == 0.607);
  CHECK(c.carbon.m_eq.uo == 0.600);
  CHECK(c.carbon.m_eq.lo == 1.772);
  CHECK(c.initial.m.at == 0.85009);
  CHECK(c.initial.t.at == 1.2778);
  CHECK(c.initial.t.oc == 0.3132);
  CHECK(c.temp.lambda() == doctest::Approx(3.45 / 3.25));
  CHECK_THROWS_AS(preset("no-such-model"), ValidationError);
}

TEST_CASE("parameter validation") {
  TempParams t{0.137, 0.73, 0.00689, 3.45, 0.0};
  CHECK_THROWS_AS(t.validate(), ValidationError);
  CarbonParams c{0.05, 0.004, {0.6, 0.0, 1.7}};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {1.2, 0.004, {0.6, 0.6, 1.7}};
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

}
