#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlsh/engine.hpp"
#include "nlsh/fft.hpp"
#include "nlsh/hermite.hpp"
#include "nlsh/norms.hpp"
#include "nlsh/propagators.hpp"
#include "support/testfields.hpp"

using namespace nlsh;
using namespace nlsh::testing;

namespace {

Field run_fixed_steps(const Field& u0, const SolverConfig& cfg, double dt, int steps) {
  Field u = u0;
  for (int i = 0; i < steps; ++i) u = strang_step(u, cfg, dt);
  return u;
}

}  // namespace

TEST_CASE("config validation") {
  Grid g(1, 16.0, 256);
  SolverConfig cfg;
  cfg.validate(g);
  SolverConfig bad = cfg;
  bad.mu = 2;
  CHECK_THROWS(bad.validate(g));
  bad = cfg;
  bad.p = -1.0;
  CHECK_THROWS(bad.validate(g));
  bad = cfg;
  bad.dt = 0.0;
  CHECK_THROWS(bad.validate(g));
  bad = cfg;
  bad.order = 3;
  CHECK_THROWS(bad.validate(g));
  bad = cfg;
  bad.potential = PotentialKind::Bounded;  // no sampled V
  CHECK_THROWS(bad.validate(g));
}

TEST_CASE("nonlinear phase step") {
  Grid g(1, 16.0, 256);
  Field f = random_sigma_field(g, 7);

  Field same = nonlinear_phase_step(f, 0.0, 1, 4.0);
  CHECK(l2_norm(same - f) == 0.0);

  Field stepped = nonlinear_phase_step(f, 0.3, -1, 2.0);
  double mod_err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    mod_err = std::max(mod_err, std::abs(std::abs(stepped[i]) - std::abs(f[i])));
  CHECK(mod_err < 1e-15);

  // Constant field: closed form.
  Field c(g);
  for (auto& z : c.values) z = cplx(0.5, 0.0);
  Field cs = nonlinear_phase_step(c, 0.7, 1, 2.0);
  cplx expect = 0.5 * std::polar(1.0, -0.25 * 0.7);
  double err = 0.0;
  for (const auto& z : cs.values) err = std::max(err, std::abs(z - expect));
  CHECK(err < 1e-15);
}

TEST_CASE("splitting collapses to the linear propagator when mu = 0") {
  Grid g(1, 16.0, 256);
  Field f = random_sigma_field(g, 3);
  SolverConfig cfg;
  cfg.mu = 0;
  Field split = strang_step(f, cfg, 0.05);
  Field lin = harmonic_propagate(f, 0.05);
  CHECK(l2_norm(split - lin) < 1e-12);
}

TEST_CASE("mass is conserved per step to round-off") {
  Grid g(1, 16.0, 256);
  Field u = 1.3 * gauss_h0(g);
  SolverConfig cfg;
  cfg.mu = 1;
  cfg.p = 4.0;
  double m0 = l2_norm(u);
  for (int i = 0; i < 20; ++i) {
    u = strang_step(u, cfg, 1e-2);
    CHECK(std::abs(l2_norm(u) - m0) / m0 < 1e-12);
  }
}

TEST_CASE("Strang self-convergence is second order") {
  Grid g(1, 16.0, 256);
  Field u0 = 1.2 * gauss_h0(g);
  SolverConfig cfg;
  cfg.mu = 1;
  cfg.p = 2.0;
  double T = 1.0, dt = 1e-2;
  Field ref = run_fixed_steps(u0, cfg, dt / 8, int(T / (dt / 8) + 0.5));
  Field c1 = run_fixed_steps(u0, cfg, dt, int(T / dt + 0.5));
  Field c2 = run_fixed_steps(u0, cfg, dt / 2, int(T / (dt / 2) + 0.5));
  double e1 = l2_norm(c1 - ref);
  double e2 = l2_norm(c2 - ref);
  double ratio = e1 / e2;
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("linear periodicity: h0 returns to -h0 after a full period (d=3)") {
  Grid g(3, 12.0, 64);
  Field u0 = gauss_h0(g);
  SolverConfig cfg;
  cfg.mu = 0;
  cfg.dt = 0.01;
  cfg.t_end = 2.0 * M_PI;
  EvolutionResult res = evolve(u0, cfg);
  CHECK(res.status == RunStatus::Completed);
  CHECK(l2_norm(res.field + u0) < 1e-6);
}

TEST_CASE("defocusing conservation over t = 2") {
  Grid g(1, 16.0, 256);
  Field u0 = 1.2 * gauss_h0(g);
  SolverConfig cfg;
  cfg.mu = 1;
  cfg.p = 4.0;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  EvolutionResult res = evolve(u0, cfg);
  REQUIRE(res.status == RunStatus::Completed);
  const auto& rows = res.series.rows;
  double m0 = rows.front().mass, e0 = rows.front().energy;
  for (const auto& r : rows) {
    CHECK(std::abs(r.mass - m0) / m0 < 1e-10);
    CHECK(std::abs(r.energy - e0) / std::abs(e0) < 1e-6);
  }
  // Series invariants.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].t > rows[i - 1].t);
    CHECK(rows[i].strichartz_cum >= rows[i - 1].strichartz_cum);
  }
}

TEST_CASE("focusing supercritical data triggers blowup detection") {
  Grid g(3, 12.0, 64);
  Field u0 = sample_function(g, [](const std::array<double, 3>& x) {
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return cplx(4.0 * std::exp(-0.5 * r2), 0.0);
  });
  SolverConfig cfg;
  cfg.mu = -1;
  cfg.p = 4.0;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.dt_min = 1e-7;
  EvolutionResult res = evolve(u0, cfg);
  CHECK(res.status == RunStatus::BlowupDetected);
  CHECK(res.t_reached < 2.0);
}

TEST_CASE("Picard: zero nonlinearity gives the linear flow") {
  Grid g(1, 16.0, 256);
  Field u0 = random_sigma_field(g, 5);
  SolverConfig cfg;
  cfg.mu = 0;
  Field u = picard_local_solve(u0, 0.3, cfg);
  CHECK(l2_norm(u - harmonic_propagate(u0, 0.3)) < 1e-12);
}

TEST_CASE("Picard agrees with fine-step splitting") {
  Grid g(1, 16.0, 256);
  Field u0 = 1.1 * gauss_h0(g);
  SolverConfig cfg;
  cfg.mu = 1;
  cfg.p = 2.0;
  double t = 0.01;
  Field pic = picard_local_solve(u0, t, cfg);
  Field ref = run_fixed_steps(u0, cfg, 1e-5, 1000);
  CHECK(l2_norm(pic - ref) / l2_norm(u0) < 1e-6);
}

TEST_CASE("Picard residuals contract geometrically") {
  Grid g(1, 16.0, 256);
  Field u0 = 0.8 * gauss_h0(g);
  SolverConfig cfg;
  cfg.mu = 1;
  cfg.p = 2.0;
  std::vector<double> residuals;
  picard_local_solve(u0, 0.05, cfg, &residuals);
  REQUIRE(residuals.size() >= 4);
  for (std::size_t i = 3; i < residuals.size(); ++i) {
    if (residuals[i - 1] < 1e-14) break;  // hit round-off floor
    CHECK(residuals[i] / residuals[i - 1] < 0.5);
  }
}

TEST_CASE("Picard rejects an interval too large for contraction") {
  Grid g(1, 16.0, 256);
  Field u0 = 3.0 * gauss_h0(g);
  SolverConfig cfg;
  cfg.mu = -1;
  cfg.p = 4.0;
  cfg.picard_max = 10;
  CHECK_THROWS(picard_local_solve(u0, 2.0, cfg));
}

TEST_CASE("Stark evolution matches the Avron-Herbst transformed free run") {
  Grid g(1, 16.0, 512);
  Field u0 = sample_function(g, [](const std::array<double, 3>& x) {
    return cplx(std::exp(-x[0] * x[0]), 0.0);
  });
  double E = 1.0, T = 0.5;

  SolverConfig stark;
  stark.mu = 1;
  stark.p = 2.0;
  stark.dt = 1e-3;
  stark.t_end = T;
  stark.potential = PotentialKind::Stark;
  stark.stark_e = {E, 0.0, 0.0};
  Field u = evolve(u0, stark).field;

  SolverConfig free_cfg = stark;
  free_cfg.potential = PotentialKind::Bounded;
  free_cfg.bounded_v = Field(g);  // V == 0
  Field w = evolve(u0, free_cfg).field;

  // u(t,x) = e^{-i(E x t + E^2 t^3/6)} w(t, x + E t^2/2)
  Field shifted = fourier_translate(w, {0.5 * E * T * T, 0.0, 0.0});
  Field expect = sample_function(g, [&](const std::array<double, 3>& x) {
    return std::polar(1.0, -(E * x[0] * T + E * E * T * T * T / 6.0));
  });
  for (std::size_t i = 0; i < expect.size(); ++i) expect[i] *= shifted[i];
  CHECK(l2_norm(u - expect) / l2_norm(u0) < 1e-5);
}

TEST_CASE("time reversal through conjugation") {
  Grid g(1, 16.0, 256);
  Field u0 = 1.1 * gauss_h0(g);
  SolverConfig cfg;
  cfg.mu = 1;
  cfg.p = 2.0;
  cfg.dt = 1e-2;
  cfg.t_end = 0.5;
  Field uT = evolve(u0, cfg).field;
  Field back = evolve(conj(uT), cfg).field;
  CHECK(l2_norm(back - conj(u0)) / l2_norm(u0) < 1e-8);
}

TEST_CASE("bounded potential conserves its energy over unit time") {
  Grid g(1, 16.0, 256);
  SolverConfig cfg;
  cfg.mu = 1;
  cfg.p = 2.0;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.potential = PotentialKind::Bounded;
  cfg.bounded_v = sample_function(g, [](const std::array<double, 3>& x) {
    return cplx(std::sin(x[0]) * smooth_bump(std::abs(x[0]) / 8.0), 0.0);
  });
  Field u0 = 1.2 * gauss_h0(g);
  EvolutionResult res = evolve(u0, cfg);
  REQUIRE(res.status == RunStatus::Completed);
  double e0 = res.series.rows.front().energy;
  for (const auto& r : res.series.rows)
    CHECK(std::abs(r.energy - e0) / std::abs(e0) < 1e-6);
}
