#pragma once

#include "nlsh/field.hpp"

namespace nlsh {

enum class PotentialKind { Harmonic, Bounded, Stark };

struct SolverConfig {
  int mu = 1;       // +1 defocusing, -1 focusing, 0 disables the nonlinearity
  double p = 4.0;   // nonlinearity power; energy-critical default for d = 3
  double dt = 1e-3;
  double t_end = 1.0;
  int order = 2;    // 1: Lie splitting, 2: Strang
  PotentialKind potential = PotentialKind::Harmonic;
  Field bounded_v;                   // sampled V (real part) for Bounded
  std::array<double, 3> stark_e{};   // field vector for Stark
  double picard_tol = 1e-10;
  int picard_max = 50;
  double grad_factor = 100.0;
  double dt_min = 1e-9;
  double energy_defect_tol = 1e-6;   // relative, per step; triggers dt halving
  double tail_tol = 1e-6;            // top-octave energy fraction

  void validate(const Grid& g) const;
};

enum class RunStatus { Completed, BlowupDetected, StepUnderflow };

struct DiagnosticsRow {
  double t, mass, energy, e_delta, sigma_norm, sup_norm, virial_f, strichartz_cum;
};

struct DiagnosticsSeries {
  std::vector<DiagnosticsRow> rows;
};

struct EvolutionResult {
  Field field;  // final state, or the last finite state on blowup
  DiagnosticsSeries series;
  RunStatus status = RunStatus::Completed;
  double t_reached = 0.0;
};

// Spacetime exponent for the Strichartz diagnostic: 2(d+2)/(d-2) at the
// d = 3 energy-critical case, the mass-critical 2(d+2)/d otherwise.
double strichartz_exponent(int d);

// Exact flow of i u_t = mu |u|^p u: pointwise phase rotation.
Field nonlinear_phase_step(const Field& u, double dt, int mu, double p);

// Total energy for the configured potential:
// E = int 1/2|grad u|^2 + V|u|^2 + (2 mu/(p+2))|u|^{p+2}.
double total_energy(const Field& u, const SolverConfig& cfg);
// Potential term omitted.
double kinetic_energy(const Field& u, const SolverConfig& cfg);

// One splitting step of size dt (overriding cfg.dt).
Field strang_step(const Field& u, const SolverConfig& cfg, double dt);

EvolutionResult evolve(const Field& u0, const SolverConfig& cfg);

// Duhamel fixed point u(t) = e^{-itH}u0 - i int_0^t e^{-i(t-s)H} F(u(s)) ds,
// composite trapezoid with 32 nodes. Harmonic potential only. Throws if the
// iteration fails to contract within cfg.picard_max (t too large).
Field picard_local_solve(const Field& u0, double t, const SolverConfig& cfg,
                         std::vector<double>* residuals = nullptr);

}  // namespace nlsh
