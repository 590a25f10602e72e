#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "esncert/signals.hpp"

namespace esncert {

/// pH neutralization benchmark constants. Units: cm, cm^2, mL/s, mol/L.
struct PlantParams {
  double z = 11.5;
  double cv4 = 4.59;
  double valve_exponent = 0.607;
  double pk1 = 6.35;
  double pk2 = 10.25;
  double a1 = 207.0;
  double wa1 = 3.00e-3;
  double wb1 = 0.0;
  double wa2 = -0.03;
  double wb2 = 0.03;
  double wa3 = -3.05e-3;  // base stream carries a negative charge invariant
  double wb3 = 5.00e-5;
  double q1 = 16.6;
  double q2 = 0.55;
  double q3 = 15.6;
  double q4 = 32.8;
  double h1 = 14.0;
  double wa4 = -4.32e-4;
  double wb4 = 5.28e-4;
  double ph = 7.0;

  static PlantParams nominal() { return {}; }
  void validate() const;
};

/// x1 = W_a4, x2 = W_b4 (mol/L), x3 = reactor level h1 (cm).
struct PlantState {
  double wa4 = 0.0;
  double wb4 = 0.0;
  double level = 0.0;

  Eigen::Vector3d vec() const { return {wa4, wb4, level}; }
  static PlantState from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
  static PlantState nominal(const PlantParams& p) { return {p.wa4, p.wb4, p.h1}; }
};

struct SimulationConfig {
  double sample_period = 10.0;
  int substeps = 10;
  double noise_std = 0.01;
  std::uint64_t noise_seed = 0;
  PlantState initial = PlantState::nominal(PlantParams::nominal());

  double step() const { return sample_period / substeps; }
  void validate() const;
};

/// dx/dt = f1(x) + f2(x) u + f3(x) d with u = q3 (base) and d = q2 (buffer).
/// Throws NumericalError on a non-positive level.
Eigen::Vector3d dynamics_rhs(const PlantState& x, double u, double d, const PlantParams& p);

/// Charge balance c(x, pH) = x1 + 10^(pH-14) - 10^(-pH) + x2 * buffer(pH),
/// strictly increasing in pH for x2 >= 0.
double charge_balance(double wa4, double wb4, double ph, const PlantParams& p);

/// Root of the charge balance on [0, 14] to 1e-10 absolute. Throws
/// NumericalError when no sign change exists on the interval.
double ph_from_state(double wa4, double wb4, const PlantParams& p);

/// Exact steady state for constant flows: the ion invariants are the flow
/// weighted mixes of the feeds and the level balances outflow against inflow.
PlantState steady_state(double u, double d, const PlantParams& p);

/// Advances the state by `horizon` seconds (default one sample period) with
/// zero-order-hold flows using classical RK4 at the configured step.
PlantState integrate_step(const PlantState& x, double u, double d, const SimulationConfig& cfg,
                          const PlantParams& p);
PlantState integrate(const PlantState& x, double u, double d, double horizon, double step,
                     const PlantParams& p);

/// Samples the plant every T_s. Row k holds u(k), d(k) and the pH measured at
/// t = k T_s (before u(k) is applied) plus Gaussian noise from the seeded
/// stream. The noise-free pH is kept in `y_noisefree`.
Dataset simulate(const Eigen::VectorXd& u, const Eigen::VectorXd& d, const SimulationConfig& cfg,
                 const PlantParams& p);

}  // namespace esncert
