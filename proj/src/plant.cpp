#include "esncert/plant.hpp"

#include <cmath>
#include <random>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "esncert/errors.hpp"
#include "esncert/rng.hpp"

namespace esncert {

void PlantParams::validate() const {
  require(a1 > 0.0 && cv4 > 0.0 && q1 > 0.0, "plant area, valve coefficient and acid flow must be positive");
  require(q2 > 0.0 && q3 > 0.0 && q4 > 0.0, "nominal flows must be positive");
  require(pk1 < pk2, "dissociation constants must satisfy pK1 < pK2");
  require(valve_exponent > 0.0, "valve exponent must be positive");
}

void SimulationConfig::validate() const {
  require(sample_period > 0.0, "sample period must be positive");
  require(substeps > 0, "substeps must be positive");
  require(noise_std >= 0.0, "noise standard deviation must be nonnegative");
  require(initial.level > 0.0, "initial level must be positive");
}

Eigen::Vector3d dynamics_rhs(const PlantState& x, double u, double d, const PlantParams& p) {
  if (!(x.level > 0.0) || !(x.level + p.z > 0.0))
    throw NumericalError("plant level " + std::to_string(x.level) + " cm is not positive");
  const double inv_volume = 1.0 / (p.a1 * x.level);
  const double outflow = p.cv4 * std::pow(x.level + p.z, p.valve_exponent);

  const Eigen::Vector3d f1(p.q1 * inv_volume * (p.wa1 - x.wa4), p.q1 * inv_volume * (p.wb1 - x.wb4),
                           (p.q1 - outflow) / p.a1);
  const Eigen::Vector3d f2(inv_volume * (p.wa3 - x.wa4), inv_volume * (p.wb3 - x.wb4), 1.0 / p.a1);
  const Eigen::Vector3d f3(inv_volume * (p.wa2 - x.wa4), inv_volume * (p.wb2 - x.wb4), 1.0 / p.a1);
  return f1 + f2 * u + f3 * d;
}

double charge_balance(double wa4, double wb4, double ph, const PlantParams& p) {
  const double buffer = (1.0 + 2.0 * std::pow(10.0, ph - p.pk2)) /
                        (1.0 + std::pow(10.0, p.pk1 - ph) + std::pow(10.0, ph - p.pk2));
  return wa4 + std::pow(10.0, ph - 14.0) - std::pow(10.0, -ph) + wb4 * buffer;
}

double ph_from_state(double wa4, double wb4, const PlantParams& p) {
  if (!std::isfinite(wa4) || !std::isfinite(wb4))
    throw NumericalError("non-finite ion concentrations");
  auto c = [&](double ph) { return charge_balance(wa4, wb4, ph, p); };
  const double lo = c(0.0);
  const double hi = c(14.0);
  if (lo == 0.0) return 0.0;
  if (hi == 0.0) return 14.0;
  if ((lo < 0.0) == (hi < 0.0))
    throw NumericalError("charge balance has no root on [0, 14] for W_a4=" + std::to_string(wa4) +
                         ", W_b4=" + std::to_string(wb4));
  std::uintmax_t max_iter = 200;
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-11; };
  const auto bracket = boost::math::tools::toms748_solve(c, 0.0, 14.0, lo, hi, tol, max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

PlantState steady_state(double u, double d, const PlantParams& p) {
  const double inflow = p.q1 + u + d;
  require(inflow > 0.0, "steady state needs a positive inflow");
  PlantState x;
  x.wa4 = (p.q1 * p.wa1 + u * p.wa3 + d * p.wa2) / inflow;
  x.wb4 = (p.q1 * p.wb1 + u * p.wb3 + d * p.wb2) / inflow;
  x.level = std::pow(inflow / p.cv4, 1.0 / p.valve_exponent) - p.z;
  if (!(x.level > 0.0)) throw NumericalError("inflow too small to keep liquid in the reactor");
  return x;
}

PlantState integrate(const PlantState& x, double u, double d, double horizon, double step,
                     const PlantParams& p) {
  require(horizon >= 0.0, "integration horizon must be nonnegative");
  require(step > 0.0, "integration step must be positive");
  Eigen::Vector3d s = x.vec();
  double remaining = horizon;
  while (remaining > 0.0) {
    double h = std::min(step, remaining);
    // Absorb a rounding sliver into the final step.
    if (remaining - h < 1e-12 * step) h = remaining;
    const Eigen::Vector3d k1 = dynamics_rhs(PlantState::from(s), u, d, p);
    const Eigen::Vector3d k2 = dynamics_rhs(PlantState::from(s + 0.5 * h * k1), u, d, p);
    const Eigen::Vector3d k3 = dynamics_rhs(PlantState::from(s + 0.5 * h * k2), u, d, p);
    const Eigen::Vector3d k4 = dynamics_rhs(PlantState::from(s + h * k3), u, d, p);
    s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    remaining -= h;
  }
  return PlantState::from(s);
}

PlantState integrate_step(const PlantState& x, double u, double d, const SimulationConfig& cfg,
                          const PlantParams& p) {
  cfg.validate();
  PlantState s = x;
  for (int i = 0; i < cfg.substeps; ++i) s = integrate(s, u, d, cfg.step(), cfg.step(), p);
  return s;
}

Dataset simulate(const Eigen::VectorXd& u, const Eigen::VectorXd& d, const SimulationConfig& cfg,
                 const PlantParams& p) {
  cfg.validate();
  p.validate();
  require(u.size() == d.size(), "input and disturbance sequences differ in length");
  require(u.size() > 0, "cannot simulate an empty input sequence");

  const Eigen::Index steps = u.size();
  Engine noise_engine = make_engine(cfg.noise_seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  Dataset out;
  out.u = u;
  out.disturbance = d;
  out.y.resize(steps, 1);
  out.y_noisefree.resize(steps, 1);
  out.sample_period = cfg.sample_period;
  out.provenance.origin = "plant";
  out.provenance.seeds["noise"] = cfg.noise_seed;

  PlantState x = cfg.initial;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double ph = ph_from_state(x.wa4, x.wb4, p);
    out.y_noisefree(k, 0) = ph;
    out.y(k, 0) = ph + cfg.noise_std * noise(noise_engine);
    if (k + 1 < steps) x = integrate_step(x, u(k), d(k), cfg, p);
  }
  return out;
}

}  // namespace esncert
