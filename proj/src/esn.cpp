#include "esncert/esn.hpp"

#include <cmath>

#include "esncert/errors.hpp"

namespace esncert {
namespace {

Eigen::VectorXd activate(Activation activation, const Eigen::VectorXd& pre) {
  switch (activation) {
    case Activation::kTanh:
      return pre.array().tanh();
  }
  throw std::invalid_argument("unknown activation");
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double range, Engine& engine) {
  std::uniform_real_distribution<double> dist(-range, range);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(engine);
  return m;
}

Eigen::MatrixXd sparse_uniform(Eigen::Index n, double density, Engine& engine) {
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      if (keep(engine)) m(r, c) = value(engine);
  return m;
}

}  // namespace

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::kTanh:
      return "tanh";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(ValidationMode mode) {
  return mode == ValidationMode::kFreeRun ? "free_run" : "teacher_forced";
}

ValidationMode validation_mode_from_string(const std::string& name) {
  if (name == "free_run") return ValidationMode::kFreeRun;
  if (name == "teacher_forced") return ValidationMode::kTeacherForced;
  throw std::invalid_argument("unknown validation mode '" + name + "'");
}

void ReservoirConfig::validate() const {
  require(order > 0, "reservoir order must be positive");
  require(density > 0.0 && density <= 1.0, "reservoir density must lie in (0, 1]");
  require(target_norm > 0.0 && target_norm < 1.0, "target norm must lie in (0, 1)");
  require(input_range > 0.0 && feedback_range >= 0.0, "W_u and W_y ranges must be positive");
  require(washout >= 0, "washout must be nonnegative");
  require(input_dim > 0 && output_dim > 0, "input and output dimensions must be positive");
  require(ridge >= 0.0, "ridge coefficient must be nonnegative");
}

void EsnDynamics::validate() const {
  require(w_x.rows() == w_x.cols() && w_x.rows() > 0, "W_x must be square and non-empty");
  require(w_u.rows() == order() && w_y.rows() == order(), "W_u and W_y must have one row per state");
  require(w_x.allFinite() && w_u.allFinite() && w_y.allFinite(), "reservoir weights must be finite");
}

Eigen::MatrixXd Readout::stacked() const {
  Eigen::MatrixXd out(w_state.rows(), w_state.cols() + w_input.cols());
  out << w_state, w_input;
  return out;
}

void EsnModel::validate() const {
  dynamics.validate();
  require(readout.w_state.rows() == dynamics.output_dim() &&
              readout.w_state.cols() == dynamics.order(),
          "readout state block does not match the reservoir");
  require(readout.w_input.rows() == dynamics.output_dim() &&
              readout.w_input.cols() == dynamics.input_dim(),
          "readout input block does not match the reservoir");
  require(readout.w_state.allFinite() && readout.w_input.allFinite(), "readout must be finite");
  require(input_scaler.channels() + (input_bias != 0.0 ? 1 : 0) == dynamics.input_dim(),
          "input scaler width does not match the reservoir inputs");
  require(output_scaler.channels() == dynamics.output_dim(), "output scaler width mismatch");
}

Eigen::MatrixXd EsnModel::network_input(const Eigen::MatrixXd& u) const {
  require(u.cols() == input_scaler.channels(), "input channel count mismatch");
  if (input_bias == 0.0) return input_scaler.apply(u);
  Eigen::MatrixXd out(u.rows(), u.cols() + 1);
  out << input_scaler.apply(u), Eigen::VectorXd::Constant(u.rows(), input_bias);
  return out;
}

double induced_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

EsnDynamics generate_reservoir(const ReservoirConfig& cfg, Engine& engine) {
  cfg.validate();
  EsnDynamics dyn;
  dyn.activation = cfg.activation;
  dyn.w_x = sparse_uniform(cfg.order, cfg.density, engine);
  double norm = induced_norm(dyn.w_x);
  if (norm == 0.0) {
    dyn.w_x = sparse_uniform(cfg.order, cfg.density, engine);
    norm = induced_norm(dyn.w_x);
    if (norm == 0.0)
      throw NumericalError("W_x drawn identically zero twice (order " + std::to_string(cfg.order) +
                           ", density " + std::to_string(cfg.density) + ")");
  }
  dyn.w_x *= cfg.target_norm / norm;
  dyn.w_u = uniform_matrix(cfg.order, cfg.network_inputs(), cfg.input_range, engine);
  dyn.w_y = uniform_matrix(cfg.order, cfg.output_dim, cfg.feedback_range, engine);
  return dyn;
}

Eigen::VectorXd state_update(const EsnDynamics& dyn, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
  require(x.size() == dyn.order(), "state dimension mismatch");
  require(u.size() == dyn.input_dim(), "input dimension mismatch");
  require(y.size() == dyn.output_dim(), "output dimension mismatch");
  return activate(dyn.activation, dyn.w_x * x + dyn.w_u * u + dyn.w_y * y);
}

Eigen::MatrixXd teacher_forced_states(const EsnDynamics& dyn, const Eigen::MatrixXd& u,
                                      const Eigen::MatrixXd& y, const Eigen::VectorXd& x0) {
  require(u.rows() == y.rows(), "input and output lengths differ");
  require(u.cols() == dyn.input_dim() && y.cols() == dyn.output_dim(), "channel count mismatch");
  require(x0.size() == dyn.order(), "initial state dimension mismatch");
  const Eigen::Index steps = u.rows();
  Eigen::MatrixXd states(steps, dyn.order());
  if (steps == 0) return states;
  Eigen::VectorXd x = x0;
  states.row(0) = x.transpose();
  for (Eigen::Index k = 0; k + 1 < steps; ++k) {
    x = state_update(dyn, x, u.row(k).transpose(), y.row(k).transpose());
    states.row(k + 1) = x.transpose();
  }
  return states;
}

StateRecord collect_states(const EsnDynamics& dyn, const Dataset& data, const Eigen::VectorXd& x0,
                           Eigen::Index washout) {
  data.validate();
  require(washout >= 0, "washout must be nonnegative");
  const Eigen::Index steps = data.size();
  if (steps <= washout)
    throw std::invalid_argument("dataset of length " + std::to_string(steps) +
                                " leaves no rows after a washout of " + std::to_string(washout));
  const Eigen::Index n = dyn.order();
  const Eigen::Index nu = dyn.input_dim();
  const Eigen::Index rows = steps - washout;
  require(rows > n + nu, "regression needs more than " + std::to_string(n + nu) +
                             " rows after washout, got " + std::to_string(rows));

  const Eigen::MatrixXd states = teacher_forced_states(dyn, data.u, data.y, x0);
  StateRecord record;
  record.regressors.resize(rows, n + nu);
  record.regressors.leftCols(n) = states.bottomRows(rows);
  if (washout == 0) {
    record.regressors.block(0, n, 1, nu).setZero();
    record.regressors.block(1, n, rows - 1, nu) = data.u.topRows(rows - 1);
  } else {
    record.regressors.rightCols(nu) = data.u.middleRows(washout - 1, rows);
  }
  record.targets = data.y.bottomRows(rows);
  record.state_dim = n;
  return record;
}

ReadoutFit fit_readout(const StateRecord& record, double ridge) {
  const Eigen::MatrixXd& phi = record.regressors;
  const Eigen::MatrixXd& target = record.targets;
  require(phi.rows() == target.rows(), "regressor and target row counts differ");
  require(phi.rows() >= phi.cols() && phi.cols() > 0, "regression is underdetermined");
  require(ridge >= 0.0, "ridge coefficient must be nonnegative");

  ReadoutFit out;
  Eigen::MatrixXd solution;
  if (ridge > 0.0) {
    Eigen::MatrixXd augmented(phi.rows() + phi.cols(), phi.cols());
    augmented << phi, std::sqrt(ridge) * Eigen::MatrixXd::Identity(phi.cols(), phi.cols());
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(augmented.rows(), target.cols());
    rhs.topRows(phi.rows()) = target;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(augmented);
    solution = cod.solve(rhs);
    out.rank = cod.rank();
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(phi);
    solution = cod.solve(target);
    out.rank = cod.rank();
  }
  out.rank_deficient = out.rank < phi.cols();

  const Eigen::MatrixXd residual = target - phi * solution;
  const double scale = phi.norm() * target.norm();
  out.orthogonality = scale > 0.0 ? (phi.transpose() * residual).cwiseAbs().maxCoeff() / scale : 0.0;

  const Eigen::Index n = record.state_dim;
  require(n >= 0 && n <= phi.cols(), "state record has an invalid state width");
  const Eigen::MatrixXd weights = solution.transpose();
  out.readout.w_state = weights.leftCols(n);
  out.readout.w_input = weights.rightCols(phi.cols() - n);
  return out;
}

Eigen::MatrixXd free_run(const EsnModel& model, const Eigen::MatrixXd& u,
                         const Eigen::VectorXd& x0, const std::optional<Eigen::VectorXd>& y0) {
  model.validate();
  const EsnDynamics& dyn = model.dynamics;
  require(x0.size() == dyn.order(), "initial state dimension mismatch");
  const Eigen::MatrixXd un = model.network_input(u);
  const Eigen::Index steps = u.rows();
  Eigen::MatrixXd out(steps, dyn.output_dim());
  if (steps == 0) return out;

  Eigen::VectorXd y = y0 ? model.output_scaler.apply_row(*y0) : Eigen::VectorXd::Zero(dyn.output_dim());
  Eigen::VectorXd x = x0;
  out.row(0) = model.output_scaler.invert_row(y).transpose();
  for (Eigen::Index k = 0; k + 1 < steps; ++k) {
    const Eigen::VectorXd uk = un.row(k).transpose();
    x = state_update(dyn, x, uk, y);
    y = model.readout.w_state * x + model.readout.w_input * uk;
    out.row(k + 1) = model.output_scaler.invert_row(y).transpose();
  }
  return out;
}

Eigen::MatrixXd teacher_forced_predict(const EsnModel& model, const Eigen::MatrixXd& u,
                                       const Eigen::MatrixXd& y, const Eigen::VectorXd& x0) {
  model.validate();
  const Eigen::MatrixXd un = model.network_input(u);
  const Eigen::MatrixXd yn = model.output_scaler.apply(y);
  const Eigen::MatrixXd states = teacher_forced_states(model.dynamics, un, yn, x0);
  const Eigen::Index steps = u.rows();
  Eigen::MatrixXd previous_input = Eigen::MatrixXd::Zero(steps, un.cols());
  if (steps > 1) previous_input.bottomRows(steps - 1) = un.topRows(steps - 1);
  const Eigen::MatrixXd normalized =
      states * model.readout.w_state.transpose() + previous_input * model.readout.w_input.transpose();
  return model.output_scaler.invert(normalized);
}

Eigen::MatrixXd predict(const EsnModel& model, const Dataset& data, ValidationMode mode) {
  data.validate();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(model.dynamics.order());
  if (mode == ValidationMode::kTeacherForced) return teacher_forced_predict(model, data.u, data.y, x0);
  return free_run(model, data.u, x0, Eigen::VectorXd(data.y.row(0).transpose()));
}

TrainedEsn train_esn(const ReservoirConfig& cfg, Engine& engine, const Dataset& train,
                     const AffineScaler& input_scaler, const AffineScaler& output_scaler) {
  cfg.validate();
  train.validate();
  require(train.input_dim() == cfg.input_dim && train.output_dim() == cfg.output_dim,
          "training data channels do not match the reservoir configuration");

  TrainedEsn out;
  out.model.input_scaler = input_scaler;
  out.model.output_scaler = output_scaler;
  out.model.input_bias = cfg.input_bias;

  Dataset normalized;
  normalized.u = out.model.network_input(train.u);
  normalized.y = output_scaler.apply(train.y);
  normalized.sample_period = train.sample_period;

  out.model.dynamics = generate_reservoir(cfg, engine);
  const StateRecord record = collect_states(out.model.dynamics, normalized,
                                            Eigen::VectorXd::Zero(cfg.order), cfg.washout);
  out.fit = fit_readout(record, cfg.ridge);
  out.model.readout = out.fit.readout;
  out.model.washout = cfg.washout;
  out.model.target_norm = cfg.target_norm;
  out.model.density = cfg.density;
  return out;
}

}  // namespace esncert
