#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "esncert/rng.hpp"
#include "esncert/signals.hpp"

namespace esncert {

/// Elementwise squashing function of the state equation. Every option is
/// odd and 1-Lipschitz with range (-1, 1).
enum class Activation { kTanh };

std::string to_string(Activation activation);
Activation activation_from_string(const std::string& name);

/// How validation predictions are produced: free run feeds the model's own
/// previous output back into the W_y term, teacher forcing feeds the
/// measured output.
enum class ValidationMode { kFreeRun, kTeacherForced };

std::string to_string(ValidationMode mode);
ValidationMode validation_mode_from_string(const std::string& name);

/// Hyperparameters for one random reservoir draw.
struct ReservoirConfig {
  Eigen::Index order = 100;
  double density = 0.1;       // expected fraction of nonzero W_x entries
  double target_norm = 0.95;  // induced 2-norm W_x is rescaled to
  double input_range = 1.0;   // W_u entries ~ U[-input_range, input_range]
  double feedback_range = 1.0;
  Eigen::Index washout = 100;
  Eigen::Index input_dim = 1;
  Eigen::Index output_dim = 1;
  double ridge = 0.0;  // 0 is the plain least-squares readout
  // Value of a constant extra input channel appended after normalization;
  // 0 disables it. The channel gets its own W_u column and readout weight,
  // which lets the otherwise odd network represent asymmetric responses.
  double input_bias = 1.0;
  Activation activation = Activation::kTanh;

  /// Columns of W_u: the physical inputs plus the bias channel if enabled.
  Eigen::Index network_inputs() const { return input_dim + (input_bias != 0.0 ? 1 : 0); }
  void validate() const;
};

/// The randomly sampled recurrent part x+ = act(W_x x + W_u u + W_y y).
struct EsnDynamics {
  Eigen::MatrixXd w_x;
  Eigen::MatrixXd w_u;
  Eigen::MatrixXd w_y;
  Activation activation = Activation::kTanh;

  Eigen::Index order() const { return w_x.rows(); }
  Eigen::Index input_dim() const { return w_u.cols(); }
  Eigen::Index output_dim() const { return w_y.cols(); }
  void validate() const;
};

/// Linear output map y(k) = W_state x(k) + W_input u(k-1).
struct Readout {
  Eigen::MatrixXd w_state;
  Eigen::MatrixXd w_input;

  /// Row-stacked [W_state W_input], the transpose of the least-squares unknown.
  Eigen::MatrixXd stacked() const;
};

/// A complete network including the signal normalization used at fit time.
struct EsnModel {
  EsnDynamics dynamics;
  Readout readout;
  AffineScaler input_scaler;
  AffineScaler output_scaler;
  double input_bias = 0.0;
  Eigen::Index washout = 0;
  double target_norm = 0.0;
  double density = 0.0;
  std::uint64_t seed = 0;

  /// Normalized network input for physical inputs `u` (bias column appended).
  Eigen::MatrixXd network_input(const Eigen::MatrixXd& u) const;
  void validate() const;
};

/// Regression problem for the readout: row r holds (x(k), u(k-1)) and the
/// target y(k) for k = washout + r.
struct StateRecord {
  Eigen::MatrixXd regressors;
  Eigen::MatrixXd targets;
  Eigen::Index state_dim = 0;  // leading regressor columns that belong to x(k)
};

struct ReadoutFit {
  Readout readout;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
  // max |Phi' (Y - Phi W')| / (||Phi||_F ||Y||_F); zero for an exact LS solve.
  double orthogonality = 0.0;
};

/// Largest singular value.
double induced_norm(const Eigen::MatrixXd& m);

/// Draws a reservoir from `engine`. W_x is sparse uniform on [-1, 1] and then
/// rescaled to induced 2-norm `target_norm`; an all-zero W_x is redrawn once
/// before a NumericalError is thrown.
EsnDynamics generate_reservoir(const ReservoirConfig& cfg, Engine& engine);

Eigen::VectorXd state_update(const EsnDynamics& dyn, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& y);

/// Teacher-forced state trajectory x(0..K-1) (row k is x(k)) driven by the
/// given normalized input and output sequences.
Eigen::MatrixXd teacher_forced_states(const EsnDynamics& dyn, const Eigen::MatrixXd& u,
                                      const Eigen::MatrixXd& y, const Eigen::VectorXd& x0);

/// Runs the state equation over `data` (already normalized) and keeps the
/// rows k >= washout. u(-1) is taken as zero when washout is 0.
StateRecord collect_states(const EsnDynamics& dyn, const Dataset& data, const Eigen::VectorXd& x0,
                           Eigen::Index washout);

/// Least-squares readout via complete orthogonal decomposition. A rank
/// deficient regressor yields the minimum-norm solution with
/// `rank_deficient` set. A positive `ridge` adds Tikhonov regularization.
ReadoutFit fit_readout(const StateRecord& record, double ridge = 0.0);

/// Free-run simulation in physical units. The first fed-back output is
/// `y0` when given, otherwise the normalized zero. Row k of the result is the
/// prediction for sample k; row 0 is the bootstrap output.
Eigen::MatrixXd free_run(const EsnModel& model, const Eigen::MatrixXd& u,
                         const Eigen::VectorXd& x0,
                         const std::optional<Eigen::VectorXd>& y0 = std::nullopt);

/// One-step predictions in physical units with the measured output driving
/// the feedback term.
Eigen::MatrixXd teacher_forced_predict(const EsnModel& model, const Eigen::MatrixXd& u,
                                       const Eigen::MatrixXd& y, const Eigen::VectorXd& x0);

/// Predictions in the requested mode, starting from x(0) = 0. Free run is
/// bootstrapped with the first measured output.
Eigen::MatrixXd predict(const EsnModel& model, const Dataset& data, ValidationMode mode);

struct TrainedEsn {
  EsnModel model;
  ReadoutFit fit;
};

/// One pass of the training procedure: draw a reservoir from `engine`, run it
/// teacher-forced on the normalized training data from x(0) = 0, discard the
/// washout, and fit the readout.
TrainedEsn train_esn(const ReservoirConfig& cfg, Engine& engine, const Dataset& train,
                     const AffineScaler& input_scaler, const AffineScaler& output_scaler);

}  // namespace esncert
