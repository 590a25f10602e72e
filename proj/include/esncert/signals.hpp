#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace esncert {

/// Where a dataset came from: the seeds that produced it and, for the halves
/// of a split, the parent's length and the offset of the first sample.
struct Provenance {
  std::string origin;
  std::map<std::string, std::uint64_t> seeds;
  Eigen::Index parent_length = 0;
  Eigen::Index first_sample = 0;
};

/// Time-aligned input/output samples. Rows are time steps, columns channels.
/// `disturbance` and `y_noisefree` are optional diagnostics (empty when
/// absent) and are kept row-aligned with u and y when present.
struct Dataset {
  Eigen::MatrixXd u;
  Eigen::MatrixXd y;
  Eigen::MatrixXd disturbance;
  Eigen::MatrixXd y_noisefree;
  double sample_period = 1.0;
  Provenance provenance;

  Eigen::Index size() const { return u.rows(); }
  Eigen::Index input_dim() const { return u.cols(); }
  Eigen::Index output_dim() const { return y.cols(); }

  /// Throws std::invalid_argument when lengths disagree or the set is empty.
  void validate() const;
};

/// Per-channel affine map x -> gain * x + offset.
class AffineScaler {
 public:
  AffineScaler() = default;
  AffineScaler(Eigen::VectorXd gain, Eigen::VectorXd offset);

  static AffineScaler identity(Eigen::Index channels);

  const Eigen::VectorXd& gain() const { return gain_; }
  const Eigen::VectorXd& offset() const { return offset_; }
  Eigen::Index channels() const { return gain_.size(); }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& physical) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& normalized) const;
  Eigen::VectorXd apply_row(const Eigen::VectorXd& physical) const;
  Eigen::VectorXd invert_row(const Eigen::VectorXd& normalized) const;

 private:
  Eigen::VectorXd gain_;
  Eigen::VectorXd offset_;
};

/// Min-max scaler mapping each column's observed range onto [-1, 1].
/// Throws std::invalid_argument on a constant channel.
AffineScaler fit_scaler(const Eigen::MatrixXd& seq);

struct MprsConfig {
  double switching_period = 1000.0;
  double lo = 12.7;
  double hi = 16.7;
  int levels = 8;
  double duration = 30000.0;
  double sample_period = 10.0;
  std::uint64_t seed = 0;

  Eigen::Index samples_per_hold() const;
  Eigen::Index hold_count() const;
  void validate() const;
};

/// Multilevel pseudo-random signal: each hold picks one of `levels` equally
/// spaced values on [lo, hi] uniformly at random and keeps it for
/// `switching_period` seconds. Returned at `sample_period`.
Eigen::VectorXd generate_mprs(const MprsConfig& cfg);

/// Contiguous prefix/suffix split at round(fraction * K). When `hold_length`
/// is positive the cut is moved to the nearest hold boundary that still
/// leaves both halves non-empty. Throws if either half is shorter than
/// `min_length`.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                  Eigen::Index min_length, Eigen::Index hold_length = 0);

}  // namespace esncert
