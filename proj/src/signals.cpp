#include "esncert/signals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "esncert/errors.hpp"
#include "esncert/rng.hpp"

namespace esncert {

void Dataset::validate() const {
  require(u.rows() > 0, "dataset is empty");
  require(y.rows() == u.rows(), "dataset input and output lengths differ");
  require(disturbance.size() == 0 || disturbance.rows() == u.rows(),
          "dataset disturbance length differs from input length");
  require(y_noisefree.size() == 0 || y_noisefree.rows() == u.rows(),
          "dataset noise-free output length differs from input length");
  require(sample_period > 0.0, "dataset sample period must be positive");
}

AffineScaler::AffineScaler(Eigen::VectorXd gain, Eigen::VectorXd offset)
    : gain_(std::move(gain)), offset_(std::move(offset)) {
  require(gain_.size() == offset_.size(), "scaler gain and offset sizes differ");
  for (Eigen::Index i = 0; i < gain_.size(); ++i) {
    require(gain_(i) != 0.0 && std::isfinite(gain_(i)), "scaler gain must be finite and nonzero");
    require(std::isfinite(offset_(i)), "scaler offset must be finite");
  }
}

AffineScaler AffineScaler::identity(Eigen::Index channels) {
  return AffineScaler(Eigen::VectorXd::Ones(channels), Eigen::VectorXd::Zero(channels));
}

Eigen::MatrixXd AffineScaler::apply(const Eigen::MatrixXd& physical) const {
  require(physical.cols() == channels(), "scaler channel count mismatch");
  return (physical.array().rowwise() * gain_.transpose().array()).rowwise() +
         offset_.transpose().array();
}

Eigen::MatrixXd AffineScaler::invert(const Eigen::MatrixXd& normalized) const {
  require(normalized.cols() == channels(), "scaler channel count mismatch");
  return (normalized.array().rowwise() - offset_.transpose().array()).rowwise() /
         gain_.transpose().array();
}

Eigen::VectorXd AffineScaler::apply_row(const Eigen::VectorXd& physical) const {
  require(physical.size() == channels(), "scaler channel count mismatch");
  return gain_.cwiseProduct(physical) + offset_;
}

Eigen::VectorXd AffineScaler::invert_row(const Eigen::VectorXd& normalized) const {
  require(normalized.size() == channels(), "scaler channel count mismatch");
  return (normalized - offset_).cwiseQuotient(gain_);
}

AffineScaler fit_scaler(const Eigen::MatrixXd& seq) {
  require(seq.rows() > 0 && seq.cols() > 0, "cannot fit a scaler to an empty sequence");
  Eigen::VectorXd gain(seq.cols());
  Eigen::VectorXd offset(seq.cols());
  for (Eigen::Index c = 0; c < seq.cols(); ++c) {
    const double lo = seq.col(c).minCoeff();
    const double hi = seq.col(c).maxCoeff();
    require(hi > lo, "channel " + std::to_string(c) + " is constant; scaler would not be invertible");
    gain(c) = 2.0 / (hi - lo);
    offset(c) = -(hi + lo) / (hi - lo);
  }
  return AffineScaler(gain, offset);
}

Eigen::Index MprsConfig::samples_per_hold() const {
  return static_cast<Eigen::Index>(std::llround(switching_period / sample_period));
}

Eigen::Index MprsConfig::hold_count() const {
  return static_cast<Eigen::Index>(std::ceil(duration / switching_period - 1e-9));
}

void MprsConfig::validate() const {
  require(sample_period > 0.0, "MPRS sample period must be positive");
  require(switching_period >= sample_period, "MPRS switching period must be at least the sample period");
  const double ratio = switching_period / sample_period;
  require(std::abs(ratio - std::round(ratio)) < 1e-9,
          "MPRS switching period must be a whole number of sample periods");
  require(hi >= lo, "MPRS amplitude interval must satisfy hi >= lo");
  require(levels >= 2, "MPRS needs at least two levels");
  require(duration >= switching_period, "MPRS duration must cover at least one hold");
}

Eigen::VectorXd generate_mprs(const MprsConfig& cfg) {
  cfg.validate();
  const Eigen::Index per_hold = cfg.samples_per_hold();
  const Eigen::Index holds = cfg.hold_count();
  Engine engine = make_engine(cfg.seed);
  std::uniform_int_distribution<int> pick(0, cfg.levels - 1);
  const double step = (cfg.hi - cfg.lo) / static_cast<double>(cfg.levels - 1);

  Eigen::VectorXd signal(per_hold * holds);
  for (Eigen::Index h = 0; h < holds; ++h) {
    const int level = pick(engine);
    // Top level is pinned to hi so rounding cannot leave the interval.
    const double value = level == cfg.levels - 1 ? cfg.hi : cfg.lo + step * level;
    signal.segment(h * per_hold, per_hold).setConstant(value);
  }
  return signal;
}

namespace {

Dataset slice(const Dataset& src, Eigen::Index start, Eigen::Index count) {
  Dataset out;
  out.u = src.u.middleRows(start, count);
  out.y = src.y.middleRows(start, count);
  if (src.disturbance.size() > 0) out.disturbance = src.disturbance.middleRows(start, count);
  if (src.y_noisefree.size() > 0) out.y_noisefree = src.y_noisefree.middleRows(start, count);
  out.sample_period = src.sample_period;
  out.provenance = src.provenance;
  out.provenance.parent_length = src.size();
  out.provenance.first_sample = src.provenance.first_sample + start;
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                  Eigen::Index min_length, Eigen::Index hold_length) {
  dataset.validate();
  require(fraction > 0.0 && fraction < 1.0, "split fraction must lie in (0, 1)");
  const Eigen::Index total = dataset.size();
  Eigen::Index cut = static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(total)));
  if (hold_length > 0) {
    const Eigen::Index snapped = static_cast<Eigen::Index>(
        std::llround(static_cast<double>(cut) / static_cast<double>(hold_length)) * hold_length);
    if (snapped > 0 && snapped < total) cut = snapped;
  }
  cut = std::clamp<Eigen::Index>(cut, 1, total - 1);
  require(cut >= min_length, "training partition has " + std::to_string(cut) +
                                 " samples, fewer than the required " + std::to_string(min_length));
  require(total - cut >= min_length, "validation partition has " + std::to_string(total - cut) +
                                         " samples, fewer than the required " +
                                         std::to_string(min_length));
  return {slice(dataset, 0, cut), slice(dataset, cut, total - cut)};
}

}  // namespace esncert
