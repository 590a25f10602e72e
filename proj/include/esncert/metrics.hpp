#pragma once

#include <Eigen/Dense>

namespace esncert {

using SequenceRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Root-mean-square error sqrt(||measured - predicted||^2 / K), rows are
/// samples. Throws on empty or mismatched sequences.
double rmse(const SequenceRef& measured, const SequenceRef& predicted);

/// FIT = 100 * (1 - ||measured - predicted|| / ||measured - mean(measured)||),
/// with the mean taken per output channel. Bounded above by 100. Throws
/// NumericalError when `measured` is constant.
double fit_index(const SequenceRef& measured, const SequenceRef& predicted);

}  // namespace esncert
