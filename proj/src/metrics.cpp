#include "esncert/metrics.hpp"

#include <cmath>

#include "esncert/errors.hpp"

namespace esncert {
namespace {

void check_pair(const SequenceRef& measured, const SequenceRef& predicted) {
  require(measured.rows() > 0 && measured.cols() > 0, "metric on an empty sequence");
  require(measured.rows() == predicted.rows() && measured.cols() == predicted.cols(),
          "metric sequences differ in shape");
}

}  // namespace

double rmse(const SequenceRef& measured, const SequenceRef& predicted) {
  check_pair(measured, predicted);
  return std::sqrt((measured - predicted).squaredNorm() / static_cast<double>(measured.rows()));
}

double fit_index(const SequenceRef& measured, const SequenceRef& predicted) {
  check_pair(measured, predicted);
  const Eigen::RowVectorXd mean = measured.colwise().mean();
  const double spread = (measured.rowwise() - mean).norm();
  if (!(spread > 0.0)) throw NumericalError("FIT is undefined for a constant measured sequence");
  return 100.0 * (1.0 - (measured - predicted).norm() / spread);
}

}  // namespace esncert
