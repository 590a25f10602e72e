#pragma once

// Test-only reference computations. None of these call into the library
// paths they are used to check.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

// Largest singular value by power iteration on M'M.
inline double largest_singular_value(const Eigen::MatrixXd& m, int iterations = 20000) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = std::sqrt(norm);
    if ((w - v).norm() < 1e-15 && std::abs(next - sigma) < 1e-15 * next) return next;
    v = w;
    sigma = next;
  }
  return sigma;
}

// Smallest integer N >= 1 with pred(N) true, by linear search.
inline long smallest(const std::function<bool(long)>& pred, long limit = 10'000'000) {
  for (long n = 1; n <= limit; ++n)
    if (pred(n)) return n;
  return -1;
}

// Plain bisection on a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Least squares via the normal equations (well-conditioned toy problems only).
inline Eigen::MatrixXd normal_equations(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& y) {
  return (phi.transpose() * phi).inverse() * phi.transpose() * y;
}

// Pearson chi-square statistic of counts against a uniform expectation.
inline double chi_square_uniform(const std::vector<long>& counts) {
  long total = 0;
  for (long c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (long c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

}  // namespace oracle
