#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "esncert/errors.hpp"
#include "esncert/metrics.hpp"

using esncert::fit_index;
using esncert::rmse;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}
}  // namespace

TEST_CASE("rmse examples") {
  const Eigen::VectorXd y = vec({1, 2, 3});
  CHECK(rmse(y, y) == 0.0);
  CHECK(rmse(vec({1, 1, 1, 1}), vec({0, 0, 0, 0})) == doctest::Approx(1.0));
  CHECK(rmse(vec({1, 2, 3}), vec({1, 1, 1})) == doctest::Approx(1.2909944487358056).epsilon(1e-15));
}

TEST_CASE("rmse rejects empty and mismatched sequences") {
  CHECK_THROWS_AS(rmse(Eigen::VectorXd(), Eigen::VectorXd()), std::invalid_argument);
  CHECK_THROWS_AS(rmse(vec({1, 2}), vec({1})), std::invalid_argument);
}

TEST_CASE("fit index examples") {
  const Eigen::VectorXd y = vec({0.5, 2, -1, 4});
  CHECK(fit_index(y, y) == 100.0);
  CHECK(fit_index(y, Eigen::VectorXd::Constant(4, y.mean())) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(fit_index(vec({0, 2}), vec({1, 1})) == doctest::Approx(0.0));
  CHECK(fit_index(vec({0, 2}), vec({0, 1})) == doctest::Approx(29.289321881345245).epsilon(1e-14));
}

TEST_CASE("fit index is undefined for a constant measurement") {
  CHECK_THROWS_AS(fit_index(vec({3, 3, 3}), vec({1, 2, 3})), esncert::NumericalError);
}

TEST_CASE("metric properties over random sequences") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index k = 2 + trial % 40;
    Eigen::VectorXd a(k), b(k), c(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      a(i) = g(rng);
      b(i) = g(rng);
      c(i) = g(rng);
    }
    CHECK(fit_index(a, b) <= 100.0);

    // Joint permutation leaves rmse unchanged.
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::VectorXd pa(k), pb(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      pa(i) = a(perm[static_cast<std::size_t>(i)]);
      pb(i) = b(perm[static_cast<std::size_t>(i)]);
    }
    CHECK(rmse(pa, pb) == doctest::Approx(rmse(a, b)).epsilon(1e-12));

    // A shared affine de-normalization preserves the FIT ordering of two models.
    const double gain = 0.1 + std::abs(g(rng)) * 3.0;
    const double offset = g(rng) * 5.0;
    auto denorm = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd((v.array() - offset) / gain); };
    const bool before = fit_index(a, b) > fit_index(a, c);
    const bool after = fit_index(denorm(a), denorm(b)) > fit_index(denorm(a), denorm(c));
    CHECK(before == after);
    CHECK(fit_index(denorm(a), denorm(b)) == doctest::Approx(fit_index(a, b)).epsilon(1e-9));
  }
}
