#include <doctest.h>

#include <set>

#include "esncert/signals.hpp"
#include "oracles.hpp"

using namespace esncert;

TEST_CASE("generate_mprs: structure of the default excitation") {
  MprsConfig cfg;
  cfg.seed = 4;
  const Eigen::VectorXd u = generate_mprs(cfg);
  CHECK(cfg.samples_per_hold() == 100);
  CHECK(u.size() == 3000);
  CHECK(u.minCoeff() >= 12.7);
  CHECK(u.maxCoeff() <= 16.7);
  for (Eigen::Index k = 1; k < u.size(); ++k)
    if (u(k) != u(k - 1)) CHECK(k % 100 == 0);
  std::set<double> levels(u.data(), u.data() + u.size());
  for (double v : levels) {
    const double step = (v - 12.7) / (4.0 / 7.0);
    CHECK(step == doctest::Approx(std::round(step)).epsilon(1e-9));
  }
}

TEST_CASE("generate_mprs: degenerate interval is constant") {
  MprsConfig cfg;
  cfg.levels = 2;
  cfg.lo = cfg.hi = 14.2;
  const Eigen::VectorXd u = generate_mprs(cfg);
  CHECK((u.array() == 14.2).all());
}

namespace {

double level_chi_square(std::uint64_t seed) {
  MprsConfig cfg;
  cfg.duration = 1000 * cfg.switching_period;
  cfg.seed = seed;
  const Eigen::VectorXd u = generate_mprs(cfg);
  std::vector<long> counts(8, 0);
  for (Eigen::Index h = 0; h < 1000; ++h) {
    const long idx = std::lround((u(h * 100) - cfg.lo) / ((cfg.hi - cfg.lo) / 7.0));
    REQUIRE(idx >= 0);
    REQUIRE(idx < 8);
    ++counts[static_cast<std::size_t>(idx)];
  }
  return oracle::chi_square_uniform(counts);
}

// 95th percentile of chi-square with 7 degrees of freedom.
constexpr double kChi2Crit = 14.067;

}  // namespace

TEST_CASE("generate_mprs: level frequencies pass a chi-square test") {
  CHECK(level_chi_square(0) < kChi2Crit);
}

TEST_CASE("generate_mprs: chi-square test rejects at its nominal rate across seeds") {
  // 400 seeds at level 0.05: 20 rejections expected, sd about 4.4.
  long rejected = 0;
  for (std::uint64_t s = 1000; s < 1400; ++s) rejected += level_chi_square(s) >= kChi2Crit ? 1 : 0;
  CHECK(rejected <= 40);
  CHECK(rejected >= 5);
}

TEST_CASE("generate_mprs: seeds select different sequences") {
  MprsConfig a, b;
  a.seed = 1;
  b.seed = 2;
  CHECK(generate_mprs(a) == generate_mprs(a));
  CHECK(generate_mprs(a) != generate_mprs(b));
}

TEST_CASE("MprsConfig validation") {
  MprsConfig cfg;
  cfg.switching_period = 15;  // not a multiple of the sample period
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.lo = 17;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.levels = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("fit_scaler: min-max arithmetic and round trip") {
  Eigen::MatrixXd seq(4, 1);
  seq << 12.7, 16.7, 14.0, 13.1;
  const AffineScaler s = fit_scaler(seq);
  CHECK(s.gain()(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.offset()(0) == doctest::Approx(-14.7 * 0.5).epsilon(1e-15));
  const Eigen::MatrixXd z = s.apply(seq);
  CHECK(z.minCoeff() == doctest::Approx(-1.0));
  CHECK(z.maxCoeff() == doctest::Approx(1.0));
  CHECK((s.invert(z) - seq).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd sym(3, 1);
  sym << -1, 0.3, 1;
  const AffineScaler id = fit_scaler(sym);
  CHECK(id.gain()(0) == doctest::Approx(1.0));
  CHECK(id.offset()(0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(fit_scaler(Eigen::MatrixXd::Constant(5, 1, 3.0)), std::invalid_argument);
}

TEST_CASE("split: lengths, order and provenance") {
  Dataset d;
  d.u.resize(1000, 1);
  d.y.resize(1000, 1);
  for (Eigen::Index k = 0; k < 1000; ++k) {
    d.u(k, 0) = static_cast<double>(k);
    d.y(k, 0) = -static_cast<double>(k);
  }
  d.sample_period = 10;
  d.provenance.origin = "unit";
  d.provenance.seeds = {{"excitation", 5}, {"noise", 6}};

  auto [tr, va] = split(d, 0.5, 100);
  CHECK(tr.size() == 500);
  CHECK(va.size() == 500);
  CHECK(tr.u(499, 0) == 499.0);
  CHECK(va.u(0, 0) == 500.0);
  CHECK(va.provenance.first_sample == 500);
  CHECK(va.provenance.parent_length == 1000);
  CHECK(tr.provenance.seeds == d.provenance.seeds);
  CHECK(va.provenance.seeds == d.provenance.seeds);
  CHECK(va.sample_period == 10);

  auto [tr2, va2] = split(d, 0.63, 100, 100);
  CHECK(tr2.size() == 600);
  CHECK(tr2.size() + va2.size() == 1000);

  CHECK_THROWS_AS(split(d, 0.95, 100), std::invalid_argument);
  CHECK_THROWS_AS(split(d, 1.0, 1), std::invalid_argument);
}
