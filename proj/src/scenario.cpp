#include "esncert/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "esncert/errors.hpp"
#include "esncert/metrics.hpp"
#include "esncert/rng.hpp"
#include "parallel.hpp"

namespace esncert {
namespace {

void check_probabilities(double epsilon, double beta) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
}

// ceil() that forgives representation error just above an integer.
long ceil_count(double value) {
  const double nearest = std::round(value);
  if (std::abs(value - nearest) <= 1e-9 * std::max(1.0, std::abs(value))) return static_cast<long>(nearest);
  return static_cast<long>(std::ceil(value));
}

void check_failures(long failures, long total, double max_fraction, const char* what) {
  if (total > 0 && static_cast<double>(failures) > max_fraction * static_cast<double>(total)) {
    std::ostringstream msg;
    msg << what << " aborted: " << failures << " of " << total
        << " instances failed, above the allowed fraction " << max_fraction;
    throw NumericalError(msg.str());
  }
}

}  // namespace

long required_scenarios(double epsilon, double beta, int d) {
  check_probabilities(epsilon, beta);
  require(d >= 1, "number of decision variables must be at least 1");
  return ceil_count(2.0 / epsilon * (std::log(1.0 / beta) + d - 1));
}

long tight_required_scenarios(double epsilon, double beta) {
  check_probabilities(epsilon, beta);
  return std::max(1L, ceil_count(std::log(beta) / std::log1p(-epsilon)));
}

std::string to_string(BoundKind bound) { return bound == BoundKind::kTight ? "tight" : "explicit"; }

BoundKind bound_kind_from_string(const std::string& name) {
  if (name == "explicit") return BoundKind::kExplicit;
  if (name == "tight") return BoundKind::kTight;
  throw std::invalid_argument("unknown scenario bound '" + name + "'");
}

long bound_scenarios(BoundKind bound, double epsilon, double beta, int d) {
  if (bound == BoundKind::kExplicit) return required_scenarios(epsilon, beta, d);
  require(d == 1, "the tight bound is implemented for a single decision variable");
  return tight_required_scenarios(epsilon, beta);
}

ScenarioPlan ScenarioPlan::certified_plan(double epsilon, double beta, std::uint64_t base_seed, int d,
                                          BoundKind bound) {
  ScenarioPlan plan;
  plan.epsilon = epsilon;
  plan.beta = beta;
  plan.d = d;
  plan.bound = bound;
  plan.n_delta = bound_scenarios(bound, epsilon, beta, d);
  plan.base_seed = base_seed;
  plan.certified = true;
  return plan;
}

ScenarioPlan ScenarioPlan::exploratory(long n_delta, double epsilon, double beta, std::uint64_t base_seed) {
  ScenarioPlan plan;
  plan.epsilon = epsilon;
  plan.beta = beta;
  plan.n_delta = n_delta;
  plan.base_seed = base_seed;
  plan.certified = false;
  plan.validate();
  return plan;
}

std::uint64_t ScenarioPlan::instance_seed(long j) const {
  return derive_seed(base_seed, StreamDomain::kInstance, static_cast<std::uint64_t>(j));
}

void ScenarioPlan::validate() const {
  check_probabilities(epsilon, beta);
  require(d >= 1, "number of decision variables must be at least 1");
  require(n_delta >= 1, "a campaign needs at least one instance");
  if (certified)
    require(n_delta >= bound_scenarios(bound, epsilon, beta, d),
            "certified plan has fewer instances than the " + to_string(bound) + " scenario bound");
}

std::string to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::kBestFit:
      return "best_fit";
    case Criterion::kWorstFit:
      return "worst_fit";
    case Criterion::kBestRmse:
      return "best_rmse";
    case Criterion::kWorstRmse:
      return "worst_rmse";
  }
  return "unknown";
}

Criterion criterion_from_string(const std::string& name) {
  for (Criterion c : {Criterion::kBestFit, Criterion::kWorstFit, Criterion::kBestRmse, Criterion::kWorstRmse})
    if (to_string(c) == name) return c;
  throw std::invalid_argument("unknown selection criterion '" + name + "'");
}

long select(const CampaignResult& result, Criterion criterion) {
  long chosen = -1;
  for (const InstanceRecord& r : result.records) {
    if (r.failed) continue;
    if (chosen < 0) {
      chosen = r.index;
      continue;
    }
    const InstanceRecord& c = result.records[static_cast<std::size_t>(chosen)];
    bool better = false;
    switch (criterion) {
      case Criterion::kBestFit:
        better = r.fit > c.fit;
        break;
      case Criterion::kWorstFit:
        better = r.fit < c.fit;
        break;
      case Criterion::kBestRmse:
        better = r.rmse < c.rmse;
        break;
      case Criterion::kWorstRmse:
        better = r.rmse > c.rmse;
        break;
    }
    // Strict comparison keeps the lowest index on ties.
    if (better) chosen = r.index;
  }
  if (chosen < 0) throw std::invalid_argument("cannot select from a campaign without successful instances");
  return chosen;
}

void CampaignResult::summarize() {
  for (std::size_t i = 0; i < records.size(); ++i)
    require(records[i].index == static_cast<long>(i), "campaign records must be ordered by index");
  failures = 0;
  for (const InstanceRecord& r : records) failures += r.failed ? 1 : 0;
  best_fit = select(*this, Criterion::kBestFit);
  worst_fit = select(*this, Criterion::kWorstFit);
  best_rmse = select(*this, Criterion::kBestRmse);
  worst_rmse = select(*this, Criterion::kWorstRmse);
  fit_bar = records[static_cast<std::size_t>(best_fit)].fit;
  rmse_bar = records[static_cast<std::size_t>(worst_rmse)].rmse;
}

InstanceRecord evaluate_instance(long index, std::uint64_t seed, const ReservoirConfig& cfg,
                                 const Dataset& train, const Dataset& validation,
                                 const AffineScaler& input_scaler,
                                 const AffineScaler& output_scaler, const CampaignOptions& options) {
  InstanceRecord record;
  record.index = index;
  record.seed = seed;
  const Eigen::Index skip = options.metric_skip >= 0 ? options.metric_skip : cfg.washout;
  require(validation.size() > skip + 1, "validation set is shorter than the metric washout");

  Engine engine = make_engine(seed);
  try {
    TrainedEsn trained = train_esn(cfg, engine, train, input_scaler, output_scaler);
    if (trained.fit.rank_deficient) {
      record.redraws = 1;
      trained = train_esn(cfg, engine, train, input_scaler, output_scaler);
    }
    record.rank = trained.fit.rank;
    record.orthogonality = trained.fit.orthogonality;
    if (trained.fit.rank_deficient) {
      record.failed = true;
      record.failure = "regressor rank " + std::to_string(trained.fit.rank) + " after redraw";
      return record;
    }
    trained.model.seed = seed;
    const Eigen::MatrixXd prediction = predict(trained.model, validation, options.mode);
    const Eigen::Index rows = validation.size() - skip;
    record.fit = fit_index(validation.y.bottomRows(rows), prediction.bottomRows(rows));
    record.rmse = rmse(validation.y.bottomRows(rows), prediction.bottomRows(rows));
    if (!std::isfinite(record.fit) || !std::isfinite(record.rmse)) {
      record.failed = true;
      record.failure = "non-finite validation metric";
      return record;
    }
    if (options.keep_models) record.model = std::move(trained.model);
  } catch (const NumericalError& e) {
    record.failed = true;
    record.failure = e.what();
  }
  return record;
}

namespace {

std::vector<InstanceRecord> evaluate_all(long count, const std::function<std::uint64_t(long)>& seed_of,
                                         const ReservoirConfig& cfg, const Dataset& train,
                                         const Dataset& validation, const CampaignOptions& options) {
  cfg.validate();
  train.validate();
  validation.validate();
  const AffineScaler input_scaler = fit_scaler(train.u);
  const AffineScaler output_scaler = fit_scaler(train.y);
  std::vector<InstanceRecord> records(static_cast<std::size_t>(count));
  detail::parallel_for(count, options.workers, [&](long j) {
    records[static_cast<std::size_t>(j)] =
        evaluate_instance(j, seed_of(j), cfg, train, validation, input_scaler, output_scaler, options);
  });
  return records;
}

}  // namespace

CampaignResult run_campaign(const ScenarioPlan& plan, const Dataset& train, const Dataset& validation,
                            const ReservoirConfig& cfg, const CampaignOptions& options) {
  plan.validate();
  CampaignResult result;
  result.plan = plan;
  result.mode = options.mode;
  result.records = evaluate_all(plan.n_delta, [&](long j) { return plan.instance_seed(j); }, cfg, train,
                                validation, options);
  long failures = 0;
  for (const InstanceRecord& r : result.records) {
    if (!r.failed) continue;
    ++failures;
    result.warnings.push_back("instance " + std::to_string(r.index) + " failed: " + r.failure);
  }
  check_failures(failures, plan.n_delta, options.max_failure_fraction, "campaign");
  result.summarize();
  return result;
}

ViolationReport empirical_violation_test(const CampaignResult& result, long m, std::uint64_t test_seed,
                                         const Dataset& train, const Dataset& validation,
                                         const ReservoirConfig& cfg, const CampaignOptions& options) {
  require(m >= 0, "number of test instances must be nonnegative");
  ViolationReport report;
  report.fit_bar = result.fit_bar;
  report.rmse_bar = result.rmse_bar;
  report.test_seed = test_seed;
  if (m == 0) return report;

  std::unordered_set<std::uint64_t> campaign_seeds;
  for (const InstanceRecord& r : result.records) campaign_seeds.insert(r.seed);
  auto seed_of = [&](long i) { return derive_seed(test_seed, StreamDomain::kInstance, static_cast<std::uint64_t>(i)); };
  for (long i = 0; i < m; ++i)
    if (campaign_seeds.count(seed_of(i)))
      throw std::invalid_argument("test stream " + std::to_string(i) + " collides with a campaign seed");

  report.records = evaluate_all(m, seed_of, cfg, train, validation, options);
  long failures = 0;
  for (const InstanceRecord& r : report.records) {
    if (r.failed) {
      ++failures;
      continue;
    }
    report.count_fit += r.fit > result.fit_bar ? 1 : 0;
    report.count_rmse += r.rmse > result.rmse_bar ? 1 : 0;
  }
  check_failures(failures, m, options.max_failure_fraction, "violation test");
  report.failures = failures;
  report.m = m - failures;
  if (report.m > 0) {
    report.fit_rate = static_cast<double>(report.count_fit) / static_cast<double>(report.m);
    report.rmse_rate = static_cast<double>(report.count_rmse) / static_cast<double>(report.m);
  }
  return report;
}

}  // namespace esncert
