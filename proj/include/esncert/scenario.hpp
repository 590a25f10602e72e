#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "esncert/esn.hpp"
#include "esncert/signals.hpp"

namespace esncert {

/// Smallest N with N >= (2 / epsilon) (ln(1 / beta) + d - 1).
long required_scenarios(double epsilon, double beta, int d);

/// Smallest N with (1 - epsilon)^N <= beta, the exact requirement when the
/// sampled program has a single decision variable (a sample maximum).
long tight_required_scenarios(double epsilon, double beta);

/// Which sample-size requirement a certified plan meets.
enum class BoundKind { kExplicit, kTight };

std::string to_string(BoundKind bound);
BoundKind bound_kind_from_string(const std::string& name);

/// Instance count demanded by `bound` (the tight form needs d == 1).
long bound_scenarios(BoundKind bound, double epsilon, double beta, int d);

struct ScenarioPlan {
  double epsilon = 0.05;
  double beta = 1e-7;
  int d = 1;
  long n_delta = 0;
  std::uint64_t base_seed = 0;
  bool certified = false;
  BoundKind bound = BoundKind::kExplicit;

  /// Plan whose instance count is exactly the requested bound.
  static ScenarioPlan certified_plan(double epsilon, double beta, std::uint64_t base_seed, int d = 1,
                                     BoundKind bound = BoundKind::kExplicit);
  /// Plan with an arbitrary instance count; carries no certificate.
  static ScenarioPlan exploratory(long n_delta, double epsilon, double beta, std::uint64_t base_seed);

  std::uint64_t instance_seed(long j) const;
  void validate() const;
};

enum class Criterion { kBestFit, kWorstFit, kBestRmse, kWorstRmse };

std::string to_string(Criterion criterion);
Criterion criterion_from_string(const std::string& name);

struct InstanceRecord {
  long index = 0;
  std::uint64_t seed = 0;
  double fit = 0.0;
  double rmse = 0.0;
  bool failed = false;
  std::string failure;
  int redraws = 0;
  Eigen::Index rank = 0;
  double orthogonality = 0.0;
  std::optional<EsnModel> model;
};

struct CampaignOptions {
  ValidationMode mode = ValidationMode::kFreeRun;
  int workers = 1;
  bool keep_models = false;
  double max_failure_fraction = 0.01;
  // Leading validation samples left out of the metrics; negative means the
  // reservoir washout.
  Eigen::Index metric_skip = -1;
};

struct CampaignResult {
  ScenarioPlan plan;
  ValidationMode mode = ValidationMode::kFreeRun;
  std::vector<InstanceRecord> records;
  long best_fit = -1;
  long worst_fit = -1;
  long best_rmse = -1;
  long worst_rmse = -1;
  double fit_bar = 0.0;   // max FIT, the best-case certificate
  double rmse_bar = 0.0;  // max RMSE, the worst-case certificate
  long failures = 0;
  std::vector<std::string> warnings;

  /// Recomputes indices and bounds from `records`, skipping failed ones.
  void summarize();
};

struct ViolationReport {
  long m = 0;
  long count_fit = 0;
  long count_rmse = 0;
  std::optional<double> fit_rate;  // empty when m == 0
  std::optional<double> rmse_rate;
  double fit_bar = 0.0;
  double rmse_bar = 0.0;
  std::uint64_t test_seed = 0;
  long failures = 0;
  std::vector<InstanceRecord> records;
};

/// Trains and scores one instance from its own stream. Rank deficiency
/// triggers one redraw from the same stream; a second deficient draw marks
/// the record as failed.
InstanceRecord evaluate_instance(long index, std::uint64_t seed, const ReservoirConfig& cfg,
                                 const Dataset& train, const Dataset& validation,
                                 const AffineScaler& input_scaler,
                                 const AffineScaler& output_scaler, const CampaignOptions& options);

/// Trains plan.n_delta independent networks and scores each on `validation`
/// (physical units, scalers fitted on `train`). Throws NumericalError when
/// more than `max_failure_fraction` of the instances fail.
CampaignResult run_campaign(const ScenarioPlan& plan, const Dataset& train, const Dataset& validation,
                            const ReservoirConfig& cfg, const CampaignOptions& options = {});

/// Extremal instance for `criterion`; ties go to the lowest index.
long select(const CampaignResult& result, Criterion criterion);

/// Trains `m` fresh instances from streams derived from `test_seed` and
/// counts FIT > fit_bar and RMSE > rmse_bar. Refuses to run when any fresh
/// seed collides with a campaign seed.
ViolationReport empirical_violation_test(const CampaignResult& result, long m, std::uint64_t test_seed,
                                         const Dataset& train, const Dataset& validation,
                                         const ReservoirConfig& cfg,
                                         const CampaignOptions& options = {});

}  // namespace esncert
