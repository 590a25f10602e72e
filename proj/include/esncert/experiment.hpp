#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "esncert/io.hpp"
#include "esncert/plant.hpp"
#include "esncert/scenario.hpp"
#include "esncert/signals.hpp"

namespace esncert {

/// Everything needed to reproduce one identification experiment.
struct ExperimentConfig {
  std::string profile = "desk";
  std::uint64_t seed = 1;
  PlantParams plant;
  MprsConfig mprs;  // duration and seed are derived from the hold counts and `seed`
  int train_holds = 20;
  int validation_holds = 10;
  SimulationConfig simulation;  // noise_seed is derived from `seed`
  double disturbance = 0.55;
  ReservoirConfig reservoir;  // template; `order` is set per sweep entry
  std::vector<Eigen::Index> orders{10, 30, 100};
  double epsilon = 0.05;
  double beta = 1e-7;
  int d = 1;
  BoundKind bound = BoundKind::kTight;
  long exploratory_instances = 0;  // > 0 runs an uncertified campaign of this size
  long test_instances = 100;
  ValidationMode mode = ValidationMode::kFreeRun;
  int workers = 1;
  bool save_all_models = false;
  std::filesystem::path out = "runs/desk";

  /// Built-in profiles: "desk" for quick runs under the tight bound and "full"
  /// for the 21-order sweep under the explicit bound.
  static ExperimentConfig from_profile(const std::string& name);

  std::uint64_t excitation_seed() const;
  std::uint64_t noise_seed() const;
  std::uint64_t campaign_seed(Eigen::Index order) const;
  std::uint64_t test_seed(Eigen::Index order) const;
  ScenarioPlan plan(Eigen::Index order) const;
  ReservoirConfig reservoir_for(Eigen::Index order) const;
  CampaignOptions campaign_options() const;

  void validate() const;
};

Json to_json(const ExperimentConfig& cfg);
/// Fields present in `j` override `base`; a "profile" key selects the base
/// profile first.
ExperimentConfig experiment_from_json(const Json& j);
ExperimentConfig experiment_from_json(const Json& j, ExperimentConfig base);

/// Hash of the fields that affect data and campaigns. Runtime knobs are left out.
std::string config_hash(const ExperimentConfig& cfg);

struct ExperimentData {
  Dataset train;
  Dataset validation;
};

std::filesystem::path data_dir(const ExperimentConfig& cfg);
std::filesystem::path order_dir(const ExperimentConfig& cfg, Eigen::Index order);

/// Simulates the plant under MPRS excitation and splits the record at the
/// training hold count. Pure; nothing is written.
ExperimentData generate_data(const ExperimentConfig& cfg);

/// gen-data: generate_data plus train/validation CSVs and sidecars.
ExperimentData cmd_gen_data(const ExperimentConfig& cfg);
ExperimentData load_data(const ExperimentConfig& cfg);

/// certify: campaign for one order. Writes the campaign files and the extremal
/// models, then returns the manifest.
Json cmd_certify(const ExperimentConfig& cfg, Eigen::Index order);

/// test: fresh-instance violation test against the stored campaign, written
/// to test.json and test.csv. Refuses when the campaign was produced by a
/// different configuration or the fresh streams collide with it.
Json cmd_test(const ExperimentConfig& cfg, Eigen::Index order, long m);

struct ReportRow {
  Eigen::Index order = 0;
  long n_delta = 0;
  bool certified = false;
  double fit_bar = 0.0;
  double rmse_bar = 0.0;
  std::optional<long> m;
  std::optional<long> violations_best;   // FIT above fit_bar
  std::optional<long> violations_worst;  // RMSE above rmse_bar
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<std::string> missing;
};

/// report: collects every order_* directory under `out` into summary.csv and
/// summary.md. Missing or unreadable manifests are listed, not fatal.
Report cmd_report(const std::filesystem::path& out);

}  // namespace esncert
