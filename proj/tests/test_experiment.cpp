#include <doctest.h>

#include <filesystem>

#include "esncert/experiment.hpp"

using namespace esncert;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny(const std::string& name) {
  ExperimentConfig cfg = ExperimentConfig::from_profile("desk");
  cfg.train_holds = 6;
  cfg.validation_holds = 3;
  cfg.orders = {5, 8};
  cfg.exploratory_instances = 4;
  cfg.test_instances = 3;
  cfg.out = fs::temp_directory_path() / ("esncert_exp_" + name);
  fs::remove_all(cfg.out);
  return cfg;
}

}  // namespace

TEST_CASE("profiles") {
  const ExperimentConfig desk = ExperimentConfig::from_profile("desk");
  CHECK(desk.train_holds == 20);
  CHECK(desk.validation_holds == 10);
  CHECK(desk.plan(100).n_delta == 315);
  const ExperimentConfig full = ExperimentConfig::from_profile("full");
  CHECK(full.orders.size() == 21);
  CHECK(full.plan(10).n_delta == 645);
  CHECK(full.test_instances == 500);
  CHECK_THROWS_AS(ExperimentConfig::from_profile("huge"), std::invalid_argument);
}

TEST_CASE("config JSON round trip and hash scope") {
  ExperimentConfig cfg = tiny("hash");
  const ExperimentConfig back = experiment_from_json(to_json(cfg));
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(back.orders == cfg.orders);
  ExperimentConfig other = cfg;
  other.workers = 7;
  other.out = "elsewhere";
  CHECK(config_hash(other) == config_hash(cfg));
  other.seed = 2;
  CHECK(config_hash(other) != config_hash(cfg));
  CHECK(cfg.campaign_seed(5) != cfg.campaign_seed(8));
  CHECK(cfg.campaign_seed(5) != cfg.test_seed(5));
}

TEST_CASE("end-to-end: gen-data, certify, test and report") {
  const ExperimentConfig cfg = tiny("e2e");
  const ExperimentData data = cmd_gen_data(cfg);
  CHECK(data.train.size() == 600);
  CHECK(data.validation.size() == 300);
  const std::string train_csv = read_text(data_dir(cfg) / "train.csv");
  const Json sidecar = read_json(sidecar_path(data_dir(cfg) / "train.csv"));
  CHECK(sidecar.dump().find("1000") != std::string::npos);

  for (Eigen::Index order : cfg.orders) {
    const Json manifest = cmd_certify(cfg, order);
    CHECK(manifest["plan"]["certified"] == false);
    CHECK(fs::exists(order_dir(cfg, order) / "model_best_fit.json"));
    const Json test = cmd_test(cfg, order, cfg.test_instances);
    CHECK(test["m"] == 3);
  }
  const Report report = cmd_report(cfg.out);
  CHECK(report.rows.size() == 2);
  CHECK(report.missing.empty());
  CHECK(report.rows[0].order == 5);
  CHECK(report.rows[1].m.value() == 3);
  const std::string summary = read_text(cfg.out / "summary.csv");

  // Rerun reproduces every artefact byte for byte.
  cmd_gen_data(cfg);
  CHECK(read_text(data_dir(cfg) / "train.csv") == train_csv);
  const std::string campaign = read_text(order_dir(cfg, 5) / "campaign.json");
  cmd_certify(cfg, 5);
  cmd_test(cfg, 5, cfg.test_instances);
  CHECK(read_text(order_dir(cfg, 5) / "campaign.json") == campaign);
  cmd_report(cfg.out);
  CHECK(read_text(cfg.out / "summary.csv") == summary);
}

TEST_CASE("test refuses a campaign from another configuration") {
  ExperimentConfig cfg = tiny("mismatch");
  cfg.orders = {5};
  cmd_gen_data(cfg);
  cmd_certify(cfg, 5);
  ExperimentConfig changed = cfg;
  changed.epsilon = 0.1;
  CHECK_THROWS_AS(cmd_test(changed, 5, 2), std::invalid_argument);
}

TEST_CASE("report lists orders without a manifest") {
  ExperimentConfig cfg = tiny("missing");
  fs::create_directories(order_dir(cfg, 12));
  const Report report = cmd_report(cfg.out);
  CHECK(report.rows.empty());
  CHECK(report.missing.size() == 1);
}

TEST_CASE("the violation-test size does not invalidate a campaign") {
  ExperimentConfig cfg = tiny("resize");
  cfg.orders = {5};
  cmd_gen_data(cfg);
  cmd_certify(cfg, 5);
  ExperimentConfig bigger = cfg;
  bigger.test_instances = 5;
  CHECK(cmd_test(bigger, 5, bigger.test_instances)["m"] == 5);
}
