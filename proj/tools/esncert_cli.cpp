// Command-line driver: gen-data, certify, test, report.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "esncert/errors.hpp"
#include "esncert/experiment.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct Options {
  std::string config;
  std::string profile;
  std::optional<long> order;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<long> exploratory;
  std::optional<long> instances;
  std::string mode;
  bool save_all_models = false;
};

esncert::ExperimentConfig resolve(const Options& o) {
  using esncert::ExperimentConfig;
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    const esncert::Json j = esncert::read_json(o.config);
    const std::string profile = o.profile.empty() ? j.value("profile", "desk") : o.profile;
    cfg = esncert::experiment_from_json(j, ExperimentConfig::from_profile(profile));
  } else {
    cfg = ExperimentConfig::from_profile(o.profile.empty() ? "desk" : o.profile);
  }
  if (o.workers) cfg.workers = *o.workers;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  if (o.exploratory) cfg.exploratory_instances = *o.exploratory;
  if (o.instances) cfg.test_instances = *o.instances;
  if (!o.mode.empty()) cfg.mode = esncert::validation_mode_from_string(o.mode);
  if (o.save_all_models) cfg.save_all_models = true;
  cfg.validate();
  return cfg;
}

std::vector<Eigen::Index> orders_for(const Options& o, const esncert::ExperimentConfig& cfg) {
  if (o.order) return {static_cast<Eigen::Index>(*o.order)};
  return cfg.orders;
}

void print_report(const esncert::Report& report) {
  for (const auto& r : report.rows) {
    std::cout << "order " << r.order << ": N=" << r.n_delta << (r.certified ? "" : " (uncertified)")
              << " FIT_bar=" << r.fit_bar << " RMSE_bar=" << r.rmse_bar;
    if (r.m) std::cout << " violations FIT " << *r.violations_best << "/" << *r.m << ", RMSE " << *r.violations_worst << "/" << *r.m;
    std::cout << "\n";
  }
  for (const auto& m : report.missing) std::cerr << "missing: " << m << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Echo state network identification with scenario-based optimality certificates"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "Experiment JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--profile", o.profile, "Built-in profile (desk or full)");
    cmd->add_option("--workers", o.workers, "Worker threads for campaign instances")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Global seed");
    cmd->add_option("--out", o.out, "Output directory");
  };

  auto* gen = app.add_subcommand("gen-data", "Simulate the plant under MPRS excitation and write datasets");
  add_common(gen);

  auto* certify = app.add_subcommand("certify", "Run the scenario campaign for one order or the whole sweep");
  add_common(certify);
  certify->add_option("--order", o.order, "Reservoir order (default: every order in the config)")->check(CLI::PositiveNumber);
  certify->add_option("--exploratory", o.exploratory, "Run an uncertified campaign with this many instances")
      ->check(CLI::PositiveNumber);
  certify->add_option("--mode", o.mode, "Validation mode: free_run or teacher_forced");
  certify->add_flag("--save-all-models", o.save_all_models, "Write every trained model, not only the extremal ones");

  auto* test = app.add_subcommand("test", "Count violations of the stored bounds by fresh instances");
  add_common(test);
  test->add_option("--order", o.order, "Reservoir order (default: every order in the config)")->check(CLI::PositiveNumber);
  test->add_option("-M,--instances", o.instances, "Number of fresh instances")->check(CLI::NonNegativeNumber);
  test->add_option("--exploratory", o.exploratory, "Must match the value used for certify");
  test->add_option("--mode", o.mode, "Validation mode: free_run or teacher_forced");

  auto* report = app.add_subcommand("report", "Aggregate manifests into summary.csv and summary.md");
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const esncert::ExperimentConfig cfg = resolve(o);
    if (gen->parsed()) {
      const auto data = esncert::cmd_gen_data(cfg);
      std::cout << "wrote " << (esncert::data_dir(cfg) / "train.csv").string() << " (" << data.train.size()
                << " samples) and " << (esncert::data_dir(cfg) / "validation.csv").string() << " ("
                << data.validation.size() << " samples)\n";
    } else if (certify->parsed()) {
      for (Eigen::Index order : orders_for(o, cfg)) {
        const esncert::Json manifest = esncert::cmd_certify(cfg, order);
        std::cout << "order " << order << ": N=" << manifest["plan"]["n_delta"]
                  << (manifest["plan"]["certified"].get<bool>() ? "" : " (uncertified)")
                  << " FIT_bar=" << manifest["bounds"]["fit_bar"] << " RMSE_bar=" << manifest["bounds"]["rmse_bar"]
                  << " j*=" << manifest["selection"]["best_fit"] << "\n";
      }
      if (!o.order) print_report(esncert::cmd_report(cfg.out));
    } else if (test->parsed()) {
      for (Eigen::Index order : orders_for(o, cfg)) {
        const esncert::Json r = esncert::cmd_test(cfg, order, cfg.test_instances);
        if (r["empty"].get<bool>()) {
          std::cout << "order " << order << ": no test instances; violation rates undefined\n";
          continue;
        }
        std::cout << "order " << order << ": FIT violations " << r["count_fit"] << "/" << r["m"]
                  << ", RMSE violations " << r["count_rmse"] << "/" << r["m"] << "\n";
      }
      if (!o.order) print_report(esncert::cmd_report(cfg.out));
    } else if (report->parsed()) {
      print_report(esncert::cmd_report(cfg.out));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
