#include "esncert/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <thread>

#include "esncert/errors.hpp"
#include "esncert/rng.hpp"

namespace esncert {
namespace fs = std::filesystem;

namespace {

std::string order_name(Eigen::Index order) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "order_%04ld", static_cast<long>(order));
  return buf;
}

Json seed_lineage(const ExperimentConfig& cfg) { return {{"global", cfg.seed}}; }

}  // namespace

ExperimentConfig ExperimentConfig::from_profile(const std::string& name) {
  ExperimentConfig cfg;
  cfg.profile = name;
  if (name == "desk") return cfg;
  if (name == "full") {
    cfg.train_holds = 100;
    cfg.validation_holds = 30;
    cfg.orders = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 120, 140, 160, 180, 200, 250, 300, 350, 400, 450, 500};
    cfg.bound = BoundKind::kExplicit;
    cfg.test_instances = 500;
    cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    cfg.out = "runs/full";
    return cfg;
  }
  throw std::invalid_argument("unknown profile '" + name + "' (expected desk or full)");
}

std::uint64_t ExperimentConfig::excitation_seed() const { return derive_seed(seed, StreamDomain::kExcitation, 0); }
std::uint64_t ExperimentConfig::noise_seed() const { return derive_seed(seed, StreamDomain::kNoise, 0); }

std::uint64_t ExperimentConfig::campaign_seed(Eigen::Index order) const {
  return derive_seed(seed, StreamDomain::kCampaign, static_cast<std::uint64_t>(order));
}

std::uint64_t ExperimentConfig::test_seed(Eigen::Index order) const {
  return derive_seed(seed, StreamDomain::kTest, static_cast<std::uint64_t>(order));
}

ScenarioPlan ExperimentConfig::plan(Eigen::Index order) const {
  if (exploratory_instances > 0)
    return ScenarioPlan::exploratory(exploratory_instances, epsilon, beta, campaign_seed(order));
  return ScenarioPlan::certified_plan(epsilon, beta, campaign_seed(order), d, bound);
}

ReservoirConfig ExperimentConfig::reservoir_for(Eigen::Index order) const {
  ReservoirConfig r = reservoir;
  r.order = order;
  return r;
}

CampaignOptions ExperimentConfig::campaign_options() const {
  CampaignOptions options;
  options.mode = mode;
  options.workers = workers;
  options.keep_models = save_all_models;
  return options;
}

void ExperimentConfig::validate() const {
  plant.validate();
  simulation.validate();
  reservoir.validate();
  require(train_holds > 0 && validation_holds > 0, "hold counts must be positive");
  require(disturbance >= 0.0, "disturbance flow must be nonnegative");
  require(!orders.empty(), "at least one reservoir order is required");
  for (std::size_t i = 0; i < orders.size(); ++i) {
    require(orders[i] > 0, "reservoir orders must be positive");
    if (i > 0) require(orders[i] > orders[i - 1], "reservoir orders must be strictly increasing");
  }
  require(epsilon > 0.0 && epsilon < 1.0 && beta > 0.0 && beta < 1.0, "epsilon and beta must lie in (0, 1)");
  require(d >= 1, "d must be at least 1");
  require(exploratory_instances >= 0 && test_instances >= 0, "instance counts must be nonnegative");
  require(workers >= 1, "worker count must be positive");
  MprsConfig m = mprs;
  m.sample_period = simulation.sample_period;
  m.duration = m.switching_period * (train_holds + validation_holds);
  m.validate();
}

Json to_json(const ExperimentConfig& cfg) {
  return {{"format", "esncert.experiment"},
          {"version", kFormatVersion},
          {"profile", cfg.profile},
          {"seed", cfg.seed},
          {"plant", to_json(cfg.plant)},
          {"mprs",
           {{"switching_period", cfg.mprs.switching_period},
            {"lo", cfg.mprs.lo},
            {"hi", cfg.mprs.hi},
            {"levels", cfg.mprs.levels}}},
          {"train_holds", cfg.train_holds},
          {"validation_holds", cfg.validation_holds},
          {"simulation",
           {{"sample_period", cfg.simulation.sample_period},
            {"substeps", cfg.simulation.substeps},
            {"noise_std", cfg.simulation.noise_std},
            {"initial",
             {{"wa4", cfg.simulation.initial.wa4},
              {"wb4", cfg.simulation.initial.wb4},
              {"level", cfg.simulation.initial.level}}}}},
          {"disturbance", cfg.disturbance},
          {"reservoir", to_json(cfg.reservoir)},
          {"orders", cfg.orders},
          {"epsilon", cfg.epsilon},
          {"beta", cfg.beta},
          {"d", cfg.d},
          {"bound", to_string(cfg.bound)},
          {"exploratory_instances", cfg.exploratory_instances},
          {"test_instances", cfg.test_instances},
          {"mode", to_string(cfg.mode)},
          {"workers", cfg.workers},
          {"save_all_models", cfg.save_all_models},
          {"out", cfg.out.string()}};
}

ExperimentConfig experiment_from_json(const Json& j) {
  return experiment_from_json(j, ExperimentConfig::from_profile(j.value("profile", "desk")));
}

ExperimentConfig experiment_from_json(const Json& j, ExperimentConfig cfg) {
  if (j.contains("version"))
    require(j.at("version").get<int>() == kFormatVersion, "unsupported experiment config version");
  if (j.contains("profile")) cfg.profile = j.at("profile").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("plant")) cfg.plant = plant_params_from_json(j.at("plant"), cfg.plant);
  if (j.contains("mprs")) cfg.mprs = mprs_config_from_json(j.at("mprs"), cfg.mprs);
  if (j.contains("train_holds")) cfg.train_holds = j.at("train_holds").get<int>();
  if (j.contains("validation_holds")) cfg.validation_holds = j.at("validation_holds").get<int>();
  if (j.contains("simulation")) cfg.simulation = simulation_config_from_json(j.at("simulation"), cfg.simulation);
  if (j.contains("disturbance")) cfg.disturbance = j.at("disturbance").get<double>();
  if (j.contains("reservoir")) cfg.reservoir = reservoir_config_from_json(j.at("reservoir"), cfg.reservoir);
  if (j.contains("orders")) cfg.orders = j.at("orders").get<std::vector<Eigen::Index>>();
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
  if (j.contains("d")) cfg.d = j.at("d").get<int>();
  if (j.contains("bound")) cfg.bound = bound_kind_from_string(j.at("bound").get<std::string>());
  if (j.contains("exploratory_instances")) cfg.exploratory_instances = j.at("exploratory_instances").get<long>();
  if (j.contains("test_instances")) cfg.test_instances = j.at("test_instances").get<long>();
  if (j.contains("mode")) cfg.mode = validation_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  if (j.contains("save_all_models")) cfg.save_all_models = j.at("save_all_models").get<bool>();
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) {
  Json j = to_json(cfg);
  for (const char* key : {"profile", "workers", "save_all_models", "out", "test_instances"}) j.erase(key);
  return json_hash(j);
}

fs::path data_dir(const ExperimentConfig& cfg) { return cfg.out / "data"; }
fs::path order_dir(const ExperimentConfig& cfg, Eigen::Index order) { return cfg.out / order_name(order); }

ExperimentData generate_data(const ExperimentConfig& cfg) {
  cfg.validate();
  MprsConfig mprs = cfg.mprs;
  mprs.sample_period = cfg.simulation.sample_period;
  mprs.duration = mprs.switching_period * (cfg.train_holds + cfg.validation_holds);
  mprs.seed = cfg.excitation_seed();
  const Eigen::VectorXd u = generate_mprs(mprs);

  SimulationConfig sim = cfg.simulation;
  sim.noise_seed = cfg.noise_seed();
  Dataset full = simulate(u, Eigen::VectorXd::Constant(u.size(), cfg.disturbance), sim, cfg.plant);
  full.provenance.origin = "mprs+plant";
  full.provenance.seeds["global"] = cfg.seed;
  full.provenance.seeds["excitation"] = mprs.seed;

  const double fraction = static_cast<double>(cfg.train_holds) / (cfg.train_holds + cfg.validation_holds);
  const Eigen::Index minimum = cfg.reservoir.washout + 2;
  auto [train, validation] = split(full, fraction, minimum, mprs.samples_per_hold());
  return {std::move(train), std::move(validation)};
}

ExperimentData cmd_gen_data(const ExperimentConfig& cfg) {
  ExperimentData data = generate_data(cfg);
  MprsConfig mprs = cfg.mprs;
  mprs.sample_period = cfg.simulation.sample_period;
  mprs.duration = mprs.switching_period * (cfg.train_holds + cfg.validation_holds);
  mprs.seed = cfg.excitation_seed();
  SimulationConfig sim = cfg.simulation;
  sim.noise_seed = cfg.noise_seed();
  const Json extra = {{"config_hash", config_hash(cfg)},
                      {"mprs", to_json(mprs)},
                      {"simulation", to_json(sim)},
                      {"plant", to_json(cfg.plant)},
                      {"disturbance", cfg.disturbance}};
  Json train_extra = extra;
  train_extra["role"] = "train";
  Json validation_extra = extra;
  validation_extra["role"] = "validation";
  write_dataset(data_dir(cfg) / "train.csv", data.train, train_extra);
  write_dataset(data_dir(cfg) / "validation.csv", data.validation, validation_extra);
  return data;
}

ExperimentData load_data(const ExperimentConfig& cfg) {
  const fs::path dir = data_dir(cfg);
  for (const char* name : {"train.csv", "validation.csv"})
    if (!fs::exists(dir / name))
      throw std::runtime_error("missing dataset " + (dir / name).string() + "; run gen-data first");
  return {read_dataset(dir / "train.csv"), read_dataset(dir / "validation.csv")};
}

Json cmd_certify(const ExperimentConfig& cfg, Eigen::Index order) {
  cfg.validate();
  const ExperimentData data = load_data(cfg);
  const ScenarioPlan plan = cfg.plan(order);
  const ReservoirConfig reservoir = cfg.reservoir_for(order);
  CampaignOptions options = cfg.campaign_options();
  CampaignResult result = run_campaign(plan, data.train, data.validation, reservoir, options);

  const fs::path dir = order_dir(cfg, order);
  Json models = Json::object();
  const AffineScaler input_scaler = fit_scaler(data.train.u);
  const AffineScaler output_scaler = fit_scaler(data.train.y);
  CampaignOptions keep = options;
  keep.keep_models = true;
  for (Criterion c : {Criterion::kBestFit, Criterion::kWorstFit, Criterion::kBestRmse, Criterion::kWorstRmse}) {
    const long j = select(result, c);
    InstanceRecord& stored = result.records[static_cast<std::size_t>(j)];
    if (!stored.model) {
      InstanceRecord again = evaluate_instance(j, stored.seed, reservoir, data.train, data.validation,
                                               input_scaler, output_scaler, keep);
      if (again.fit != stored.fit || again.rmse != stored.rmse)
        throw NumericalError("retraining instance " + std::to_string(j) + " did not reproduce its metrics");
      stored.model = std::move(again.model);
    }
    const std::string file = "model_" + to_string(c) + ".json";
    save_model(dir / file, *stored.model);
    models[to_string(c)] = file;
  }
  if (cfg.save_all_models)
    for (const InstanceRecord& r : result.records)
      if (r.model) save_model(dir / "models" / ("instance_" + std::to_string(r.index) + ".json"), *r.model);

  Json manifest = to_json(result);
  manifest["format"] = "esncert.campaign";
  manifest["version"] = kFormatVersion;
  manifest["config_hash"] = config_hash(cfg);
  manifest["order"] = order;
  manifest["reservoir"] = to_json(reservoir);
  manifest["metric_skip"] = reservoir.washout;
  manifest["seeds"] = seed_lineage(cfg);
  manifest["seeds"]["campaign_base"] = plan.base_seed;
  manifest["models"] = models;
  manifest["model_storage"] = cfg.save_all_models ? "all" : "extremal; other instances regenerate from their seed";
  manifest["data"] = {{"train", "../data/train.csv"}, {"validation", "../data/validation.csv"}};
  if (plan.certified) {
    manifest["required_scenarios"] = {{"explicit", required_scenarios(plan.epsilon, plan.beta, plan.d)}};
    if (plan.d == 1) manifest["required_scenarios"]["tight"] = tight_required_scenarios(plan.epsilon, plan.beta);
  }
  write_atomic(dir / "campaign.csv", campaign_to_csv(result));
  write_json(dir / "campaign.json", manifest);
  return manifest;
}

Json cmd_test(const ExperimentConfig& cfg, Eigen::Index order, long m) {
  cfg.validate();
  const fs::path dir = order_dir(cfg, order);
  if (!fs::exists(dir / "campaign.json"))
    throw std::runtime_error("missing campaign manifest " + (dir / "campaign.json").string() + "; run certify first");
  const Json manifest = read_json(dir / "campaign.json");
  if (manifest.value("config_hash", "") != config_hash(cfg))
    throw std::invalid_argument("campaign manifest " + (dir / "campaign.json").string() +
                                " was produced by a different configuration");
  const CampaignResult result = campaign_from_json(manifest);
  const ReservoirConfig reservoir = reservoir_config_from_json(manifest.at("reservoir"));
  const ExperimentData data = load_data(cfg);
  const std::uint64_t test_seed = cfg.test_seed(order);
  require(test_seed != result.plan.base_seed, "test seed equals the campaign base seed");

  CampaignOptions options = cfg.campaign_options();
  options.keep_models = false;
  const ViolationReport report =
      empirical_violation_test(result, m, test_seed, data.train, data.validation, reservoir, options);

  Json out = to_json(report);
  out["format"] = "esncert.violation_test";
  out["version"] = kFormatVersion;
  out["config_hash"] = config_hash(cfg);
  out["order"] = order;
  out["requested"] = m;
  out["epsilon"] = result.plan.epsilon;
  out["beta"] = result.plan.beta;
  out["empty"] = report.m == 0;
  out["seeds"] = seed_lineage(cfg);
  out["seeds"]["test_base"] = test_seed;
  out["seeds"]["campaign_base"] = result.plan.base_seed;
  write_atomic(dir / "test.csv", violation_to_csv(report));
  write_json(dir / "test.json", out);
  return out;
}

Report cmd_report(const fs::path& out) {
  Report report;
  if (!fs::exists(out)) throw std::runtime_error("output directory " + out.string() + " does not exist");
  std::set<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(out))
    if (entry.is_directory() && entry.path().filename().string().rfind("order_", 0) == 0) dirs.insert(entry.path());

  for (const fs::path& dir : dirs) {
    if (!fs::exists(dir / "campaign.json")) {
      report.missing.push_back((dir / "campaign.json").string());
      continue;
    }
    ReportRow row;
    try {
      const Json campaign = read_json(dir / "campaign.json");
      row.order = campaign.at("order").get<Eigen::Index>();
      row.n_delta = campaign.at("plan").at("n_delta").get<long>();
      row.certified = campaign.at("plan").at("certified").get<bool>();
      row.fit_bar = campaign.at("bounds").at("fit_bar").get<double>();
      row.rmse_bar = campaign.at("bounds").at("rmse_bar").get<double>();
    } catch (const std::exception& e) {
      report.missing.push_back((dir / "campaign.json").string() + " (" + e.what() + ")");
      continue;
    }
    if (fs::exists(dir / "test.json")) {
      const Json test = read_json(dir / "test.json");
      row.m = test.at("m").get<long>();
      row.violations_best = test.at("count_fit").get<long>();
      row.violations_worst = test.at("count_rmse").get<long>();
    } else {
      report.missing.push_back((dir / "test.json").string());
    }
    report.rows.push_back(row);
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ReportRow& a, const ReportRow& b) { return a.order < b.order; });

  auto cell = [](const std::optional<long>& count, const std::optional<long>& m) {
    if (!count || !m) return std::string("n/a");
    char buf[64];
    const double pct = *m > 0 ? 100.0 * static_cast<double>(*count) / static_cast<double>(*m) : 0.0;
    std::snprintf(buf, sizeof buf, "%ld/%ld = %.1f%%", *count, *m, pct);
    return std::string(buf);
  };
  std::string csv = "order,n_delta,certified,fit_bar,rmse_bar,m,violations_best_fit,violations_worst_rmse\n";
  std::string md =
      "| ESN states | N_delta | Best case (FIT > FIT_bar) | Worst case (RMSE > RMSE_bar) | FIT_bar | RMSE_bar |\n"
      "|---|---|---|---|---|---|\n";
  for (const ReportRow& r : report.rows) {
    csv += std::to_string(r.order) + ',' + std::to_string(r.n_delta) + ',' + (r.certified ? "1" : "0") + ',' +
           format_double(r.fit_bar) + ',' + format_double(r.rmse_bar) + ',' + (r.m ? std::to_string(*r.m) : "") +
           ',' + (r.violations_best ? std::to_string(*r.violations_best) : "") + ',' +
           (r.violations_worst ? std::to_string(*r.violations_worst) : "") + '\n';
    char bars[96];
    std::snprintf(bars, sizeof bars, "%.2f | %.4f", r.fit_bar, r.rmse_bar);
    md += "| " + std::to_string(r.order) + " | " + std::to_string(r.n_delta) + (r.certified ? "" : " (uncertified)") +
          " | " + cell(r.violations_best, r.m) + " | " + cell(r.violations_worst, r.m) + " | " + bars + " |\n";
  }
  if (!report.missing.empty()) {
    md += "\nMissing:\n";
    for (const std::string& m : report.missing) md += "- " + m + "\n";
  }
  write_atomic(out / "summary.csv", csv);
  write_atomic(out / "summary.md", md);
  return report;
}

}  // namespace esncert
