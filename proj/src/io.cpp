#include "esncert/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "esncert/errors.hpp"

namespace esncert {
namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& value) { write_atomic(path, value.dump(2) + "\n"); }

std::string json_hash(const Json& value) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : value.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

namespace {

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw std::runtime_error("malformed number '" + std::string(text) + "'");
  return value;
}

template <typename T>
void read_if(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  require(static_cast<Eigen::Index>(data.size()) == rows, "matrix row count does not match its data");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = data.at(static_cast<std::size_t>(r));
    require(static_cast<Eigen::Index>(row.size()) == cols, "matrix column count does not match its data");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

Json to_json(const AffineScaler& scaler) {
  return {{"gain", std::vector<double>(scaler.gain().data(), scaler.gain().data() + scaler.channels())},
          {"offset", std::vector<double>(scaler.offset().data(), scaler.offset().data() + scaler.channels())}};
}

AffineScaler scaler_from_json(const Json& j) {
  const auto gain = j.at("gain").get<std::vector<double>>();
  const auto offset = j.at("offset").get<std::vector<double>>();
  return AffineScaler(Eigen::Map<const Eigen::VectorXd>(gain.data(), static_cast<Eigen::Index>(gain.size())),
                      Eigen::Map<const Eigen::VectorXd>(offset.data(), static_cast<Eigen::Index>(offset.size())));
}

Json to_json(const EsnModel& model) {
  return {
      {"format", "esncert.model"},
      {"version", kFormatVersion},
      {"dimensions",
       {{"order", model.dynamics.order()},
        {"inputs", model.input_scaler.channels()},
        {"network_inputs", model.dynamics.input_dim()},
        {"outputs", model.dynamics.output_dim()}}},
      {"activation", to_string(model.dynamics.activation)},
      {"w_x", matrix_to_json(model.dynamics.w_x)},
      {"w_u", matrix_to_json(model.dynamics.w_u)},
      {"w_y", matrix_to_json(model.dynamics.w_y)},
      {"w_out_state", matrix_to_json(model.readout.w_state)},
      {"w_out_input", matrix_to_json(model.readout.w_input)},
      {"input_scaler", to_json(model.input_scaler)},
      {"output_scaler", to_json(model.output_scaler)},
      {"input_bias", model.input_bias},
      {"target_norm", model.target_norm},
      {"density", model.density},
      {"seed", model.seed},
      {"washout", model.washout},
  };
}

EsnModel model_from_json(const Json& j) {
  require(j.value("format", "") == "esncert.model", "not an esncert model file");
  const int version = j.at("version").get<int>();
  require(version == kFormatVersion, "unsupported model format version " + std::to_string(version));
  EsnModel model;
  model.dynamics.activation = activation_from_string(j.at("activation").get<std::string>());
  model.dynamics.w_x = matrix_from_json(j.at("w_x"));
  model.dynamics.w_u = matrix_from_json(j.at("w_u"));
  model.dynamics.w_y = matrix_from_json(j.at("w_y"));
  model.readout.w_state = matrix_from_json(j.at("w_out_state"));
  model.readout.w_input = matrix_from_json(j.at("w_out_input"));
  model.input_scaler = scaler_from_json(j.at("input_scaler"));
  model.output_scaler = scaler_from_json(j.at("output_scaler"));
  model.input_bias = j.value("input_bias", 0.0);
  model.target_norm = j.at("target_norm").get<double>();
  model.density = j.at("density").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.washout = j.at("washout").get<Eigen::Index>();
  model.validate();
  return model;
}

void save_model(const fs::path& path, const EsnModel& model) { write_json(path, to_json(model)); }
EsnModel load_model(const fs::path& path) { return model_from_json(read_json(path)); }

Json to_json(const ReservoirConfig& cfg) {
  return {{"order", cfg.order},
          {"density", cfg.density},
          {"target_norm", cfg.target_norm},
          {"input_range", cfg.input_range},
          {"feedback_range", cfg.feedback_range},
          {"washout", cfg.washout},
          {"input_dim", cfg.input_dim},
          {"output_dim", cfg.output_dim},
          {"ridge", cfg.ridge},
          {"input_bias", cfg.input_bias},
          {"activation", to_string(cfg.activation)}};
}

ReservoirConfig reservoir_config_from_json(const Json& j, ReservoirConfig cfg) {
  read_if(j, "order", cfg.order);
  read_if(j, "density", cfg.density);
  read_if(j, "target_norm", cfg.target_norm);
  read_if(j, "input_range", cfg.input_range);
  read_if(j, "feedback_range", cfg.feedback_range);
  read_if(j, "washout", cfg.washout);
  read_if(j, "input_dim", cfg.input_dim);
  read_if(j, "output_dim", cfg.output_dim);
  read_if(j, "ridge", cfg.ridge);
  read_if(j, "input_bias", cfg.input_bias);
  if (j.contains("activation")) cfg.activation = activation_from_string(j.at("activation").get<std::string>());
  return cfg;
}

Json to_json(const PlantParams& p) {
  return {{"z", p.z},     {"cv4", p.cv4}, {"valve_exponent", p.valve_exponent},
          {"pk1", p.pk1}, {"pk2", p.pk2}, {"a1", p.a1},
          {"wa1", p.wa1}, {"wb1", p.wb1}, {"wa2", p.wa2},
          {"wb2", p.wb2}, {"wa3", p.wa3}, {"wb3", p.wb3},
          {"q1", p.q1},   {"q2", p.q2},   {"q3", p.q3},
          {"q4", p.q4},   {"h1", p.h1},   {"wa4", p.wa4},
          {"wb4", p.wb4}, {"ph", p.ph}};
}

PlantParams plant_params_from_json(const Json& j, PlantParams p) {
  read_if(j, "z", p.z);
  read_if(j, "cv4", p.cv4);
  read_if(j, "valve_exponent", p.valve_exponent);
  read_if(j, "pk1", p.pk1);
  read_if(j, "pk2", p.pk2);
  read_if(j, "a1", p.a1);
  read_if(j, "wa1", p.wa1);
  read_if(j, "wb1", p.wb1);
  read_if(j, "wa2", p.wa2);
  read_if(j, "wb2", p.wb2);
  read_if(j, "wa3", p.wa3);
  read_if(j, "wb3", p.wb3);
  read_if(j, "q1", p.q1);
  read_if(j, "q2", p.q2);
  read_if(j, "q3", p.q3);
  read_if(j, "q4", p.q4);
  read_if(j, "h1", p.h1);
  read_if(j, "wa4", p.wa4);
  read_if(j, "wb4", p.wb4);
  read_if(j, "ph", p.ph);
  return p;
}

Json to_json(const SimulationConfig& cfg) {
  return {{"sample_period", cfg.sample_period},
          {"substeps", cfg.substeps},
          {"integrator_step", cfg.step()},
          {"noise_std", cfg.noise_std},
          {"noise_seed", cfg.noise_seed},
          {"initial", {{"wa4", cfg.initial.wa4}, {"wb4", cfg.initial.wb4}, {"level", cfg.initial.level}}}};
}

SimulationConfig simulation_config_from_json(const Json& j, SimulationConfig cfg) {
  read_if(j, "sample_period", cfg.sample_period);
  read_if(j, "substeps", cfg.substeps);
  read_if(j, "noise_std", cfg.noise_std);
  read_if(j, "noise_seed", cfg.noise_seed);
  if (j.contains("initial")) {
    const Json& s = j.at("initial");
    read_if(s, "wa4", cfg.initial.wa4);
    read_if(s, "wb4", cfg.initial.wb4);
    read_if(s, "level", cfg.initial.level);
  }
  return cfg;
}

Json to_json(const MprsConfig& cfg) {
  return {{"switching_period", cfg.switching_period},
          {"lo", cfg.lo},
          {"hi", cfg.hi},
          {"levels", cfg.levels},
          {"duration", cfg.duration},
          {"sample_period", cfg.sample_period},
          {"seed", cfg.seed}};
}

MprsConfig mprs_config_from_json(const Json& j, MprsConfig cfg) {
  read_if(j, "switching_period", cfg.switching_period);
  read_if(j, "lo", cfg.lo);
  read_if(j, "hi", cfg.hi);
  read_if(j, "levels", cfg.levels);
  read_if(j, "duration", cfg.duration);
  read_if(j, "sample_period", cfg.sample_period);
  read_if(j, "seed", cfg.seed);
  return cfg;
}

Json to_json(const Provenance& provenance) {
  Json seeds = Json::object();
  for (const auto& [name, seed] : provenance.seeds) seeds[name] = seed;
  return {{"origin", provenance.origin},
          {"seeds", seeds},
          {"parent_length", provenance.parent_length},
          {"first_sample", provenance.first_sample}};
}

Provenance provenance_from_json(const Json& j) {
  Provenance p;
  read_if(j, "origin", p.origin);
  read_if(j, "parent_length", p.parent_length);
  read_if(j, "first_sample", p.first_sample);
  if (j.contains("seeds"))
    for (const auto& [name, seed] : j.at("seeds").items()) p.seeds[name] = seed.get<std::uint64_t>();
  return p;
}

std::string dataset_to_csv(const Dataset& data) {
  data.validate();
  require(data.input_dim() == 1 && data.output_dim() == 1, "dataset CSV holds single-input single-output data");
  std::string out = "time_s,u_mL_per_s,d_mL_per_s,y_pH,y_pH_noisefree\n";
  const bool has_d = data.disturbance.size() > 0;
  const bool has_clean = data.y_noisefree.size() > 0;
  for (Eigen::Index k = 0; k < data.size(); ++k) {
    const double t = static_cast<double>(data.provenance.first_sample + k) * data.sample_period;
    out += format_double(t) + ',' + format_double(data.u(k, 0)) + ',' +
           (has_d ? format_double(data.disturbance(k, 0)) : std::string()) + ',' + format_double(data.y(k, 0)) +
           ',' + (has_clean ? format_double(data.y_noisefree(k, 0)) : std::string()) + '\n';
  }
  return out;
}

Dataset dataset_from_csv(const std::string& text, double sample_period) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("time_s,u_mL_per_s,d_mL_per_s,y_pH", 0) != 0)
    throw std::runtime_error("dataset CSV is missing its header");
  std::vector<std::array<double, 4>> rows;
  bool has_d = true;
  bool has_clean = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string_view, 5> cells;
    std::size_t start = 0;
    for (std::size_t c = 0; c < 5; ++c) {
      const std::size_t comma = c < 4 ? line.find(',', start) : std::string::npos;
      if (c < 4 && comma == std::string::npos) throw std::runtime_error("dataset CSV row has too few columns");
      cells[c] = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      start = comma + 1;
    }
    std::array<double, 4> row{};
    row[0] = parse_double(cells[1]);
    if (cells[2].empty()) has_d = false; else row[1] = parse_double(cells[2]);
    row[2] = parse_double(cells[3]);
    if (cells[4].empty()) has_clean = false; else row[3] = parse_double(cells[4]);
    rows.push_back(row);
  }
  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.u.resize(n, 1);
  data.y.resize(n, 1);
  if (has_d) data.disturbance.resize(n, 1);
  if (has_clean) data.y_noisefree.resize(n, 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& r = rows[static_cast<std::size_t>(k)];
    data.u(k, 0) = r[0];
    data.y(k, 0) = r[2];
    if (has_d) data.disturbance(k, 0) = r[1];
    if (has_clean) data.y_noisefree(k, 0) = r[3];
  }
  data.sample_period = sample_period;
  data.validate();
  return data;
}

fs::path sidecar_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_dataset(const fs::path& csv_path, const Dataset& data, const Json& extra) {
  const std::string csv = dataset_to_csv(data);
  Json manifest = {{"format", "esncert.dataset"},
                   {"version", kFormatVersion},
                   {"csv", csv_path.filename().string()},
                   {"samples", data.size()},
                   {"sample_period", data.sample_period},
                   {"provenance", to_json(data.provenance)}};
  manifest.update(extra);
  write_atomic(csv_path, csv);
  write_json(sidecar_path(csv_path), manifest);
}

Dataset read_dataset(const fs::path& csv_path) {
  const Json manifest = read_json(sidecar_path(csv_path));
  require(manifest.value("format", "") == "esncert.dataset", sidecar_path(csv_path).string() + " is not a dataset manifest");
  Dataset data = dataset_from_csv(read_text(csv_path), manifest.at("sample_period").get<double>());
  data.provenance = provenance_from_json(manifest.at("provenance"));
  if (manifest.value("samples", data.size()) != data.size())
    throw std::runtime_error(csv_path.string() + " has a different sample count than its manifest");
  return data;
}

Json to_json(const ScenarioPlan& plan) {
  return {{"epsilon", plan.epsilon},     {"beta", plan.beta},
          {"d", plan.d},                 {"n_delta", plan.n_delta},
          {"base_seed", plan.base_seed}, {"certified", plan.certified},
          {"bound", to_string(plan.bound)}};
}

ScenarioPlan plan_from_json(const Json& j) {
  ScenarioPlan plan;
  plan.epsilon = j.at("epsilon").get<double>();
  plan.beta = j.at("beta").get<double>();
  plan.d = j.at("d").get<int>();
  plan.n_delta = j.at("n_delta").get<long>();
  plan.base_seed = j.at("base_seed").get<std::uint64_t>();
  plan.certified = j.at("certified").get<bool>();
  plan.bound = bound_kind_from_string(j.value("bound", "explicit"));
  return plan;
}

Json to_json(const InstanceRecord& r) {
  Json j = {{"j", r.index},   {"seed", r.seed},       {"fit", r.fit},   {"rmse", r.rmse},
            {"failed", r.failed}, {"redraws", r.redraws}, {"rank", r.rank}, {"orthogonality", r.orthogonality}};
  if (r.failed) j["failure"] = r.failure;
  return j;
}

InstanceRecord instance_from_json(const Json& j) {
  InstanceRecord r;
  r.index = j.at("j").get<long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.fit = j.at("fit").get<double>();
  r.rmse = j.at("rmse").get<double>();
  r.failed = j.value("failed", false);
  r.failure = j.value("failure", "");
  r.redraws = j.value("redraws", 0);
  r.rank = j.value("rank", Eigen::Index{0});
  r.orthogonality = j.value("orthogonality", 0.0);
  return r;
}

Json to_json(const CampaignResult& result) {
  Json records = Json::array();
  double worst_orthogonality = 0.0;
  for (const InstanceRecord& r : result.records) {
    records.push_back(to_json(r));
    worst_orthogonality = std::max(worst_orthogonality, r.orthogonality);
  }
  return {{"plan", to_json(result.plan)},
          {"mode", to_string(result.mode)},
          {"selection",
           {{"best_fit", result.best_fit},
            {"worst_fit", result.worst_fit},
            {"best_rmse", result.best_rmse},
            {"worst_rmse", result.worst_rmse}}},
          {"bounds", {{"fit_bar", result.fit_bar}, {"rmse_bar", result.rmse_bar}}},
          {"certifies", {{"epsilon", result.plan.epsilon}, {"beta", result.plan.beta}}},
          {"failures", result.failures},
          {"max_orthogonality", worst_orthogonality},
          {"warnings", result.warnings},
          {"records", std::move(records)}};
}

CampaignResult campaign_from_json(const Json& j) {
  CampaignResult result;
  result.plan = plan_from_json(j.at("plan"));
  result.mode = validation_mode_from_string(j.at("mode").get<std::string>());
  for (const Json& r : j.at("records")) result.records.push_back(instance_from_json(r));
  result.warnings = j.value("warnings", std::vector<std::string>{});
  result.summarize();
  return result;
}

std::string campaign_to_csv(const CampaignResult& result) {
  std::string out = "j,seed,fit,rmse,failed\n";
  for (const InstanceRecord& r : result.records)
    out += std::to_string(r.index) + ',' + std::to_string(r.seed) + ',' + format_double(r.fit) + ',' +
           format_double(r.rmse) + ',' + (r.failed ? "1" : "0") + '\n';
  return out;
}

Json to_json(const ViolationReport& report) {
  Json records = Json::array();
  for (const InstanceRecord& r : report.records) records.push_back(to_json(r));
  Json j = {{"m", report.m},
            {"count_fit", report.count_fit},
            {"count_rmse", report.count_rmse},
            {"fit_rate", report.fit_rate ? Json(*report.fit_rate) : Json(nullptr)},
            {"rmse_rate", report.rmse_rate ? Json(*report.rmse_rate) : Json(nullptr)},
            {"rates_defined", report.fit_rate.has_value()},
            {"fit_bar", report.fit_bar},
            {"rmse_bar", report.rmse_bar},
            {"test_seed", report.test_seed},
            {"failures", report.failures},
            {"records", std::move(records)}};
  return j;
}

std::string violation_to_csv(const ViolationReport& report) {
  std::string out = "j,seed,fit,rmse,fit_violation,rmse_violation,fit_bar,rmse_bar\n";
  for (const InstanceRecord& r : report.records) {
    if (r.failed) continue;
    out += std::to_string(r.index) + ',' + std::to_string(r.seed) + ',' + format_double(r.fit) + ',' +
           format_double(r.rmse) + ',' + (r.fit > report.fit_bar ? "1" : "0") + ',' +
           (r.rmse > report.rmse_bar ? "1" : "0") + ',' + format_double(report.fit_bar) + ',' +
           format_double(report.rmse_bar) + '\n';
  }
  return out;
}

}  // namespace esncert
