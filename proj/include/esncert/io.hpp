#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "esncert/esn.hpp"
#include "esncert/plant.hpp"
#include "esncert/scenario.hpp"
#include "esncert/signals.hpp"

namespace esncert {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Writes to a temporary sibling and renames it into place, creating parent
/// directories as needed.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& value);

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string json_hash(const Json& value);

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double value);

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

Json to_json(const AffineScaler& scaler);
AffineScaler scaler_from_json(const Json& j);

Json to_json(const EsnModel& model);
EsnModel model_from_json(const Json& j);
void save_model(const std::filesystem::path& path, const EsnModel& model);
EsnModel load_model(const std::filesystem::path& path);

Json to_json(const ReservoirConfig& cfg);
ReservoirConfig reservoir_config_from_json(const Json& j, ReservoirConfig base = {});

Json to_json(const PlantParams& p);
PlantParams plant_params_from_json(const Json& j, PlantParams base = {});
Json to_json(const SimulationConfig& cfg);
SimulationConfig simulation_config_from_json(const Json& j, SimulationConfig base = {});
Json to_json(const MprsConfig& cfg);
MprsConfig mprs_config_from_json(const Json& j, MprsConfig base = {});

Json to_json(const Provenance& provenance);
Provenance provenance_from_json(const Json& j);

/// Dataset CSV: header time_s,u_mL_per_s,d_mL_per_s,y_pH,y_pH_noisefree with
/// one row per sample. Single-input single-output only.
std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(const std::string& text, double sample_period);

/// Writes `<path>` (CSV) and `<path without extension>.json` (sidecar with
/// `extra` merged in). Reading needs the sidecar for T_s and provenance.
void write_dataset(const std::filesystem::path& csv_path, const Dataset& data, const Json& extra = Json::object());
Dataset read_dataset(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

Json to_json(const ScenarioPlan& plan);
ScenarioPlan plan_from_json(const Json& j);
Json to_json(const InstanceRecord& record);
InstanceRecord instance_from_json(const Json& j);

/// Campaign body with per-instance records and the selected extrema.
Json to_json(const CampaignResult& result);
CampaignResult campaign_from_json(const Json& j);
/// Rows (j, seed, fit, rmse, failed) for scatter plots.
std::string campaign_to_csv(const CampaignResult& result);

Json to_json(const ViolationReport& report);
/// Rows (j, seed, fit, rmse, fit_violation, rmse_violation, fit_bar, rmse_bar).
std::string violation_to_csv(const ViolationReport& report);

}  // namespace esncert
