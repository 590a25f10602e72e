#include <doctest.h>

#include <filesystem>

#include "esncert/io.hpp"
#include "fixtures.hpp"

using namespace esncert;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("esncert_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round trips exactly") {
  for (double v : {0.1, -7.35, 1e-300, 98.1234567890123, 3.0})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("matrix JSON round trip") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2.5, -3, 1e-17, 0, 7;
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  CHECK(matrix_from_json(matrix_to_json(Eigen::MatrixXd(0, 4))).cols() == 4);
}

TEST_CASE("model save/load preserves predictions") {
  const auto& data = fixtures::small_plant_data();
  ReservoirConfig cfg;
  cfg.order = 20;
  Engine e = make_engine(12);
  const TrainedEsn t = train_esn(cfg, e, data.train, fit_scaler(data.train.u), fit_scaler(data.train.y));
  const fs::path dir = scratch("model");
  save_model(dir / "m.json", t.model);
  const EsnModel back = load_model(dir / "m.json");
  const Eigen::MatrixXd a = predict(t.model, data.validation, ValidationMode::kFreeRun);
  const Eigen::MatrixXd b = predict(back, data.validation, ValidationMode::kFreeRun);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(back.dynamics.w_x == t.model.dynamics.w_x);

  Json bad = read_json(dir / "m.json");
  bad["format"] = "something-else";
  write_json(dir / "bad.json", bad);
  CHECK_THROWS(load_model(dir / "bad.json"));
}

TEST_CASE("dataset CSV round trip with provenance") {
  const auto& data = fixtures::small_plant_data();
  const fs::path dir = scratch("data");
  write_dataset(dir / "v.csv", data.validation);
  CHECK(fs::exists(sidecar_path(dir / "v.csv")));
  const Dataset back = read_dataset(dir / "v.csv");
  CHECK(back.u == data.validation.u);
  CHECK(back.y == data.validation.y);
  CHECK(back.y_noisefree == data.validation.y_noisefree);
  CHECK(back.sample_period == data.validation.sample_period);
  CHECK(back.provenance.seeds == data.validation.provenance.seeds);
  CHECK(back.provenance.first_sample == data.validation.provenance.first_sample);
  CHECK(read_text(dir / "v.csv").rfind("time_s,u_mL_per_s,d_mL_per_s,y_pH,y_pH_noisefree\n", 0) == 0);
}

TEST_CASE("campaign JSON round trip") {
  CampaignResult r;
  r.plan = ScenarioPlan::certified_plan(0.05, 1e-7, 3, 1, BoundKind::kTight);
  for (long i = 0; i < 3; ++i) {
    InstanceRecord rec;
    rec.index = i;
    rec.seed = r.plan.instance_seed(i);
    rec.fit = 50.0 + static_cast<double>(i) / 3.0;
    rec.rmse = 0.1 / static_cast<double>(i + 1);
    rec.rank = 31;
    r.records.push_back(rec);
  }
  r.summarize();
  const CampaignResult back = campaign_from_json(to_json(r));
  CHECK(back.plan.n_delta == 315);
  CHECK(back.plan.bound == BoundKind::kTight);
  CHECK(back.records.size() == 3);
  CHECK(back.records[2].fit == r.records[2].fit);
  CHECK(back.records[1].seed == r.records[1].seed);
  CHECK(back.fit_bar == r.fit_bar);
  CHECK(back.worst_rmse == r.worst_rmse);
  CHECK(to_json(back).dump() == to_json(r).dump());
}

TEST_CASE("write_atomic replaces content and leaves no temporary file") {
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "a.txt", "one");
  write_atomic(dir / "a.txt", "two");
  CHECK(read_text(dir / "a.txt") == "two");
  long entries = 0;
  for (const auto& _ : fs::directory_iterator(dir)) {
    (void)_;
    ++entries;
  }
  CHECK(entries == 1);
}
