#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "esncert/errors.hpp"
#include "esncert/experiment.hpp"
#include "esncert/io.hpp"
#include "esncert/metrics.hpp"

namespace py = pybind11;
using namespace esncert;

namespace {

// Configs cross the boundary as JSON text; the Python wrapper handles dicts.
Json parse(const std::string& text) { return text.empty() ? Json::object() : Json::parse(text); }

Dataset make_dataset(const Eigen::MatrixXd& u, const Eigen::MatrixXd& y, double sample_period) {
  Dataset d;
  d.u = u;
  d.y = y;
  d.sample_period = sample_period;
  d.validate();
  return d;
}

py::dict dataset_dict(const Dataset& d) {
  py::dict out;
  out["u"] = d.u;
  out["y"] = d.y;
  out["disturbance"] = d.disturbance;
  out["y_noisefree"] = d.y_noisefree;
  out["sample_period"] = d.sample_period;
  return out;
}

}  // namespace

PYBIND11_MODULE(_esncert, m) {
  m.doc() = "Echo state network identification with scenario certificates";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.def("required_scenarios", &required_scenarios, py::arg("epsilon"), py::arg("beta"), py::arg("d") = 1);
  m.def("tight_required_scenarios", &tight_required_scenarios, py::arg("epsilon"), py::arg("beta"));

  m.def("rmse", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return rmse(a, b); });
  m.def("fit_index", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return fit_index(a, b); });

  m.def("ph_from_state", [](double wa4, double wb4) { return ph_from_state(wa4, wb4, PlantParams::nominal()); });
  m.def("steady_state", [](double u, double d) {
    const PlantState s = steady_state(u, d, PlantParams::nominal());
    return py::make_tuple(s.wa4, s.wb4, s.level);
  });
  m.def(
      "generate_mprs", [](const std::string& cfg) { return generate_mprs(mprs_config_from_json(parse(cfg))); },
      py::arg("config") = "");
  m.def(
      "simulate",
      [](const Eigen::VectorXd& u, const Eigen::VectorXd& d, const std::string& cfg) {
        py::gil_scoped_release release;
        const Dataset data = simulate(u, d, simulation_config_from_json(parse(cfg)), PlantParams::nominal());
        py::gil_scoped_acquire acquire;
        return dataset_dict(data);
      },
      py::arg("u"), py::arg("d"), py::arg("config") = "");

  py::class_<EsnModel>(m, "EsnModel")
      .def_property_readonly("order", [](const EsnModel& s) { return s.dynamics.order(); })
      .def_property_readonly("w_x", [](const EsnModel& s) { return s.dynamics.w_x; })
      .def_property_readonly("w_out", [](const EsnModel& s) { return s.readout.stacked(); })
      .def(
          "predict",
          [](const EsnModel& s, const Eigen::MatrixXd& u, const Eigen::MatrixXd& y, const std::string& mode) {
            return predict(s, make_dataset(u, y, 1.0), validation_mode_from_string(mode));
          },
          py::arg("u"), py::arg("y"), py::arg("mode") = "free_run")
      .def("to_json", [](const EsnModel& s) { return to_json(s).dump(); })
      .def_static("from_json", [](const std::string& text) { return model_from_json(Json::parse(text)); })
      .def("save", [](const EsnModel& s, const std::string& path) { save_model(path, s); })
      .def_static("load", [](const std::string& path) { return load_model(path); });

  m.def(
      "train",
      [](const Eigen::MatrixXd& u, const Eigen::MatrixXd& y, const std::string& cfg, std::uint64_t seed) {
        const Dataset data = make_dataset(u, y, 1.0);
        ReservoirConfig rc = reservoir_config_from_json(parse(cfg));
        rc.input_dim = data.input_dim();
        rc.output_dim = data.output_dim();
        Engine engine = make_engine(seed);
        const TrainedEsn t = train_esn(rc, engine, data, fit_scaler(data.u), fit_scaler(data.y));
        py::dict info;
        info["rank"] = t.fit.rank;
        info["rank_deficient"] = t.fit.rank_deficient;
        info["orthogonality"] = t.fit.orthogonality;
        return py::make_tuple(t.model, info);
      },
      py::arg("u"), py::arg("y"), py::arg("config") = "", py::arg("seed") = 0);

  m.def(
      "run_campaign",
      [](const Eigen::MatrixXd& train_u, const Eigen::MatrixXd& train_y, const Eigen::MatrixXd& val_u,
         const Eigen::MatrixXd& val_y, const std::string& cfg, long n_delta, double epsilon, double beta,
         std::uint64_t seed, const std::string& mode, int workers, long m, std::uint64_t test_seed) {
        const Dataset train = make_dataset(train_u, train_y, 1.0);
        const Dataset val = make_dataset(val_u, val_y, 1.0);
        ReservoirConfig rc = reservoir_config_from_json(parse(cfg));
        rc.input_dim = train.input_dim();
        rc.output_dim = train.output_dim();
        const ScenarioPlan plan = n_delta > 0 ? ScenarioPlan::exploratory(n_delta, epsilon, beta, seed)
                                              : ScenarioPlan::certified_plan(epsilon, beta, seed);
        CampaignOptions options;
        options.mode = validation_mode_from_string(mode);
        options.workers = workers;
        Json out;
        {
          py::gil_scoped_release release;
          const CampaignResult result = run_campaign(plan, train, val, rc, options);
          out["campaign"] = to_json(result);
          if (m > 0) out["test"] = to_json(empirical_violation_test(result, m, test_seed, train, val, rc, options));
        }
        return out.dump();
      },
      py::arg("train_u"), py::arg("train_y"), py::arg("val_u"), py::arg("val_y"), py::arg("config") = "",
      py::arg("n_delta") = 0, py::arg("epsilon") = 0.05, py::arg("beta") = 1e-7, py::arg("seed") = 0,
      py::arg("mode") = "free_run", py::arg("workers") = 1, py::arg("m") = 0, py::arg("test_seed") = 1);

  m.def("experiment_config", [](const std::string& cfg) { return to_json(experiment_from_json(parse(cfg))).dump(); },
        py::arg("config") = "");
  m.def("gen_data", [](const std::string& cfg) {
    const ExperimentData data = cmd_gen_data(experiment_from_json(parse(cfg)));
    return py::make_tuple(dataset_dict(data.train), dataset_dict(data.validation));
  });
  m.def("certify", [](const std::string& cfg, Eigen::Index order) {
    const ExperimentConfig c = experiment_from_json(parse(cfg));
    py::gil_scoped_release release;
    return cmd_certify(c, order).dump();
  });
  m.def("violation_test", [](const std::string& cfg, Eigen::Index order, long m) {
    const ExperimentConfig c = experiment_from_json(parse(cfg));
    py::gil_scoped_release release;
    return cmd_test(c, order, m).dump();
  });
  m.def("report", [](const std::string& out) {
    const Report r = cmd_report(out);
    py::list rows;
    for (const ReportRow& row : r.rows) {
      py::dict d;
      d["order"] = row.order;
      d["n_delta"] = row.n_delta;
      d["certified"] = row.certified;
      d["fit_bar"] = row.fit_bar;
      d["rmse_bar"] = row.rmse_bar;
      d["m"] = row.m;
      d["violations_best_fit"] = row.violations_best;
      d["violations_worst_rmse"] = row.violations_worst;
      rows.append(d);
    }
    return py::make_tuple(rows, r.missing);
  });
}
