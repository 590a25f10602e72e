// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>

#include "esncert/esn.hpp"
#include "esncert/experiment.hpp"
#include "esncert/plant.hpp"
#include "esncert/scenario.hpp"

using namespace esncert;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

void guarded(int id, const std::string& title, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

long ceil_explicit(double eps, double beta) {
  long n = 1;
  while (static_cast<double>(n) < 2.0 / eps * std::log(1.0 / beta)) ++n;
  return n;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double max_orthogonality = 0.0;
long fits_checked = 0;

void track(const std::vector<InstanceRecord>& records) {
  for (const auto& r : records) {
    if (r.failed) continue;
    max_orthogonality = std::max(max_orthogonality, r.orthogonality);
    ++fits_checked;
  }
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_text(e.path());
  return files;
}

ExperimentConfig desk(const fs::path& out) {
  ExperimentConfig cfg = ExperimentConfig::from_profile("desk");
  cfg.workers = workers();
  cfg.out = out;
  return cfg;
}

void run_desk(const ExperimentConfig& cfg) {
  fs::remove_all(cfg.out);
  cmd_gen_data(cfg);
  for (Eigen::Index order : cfg.orders) {
    cmd_certify(cfg, order);
    cmd_test(cfg, order, cfg.test_instances);
  }
  cmd_report(cfg.out);
}

}  // namespace

int main() {
  const PlantParams p = PlantParams::nominal();
  const fs::path scratch = fs::temp_directory_path() / "esncert_acceptance";

  guarded(1, "scenario bound", [] {
    const long a = required_scenarios(0.05, 1e-7, 1);
    const long b = required_scenarios(0.1, 1e-7, 1);
    report(1, "scenario bound", a == 645 && b == 323 && b == ceil_explicit(0.1, 1e-7),
           "N(0.05)=" + std::to_string(a) + " N(0.1)=" + std::to_string(b) + " oracle=" +
               std::to_string(ceil_explicit(0.1, 1e-7)));
  });

  guarded(2, "plant equilibrium", [&] {
    SimulationConfig cfg;
    cfg.noise_std = 0.0;
    const Eigen::Index k = 1000;  // 10,000 s at T_s = 10 s
    const Dataset d = simulate(Eigen::VectorXd::Constant(k, p.q3), Eigen::VectorXd::Constant(k, p.q2), cfg, p);
    PlantState x = cfg.initial;
    double level_dev = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      x = integrate_step(x, p.q3, p.q2, cfg, p);
      level_dev = std::max(level_dev, std::abs(x.level - 14.0));
    }
    const double ph_dev = (d.y.array() - 7.0).abs().maxCoeff();
    report(2, "plant equilibrium", ph_dev <= 0.05 && level_dev <= 0.05,
           fmt("max|pH-7|=%.4f max|h-14|=%.4f cm", ph_dev, level_dev));
  });

  guarded(3, "pH root solver", [&] {
    const double a = ph_from_state(0.0, 0.0, p);
    const double b = ph_from_state(-4.32e-4, 5.28e-4, p);
    const double c = ph_from_state(1e-3, 0.0, p);
    report(3, "pH root solver", std::abs(a - 7) <= 1e-8 && std::abs(b - 7) <= 0.02 && std::abs(c - 3) <= 1e-4,
           fmt("pH(0,0)=%.10f pH(nominal)=%.4f pH(acid)=%.6f", a, b, c));
  });

  guarded(4, "operating envelope", [&] {
    const ExperimentData data = generate_data(ExperimentConfig::from_profile("full"));
    const double lo = std::min(data.train.y.minCoeff(), data.validation.y.minCoeff());
    const double hi = std::max(data.train.y.maxCoeff(), data.validation.y.maxCoeff());
    report(4, "operating envelope", lo >= 5.7 && hi <= 8.95, fmt("pH range [%.3f, %.3f] over 130 holds", lo, hi));
  });

  guarded(5, "contraction", [] {
    std::mt19937_64 rng(20240605);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_int_distribution<int> order(2, 120);
    long violations = 0, checks = 0;
    for (int trial = 0; trial < 100; ++trial) {
      ReservoirConfig cfg;
      cfg.order = order(rng);
      cfg.target_norm = 0.95;
      Engine e = make_engine(static_cast<std::uint64_t>(trial));
      const EsnDynamics dyn = generate_reservoir(cfg, e);
      Eigen::MatrixXd u(201, dyn.input_dim()), y(201, 1);
      for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = uni(rng);
      for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = uni(rng);
      Eigen::VectorXd xa(cfg.order), xb(cfg.order);
      for (Eigen::Index i = 0; i < cfg.order; ++i) {
        xa(i) = uni(rng);
        xb(i) = uni(rng);
      }
      const Eigen::MatrixXd a = teacher_forced_states(dyn, u, y, xa);
      const Eigen::MatrixXd b = teacher_forced_states(dyn, u, y, xb);
      const double d0 = (xa - xb).norm();
      for (Eigen::Index k = 0; k <= 200; ++k, ++checks)
        if ((a.row(k) - b.row(k)).norm() > std::pow(0.95, static_cast<double>(k)) * d0 * (1 + 1e-12) + 1e-15)
          ++violations;
    }
    report(5, "contraction", violations == 0,
           std::to_string(violations) + " violations in " + std::to_string(checks) + " checks");
  });

  // Criteria 7 and 9 share two full desk-profile runs.
  const ExperimentConfig run_a = desk(scratch / "desk_a");
  const ExperimentConfig run_b = desk(scratch / "desk_b");
  bool desk_ok = false;
  guarded(7, "desk campaign quality", [&] {
    run_desk(run_a);
    desk_ok = true;
    double best100 = 0, best30 = 0;
    long n100 = 0;
    for (Eigen::Index order : run_a.orders) {
      const CampaignResult c = campaign_from_json(read_json(order_dir(run_a, order) / "campaign.json"));
      track(c.records);
      if (order == 100) {
        best100 = c.fit_bar;
        n100 = c.plan.n_delta;
      }
      if (order == 30) best30 = c.fit_bar;
    }
    report(7, "desk campaign quality", n100 == 315 && best100 >= 75 && best30 >= 70,
           fmt("best FIT order100=%.2f order30=%.2f (N=%.0f)", best100, best30, static_cast<double>(n100)));
  });

  guarded(8, "violation guarantee", [&] {
    const ExperimentConfig cfg = desk(scratch / "unused");
    const ExperimentData data = generate_data(cfg);
    const ReservoirConfig res = cfg.reservoir_for(30);
    const ScenarioPlan plan = ScenarioPlan::certified_plan(0.05, 1e-7, cfg.campaign_seed(30), 1, BoundKind::kExplicit);
    CampaignOptions opts = cfg.campaign_options();
    const CampaignResult c = run_campaign(plan, data.train, data.validation, res, opts);
    const ViolationReport v = empirical_violation_test(c, 200, cfg.test_seed(30), data.train, data.validation, res, opts);
    track(c.records);
    track(v.records);
    report(8, "violation guarantee", plan.n_delta == 645 && v.count_fit <= 10 && v.count_rmse <= 10,
           fmt("N=%.0f M=%.0f FIT violations=%.0f RMSE violations=%.0f", static_cast<double>(plan.n_delta),
               static_cast<double>(v.m), static_cast<double>(v.count_fit), static_cast<double>(v.count_rmse)));
  });

  guarded(6, "LS optimality", [] {
    report(6, "LS optimality", fits_checked > 0 && max_orthogonality <= 1e-8,
           fmt("max |Phi'r|/(|Phi||Y|)=%.2e over %.0f fits", max_orthogonality, static_cast<double>(fits_checked)));
  });

  guarded(9, "determinism", [&] {
    if (!desk_ok) run_desk(run_a);
    run_desk(run_b);
    const auto a = snapshot(run_a.out);
    const auto b = snapshot(run_b.out);
    long differing = 0;
    for (const auto& [name, content] : a) {
      const auto it = b.find(name);
      if (it == b.end() || it->second != content) ++differing;
    }
    report(9, "determinism", a.size() == b.size() && differing == 0,
           std::to_string(a.size()) + " files, " + std::to_string(differing) + " differ");
  });

  guarded(10, "integrator order", [&] {
    const PlantState x0{-2e-4, 4e-4, 10.0};
    const double h = 10.0;
    const double a = integrate(x0, 16.7, 0.55, 100.0, h, p).level;
    const double b = integrate(x0, 16.7, 0.55, 100.0, h / 2, p).level;
    const double c = integrate(x0, 16.7, 0.55, 100.0, h / 4, p).level;
    const double order = std::log2((a - b) / (b - c));
    report(10, "integrator order", std::abs(order - 4.0) <= 0.3, fmt("observed order %.3f", order));
  });

  fs::remove_all(scratch);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
