#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "afw/harness.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& output_dir) {
  afw::ExperimentConfig cfg = afw::parse_experiment_config(config_path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (const char* env = std::getenv("AFW_OUTPUT_DIR")) cfg.output_dir = env;

  afw::ExperimentOutcome outcome = afw::run_experiment(cfg);
  std::cout << "F*_ref = " << outcome.reference.fstar
            << (outcome.reference.certified ? " (certified)"
                                            : " (NOT certified, budget hit)")
            << " after " << outcome.reference.iterations << " iterations\n";
  for (const auto& m : outcome.methods) {
    std::cout << m.method << ": " << afw::to_string(m.stop) << " after "
              << m.iterations << " iterations, F = " << m.final_objective
              << ", G = " << m.final_gap << ", nnz = " << m.final_sparsity;
    if (!m.violations.empty())
      std::cout << ", INVARIANT VIOLATIONS = " << m.violations.size();
    if (!m.fault.empty()) std::cout << ", fault: " << m.fault;
    std::cout << '\n';
  }
  std::cout << "outputs in " << cfg.output_dir << '\n';
  if (outcome.invariant_violations) return 2;
  for (const auto& m : outcome.methods)
    if (m.stop == afw::StopReason::Fault) return 2;
  return 0;
}

int cmd_fstar(const std::string& config_path) {
  afw::ExperimentConfig cfg = afw::parse_experiment_config(config_path);
  afw::BuiltExperiment built = afw::build_experiment_instance(cfg);
  afw::ActiveSet x0 = afw::ActiveSet::uniform(built.instance->atom_set());
  afw::ReferenceResult ref = afw::compute_reference_fstar(
      *built.instance, x0, cfg.epsilon, cfg.max_iterations, cfg.time_budget_s);
  std::cout.precision(17);
  std::cout << ref.fstar << '\n';
  if (!ref.certified) {
    std::cerr << "warning: budget exhausted before the gap certified the "
                 "reference\n";
  }
  return 0;
}

int cmd_gen_dopt(int m, int n, double scale, std::uint64_t seed,
                 const std::string& out) {
  Eigen::MatrixXd points = afw::dopt_random_points(m, n, scale, seed);
  afw::AtomSet::from_points(points).save_csv(out);
  std::cout << "wrote " << m << " points of dimension " << n << " to " << out
            << '\n';
  return 0;
}

int cmd_gen_mhp(int m, double horizon, double mu, double density,
                std::uint64_t seed, const std::string& out) {
  Eigen::MatrixXd a = afw::mhp_random_infectivity(m, density, seed);
  Eigen::VectorXd base = Eigen::VectorXd::Constant(m, mu);
  afw::MhpArrivals arrivals = afw::hawkes_simulate(base, a, horizon, seed + 1);
  afw::save_arrivals_csv(out, arrivals);
  std::cout << "wrote " << arrivals.events.size() << " events over [0, "
            << horizon << ") to " << out << '\n';
  return 0;
}

int cmd_report(const std::string& dir) {
  namespace fs = std::filesystem;
  bool any = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("metrics_", 0) != 0) continue;
    std::string method = name.substr(8, name.size() - 8 - 4);
    auto rows = afw::read_metrics_csv(entry.path().string());
    if (rows.empty()) continue;
    any = true;
    std::cout << method << ": " << rows.size() - 1 << " iterations, final delta "
              << rows.back().delta << ", final sparsity "
              << rows.back().sparsity;
    std::vector<double> delta, gap;
    for (const auto& r : rows) {
      delta.push_back(r.delta);
      gap.push_back(r.gap);
    }
    try {
      double ratio = afw::slope_ratio_report(delta, gap);
      std::cout << ", gap/delta slope ratio " << ratio;
    } catch (const std::exception&) {
      // sublinear or short trace; nothing to report
    }
    std::cout << '\n';
  }
  if (!any) {
    std::cerr << "no metrics_*.csv files under " << dir << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Away-step Frank-Wolfe for log-homogeneous barriers"};
  app.require_subcommand(1);

  std::string config_path, output_dir, out_file, report_dir;
  int m = 200, n = 20;
  double scale = 10.0, horizon = 500.0, mu = 0.1, density = 0.1;
  std::uint64_t seed = 7;

  auto* run = app.add_subcommand("run", "run a config-driven experiment");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--output-dir", output_dir, "override the output directory");

  auto* fstar = app.add_subcommand("fstar", "print the certified reference F*");
  fstar->add_option("config", config_path, "config file")->required();

  auto* gd = app.add_subcommand("gen-dopt", "generate Gaussian design points");
  gd->add_option("--m", m, "number of points");
  gd->add_option("--n", n, "dimension");
  gd->add_option("--scale", scale, "per-coordinate variance");
  gd->add_option("--seed", seed, "rng seed");
  gd->add_option("--out", out_file, "output csv")->required();

  auto* gm = app.add_subcommand("gen-mhp", "simulate Hawkes arrivals");
  gm->add_option("--m", m, "dimensions");
  gm->add_option("--horizon", horizon, "time horizon");
  gm->add_option("--mu", mu, "base intensity");
  gm->add_option("--density", density, "nonzero fraction of the infectivity");
  gm->add_option("--seed", seed, "rng seed");
  gm->add_option("--out", out_file, "output csv")->required();

  auto* rep = app.add_subcommand("report", "summarize a finished run");
  rep->add_option("dir", report_dir, "run output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, output_dir);
    if (fstar->parsed()) return cmd_fstar(config_path);
    if (gd->parsed()) return cmd_gen_dopt(m, n, scale, seed, out_file);
    if (gm->parsed()) return cmd_gen_mhp(m, horizon, mu, density, seed, out_file);
    if (rep->parsed()) return cmd_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
