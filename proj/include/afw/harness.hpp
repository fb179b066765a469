#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "afw/baselines.hpp"
#include "afw/dopt.hpp"
#include "afw/hawkes.hpp"
#include "afw/solver.hpp"

namespace afw {

// Config-driven experiment: build an instance, certify a reference optimum,
// run the selected solvers, and emit plot-ready CSV.
struct ExperimentConfig {
  enum class Kind { Dopt, Mhp, DoptFile, MhpFile };
  Kind kind = Kind::Dopt;

  // dopt generator
  int m = 200;
  int n = 20;
  double scale = 10.0;
  std::uint64_t seed = 7;

  // mhp generator / pipeline
  double horizon = 500.0;
  double mu = 0.1;
  double density = 0.1;  // fraction of nonzero infectivity entries
  double lambda = 0.0;
  int mhp_dimension = 1;  // 1-based dimension to estimate

  std::string points_file;
  std::string arrivals_file;

  std::vector<std::string> solvers;  // AFW-E AFW-A FW-E FW-A RSGM-F RSGM-B MG
  double epsilon = 1e-9;
  int max_iterations = 20000;
  double time_budget_s = 600.0;
  double rsgm_smoothness = 0.0;  // <= 0: instance default
  std::string output_dir = "afw-out";
};

// Plain key = value text, '#' comments. Throws on unknown keys and on
// invalid field combinations.
ExperimentConfig parse_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config_text(const std::string& text);

// The generated infectivity matrix of the mhp experiment: entries uniform on
// [0.1, 0.5], all but `density` of them zeroed, rescaled to spectral radius
// 0.9.
Eigen::MatrixXd mhp_random_infectivity(int m, double density,
                                       std::uint64_t seed);

struct BuiltExperiment {
  std::unique_ptr<ProblemInstance> instance;
  // Retained mhp pipeline data for map-back; empty for dopt experiments.
  std::optional<MhpDimensionData> mhp_data;
};

BuiltExperiment build_experiment_instance(const ExperimentConfig& config);

struct ReferenceResult {
  double fstar = 0.0;
  bool certified = false;  // FW gap reached epsilon within the budgets
  int iterations = 0;
};

// Runs the away-step method with exact line-search until the gap certifies
// F(x) < F* + epsilon; falls back to the best value seen on budget
// exhaustion.
ReferenceResult compute_reference_fstar(ProblemInstance& instance,
                                        const ActiveSet& start, double epsilon,
                                        int max_iterations,
                                        double time_budget_s);

// Entries greater than machine accuracy relative to the largest one.
int sparsity(const Eigen::VectorXd& x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

// Least-squares slopes of ln(delta) and ln(gap) against the iteration index
// over the tail where delta lies in [1e-8, 1e-2]; returns slope(gap) /
// slope(delta). Throws when fewer than 10 tail points exist.
double slope_ratio_report(const std::vector<double>& delta,
                          const std::vector<double>& gap);

struct MetricsRow {
  int k = 0;
  double time_s = 0.0;
  double delta = 0.0;
  double gap = 0.0;
  int sparsity = 0;
};

struct MethodSummary {
  std::string method;
  StopReason stop = StopReason::Converged;
  std::string fault;
  int iterations = 0;
  double final_objective = 0.0;
  double final_gap = 0.0;
  int final_sparsity = 0;
  std::vector<std::string> violations;  // invariant monitor, AFW methods only
};

struct ExperimentOutcome {
  ReferenceResult reference;
  std::vector<MethodSummary> methods;
  bool invariant_violations = false;
};

// Runs every configured method (concurrently, one instance clone each) and
// writes, under output_dir: trace_<method>.csv, metrics_<method>.csv,
// combined.csv (long format), and metadata.json.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

// Content hash of a metrics CSV with the time_s column blanked; equal
// configs and seeds must produce equal fingerprints.
std::string metrics_fingerprint(const std::string& path);

}  // namespace afw
