#pragma once

#include "afw/solver.hpp"

namespace afw {

enum class BaselineMethod {
  FwExact,          // FW-E: plain Frank-Wolfe, exact line-search
  FwAdaptive,       // FW-A: plain Frank-Wolfe, adaptive step-size
  RsgmFixed,        // RSGM-F: relatively smooth gradient, fixed step
  RsgmBacktracking, // RSGM-B: with backtracking on the smoothness constant
  Mg                // MG: multiplicative gradient
};

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::FwExact;
  // Relative-smoothness constant for the RSGM variants; <= 0 picks the
  // instance default.
  double smoothness = 0.0;
  double epsilon = 1e-9;
  int max_iterations = 100000;
  double time_budget_s = std::numeric_limits<double>::infinity();
};

const char* baseline_tag(BaselineMethod method);
BaselineMethod baseline_from_tag(const std::string& tag);

// Plain Frank-Wolfe: the away-step loop with the away branch disabled.
RunResult fw_plain_run(ProblemInstance& instance, const SolverConfig& config,
                       const ActiveSet& start,
                       const IterationObserver& observer = {});

// One multiplicative-gradient step x_i <- x_i (-grad_i) / theta. Requires a
// standard-simplex instance with no linear term.
Eigen::VectorXd mg_step(const ProblemInstance& instance,
                        const Eigen::VectorXd& x);

// One relatively-smooth gradient step with reference h(x) = -sum ln x_i:
// argmin over the simplex of <grad F(x), u> + L D_h(u, x), solved through
// the stationarity system u_i = L / (grad_i + L / x_i + mu) with the
// multiplier located by monotone bisection.
Eigen::VectorXd rsgm_step(const ProblemInstance& instance,
                          const Eigen::VectorXd& x, double smoothness);

// Doubles the constant until F(u) <= F(x) + <grad, u - x> + L D_h(u, x);
// returns the accepted point and L/2 as the next seed.
std::pair<Eigen::VectorXd, double> rsgm_backtracking_step(
    const ProblemInstance& instance, const Eigen::VectorXd& x,
    double smoothness);

// Bregman divergence of the simplex log-barrier reference.
double log_barrier_bregman(const Eigen::VectorXd& u, const Eigen::VectorXd& x);

struct DenseRunResult {
  Eigen::VectorXd solution;
  std::vector<TraceRecord> trace;
  StopReason stop = StopReason::Converged;
  std::string fault;
  double final_objective = 0.0;
  double final_gap = 0.0;
  int iterations = 0;
};

using DenseObserver =
    std::function<void(const Eigen::VectorXd&, const TraceRecord&)>;

// Runs any baseline from a dense simplex start; FW variants go through the
// solver loop, the others iterate dense steps. All stop on gap <= epsilon.
DenseRunResult run_baseline(ProblemInstance& instance,
                            const BaselineConfig& config,
                            const Eigen::VectorXd& start,
                            const DenseObserver& observer = {});

}  // namespace afw
