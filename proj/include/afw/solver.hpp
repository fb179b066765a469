#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "afw/problem.hpp"

namespace afw {

enum class StepRule { ExactLineSearch, Adaptive };
enum class CheckLevel { Off, Cheap, Full };
enum class StopReason { Converged, IterationBudget, TimeBudget, Fault };

struct SolverConfig {
  StepRule step_rule = StepRule::ExactLineSearch;
  double epsilon = 1e-9;  // FW-gap stopping threshold
  int max_iterations = 100000;
  double time_budget_s = std::numeric_limits<double>::infinity();
  CheckLevel check_level = CheckLevel::Cheap;
  bool caratheodory = false;
  std::uint64_t seed = 0;
};

// Full per-iteration account of one solver step.
struct TraceRecord {
  int k = 0;
  double objective = 0.0;       // F(x^k)
  double objective_next = 0.0;  // F(x^{k+1})
  double gap = 0.0;             // G_k
  std::optional<double> away_gap;  // computed only when |S_k| > 1
  double r = 0.0;               // <-grad F, d>
  double local_norm = 0.0;      // D_k
  double alpha = 0.0;
  double alpha_max = 0.0;
  std::string step_kind;        // FW | AWAY | DROP (baselines: method tag)
  StepRule rule_used = StepRule::ExactLineSearch;
  int support_size = 0;         // |S_k|
  double time_s = 0.0;          // elapsed within the run, at record end
};

struct RunResult {
  ActiveSet solution;
  std::vector<TraceRecord> trace;
  StopReason stop = StopReason::Converged;
  std::string fault;          // populated when stop == Fault
  double final_objective = 0.0;
  double final_gap = 0.0;
  int iterations = 0;
};

using IterationObserver =
    std::function<void(const ActiveSet&, const TraceRecord&)>;

// FW gap G = <-grad F(x), v - x> given the LMO output v, from the instance's
// current state.
double fw_gap(const ProblemInstance& instance, const ActiveSet& active, int v);

// Step 4: FW direction when the support is a singleton or G > G_away;
// otherwise (ties included) the away direction with alpha_max = b/(1-b).
Direction choose_direction(double gap, std::optional<double> away_gap,
                           const ActiveSet& active, int fw_atom, int away_atom);

// Adaptive rule: alpha = alpha_max when D = 0, else
// min{ r / (D (r + D)), alpha_max }; always alpha * D < 1.
double adaptive_stepsize(double r, double local_norm, double alpha_max);

// Exact line-search along `dir`: the instance's closed form when available,
// otherwise safeguarded bisection of phi' over a domain-shrunk bracket.
double exact_linesearch(const ProblemInstance& instance, const Direction& dir,
                        double r);

struct IterationOutcome {
  bool converged = false;  // G <= epsilon before stepping; no record made
  TraceRecord record;
};

// One full iteration: scores, LMO, gap, away atom, direction, step size,
// weight update with drop detection, optional Caratheodory reduction.
IterationOutcome iterate(ProblemInstance& instance, ActiveSet& active,
                         const SolverConfig& config);

// The away-step Frank-Wolfe loop. Runs until the gap falls to epsilon, a
// budget expires, or a numerical invariant fails.
RunResult run_afw(ProblemInstance& instance, const SolverConfig& config,
                  const ActiveSet& start, const IterationObserver& observer = {});

namespace detail {
// Shared loop body; the plain FW baseline disables the away branch and tags
// records with its method label.
RunResult run_loop(ProblemInstance& instance, const SolverConfig& config,
                   const ActiveSet& start, const IterationObserver& observer,
                   bool away_enabled, const std::string& label);
}  // namespace detail

// Checks one record against the runtime inequalities:
//  (a) D <= max{r, sqrt(theta)} + theta + B,
//  (b) strict objective decrease,
//  (c) alpha * D < 1 for adaptive steps,
//  (d) r >= G >= 0, and G >= delta when a reference optimum is known,
//  (e) r <= max{2 delta, 2 (delta + sqrt(delta)) D} with a known reference.
// Returns human-readable violation descriptions (empty when clean).
std::vector<std::string> invariant_monitor(const TraceRecord& record,
                                           double theta, double B,
                                           std::optional<double> fstar);

// Largest admissible number of drop steps within the first k iterations.
int max_drop_steps(int k, int support0, int q);

// Whole-trace audit: per-record monitor plus the drop-step count bound.
std::vector<std::string> audit_trace(const std::vector<TraceRecord>& trace,
                                     double theta, double B, int support0,
                                     int q, std::optional<double> fstar);

// CSV schema: k,F,G,Gtilde,r,D,alpha,alphabar,step_kind,support_size,time_s.
// Absent away gaps serialize as empty fields.
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

const char* to_string(StopReason reason);

}  // namespace afw
