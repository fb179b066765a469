#include "afw/solver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace afw {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double support_pairing(const ActiveSet& active, const Eigen::VectorXd& scores) {
  double s = 0.0;
  const auto& ids = active.support();
  const auto& w = active.weights();
  for (std::size_t i = 0; i < ids.size(); ++i) s += w[i] * scores[ids[i]];
  return s;
}

void run_cheap_checks(const ActiveSet& active, const TraceRecord& rec) {
  if (std::abs(active.weight_sum() - 1.0) > 1e-12)
    throw std::runtime_error("invariant: weights do not sum to 1");
  if (!(rec.alpha > 0.0) || rec.alpha > rec.alpha_max * (1.0 + 1e-12))
    throw std::runtime_error("invariant: step size outside (0, alpha_max]");
}

void run_full_checks(const ProblemInstance& instance, const ActiveSet& active,
                     const TraceRecord& rec) {
  run_cheap_checks(active, rec);
  if (active.cache_error() > 1e-10)
    throw std::runtime_error("invariant: active-set iterate cache drifted");
  Eigen::VectorXd drift =
      instance.current_weights() - active.dense_weights();
  if (drift.cwiseAbs().maxCoeff() > 1e-10)
    throw std::runtime_error("invariant: instance/active-set weight drift");
  auto violations = invariant_monitor(rec, instance.theta(),
                                      instance.linear_variation(), std::nullopt);
  if (!violations.empty())
    throw std::runtime_error("invariant: " + violations.front());
}

}  // namespace

double fw_gap(const ProblemInstance& instance, const ActiveSet& active, int v) {
  Eigen::VectorXd scores = instance.atom_scores();
  return support_pairing(active, scores) - scores[v];
}

Direction choose_direction(double gap, std::optional<double> away_gap,
                           const ActiveSet& active, int fw_atom,
                           int away_atom) {
  if (!away_gap.has_value() || active.support_size() == 1 || gap > *away_gap)
    return Direction{StepKind::FW, fw_atom, 1.0};
  double beta = active.weight_of(away_atom);
  return Direction{StepKind::Away, away_atom, beta / (1.0 - beta)};
}

double adaptive_stepsize(double r, double local_norm, double alpha_max) {
  if (!(r > 0.0)) throw std::invalid_argument("adaptive step: r > 0 required");
  if (!(alpha_max > 0.0))
    throw std::invalid_argument("adaptive step: alpha_max > 0 required");
  if (local_norm == 0.0) return alpha_max;
  double b = r / (local_norm * (r + local_norm));
  return std::min(b, alpha_max);
}

double exact_linesearch(const ProblemInstance& instance, const Direction& dir,
                        double r) {
  if (!(r > 0.0))
    throw std::invalid_argument("line-search: descent direction required");
  if (auto closed = instance.closed_form_linesearch(dir)) {
    double a = std::min(*closed, dir.alpha_max);
    if (!(a > 0.0))
      throw std::runtime_error("line-search: closed form returned alpha <= 0");
    return a;
  }
  double hi = dir.alpha_max;
  int shrinks = 0;
  while (!instance.step_in_domain(dir, hi)) {
    hi *= 0.5;
    if (++shrinks > 200)
      throw std::runtime_error("line-search: could not bracket the domain");
  }
  if (instance.slope_along(dir, hi) <= 0.0) return hi;
  double lo = 0.0;
  const double width_tol = 1e-12 * dir.alpha_max;
  while (hi - lo > width_tol) {
    double mid = 0.5 * (lo + hi);
    if (instance.slope_along(dir, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

RunResult run_loop(ProblemInstance& instance, const SolverConfig& config,
                   const ActiveSet& start, const IterationObserver& observer,
                   bool away_enabled, const std::string& label) {
  if (!(config.epsilon > 0.0))
    throw std::invalid_argument("solver: epsilon > 0 required");
  if (config.max_iterations < 0)
    throw std::invalid_argument("solver: iteration budget must be >= 0");

  instance.reset(start);
  ActiveSet active = start;
  RunResult result{active, {}, StopReason::Converged, "", 0.0, 0.0, 0};
  auto t0 = Clock::now();

  for (int k = 0;; ++k) {
    Eigen::VectorXd scores = instance.atom_scores();
    double grad_x = support_pairing(active, scores);
    int v = lmo_on_scores(scores);
    double gap = grad_x - scores[v];
    result.final_gap = gap;
    result.iterations = k;

    if (gap < -1e-10) {
      result.stop = StopReason::Fault;
      result.fault = "negative FW gap: gradient/LMO inconsistency";
      break;
    }
    if (gap <= config.epsilon) {
      result.stop = StopReason::Converged;
      break;
    }
    if (k >= config.max_iterations) {
      result.stop = StopReason::IterationBudget;
      break;
    }
    if (elapsed_s(t0) > config.time_budget_s) {
      result.stop = StopReason::TimeBudget;
      break;
    }

    std::optional<double> away_gap;
    int away_atom = -1;
    if (away_enabled && active.support_size() > 1) {
      away_atom = away_select_on_scores(active, scores);
      away_gap = scores[away_atom] - grad_x;
    }
    Direction dir = choose_direction(gap, away_gap, active, v, away_atom);
    double r = dir.kind == StepKind::FW ? gap : *away_gap;
    if (!(r > 0.0)) {
      result.stop = StopReason::Fault;
      result.fault = "nonpositive r at a non-converged state";
      break;
    }
    double local_norm = instance.direction_local_norm(dir.atom);

    double alpha;
    try {
      alpha = config.step_rule == StepRule::ExactLineSearch
                  ? exact_linesearch(instance, dir, r)
                  : adaptive_stepsize(r, local_norm, dir.alpha_max);
    } catch (const std::runtime_error& e) {
      result.stop = StopReason::Fault;
      result.fault = e.what();
      break;
    }

    double f_before = instance.objective();
    int support_before = active.support_size();
    bool dropped = false;
    try {
      instance.apply_step(dir, alpha);
      if (dir.kind == StepKind::FW) {
        active = fw_weight_update(active, dir.atom, alpha);
      } else {
        AwayUpdateResult res = away_weight_update(active, dir.atom, alpha);
        active = std::move(res.active);
        dropped = res.dropped;
      }
      if (config.caratheodory &&
          active.support_size() > active.atom_set().dimension() + 1) {
        active = caratheodory_reduce(active);
      }
    } catch (const std::runtime_error& e) {
      result.stop = StopReason::Fault;
      result.fault = e.what();
      break;
    }

    TraceRecord rec;
    rec.k = k;
    rec.objective = f_before;
    rec.objective_next = instance.objective();
    rec.gap = gap;
    rec.away_gap = away_gap;
    rec.r = r;
    rec.local_norm = local_norm;
    rec.alpha = alpha;
    rec.alpha_max = dir.alpha_max;
    rec.step_kind = !label.empty()           ? label
                    : dropped                ? "DROP"
                    : dir.kind == StepKind::FW ? "FW"
                                               : "AWAY";
    rec.rule_used = config.step_rule;
    rec.support_size = support_before;
    rec.time_s = elapsed_s(t0);
    result.trace.push_back(rec);

    try {
      if (config.check_level == CheckLevel::Cheap)
        run_cheap_checks(active, rec);
      else if (config.check_level == CheckLevel::Full)
        run_full_checks(instance, active, rec);
    } catch (const std::runtime_error& e) {
      result.stop = StopReason::Fault;
      result.fault = e.what();
      result.trace.back().time_s = elapsed_s(t0);
      break;
    }

    if (observer) observer(active, result.trace.back());
  }

  result.solution = active;
  result.final_objective = instance.objective();
  return result;
}

}  // namespace detail

IterationOutcome iterate(ProblemInstance& instance, ActiveSet& active,
                         const SolverConfig& config) {
  SolverConfig one = config;
  one.max_iterations = 1;
  RunResult r = detail::run_loop(instance, one, active, {}, true, "");
  if (r.stop == StopReason::Fault) throw std::runtime_error(r.fault);
  active = r.solution;
  IterationOutcome out;
  out.converged = r.trace.empty();
  if (!out.converged) out.record = r.trace.front();
  return out;
}

RunResult run_afw(ProblemInstance& instance, const SolverConfig& config,
                  const ActiveSet& start, const IterationObserver& observer) {
  return detail::run_loop(instance, config, start, observer, true, "");
}

std::vector<std::string> invariant_monitor(const TraceRecord& rec, double theta,
                                           double B,
                                           std::optional<double> fstar) {
  std::vector<std::string> out;
  auto flag = [&](const std::string& msg) {
    out.push_back("k=" + std::to_string(rec.k) + ": " + msg);
  };

  if (rec.gap < -1e-10) flag("negative FW gap");
  if (rec.r < rec.gap - 1e-8 * (1.0 + std::abs(rec.gap)))
    flag("r below the FW gap");

  double d_bound = std::max(rec.r, std::sqrt(theta)) + theta + B;
  if (rec.local_norm > d_bound + 1e-8 * (1.0 + d_bound))
    flag("local norm exceeds max{r, sqrt(theta)} + theta + B");

  if (rec.objective_next - rec.objective > 1e-8 * (1.0 + std::abs(rec.objective)))
    flag("objective failed to decrease");

  if (rec.rule_used == StepRule::Adaptive && rec.alpha * rec.local_norm >= 1.0)
    flag("adaptive step left the unit Dikin ball");

  if (!(rec.alpha > 0.0) || rec.alpha > rec.alpha_max * (1.0 + 1e-12))
    flag("step size outside (0, alpha_max]");

  if (fstar.has_value()) {
    double delta = std::max(rec.objective - *fstar, 0.0);
    if (rec.gap < delta - 1e-9) flag("FW gap below the objective gap");
    double rhs = std::max(2.0 * delta,
                          2.0 * (delta + std::sqrt(delta)) * rec.local_norm);
    if (rec.r > rhs + 1e-8 * (1.0 + rhs))
      flag("r exceeds max{2 delta, 2 (delta + sqrt(delta)) D}");
  }
  return out;
}

int max_drop_steps(int k, int support0, int q) {
  return (support0 + k - q) / 2;
}

std::vector<std::string> audit_trace(const std::vector<TraceRecord>& trace,
                                     double theta, double B, int support0,
                                     int q, std::optional<double> fstar) {
  std::vector<std::string> out;
  int drops = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    auto v = invariant_monitor(trace[i], theta, B, fstar);
    out.insert(out.end(), v.begin(), v.end());
    if (trace[i].step_kind == "DROP") ++drops;
    int k = static_cast<int>(i) + 1;
    if (drops > max_drop_steps(k, support0, q))
      out.push_back("k=" + std::to_string(k) +
                    ": drop steps exceed (|S0| + k - q)/2");
  }
  return out;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write trace: " + path);
  outf << "k,F,G,Gtilde,r,D,alpha,alphabar,step_kind,support_size,time_s\n";
  for (const auto& rec : trace) {
    outf << rec.k << ',' << format_double(rec.objective) << ','
         << format_double(rec.gap) << ',';
    if (rec.away_gap) outf << format_double(*rec.away_gap);
    outf << ',' << format_double(rec.r) << ',' << format_double(rec.local_norm)
         << ',';
    if (!std::isnan(rec.alpha)) outf << format_double(rec.alpha);
    outf << ',';
    if (!std::isnan(rec.alpha_max)) outf << format_double(rec.alpha_max);
    outf << ',' << rec.step_kind << ',' << rec.support_size << ','
         << format_double(rec.time_s) << '\n';
  }
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  std::vector<TraceRecord> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 11) cells.emplace_back();
    TraceRecord rec;
    rec.k = std::stoi(cells[0]);
    rec.objective = std::stod(cells[1]);
    rec.gap = std::stod(cells[2]);
    if (!cells[3].empty()) rec.away_gap = std::stod(cells[3]);
    rec.r = std::stod(cells[4]);
    rec.local_norm = std::stod(cells[5]);
    rec.alpha = cells[6].empty() ? std::nan("") : std::stod(cells[6]);
    rec.alpha_max = cells[7].empty() ? std::nan("") : std::stod(cells[7]);
    rec.step_kind = cells[8];
    rec.support_size = std::stoi(cells[9]);
    rec.time_s = std::stod(cells[10]);
    out.push_back(std::move(rec));
  }
  return out;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::IterationBudget: return "iteration budget";
    case StopReason::TimeBudget: return "time budget";
    case StopReason::Fault: return "invariant fault";
  }
  return "unknown";
}

}  // namespace afw
