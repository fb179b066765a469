#include "afw/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace afw {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_simplex(const ProblemInstance& instance, const char* who) {
  if (!instance.atom_set().is_standard_simplex())
    throw std::invalid_argument(std::string(who) +
                                ": standard-simplex instance required");
}

constexpr double kPositivityFloor = 1e-300;
constexpr double kSmoothnessCap = 1e12;

}  // namespace

const char* baseline_tag(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::FwExact: return "FW-E";
    case BaselineMethod::FwAdaptive: return "FW-A";
    case BaselineMethod::RsgmFixed: return "RSGM-F";
    case BaselineMethod::RsgmBacktracking: return "RSGM-B";
    case BaselineMethod::Mg: return "MG";
  }
  return "?";
}

BaselineMethod baseline_from_tag(const std::string& tag) {
  if (tag == "FW-E") return BaselineMethod::FwExact;
  if (tag == "FW-A") return BaselineMethod::FwAdaptive;
  if (tag == "RSGM-F") return BaselineMethod::RsgmFixed;
  if (tag == "RSGM-B") return BaselineMethod::RsgmBacktracking;
  if (tag == "MG") return BaselineMethod::Mg;
  throw std::invalid_argument("unknown baseline: " + tag);
}

RunResult fw_plain_run(ProblemInstance& instance, const SolverConfig& config,
                       const ActiveSet& start,
                       const IterationObserver& observer) {
  const char* tag =
      config.step_rule == StepRule::ExactLineSearch ? "FW-E" : "FW-A";
  return detail::run_loop(instance, config, start, observer,
                          /*away_enabled=*/false, tag);
}

Eigen::VectorXd mg_step(const ProblemInstance& instance,
                        const Eigen::VectorXd& x) {
  require_simplex(instance, "mg");
  if (instance.has_linear_term())
    throw std::invalid_argument("mg: requires a zero linear term");
  Eigen::VectorXd scores;
  instance.eval_dense(x, nullptr, &scores);
  return x.cwiseProduct(-scores) / instance.theta();
}

double log_barrier_bregman(const Eigen::VectorXd& u, const Eigen::VectorXd& x) {
  // h(u) - h(x) - <grad h(x), u - x> for h = -sum ln
  return (x.array() / u.array()).log().sum() +
         ((u - x).array() / x.array()).sum();
}

Eigen::VectorXd rsgm_step(const ProblemInstance& instance,
                          const Eigen::VectorXd& x, double smoothness) {
  require_simplex(instance, "rsgm");
  if (!(smoothness > 0.0))
    throw std::invalid_argument("rsgm: smoothness constant > 0 required");
  if (!(x.minCoeff() > 0.0))
    throw std::invalid_argument("rsgm: strictly positive point required");

  Eigen::VectorXd scores;
  instance.eval_dense(x, nullptr, &scores);
  // Stationarity: u_i = L / (s_i + mu) with s_i = grad_i + L / x_i; the sum
  // of u is strictly decreasing in mu on (-min s, inf).
  Eigen::VectorXd s = scores + smoothness * x.cwiseInverse();
  double lo = -s.minCoeff();
  auto weight_sum = [&](double mu) {
    return (smoothness / (s.array() + mu)).sum();
  };
  double step = std::max(1.0, std::abs(lo));
  double lo_edge = lo + 1e-12 * step;
  while (!(weight_sum(lo_edge) > 1.0)) {
    lo_edge = lo + (lo_edge - lo) / 2.0;
    if (!(lo_edge > lo))
      throw std::runtime_error("rsgm: bracket failure at the lower edge");
  }
  double hi = lo + step;
  int widen = 0;
  while (weight_sum(hi) > 1.0) {
    step *= 2.0;
    hi = lo + step;
    if (++widen > 200) throw std::runtime_error("rsgm: bracket failure");
  }
  double a = lo_edge, b = hi;
  for (int it = 0; it < 500; ++it) {
    double mid = 0.5 * (a + b);
    double sum = weight_sum(mid);
    if (std::abs(sum - 1.0) <= 1e-12) {
      a = b = mid;
      break;
    }
    (sum > 1.0 ? a : b) = mid;
  }
  double mu = 0.5 * (a + b);
  Eigen::VectorXd u = smoothness / (s.array() + mu);
  u = u.cwiseMax(kPositivityFloor);
  double total = u.sum();
  if (std::abs(total - 1.0) > 1e-10)
    throw std::runtime_error("rsgm: multiplier bisection did not close");
  return u / total;
}

std::pair<Eigen::VectorXd, double> rsgm_backtracking_step(
    const ProblemInstance& instance, const Eigen::VectorXd& x,
    double smoothness) {
  double f_x;
  Eigen::VectorXd scores;
  instance.eval_dense(x, &f_x, &scores);
  double L = smoothness;
  while (true) {
    Eigen::VectorXd u = rsgm_step(instance, x, L);
    double f_u;
    instance.eval_dense(u, &f_u, nullptr);
    double model = f_x + scores.dot(u - x) + L * log_barrier_bregman(u, x);
    if (f_u <= model + 1e-12 * (1.0 + std::abs(f_u)))
      return {u, L / 2.0};
    L *= 2.0;
    if (L > kSmoothnessCap)
      throw std::runtime_error("rsgm: smoothness constant overflow");
  }
}

DenseRunResult run_baseline(ProblemInstance& instance,
                            const BaselineConfig& config,
                            const Eigen::VectorXd& start,
                            const DenseObserver& observer) {
  if (config.method == BaselineMethod::FwExact ||
      config.method == BaselineMethod::FwAdaptive) {
    SolverConfig sc;
    sc.step_rule = config.method == BaselineMethod::FwExact
                       ? StepRule::ExactLineSearch
                       : StepRule::Adaptive;
    sc.epsilon = config.epsilon;
    sc.max_iterations = config.max_iterations;
    sc.time_budget_s = config.time_budget_s;
    ActiveSet x0 = ActiveSet::from_dense(instance.atom_set(), start);
    DenseObserver dense_obs = observer;
    IterationObserver adapter;
    if (dense_obs)
      adapter = [&dense_obs](const ActiveSet& a, const TraceRecord& rec) {
        dense_obs(a.dense_weights(), rec);
      };
    RunResult r = fw_plain_run(instance, sc, x0, adapter);
    DenseRunResult out;
    out.solution = r.solution.dense_weights();
    out.trace = std::move(r.trace);
    out.stop = r.stop;
    out.fault = std::move(r.fault);
    out.final_objective = r.final_objective;
    out.final_gap = r.final_gap;
    out.iterations = r.iterations;
    return out;
  }

  require_simplex(instance, "baseline");
  const char* tag = baseline_tag(config.method);
  double L = config.smoothness > 0.0 ? config.smoothness
                                     : instance.default_rsgm_smoothness();
  DenseRunResult out;
  Eigen::VectorXd x = start;
  auto t0 = Clock::now();

  for (int k = 0;; ++k) {
    double f;
    Eigen::VectorXd scores;
    instance.eval_dense(x, &f, &scores);
    double gap = scores.dot(x) - scores.minCoeff();
    out.final_gap = gap;
    out.final_objective = f;
    out.iterations = k;
    if (gap <= config.epsilon) {
      out.stop = StopReason::Converged;
      break;
    }
    if (k >= config.max_iterations) {
      out.stop = StopReason::IterationBudget;
      break;
    }
    if (elapsed_s(t0) > config.time_budget_s) {
      out.stop = StopReason::TimeBudget;
      break;
    }

    Eigen::VectorXd next;
    try {
      switch (config.method) {
        case BaselineMethod::Mg:
          next = mg_step(instance, x);
          break;
        case BaselineMethod::RsgmFixed:
          next = rsgm_step(instance, x, L);
          break;
        case BaselineMethod::RsgmBacktracking: {
          auto [u, l_next] = rsgm_backtracking_step(instance, x, L);
          next = std::move(u);
          L = std::max(l_next, 1e-12);
          break;
        }
        default:
          throw std::logic_error("unreachable");
      }
    } catch (const std::runtime_error& e) {
      out.stop = StopReason::Fault;
      out.fault = e.what();
      break;
    }

    double f_next;
    instance.eval_dense(next, &f_next, nullptr);
    TraceRecord rec;
    rec.k = k;
    rec.objective = f;
    rec.objective_next = f_next;
    rec.gap = gap;
    rec.r = gap;
    rec.local_norm = 0.0;
    rec.alpha = std::nan("");
    rec.alpha_max = std::nan("");
    rec.step_kind = tag;
    rec.support_size =
        static_cast<int>((x.array() > kPositivityFloor).count());
    rec.time_s = elapsed_s(t0);
    out.trace.push_back(rec);
    x = std::move(next);
    if (observer) observer(x, out.trace.back());
  }
  out.solution = x;
  return out;
}

}  // namespace afw
