#include "afw/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>

namespace afw {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<std::string> kKnownMethods = {
    "AFW-E", "AFW-A", "FW-E", "FW-A", "RSGM-F", "RSGM-B", "MG"};

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ExperimentConfig parse_experiment_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("instance")) {
    if (*v == "dopt") cfg.kind = ExperimentConfig::Kind::Dopt;
    else if (*v == "mhp") cfg.kind = ExperimentConfig::Kind::Mhp;
    else if (*v == "dopt_file") cfg.kind = ExperimentConfig::Kind::DoptFile;
    else if (*v == "mhp_file") cfg.kind = ExperimentConfig::Kind::MhpFile;
    else throw std::runtime_error("config: unknown instance kind " + *v);
  }
  if (auto v = take("m")) cfg.m = std::stoi(*v);
  if (auto v = take("n")) cfg.n = std::stoi(*v);
  if (auto v = take("scale")) cfg.scale = std::stod(*v);
  if (auto v = take("seed")) cfg.seed = std::stoull(*v);
  if (auto v = take("horizon")) cfg.horizon = std::stod(*v);
  if (auto v = take("mu")) cfg.mu = std::stod(*v);
  if (auto v = take("density")) cfg.density = std::stod(*v);
  if (auto v = take("lambda")) cfg.lambda = std::stod(*v);
  if (auto v = take("dimension")) cfg.mhp_dimension = std::stoi(*v);
  if (auto v = take("points_file")) cfg.points_file = *v;
  if (auto v = take("arrivals_file")) cfg.arrivals_file = *v;
  if (auto v = take("solvers")) cfg.solvers = split_list(*v);
  if (auto v = take("epsilon")) cfg.epsilon = std::stod(*v);
  if (auto v = take("max_iters")) cfg.max_iterations = std::stoi(*v);
  if (auto v = take("time_budget_s")) cfg.time_budget_s = std::stod(*v);
  if (auto v = take("rsgm_L")) cfg.rsgm_smoothness = std::stod(*v);
  if (auto v = take("output_dir")) cfg.output_dir = *v;

  if (!kv.empty())
    throw std::runtime_error("config: unknown key " + kv.begin()->first);
  if (cfg.solvers.empty())
    throw std::runtime_error("config: at least one solver required");
  for (const auto& s : cfg.solvers)
    if (std::find(kKnownMethods.begin(), kKnownMethods.end(), s) ==
        kKnownMethods.end())
      throw std::runtime_error("config: unknown solver " + s);
  if (!(cfg.epsilon > 0.0)) throw std::runtime_error("config: epsilon > 0");
  if (cfg.max_iterations < 1 || !(cfg.time_budget_s > 0.0))
    throw std::runtime_error("config: budgets must be positive");
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config_text(ss.str());
}

Eigen::MatrixXd mhp_random_infectivity(int m, double density,
                                       std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("infectivity: m >= 1");
  if (!(density >= 0.0 && density <= 1.0))
    throw std::invalid_argument("infectivity: density in [0,1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(0.1, 0.5);
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = entry(rng);
  std::vector<int> idx(m * m);
  for (int i = 0; i < m * m; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  int zeros = m * m - static_cast<int>(std::lround(density * m * m));
  for (int i = 0; i < zeros; ++i) a(idx[i] / m, idx[i] % m) = 0.0;
  if (a.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::EigenSolver<Eigen::MatrixXd> eig(a, false);
    double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (radius > 0.0) a *= 0.9 / radius;
  }
  return a;
}

BuiltExperiment build_experiment_instance(const ExperimentConfig& config) {
  BuiltExperiment out;
  switch (config.kind) {
    case ExperimentConfig::Kind::Dopt: {
      Eigen::MatrixXd points =
          dopt_random_points(config.m, config.n, config.scale, config.seed);
      out.instance = std::make_unique<DoptInstance>(std::move(points));
      return out;
    }
    case ExperimentConfig::Kind::DoptFile: {
      AtomSet pts = AtomSet::load_csv(config.points_file);
      // Points are stored one per row; atoms loader gives them as columns.
      out.instance = std::make_unique<DoptInstance>(pts.points());
      return out;
    }
    case ExperimentConfig::Kind::Mhp:
    case ExperimentConfig::Kind::MhpFile: {
      MhpArrivals arrivals;
      if (config.kind == ExperimentConfig::Kind::Mhp) {
        Eigen::MatrixXd a =
            mhp_random_infectivity(config.m, config.density, config.seed);
        Eigen::VectorXd mu = Eigen::VectorXd::Constant(config.m, config.mu);
        arrivals = hawkes_simulate(mu, a, config.horizon, config.seed + 1);
      } else {
        arrivals = load_arrivals_csv(config.arrivals_file, config.horizon);
      }
      auto per_dim = mhp_ingest(arrivals, config.lambda);
      int k = config.mhp_dimension - 1;
      if (k < 0 || k >= static_cast<int>(per_dim.size()))
        throw std::runtime_error("config: mhp dimension out of range");
      out.mhp_data = std::move(per_dim[k]);
      out.instance = std::make_unique<SimplexLogInstance>(
          out.mhp_data->instance_rows(), /*q=*/1);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

ReferenceResult compute_reference_fstar(ProblemInstance& instance,
                                        const ActiveSet& start, double epsilon,
                                        int max_iterations,
                                        double time_budget_s) {
  SolverConfig cfg;
  cfg.step_rule = StepRule::ExactLineSearch;
  cfg.epsilon = epsilon;
  cfg.max_iterations = max_iterations;
  cfg.time_budget_s = time_budget_s;
  RunResult r = run_afw(instance, cfg, start);
  if (r.stop == StopReason::Fault)
    throw std::runtime_error("reference run fault: " + r.fault);
  ReferenceResult out;
  out.fstar = r.final_objective;
  out.certified = r.stop == StopReason::Converged;
  out.iterations = r.iterations;
  return out;
}

int sparsity(const Eigen::VectorXd& x) {
  double threshold =
      2.22e-16 * std::max(1.0, x.size() ? x.cwiseAbs().maxCoeff() : 1.0);
  return static_cast<int>((x.array() > threshold).count());
}

LinearFit fit_line(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_line: need matching series, >= 2 points");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate xs");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.points = static_cast<int>(xs.size());
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double slope_ratio_report(const std::vector<double>& delta,
                          const std::vector<double>& gap) {
  if (delta.size() != gap.size())
    throw std::invalid_argument("slope ratio: series length mismatch");
  std::vector<double> ks, ld, lg;
  for (std::size_t k = 0; k < delta.size(); ++k) {
    if (delta[k] >= 1e-8 && delta[k] <= 1e-2 && gap[k] > 0.0) {
      ks.push_back(static_cast<double>(k));
      ld.push_back(std::log(delta[k]));
      lg.push_back(std::log(gap[k]));
    }
  }
  if (ks.size() < 10)
    throw std::runtime_error("slope ratio: insufficient linear tail (" +
                             std::to_string(ks.size()) + " points)");
  LinearFit fd = fit_line(ks, ld);
  LinearFit fg = fit_line(ks, lg);
  if (fd.slope == 0.0) throw std::runtime_error("slope ratio: flat delta tail");
  return fg.slope / fd.slope;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metrics: " + path);
  out << "k,time_s,delta,gap,sparsity\n";
  for (const auto& r : rows)
    out << r.k << ',' << format_double(r.time_s) << ','
        << format_double(r.delta) << ',' << format_double(r.gap) << ','
        << r.sparsity << '\n';
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics: " + path);
  std::vector<MetricsRow> out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string c;
    MetricsRow r;
    std::getline(ss, c, ',');
    r.k = std::stoi(c);
    std::getline(ss, c, ',');
    r.time_s = std::stod(c);
    std::getline(ss, c, ',');
    r.delta = std::stod(c);
    std::getline(ss, c, ',');
    r.gap = std::stod(c);
    std::getline(ss, c, ',');
    r.sparsity = std::stoi(c);
    out.push_back(r);
  }
  return out;
}

std::string metrics_fingerprint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics: " + path);
  std::string line, acc;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) {
      // blank the time_s column (second field)
      auto c1 = line.find(',');
      auto c2 = line.find(',', c1 + 1);
      if (c1 != std::string::npos && c2 != std::string::npos)
        line = line.substr(0, c1 + 1) + line.substr(c2);
    }
    first = false;
    acc += line;
    acc += '\n';
  }
  return std::to_string(std::hash<std::string>{}(acc));
}

namespace {

struct MethodRun {
  MethodSummary summary;
  std::vector<TraceRecord> trace;
  std::vector<MetricsRow> metrics;
};

MethodRun run_one_method(const std::string& method,
                         const ProblemInstance& prototype,
                         const ExperimentConfig& config, double fstar) {
  MethodRun out;
  out.summary.method = method;
  std::unique_ptr<ProblemInstance> instance = prototype.clone_fresh();
  ActiveSet x0 = ActiveSet::uniform(instance->atom_set());

  Eigen::VectorXd prev = x0.dense_weights();
  auto push_row = [&](const TraceRecord& rec, const Eigen::VectorXd& state_x) {
    MetricsRow row;
    row.k = rec.k;
    row.time_s = rec.time_s;
    row.delta = rec.objective - fstar;
    row.gap = rec.gap;
    row.sparsity = sparsity(prev);
    out.metrics.push_back(row);
    prev = state_x;
  };

  bool afw = method == "AFW-E" || method == "AFW-A";
  if (afw || method == "FW-E" || method == "FW-A") {
    SolverConfig sc;
    sc.step_rule = (method == "AFW-E" || method == "FW-E")
                       ? StepRule::ExactLineSearch
                       : StepRule::Adaptive;
    sc.epsilon = config.epsilon;
    sc.max_iterations = config.max_iterations;
    sc.time_budget_s = config.time_budget_s;
    IterationObserver obs = [&](const ActiveSet& a, const TraceRecord& rec) {
      push_row(rec, a.dense_weights());
    };
    RunResult r = afw ? run_afw(*instance, sc, x0, obs)
                      : fw_plain_run(*instance, sc, x0, obs);
    out.trace = std::move(r.trace);
    out.summary.stop = r.stop;
    out.summary.fault = r.fault;
    out.summary.iterations = r.iterations;
    out.summary.final_objective = r.final_objective;
    out.summary.final_gap = r.final_gap;
    out.summary.final_sparsity = sparsity(r.solution.dense_weights());
    MetricsRow final_row{r.iterations,
                         out.trace.empty() ? 0.0 : out.trace.back().time_s,
                         r.final_objective - fstar, r.final_gap,
                         sparsity(r.solution.dense_weights())};
    out.metrics.push_back(final_row);
    if (afw)
      out.summary.violations =
          audit_trace(out.trace, instance->theta(),
                      instance->linear_variation(),
                      x0.support_size(), instance->min_support_q(), fstar);
  } else {
    BaselineConfig bc;
    bc.method = baseline_from_tag(method);
    bc.smoothness = config.rsgm_smoothness;
    bc.epsilon = config.epsilon;
    bc.max_iterations = config.max_iterations;
    bc.time_budget_s = config.time_budget_s;
    DenseObserver obs = [&](const Eigen::VectorXd& x, const TraceRecord& rec) {
      push_row(rec, x);
    };
    DenseRunResult r = run_baseline(*instance, bc, prev, obs);
    out.trace = std::move(r.trace);
    out.summary.stop = r.stop;
    out.summary.fault = r.fault;
    out.summary.iterations = r.iterations;
    out.summary.final_objective = r.final_objective;
    out.summary.final_gap = r.final_gap;
    out.summary.final_sparsity = sparsity(r.solution);
    MetricsRow final_row{r.iterations,
                         out.trace.empty() ? 0.0 : out.trace.back().time_s,
                         r.final_objective - fstar, r.final_gap,
                         sparsity(r.solution)};
    out.metrics.push_back(final_row);
  }
  return out;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  BuiltExperiment built = build_experiment_instance(config);
  ProblemInstance& prototype = *built.instance;

  std::unique_ptr<ProblemInstance> ref_instance = prototype.clone_fresh();
  ActiveSet x0 = ActiveSet::uniform(ref_instance->atom_set());
  ExperimentOutcome outcome;
  outcome.reference =
      compute_reference_fstar(*ref_instance, x0, config.epsilon,
                              config.max_iterations, config.time_budget_s);

  std::vector<std::future<MethodRun>> futures;
  futures.reserve(config.solvers.size());
  for (const auto& method : config.solvers)
    futures.push_back(std::async(std::launch::async, run_one_method, method,
                                 std::cref(prototype), std::cref(config),
                                 outcome.reference.fstar));

  fs::create_directories(config.output_dir);
  std::ofstream combined(fs::path(config.output_dir) / "combined.csv");
  combined << "method,metric,k,time_s,value\n";

  for (auto& fut : futures) {
    MethodRun run = fut.get();
    const std::string& method = run.summary.method;
    write_trace_csv((fs::path(config.output_dir) / ("trace_" + method + ".csv"))
                        .string(),
                    run.trace);
    write_metrics_csv(
        (fs::path(config.output_dir) / ("metrics_" + method + ".csv")).string(),
        run.metrics);
    for (const auto& row : run.metrics) {
      auto emit = [&](const char* metric, const std::string& value) {
        combined << method << ',' << metric << ',' << row.k << ','
                 << format_double(row.time_s) << ',' << value << '\n';
      };
      emit("delta", format_double(row.delta));
      emit("gap", format_double(row.gap));
      emit("sparsity", std::to_string(row.sparsity));
    }
    if (!run.summary.violations.empty()) outcome.invariant_violations = true;
    outcome.methods.push_back(std::move(run.summary));
  }

  nlohmann::json meta;
  meta["epsilon"] = config.epsilon;
  meta["max_iters"] = config.max_iterations;
  meta["seed"] = config.seed;
  meta["fstar_ref"] = outcome.reference.fstar;
  meta["fstar_certified"] = outcome.reference.certified;
  meta["fstar_iterations"] = outcome.reference.iterations;
  meta["solvers"] = config.solvers;
  switch (config.kind) {
    case ExperimentConfig::Kind::Dopt:
      meta["instance"] = {{"kind", "dopt"}, {"m", config.m}, {"n", config.n},
                          {"scale", config.scale}};
      break;
    case ExperimentConfig::Kind::DoptFile:
      meta["instance"] = {{"kind", "dopt_file"}, {"path", config.points_file}};
      break;
    case ExperimentConfig::Kind::Mhp:
      meta["instance"] = {{"kind", "mhp"},       {"m", config.m},
                          {"horizon", config.horizon}, {"mu", config.mu},
                          {"density", config.density}, {"lambda", config.lambda},
                          {"dimension", config.mhp_dimension}};
      break;
    case ExperimentConfig::Kind::MhpFile:
      meta["instance"] = {{"kind", "mhp_file"},
                          {"path", config.arrivals_file},
                          {"dimension", config.mhp_dimension}};
      break;
  }
  meta["versions"] = {{"afw", "0.1.0"},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)}};
  for (const auto& m : outcome.methods) {
    meta["results"][m.method] = {
        {"stop", to_string(m.stop)},
        {"iterations", m.iterations},
        {"final_objective", m.final_objective},
        {"final_gap", m.final_gap},
        {"final_sparsity", m.final_sparsity},
        {"violations", m.violations.size()}};
  }
  std::ofstream meta_out(fs::path(config.output_dir) / "metadata.json");
  meta_out << meta.dump(2) << '\n';
  return outcome;
}

}  // namespace afw
