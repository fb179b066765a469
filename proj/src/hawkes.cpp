#include "afw/hawkes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace afw {

void MhpArrivals::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("arrivals: horizon > 0");
  if (dimensions < 1) throw std::invalid_argument("arrivals: no dimensions");
  std::vector<bool> seen(dimensions, false);
  double prev = 0.0;
  for (const auto& e : events) {
    if (!(e.time >= 0.0 && e.time < horizon))
      throw std::invalid_argument("arrivals: event time outside [0, horizon)");
    if (e.time < prev) throw std::invalid_argument("arrivals: unsorted events");
    if (e.dim < 0 || e.dim >= dimensions)
      throw std::invalid_argument("arrivals: dimension index out of range");
    seen[e.dim] = true;
    prev = e.time;
  }
  for (int k = 0; k < dimensions; ++k)
    if (!seen[k])
      throw std::invalid_argument("arrivals: dimension " + std::to_string(k + 1) +
                                  " has no events");
}

MhpArrivals hawkes_simulate(const Eigen::VectorXd& base_intensity,
                            const Eigen::MatrixXd& infectivity, double horizon,
                            std::uint64_t seed, std::size_t max_events) {
  int m = static_cast<int>(base_intensity.size());
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate: horizon > 0");
  if (infectivity.rows() != m || infectivity.cols() != m)
    throw std::invalid_argument("simulate: infectivity must be m x m");
  if ((base_intensity.array() < 0.0).any() || (infectivity.array() < 0.0).any())
    throw std::invalid_argument("simulate: parameters must be nonnegative");
  if (infectivity.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::EigenSolver<Eigen::MatrixXd> eig(infectivity, false);
    if (eig.eigenvalues().cwiseAbs().maxCoeff() >= 1.0)
      throw std::invalid_argument("simulate: spectral radius must be < 1");
  }

  MhpArrivals out;
  out.horizon = horizon;
  out.dimensions = m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Eigen::VectorXd excitation = Eigen::VectorXd::Zero(m);
  double mu_total = base_intensity.sum();
  double now = 0.0;
  while (true) {
    double bound = mu_total + excitation.sum();
    if (!(bound > 0.0)) break;
    double wait = -std::log1p(-uniform(rng)) / bound;
    double cand = now + wait;
    if (cand >= horizon) break;
    excitation *= std::exp(-wait);
    Eigen::VectorXd intensity = base_intensity + excitation;
    // One uniform drives both the thinning accept and the mark choice.
    double r = uniform(rng) * bound;
    double cum = 0.0;
    int mark = -1;
    for (int k = 0; k < m; ++k) {
      cum += intensity[k];
      if (r < cum) {
        mark = k;
        break;
      }
    }
    if (mark >= 0) {
      out.events.push_back({cand, mark});
      excitation += infectivity.row(mark).transpose();
      if (out.events.size() > max_events)
        throw std::runtime_error("simulate: event cap exceeded (explosion?)");
    }
    now = cand;
  }
  return out;
}

std::vector<MhpDimensionData> mhp_ingest(const MhpArrivals& arrivals,
                                         double lambda) {
  arrivals.validate();
  if (!(lambda >= 0.0)) throw std::invalid_argument("ingest: lambda >= 0");
  int m = arrivals.dimensions;
  const auto& events = arrivals.events;
  std::size_t n = events.size();

  // Discounted per-dimension event counts, strictly before each event.
  // Ties at one timestamp see the state before the whole group.
  Eigen::MatrixXd discounted(n, m);
  Eigen::VectorXd running = Eigen::VectorXd::Zero(m);
  double prev_time = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && events[j].time == events[i].time) ++j;
    running *= std::exp(-(events[i].time - prev_time));
    for (std::size_t e = i; e < j; ++e)
      discounted.row(static_cast<Eigen::Index>(e)) = running.transpose();
    for (std::size_t e = i; e < j; ++e) running[events[e].dim] += 1.0;
    prev_time = events[i].time;
    i = j;
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  for (const auto& e : events)
    v[e.dim] += 1.0 - std::exp(-(arrivals.horizon - e.time));

  std::vector<int> counts(m, 0);
  for (const auto& e : events) ++counts[e.dim];

  std::vector<MhpDimensionData> out(m);
  std::vector<int> filled(m, 0);
  for (int k = 0; k < m; ++k) {
    out[k].dim = k;
    out[k].horizon = arrivals.horizon;
    out[k].lambda = lambda;
    out[k].raw_weights.resize(counts[k], m);
    out[k].v = v;
  }
  for (std::size_t e = 0; e < n; ++e) {
    int k = events[e].dim;
    out[k].raw_weights.row(filled[k]++) =
        discounted.row(static_cast<Eigen::Index>(e));
  }
  return out;
}

Eigen::MatrixXd MhpDimensionData::instance_rows() const {
  Eigen::Index rows = raw_weights.rows();
  Eigen::Index m = raw_weights.cols();
  Eigen::VectorXd scale = (v.array() + lambda).inverse();
  Eigen::MatrixXd out(rows, m + 1);
  out.col(0).setConstant(1.0 / horizon);
  out.rightCols(m) = raw_weights * scale.asDiagonal();
  return out;
}

SimplexLogInstance MhpDimensionData::make_instance() const {
  return SimplexLogInstance(instance_rows(), /*q=*/1);
}

double MhpDimensionData::negative_log_likelihood(
    double base, const Eigen::VectorXd& row) const {
  if (row.size() != raw_weights.cols())
    throw std::invalid_argument("mhp: parameter length mismatch");
  Eigen::VectorXd intensities =
      (raw_weights * row).array() + base;
  if (!(intensities.minCoeff() > 0.0))
    return std::numeric_limits<double>::infinity();
  return -intensities.array().log().sum() + horizon * base + v.dot(row) +
         lambda * row.sum();
}

std::pair<double, Eigen::VectorXd> mhp_map_back(double mu,
                                                const Eigen::VectorXd& a,
                                                double horizon,
                                                const Eigen::VectorXd& v,
                                                double lambda) {
  Eigen::VectorXd row = a.array() / (v.array() + lambda);
  return {mu / horizon, row};
}

MhpArrivals load_arrivals_csv(const std::string& path, double horizon) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open arrivals: " + path);
  std::string line;
  std::getline(in, line);  // header
  MhpArrivals out;
  double max_time = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string t, d;
    std::getline(ss, t, ',');
    std::getline(ss, d, ',');
    MhpEvent e{std::stod(t), std::stoi(d) - 1};
    max_time = std::max(max_time, e.time);
    out.events.push_back(e);
    out.dimensions = std::max(out.dimensions, e.dim + 1);
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const MhpEvent& a, const MhpEvent& b) {
                     return a.time < b.time;
                   });
  out.horizon = horizon > 0.0
                    ? horizon
                    : std::nextafter(max_time, std::numeric_limits<double>::max());
  return out;
}

void save_arrivals_csv(const std::string& path, const MhpArrivals& arrivals) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write arrivals: " + path);
  out.precision(17);
  out << "time,dim\n";
  for (const auto& e : arrivals.events) out << e.time << ',' << e.dim + 1 << '\n';
}

}  // namespace afw
