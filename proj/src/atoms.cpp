#include "afw/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace afw {

namespace {

bool detect_standard_simplex(const Eigen::MatrixXd& points) {
  if (points.rows() != points.cols()) return false;
  return points.isIdentity(0.0);
}

}  // namespace

AtomSet::AtomSet(Eigen::MatrixXd points, bool standard_simplex)
    : points_(std::move(points)), standard_simplex_(standard_simplex) {}

AtomSet AtomSet::from_points(Eigen::MatrixXd points) {
  if (points.cols() < 1) throw std::invalid_argument("atom set: empty");
  for (int i = 0; i < points.cols(); ++i)
    for (int j = i + 1; j < points.cols(); ++j)
      if ((points.col(i) - points.col(j)).cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("atom set: duplicate atoms");
  bool simplex = detect_standard_simplex(points);
  return AtomSet(std::move(points), simplex);
}

AtomSet AtomSet::standard_simplex(int m) {
  if (m < 1) throw std::invalid_argument("atom set: m >= 1 required");
  return AtomSet(Eigen::MatrixXd::Identity(m, m), true);
}

AtomSet AtomSet::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open atom file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged atom file: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty atom file: " + path);
  Eigen::MatrixXd points(rows.front().size(), rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t i = 0; i < rows[j].size(); ++i)
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[j][i];
  return from_points(std::move(points));
}

void AtomSet::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write atom file: " + path);
  out.precision(17);
  for (int j = 0; j < size(); ++j) {
    for (int i = 0; i < dimension(); ++i) {
      if (i) out << ',';
      out << points_(i, j);
    }
    out << '\n';
  }
}

ActiveSet::ActiveSet(const AtomSet* atoms, std::vector<int> support,
                     std::vector<double> weights)
    : atoms_(atoms), support_(std::move(support)), weights_(std::move(weights)) {
  if (atoms_ == nullptr) throw std::invalid_argument("active set: null atoms");
  if (support_.empty() || support_.size() != weights_.size())
    throw std::invalid_argument("active set: bad support/weights");
  std::vector<std::size_t> order(support_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support_[a] < support_[b]; });
  std::vector<int> s(support_.size());
  std::vector<double> w(weights_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    s[i] = support_[order[i]];
    w[i] = weights_[order[i]];
  }
  support_ = std::move(s);
  weights_ = std::move(w);
  double sum = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (i > 0 && support_[i] == support_[i - 1])
      throw std::invalid_argument("active set: repeated atom id");
    if (support_[i] < 0 || support_[i] >= atoms_->size())
      throw std::invalid_argument("active set: atom id out of range");
    if (!(weights_[i] > 0.0))
      throw std::invalid_argument("active set: nonpositive weight");
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("active set: weights must sum to 1");
  for (double& wi : weights_) wi /= sum;
  x_ = Eigen::VectorXd::Zero(atoms_->dimension());
  for (std::size_t i = 0; i < support_.size(); ++i)
    x_ += weights_[i] * atoms_->atom(support_[i]);
}

ActiveSet ActiveSet::uniform(const AtomSet& atoms) {
  std::vector<int> ids(atoms.size());
  for (int i = 0; i < atoms.size(); ++i) ids[i] = i;
  std::vector<double> w(atoms.size(), 1.0 / atoms.size());
  return ActiveSet(&atoms, std::move(ids), std::move(w));
}

ActiveSet ActiveSet::single(const AtomSet& atoms, int id) {
  return ActiveSet(&atoms, {id}, {1.0});
}

ActiveSet ActiveSet::from_dense(const AtomSet& atoms,
                                const Eigen::VectorXd& weights, double floor) {
  if (weights.size() != atoms.size())
    throw std::invalid_argument("from_dense: weight length mismatch");
  std::vector<int> ids;
  std::vector<double> w;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights[i] > floor) {
      ids.push_back(i);
      w.push_back(weights[i]);
    }
  }
  return ActiveSet(&atoms, std::move(ids), std::move(w));
}

bool ActiveSet::contains(int id) const {
  return std::binary_search(support_.begin(), support_.end(), id);
}

double ActiveSet::weight_of(int id) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), id);
  if (it == support_.end() || *it != id) return 0.0;
  return weights_[static_cast<std::size_t>(it - support_.begin())];
}

double ActiveSet::weight_sum() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

Eigen::VectorXd ActiveSet::dense_weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(atoms_->size());
  for (std::size_t i = 0; i < support_.size(); ++i)
    w[support_[i]] = weights_[i];
  return w;
}

double ActiveSet::cache_error() const {
  Eigen::VectorXd fresh = Eigen::VectorXd::Zero(atoms_->dimension());
  for (std::size_t i = 0; i < support_.size(); ++i)
    fresh += weights_[i] * atoms_->atom(support_[i]);
  double scale = std::max(1.0, x_.cwiseAbs().maxCoeff());
  return (fresh - x_).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd direction_vector(const ActiveSet& active, const Direction& d) {
  Eigen::VectorXd a = active.atom_set().atom(d.atom);
  return d.kind == StepKind::FW ? Eigen::VectorXd(a - active.iterate())
                                : Eigen::VectorXd(active.iterate() - a);
}

int argmin_lowest(const Eigen::VectorXd& scores) {
  int best = 0;
  for (int i = 1; i < scores.size(); ++i)
    if (scores[i] < scores[best]) best = i;
  return best;
}

int lmo_on_scores(const Eigen::VectorXd& scores) {
  if (scores.size() == 0) throw std::invalid_argument("lmo: no atoms");
  return argmin_lowest(scores);
}

int lmo(const AtomSet& atoms, const Eigen::VectorXd& grad) {
  return lmo_on_scores(atoms.points().transpose() * grad);
}

int away_select_on_scores(const ActiveSet& active,
                          const Eigen::VectorXd& scores) {
  const auto& support = active.support();
  int best = support.front();
  for (std::size_t i = 1; i < support.size(); ++i)
    if (scores[support[i]] > scores[best]) best = support[i];
  return best;
}

int away_select(const ActiveSet& active, const Eigen::VectorXd& grad) {
  return away_select_on_scores(active,
                               active.atom_set().points().transpose() * grad);
}

ActiveSet fw_weight_update(const ActiveSet& active, int v, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("fw update: alpha in (0,1] required");
  if (alpha == 1.0) return ActiveSet::single(active.atom_set(), v);
  std::vector<int> ids = active.support();
  std::vector<double> w = active.weights();
  bool found = false;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    w[i] *= (1.0 - alpha);
    if (ids[i] == v) {
      w[i] += alpha;
      found = true;
    }
  }
  if (!found) {
    ids.push_back(v);
    w.push_back(alpha);
  }
  double sum = 0.0;
  for (double wi : w) sum += wi;
  for (double& wi : w) wi /= sum;
  return ActiveSet(&active.atom_set(), std::move(ids), std::move(w));
}

AwayUpdateResult away_weight_update(const ActiveSet& active, int atom,
                                    double alpha) {
  double beta = active.weight_of(atom);
  if (!(beta > 0.0))
    throw std::invalid_argument("away update: atom not in support");
  if (active.support_size() < 2)
    throw std::invalid_argument("away update: needs |support| >= 2");
  double alpha_max = beta / (1.0 - beta);
  if (!(alpha > 0.0) || alpha > alpha_max * (1.0 + 1e-12))
    throw std::invalid_argument("away update: alpha outside (0, alpha_max]");

  const auto& support = active.support();
  const auto& weights = active.weights();
  std::vector<int> ids;
  std::vector<double> w;
  ids.reserve(support.size());
  w.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    double wi = support[i] == atom ? (1.0 + alpha) * weights[i] - alpha
                                   : (1.0 + alpha) * weights[i];
    if (support[i] == atom && wi <= kWeightDropThreshold) continue;
    ids.push_back(support[i]);
    w.push_back(wi);
  }
  bool dropped = ids.size() < support.size();
  double sum = 0.0;
  for (double wi : w) sum += wi;
  for (double& wi : w) wi /= sum;
  return AwayUpdateResult{
      ActiveSet(&active.atom_set(), std::move(ids), std::move(w)), dropped};
}

ActiveSet caratheodory_reduce(const ActiveSet& active) {
  int p = active.atom_set().dimension();
  if (active.support_size() <= p + 1) return active;

  const AtomSet& atoms = active.atom_set();
  std::vector<int> ids = active.support();
  std::vector<double> w = active.weights();

  while (static_cast<int>(ids.size()) > p + 1) {
    int s = static_cast<int>(ids.size());
    // Affine dependence: nonzero lambda with sum lambda_i = 0 and
    // sum lambda_i a_i = 0.
    Eigen::MatrixXd m(p + 1, s);
    for (int j = 0; j < s; ++j) {
      m.block(0, j, p, 1) = atoms.atom(ids[j]);
      m(p, j) = 1.0;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    Eigen::MatrixXd kernel = lu.kernel();
    if (kernel.cols() == 0 || kernel.col(0).cwiseAbs().maxCoeff() == 0.0)
      break;  // numerically independent; nothing to remove
    Eigen::VectorXd lambda = kernel.col(0);
    if (lambda.maxCoeff() <= 0.0) lambda = -lambda;
    double t = std::numeric_limits<double>::infinity();
    int drop = -1;
    for (int j = 0; j < s; ++j) {
      if (lambda[j] > 0.0 && w[j] / lambda[j] < t) {
        t = w[j] / lambda[j];
        drop = j;
      }
    }
    std::vector<int> next_ids;
    std::vector<double> next_w;
    for (int j = 0; j < s; ++j) {
      double wj = w[j] - t * lambda[j];
      if (j == drop || wj <= kWeightDropThreshold) continue;
      next_ids.push_back(ids[j]);
      next_w.push_back(wj);
    }
    ids = std::move(next_ids);
    w = std::move(next_w);
  }
  double sum = 0.0;
  for (double wi : w) sum += wi;
  for (double& wi : w) wi /= sum;
  return ActiveSet(&active.atom_set(), std::move(ids), std::move(w));
}

}  // namespace afw
