#include "afw/dopt.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace afw {

namespace {

constexpr double kDenomFloor = 1e-13;
constexpr double kScoreAlarm = -1e-8;
constexpr double kIdentityAlarm = 1e-6;

}  // namespace

double dopt_linesearch_fw(double g, int n) {
  if (!(g > n)) throw std::invalid_argument("dopt fw step: requires g > n");
  return (g - n) / (n * (g - 1.0));
}

double dopt_linesearch_away(double g, int n, double alpha_max) {
  if (!(g < n)) throw std::invalid_argument("dopt away step: requires g < n");
  if (!(alpha_max > 0.0))
    throw std::invalid_argument("dopt away step: alpha_max > 0 required");
  if (g <= 1.0) return alpha_max;  // the objective decreases on the whole ray
  return std::min((n - g) / (n * (g - 1.0)), alpha_max);
}

double dopt_direction_norm(double g, int n) {
  return std::sqrt(std::max(g * g - 2.0 * g + n, 0.0));
}

DoptInstance::DoptInstance(Eigen::MatrixXd points, Options options)
    : ProblemInstance(AtomSet::standard_simplex(static_cast<int>(points.cols())),
                      std::shared_ptr<const Barrier>(
                          make_logdet_barrier(static_cast<int>(points.rows()))),
                      /*linear_variation=*/0.0,
                      /*q=*/static_cast<int>(points.rows())),
      points_(std::move(points)),
      n_(static_cast<int>(points_.rows())),
      options_(options) {
  int m = static_cast<int>(points_.cols());
  if (m < n_ + 1)
    throw std::invalid_argument("dopt: needs at least n + 1 points");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(points_);
  if (qr.rank() < n_)
    throw std::invalid_argument("dopt: points do not span R^n");
  if (options_.refactor_period < 1)
    throw std::invalid_argument("dopt: refactor period >= 1 required");
}

void DoptInstance::require_ready() const {
  if (!ready_) throw std::runtime_error("dopt: caches not initialized");
}

const Eigen::VectorXd& DoptInstance::scores() const {
  require_ready();
  return scores_;
}

double DoptInstance::score_weight_identity() const {
  require_ready();
  return weights_.dot(scores_);
}

Eigen::MatrixXd DoptInstance::design_matrix() const {
  require_ready();
  return points_ * weights_.asDiagonal() * points_.transpose();
}

const Eigen::MatrixXd& DoptInstance::inverse() const {
  require_ready();
  return inverse_;
}

void DoptInstance::refactorize() {
  Eigen::MatrixXd m = points_ * weights_.asDiagonal() * points_.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  double tr = m.trace();
  bool ok = llt.info() == Eigen::Success && tr > 0.0;
  if (ok) {
    double min_diag = llt.matrixLLT().diagonal().minCoeff();
    ok = min_diag * min_diag > 1e-14 * tr;
  }
  if (!ok) throw std::runtime_error("dopt: design matrix numerically singular");
  inverse_ = llt.solve(Eigen::MatrixXd::Identity(n_, n_));
  Eigen::MatrixXd w = inverse_ * points_;
  scores_ = (points_.cwiseProduct(w)).colwise().sum().transpose();
  log_det_ = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  steps_since_refactor_ = 0;
}

void DoptInstance::reset(const ActiveSet& active) {
  weights_ = active.dense_weights();
  try {
    refactorize();
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(std::string("dopt: infeasible start: ") +
                                e.what());
  }
  ready_ = true;
}

double DoptInstance::objective() const {
  require_ready();
  return -log_det_;
}

Eigen::VectorXd DoptInstance::atom_scores() const {
  require_ready();
  return -scores_;
}

double DoptInstance::direction_local_norm(int atom) const {
  require_ready();
  return dopt_direction_norm(scores_[atom], n_);
}

std::optional<double> DoptInstance::closed_form_linesearch(
    const Direction& dir) const {
  require_ready();
  double g = scores_[dir.atom];
  if (dir.kind == StepKind::FW) {
    double a = dopt_linesearch_fw(g, n_);
    return std::min(a, dir.alpha_max);
  }
  return dopt_linesearch_away(g, n_, dir.alpha_max);
}

double DoptInstance::objective_along(const Direction& dir, double alpha) const {
  require_ready();
  if (!step_in_domain(dir, alpha))
    return std::numeric_limits<double>::infinity();
  double g = scores_[dir.atom];
  if (dir.kind == StepKind::FW)
    return -log_det_ - (n_ - 1) * std::log1p(-alpha) -
           std::log1p(alpha * (g - 1.0));
  return -log_det_ - (n_ - 1) * std::log1p(alpha) -
         std::log1p(alpha * (1.0 - g));
}

double DoptInstance::slope_along(const Direction& dir, double alpha) const {
  require_ready();
  double g = scores_[dir.atom];
  if (dir.kind == StepKind::FW)
    return (n_ - 1) / (1.0 - alpha) - (g - 1.0) / (1.0 + alpha * (g - 1.0));
  return -(n_ - 1) / (1.0 + alpha) + (g - 1.0) / (1.0 + alpha * (1.0 - g));
}

bool DoptInstance::step_in_domain(const Direction& dir, double alpha) const {
  require_ready();
  double g = scores_[dir.atom];
  if (dir.kind == StepKind::FW)
    return alpha < 1.0 - 1e-14 && 1.0 + alpha * (g - 1.0) > kDenomFloor;
  return 1.0 + alpha * (1.0 - g) > kDenomFloor;
}

void DoptInstance::apply_step(const Direction& dir, double alpha) {
  require_ready();
  if (!(alpha > 0.0)) throw std::invalid_argument("dopt: alpha > 0 required");
  double c = dir.kind == StepKind::FW ? 1.0 - alpha : 1.0 + alpha;
  double s = dir.kind == StepKind::FW ? alpha / c : -alpha / c;
  double g = scores_[dir.atom];
  double denom = 1.0 + s * g;
  if (!(c > 0.0) || denom <= kDenomFloor)
    throw std::runtime_error("dopt: step left the positive-definite cone");

  Eigen::VectorXd w = inverse_ * points_.col(dir.atom);
  Eigen::VectorXd h = points_.transpose() * w;
  inverse_ -= (s / denom) * (w * w.transpose());
  inverse_ /= c;
  scores_ -= (s / denom) * h.cwiseAbs2();
  scores_ /= c;
  log_det_ += n_ * std::log(c) + std::log(denom);

  weights_ *= c;
  weights_[dir.atom] += dir.kind == StepKind::FW ? alpha : -alpha;
  if (weights_[dir.atom] < 0.0) weights_[dir.atom] = 0.0;
  ++steps_since_refactor_;

  bool alarm = scores_.minCoeff() < kScoreAlarm ||
               std::abs(weights_.dot(scores_) - n_) > kIdentityAlarm;
  if (steps_since_refactor_ >= options_.refactor_period || alarm) {
    refactorize();
    if (scores_.minCoeff() < kScoreAlarm ||
        std::abs(weights_.dot(scores_) - n_) > kIdentityAlarm)
      throw std::runtime_error("dopt: conditioning alarm after refactorization");
  }
}

void DoptInstance::eval_dense(const Eigen::VectorXd& weights, double* value,
                              Eigen::VectorXd* scores) const {
  Eigen::MatrixXd m = points_ * weights.asDiagonal() * points_.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("dopt: point outside the domain");
  if (value)
    *value = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  if (scores) {
    Eigen::MatrixXd w = llt.solve(points_);
    *scores = -(points_.cwiseProduct(w)).colwise().sum().transpose();
  }
}

std::unique_ptr<ProblemInstance> DoptInstance::clone_fresh() const {
  return std::make_unique<DoptInstance>(points_, options_);
}

Eigen::MatrixXd dopt_random_points(int m, int n, double scale,
                                   std::uint64_t seed) {
  if (m < n + 1) throw std::invalid_argument("dopt points: m >= n + 1 required");
  if (!(scale > 0.0)) throw std::invalid_argument("dopt points: scale > 0");
  double sd = std::sqrt(scale);
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * attempt);
    std::normal_distribution<double> normal(0.0, sd);
    Eigen::MatrixXd points(n, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) points(i, j) = normal(rng);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(points);
    if (qr.rank() == n) return points;
  }
}

std::vector<int> dopt_select_basis(const Eigen::MatrixXd& points) {
  int n = static_cast<int>(points.rows());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(points);
  if (qr.rank() < n)
    throw std::invalid_argument("basis selection: points do not span R^n");
  Eigen::VectorXi perm = qr.colsPermutation().indices();
  std::vector<int> basis(perm.data(), perm.data() + n);
  return basis;
}

}  // namespace afw
