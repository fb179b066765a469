#include "afw/simplex_log.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace afw {

namespace {

constexpr double kProductFloor = 1e-300;

}  // namespace

SimplexLogInstance::SimplexLogInstance(Eigen::MatrixXd rows, int q)
    : ProblemInstance(AtomSet::standard_simplex(static_cast<int>(rows.cols())),
                      std::shared_ptr<const Barrier>(
                          make_neglog_barrier(static_cast<int>(rows.rows()))),
                      /*linear_variation=*/0.0, q),
      rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1)
    throw std::invalid_argument("simplex-log: empty data");
  if ((rows_.array() < 0.0).any())
    throw std::invalid_argument("simplex-log: rows must be nonnegative");
  for (int i = 0; i < rows_.rows(); ++i)
    if (rows_.row(i).maxCoeff() <= 0.0)
      throw std::invalid_argument("simplex-log: zero data row");
}

void SimplexLogInstance::require_ready() const {
  if (!ready_) throw std::runtime_error("simplex-log: caches not initialized");
}

const Eigen::VectorXd& SimplexLogInstance::row_products() const {
  require_ready();
  return u_;
}

void SimplexLogInstance::reset(const ActiveSet& active) {
  weights_ = active.dense_weights();
  u_ = rows_ * weights_;
  if (!(u_.minCoeff() > 0.0))
    throw std::invalid_argument("simplex-log: infeasible start");
  ready_ = true;
}

double SimplexLogInstance::objective() const {
  require_ready();
  return -u_.array().log().sum();
}

Eigen::VectorXd SimplexLogInstance::atom_scores() const {
  require_ready();
  return -(rows_.transpose() * u_.cwiseInverse());
}

double SimplexLogInstance::direction_local_norm(int atom) const {
  require_ready();
  Eigen::VectorXd w = rows_.col(atom) - u_;
  return std::sqrt((w.array() / u_.array()).square().sum());
}

Eigen::VectorXd SimplexLogInstance::step_products(const Direction& dir,
                                                  double alpha) const {
  Eigen::VectorXd w = rows_.col(dir.atom) - u_;
  if (dir.kind == StepKind::Away) w = -w;
  return u_ + alpha * w;
}

std::optional<double> SimplexLogInstance::closed_form_linesearch(
    const Direction& dir) const {
  require_ready();
  Eigen::VectorXd w = rows_.col(dir.atom) - u_;
  if (dir.kind == StepKind::Away) w = -w;

  // Largest step keeping every row product positive.
  double hi = dir.alpha_max;
  for (int i = 0; i < w.size(); ++i)
    if (w[i] < 0.0) hi = std::min(hi, u_[i] / -w[i] * (1.0 - 1e-12));
  if (!(hi > 0.0)) return std::nullopt;

  auto slope = [&](double a) {
    return -(w.array() / (u_.array() + a * w.array())).sum();
  };
  auto curvature = [&](double a) {
    return (w.array() / (u_.array() + a * w.array())).square().sum();
  };

  if (slope(hi) <= 0.0) return hi;
  double lo = 0.0;
  double a = 0.5 * hi;
  const double width_tol = 1e-12 * dir.alpha_max;
  // Newton on the slope, bisection whenever the step leaves the bracket.
  for (int it = 0; it < 200 && hi - lo > width_tol; ++it) {
    double s = slope(a);
    if (s < 0.0)
      lo = a;
    else
      hi = a;
    double c = curvature(a);
    double next = c > 0.0 ? a - s / c : 0.5 * (lo + hi);
    a = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  return 0.5 * (lo + hi);
}

double SimplexLogInstance::objective_along(const Direction& dir,
                                           double alpha) const {
  require_ready();
  Eigen::VectorXd u = step_products(dir, alpha);
  if (!(u.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
  return -u.array().log().sum();
}

double SimplexLogInstance::slope_along(const Direction& dir,
                                       double alpha) const {
  require_ready();
  Eigen::VectorXd w = rows_.col(dir.atom) - u_;
  if (dir.kind == StepKind::Away) w = -w;
  return -(w.array() / (u_.array() + alpha * w.array())).sum();
}

bool SimplexLogInstance::step_in_domain(const Direction& dir,
                                        double alpha) const {
  require_ready();
  return step_products(dir, alpha).minCoeff() > kProductFloor;
}

void SimplexLogInstance::apply_step(const Direction& dir, double alpha) {
  require_ready();
  u_ = step_products(dir, alpha);
  if (!(u_.minCoeff() > 0.0))
    throw std::runtime_error("simplex-log: step left the positive orthant");
  double sign = dir.kind == StepKind::FW ? 1.0 : -1.0;
  weights_ *= dir.kind == StepKind::FW ? 1.0 - alpha : 1.0 + alpha;
  weights_[dir.atom] += sign * alpha;
  if (weights_[dir.atom] < 0.0) weights_[dir.atom] = 0.0;
}

void SimplexLogInstance::eval_dense(const Eigen::VectorXd& weights,
                                    double* value,
                                    Eigen::VectorXd* scores) const {
  Eigen::VectorXd u = rows_ * weights;
  if (!(u.minCoeff() > 0.0))
    throw std::invalid_argument("simplex-log: point outside the domain");
  if (value) *value = -u.array().log().sum();
  if (scores) *scores = -(rows_.transpose() * u.cwiseInverse());
}

std::unique_ptr<ProblemInstance> SimplexLogInstance::clone_fresh() const {
  return std::make_unique<SimplexLogInstance>(rows_, q_);
}

}  // namespace afw
