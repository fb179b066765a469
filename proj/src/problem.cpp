#include "afw/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace afw {

namespace {

double variation(const Eigen::VectorXd& linear_terms) {
  if (linear_terms.size() == 0) return 0.0;
  return linear_terms.maxCoeff() - linear_terms.minCoeff();
}

}  // namespace

GenericInstance::GenericInstance(AtomSet atoms,
                                 std::shared_ptr<const Barrier> barrier,
                                 Eigen::MatrixXd atom_images,
                                 Eigen::VectorXd linear_terms, int q)
    : ProblemInstance(std::move(atoms), std::move(barrier),
                      variation(linear_terms), q),
      images_(std::move(atom_images)),
      linear_terms_(std::move(linear_terms)) {
  if (images_.cols() != atoms_.size())
    throw std::invalid_argument("instance: one image per atom required");
  if (images_.rows() != barrier_->ambient_dim())
    throw std::invalid_argument("instance: image dimension mismatch");
  if (linear_terms_.size() == 0)
    linear_terms_ = Eigen::VectorXd::Zero(atoms_.size());
  if (linear_terms_.size() != atoms_.size())
    throw std::invalid_argument("instance: one linear term per atom required");
}

void GenericInstance::reset(const ActiveSet& active) {
  weights_ = active.dense_weights();
  y_ = images_ * weights_;
  linear_value_ = linear_terms_.dot(weights_);
  if (!barrier_->in_domain(y_))
    throw std::invalid_argument("instance: iterate image outside the domain");
}

double GenericInstance::objective() const {
  return barrier_->value(y_) + linear_value_;
}

Eigen::VectorXd GenericInstance::atom_scores() const {
  return images_.transpose() * barrier_->gradient(y_) + linear_terms_;
}

double GenericInstance::direction_local_norm(int atom) const {
  Eigen::VectorXd ad = images_.col(atom) - y_;
  return std::sqrt(std::max(barrier_->hess_qform(y_, ad), 0.0));
}

Eigen::VectorXd GenericInstance::step_image(const Direction& dir,
                                            double alpha) const {
  Eigen::VectorXd ad = images_.col(dir.atom) - y_;
  if (dir.kind == StepKind::Away) ad = -ad;
  return y_ + alpha * ad;
}

double GenericInstance::objective_along(const Direction& dir,
                                        double alpha) const {
  Eigen::VectorXd y = step_image(dir, alpha);
  if (!barrier_->in_domain(y))
    return std::numeric_limits<double>::infinity();
  double lin = dir.kind == StepKind::FW
                   ? linear_value_ + alpha * (linear_terms_[dir.atom] - linear_value_)
                   : linear_value_ + alpha * (linear_value_ - linear_terms_[dir.atom]);
  return barrier_->value(y) + lin;
}

double GenericInstance::slope_along(const Direction& dir, double alpha) const {
  Eigen::VectorXd ad = images_.col(dir.atom) - y_;
  double lin_slope = linear_terms_[dir.atom] - linear_value_;
  if (dir.kind == StepKind::Away) {
    ad = -ad;
    lin_slope = -lin_slope;
  }
  Eigen::VectorXd y = y_ + alpha * ad;
  return barrier_->gradient(y).dot(ad) + lin_slope;
}

bool GenericInstance::step_in_domain(const Direction& dir, double alpha) const {
  return barrier_->in_domain(step_image(dir, alpha));
}

void GenericInstance::apply_step(const Direction& dir, double alpha) {
  y_ = step_image(dir, alpha);
  if (!barrier_->in_domain(y_))
    throw std::runtime_error("instance: step left the barrier domain");
  double sign = dir.kind == StepKind::FW ? 1.0 : -1.0;
  linear_value_ += sign * alpha * (linear_terms_[dir.atom] - linear_value_);
  double scale = dir.kind == StepKind::FW ? 1.0 - alpha : 1.0 + alpha;
  weights_ *= scale;
  weights_[dir.atom] += sign * alpha;
  if (weights_[dir.atom] < 0.0) weights_[dir.atom] = 0.0;
}

void GenericInstance::eval_dense(const Eigen::VectorXd& weights, double* value,
                                 Eigen::VectorXd* scores) const {
  Eigen::VectorXd y = images_ * weights;
  if (!barrier_->in_domain(y))
    throw std::invalid_argument("instance: point outside the domain");
  if (value) *value = barrier_->value(y) + linear_terms_.dot(weights);
  if (scores)
    *scores = images_.transpose() * barrier_->gradient(y) + linear_terms_;
}

std::unique_ptr<ProblemInstance> GenericInstance::clone_fresh() const {
  return std::make_unique<GenericInstance>(atoms_, barrier_, images_,
                                           linear_terms_, q_);
}

}  // namespace afw
