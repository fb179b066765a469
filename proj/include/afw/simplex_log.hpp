#pragma once

#include "afw/problem.hpp"

namespace afw {

// Minimize -sum_i ln(a_i^T x) over the unit simplex, for nonnegative data
// rows a_i (each with at least one positive entry). Covers the PET form and
// the rescaled Hawkes MLE instances. theta equals the number of rows.
class SimplexLogInstance final : public ProblemInstance {
 public:
  // `rows`: one data row per log term (rows x simplex dimension).
  // `q` declares the minimum number of atoms spanning a feasible point.
  explicit SimplexLogInstance(Eigen::MatrixXd rows, int q = 1);

  const Eigen::MatrixXd& data_rows() const { return rows_; }
  // u = A x at the current iterate, strictly positive.
  const Eigen::VectorXd& row_products() const;

  void reset(const ActiveSet& active) override;
  double objective() const override;
  Eigen::VectorXd atom_scores() const override;
  double direction_local_norm(int atom) const override;
  std::optional<double> closed_form_linesearch(const Direction& dir) const override;
  double objective_along(const Direction& dir, double alpha) const override;
  double slope_along(const Direction& dir, double alpha) const override;
  bool step_in_domain(const Direction& dir, double alpha) const override;
  void apply_step(const Direction& dir, double alpha) override;
  const Eigen::VectorXd& current_weights() const override { return weights_; }
  void eval_dense(const Eigen::VectorXd& weights, double* value,
                  Eigen::VectorXd* scores) const override;
  std::unique_ptr<ProblemInstance> clone_fresh() const override;

 private:
  void require_ready() const;
  Eigen::VectorXd step_products(const Direction& dir, double alpha) const;

  Eigen::MatrixXd rows_;  // rows x p
  bool ready_ = false;
  Eigen::VectorXd weights_;
  Eigen::VectorXd u_;
};

}  // namespace afw
