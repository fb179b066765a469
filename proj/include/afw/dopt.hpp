#pragma once

#include <cstdint>
#include <vector>

#include "afw/problem.hpp"

namespace afw {

// Closed-form step sizes for -ln det((1 -/+ alpha) M +/- alpha a a^T), given
// the score g = a^T M^-1 a. The FW form requires g > n; the away form
// requires g < n and returns the full step when g <= 1 (the objective
// decreases on the whole ray there).
double dopt_linesearch_fw(double g, int n);
double dopt_linesearch_away(double g, int n, double alpha_max);

// Local norm of a step toward/away from an atom with score g:
// sqrt(max(g^2 - 2 g + n, 0)).
double dopt_direction_norm(double g, int n);

// D-optimal design: minimize -ln det(sum_i x_i a_i a_i^T) over the unit
// simplex. Atoms are the simplex vertices; the design points a_i live in the
// columns of `points`. Keeps M^-1 explicit and advances it by scaled
// rank-one corrections, refactorizing every `refactor_period` steps or on a
// conditioning alarm.
class DoptInstance final : public ProblemInstance {
 public:
  struct Options {
    int refactor_period = 50;
  };

  explicit DoptInstance(Eigen::MatrixXd points)
      : DoptInstance(std::move(points), Options()) {}
  DoptInstance(Eigen::MatrixXd points, Options options);

  int design_dimension() const { return n_; }
  // Scores g_i = a_i^T M^-1 a_i at the current iterate.
  const Eigen::VectorXd& scores() const;
  // sum_i x_i g_i; equals n up to numerical drift.
  double score_weight_identity() const;
  Eigen::MatrixXd design_matrix() const;  // M(x), rebuilt from the weights
  const Eigen::MatrixXd& inverse() const; // cached M^-1
  void refactorize();                      // rebuild M^-1, scores, log det

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
  double default_rsgm_smoothness() const override { return 1.0; }
  std::unique_ptr<ProblemInstance> clone_fresh() const override;

 private:
  void require_ready() const;

  Eigen::MatrixXd points_;  // n x m
  int n_;
  Options options_;

  bool ready_ = false;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd inverse_;
  Eigen::VectorXd scores_;
  double log_det_ = 0.0;
  int steps_since_refactor_ = 0;
};

// m Gaussian design points with per-coordinate variance `scale`,
// deterministic per seed; re-draws from a shifted stream until the sample
// spans R^n.
Eigen::MatrixXd dopt_random_points(int m, int n, double scale,
                                   std::uint64_t seed);

// Indices of n linearly independent columns (pivoted elimination order).
std::vector<int> dopt_select_basis(const Eigen::MatrixXd& points);

}  // namespace afw
