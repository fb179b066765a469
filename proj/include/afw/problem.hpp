#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "afw/atoms.hpp"
#include "afw/barrier.hpp"

namespace afw {

// One minimization problem F(x) = f(A x) + <c, x> over the convex hull of an
// explicit atom set, presented through the quantities the solvers consume:
// per-atom gradient pairings, direction local norms, and line-search
// evaluations along candidate directions.
//
// Instances carry mutable iterate caches and are owned by a single run;
// the pure data they are built from can back any number of instances.
class ProblemInstance {
 public:
  virtual ~ProblemInstance() = default;

  const AtomSet& atom_set() const { return atoms_; }
  const Barrier& barrier() const { return *barrier_; }
  double theta() const { return barrier_->theta(); }
  // Variation of the linear term over the polytope (max_a <c,a> - min_a <c,a>).
  double linear_variation() const { return linear_variation_; }
  bool has_linear_term() const { return linear_variation_ > 0.0; }
  // Minimum number of atoms whose convex hull meets the domain.
  int min_support_q() const { return q_; }

  // Install an iterate and rebuild all caches; throws std::invalid_argument
  // when A x leaves the barrier domain.
  virtual void reset(const ActiveSet& active) = 0;

  // F at the current iterate.
  virtual double objective() const = 0;
  // <grad F(x), a_j> for every atom j.
  virtual Eigen::VectorXd atom_scores() const = 0;
  // Local norm |A d|_y of the direction toward/away from `atom`; the value
  // is the same for both senses.
  virtual double direction_local_norm(int atom) const = 0;

  // Optional closed-form exact line-search; the solver falls back to
  // safeguarded bisection when absent.
  virtual std::optional<double> closed_form_linesearch(
      const Direction& dir) const {
    (void)dir;
    return std::nullopt;
  }

  // phi(alpha) = F(x + alpha d); +inf outside the domain.
  virtual double objective_along(const Direction& dir, double alpha) const = 0;
  // phi'(alpha); only valid where the step stays in the domain.
  virtual double slope_along(const Direction& dir, double alpha) const = 0;
  virtual bool step_in_domain(const Direction& dir, double alpha) const = 0;

  // Advance the caches along an accepted step.
  virtual void apply_step(const Direction& dir, double alpha) = 0;

  // Dense weight vector of the instance's current iterate (for diagnostics).
  virtual const Eigen::VectorXd& current_weights() const = 0;

  // F and atom-score gradient at an arbitrary weight vector, bypassing the
  // iterate caches (baselines operate on dense simplex points).
  virtual void eval_dense(const Eigen::VectorXd& weights, double* value,
                          Eigen::VectorXd* scores) const = 0;

  // Default relative-smoothness constant for the RSGM baselines.
  virtual double default_rsgm_smoothness() const { return theta(); }

  // A fresh instance over the same data, caches unset (call reset()).
  virtual std::unique_ptr<ProblemInstance> clone_fresh() const = 0;

 protected:
  ProblemInstance(AtomSet atoms, std::shared_ptr<const Barrier> barrier,
                  double linear_variation, int q)
      : atoms_(std::move(atoms)),
        barrier_(std::move(barrier)),
        linear_variation_(linear_variation),
        q_(q) {}

  AtomSet atoms_;
  std::shared_ptr<const Barrier> barrier_;
  double linear_variation_ = 0.0;
  int q_ = 1;
};

// Dense reference implementation assembled from a barrier, per-atom images
// A a_j, and per-atom linear terms <c, a_j>. No fast paths: every quantity
// goes through the barrier interface. Used directly for small problems and
// as the cross-check route for the specialized instances.
class GenericInstance final : public ProblemInstance {
 public:
  GenericInstance(AtomSet atoms, std::shared_ptr<const Barrier> barrier,
                  Eigen::MatrixXd atom_images, Eigen::VectorXd linear_terms,
                  int q = 1);

  void reset(const ActiveSet& active) override;
  double objective() const override;
  Eigen::VectorXd atom_scores() const override;
  double direction_local_norm(int atom) const override;
  double objective_along(const Direction& dir, double alpha) const override;
  double slope_along(const Direction& dir, double alpha) const override;
  bool step_in_domain(const Direction& dir, double alpha) const override;
  void apply_step(const Direction& dir, double alpha) override;
  const Eigen::VectorXd& current_weights() const override { return weights_; }
  void eval_dense(const Eigen::VectorXd& weights, double* value,
                  Eigen::VectorXd* scores) const override;
  std::unique_ptr<ProblemInstance> clone_fresh() const override;

  const Eigen::VectorXd& current_image() const { return y_; }

 private:
  Eigen::VectorXd step_image(const Direction& dir, double alpha) const;

  Eigen::MatrixXd images_;       // barrier dim x atom count
  Eigen::VectorXd linear_terms_; // <c, a_j>
  Eigen::VectorXd weights_;
  Eigen::VectorXd y_;
  double linear_value_ = 0.0;    // <c, x>
};

}  // namespace afw
