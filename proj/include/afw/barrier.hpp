#pragma once

#include <Eigen/Dense>
#include <memory>

namespace afw {

// A theta-logarithmically-homogeneous self-concordant barrier presented
// through value / gradient / Hessian-quadratic-form evaluations on the
// interior of its cone. Points are flat vectors; matrix cones use a
// vectorized representation (see sym_to_vec / vec_to_sym).
//
// Barriers are immutable after construction and safe for concurrent
// read-only evaluation.
class Barrier {
 public:
  Barrier(double theta, int ambient_dim) : theta_(theta), dim_(ambient_dim) {}
  virtual ~Barrier() = default;

  double theta() const { return theta_; }
  int ambient_dim() const { return dim_; }

  virtual bool in_domain(const Eigen::VectorXd& y) const = 0;
  virtual double value(const Eigen::VectorXd& y) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& y) const = 0;
  // <hess(y) u, u>; nonnegative, zero only for u = 0 on the interior.
  virtual double hess_qform(const Eigen::VectorXd& y,
                            const Eigen::VectorXd& u) const = 0;

 private:
  double theta_;
  int dim_;
};

// -ln det on symmetric positive definite n x n matrices, theta = n.
// Points are vectorized matrices of length n*n.
std::unique_ptr<Barrier> make_logdet_barrier(int n);

// -sum ln(y_i) on the positive orthant of R^m, theta = m.
std::unique_ptr<Barrier> make_neglog_barrier(int m);

// Pairing-level identity checks at a domain point y:
//   <grad(y), y> = -theta,  |y|_y^2 = theta,  |y|_y^2 + <grad(y), y> = 0.
// All compared with absolute slack tol * theta. Returns false on violation.
bool check_lhscb_identities(const Barrier& barrier, const Eigen::VectorXd& y,
                            double tol);

// Helpers for the vectorized symmetric-matrix representation.
Eigen::VectorXd sym_to_vec(const Eigen::MatrixXd& m);
Eigen::MatrixXd vec_to_sym(const Eigen::VectorXd& v, int n);

}  // namespace afw
