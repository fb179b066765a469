#include "afw/barrier.hpp"

#include <cmath>
#include <stdexcept>

namespace afw {

namespace {

constexpr double kPivotMargin = 1e-14;

class LogDetBarrier final : public Barrier {
 public:
  explicit LogDetBarrier(int n) : Barrier(static_cast<double>(n), n * n), n_(n) {
    if (n < 1) throw std::invalid_argument("logdet barrier: n >= 1 required");
  }

  bool in_domain(const Eigen::VectorXd& y) const override {
    Eigen::MatrixXd m = vec_to_sym(y, n_);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * (1.0 + m.cwiseAbs().maxCoeff()))
      return false;
    double tr = m.trace();
    if (!(tr > 0.0)) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return false;
    // A point counts as interior only when every Cholesky pivot clears a
    // margin relative to the trace scale.
    double min_diag = llt.matrixLLT().diagonal().minCoeff();
    return min_diag * min_diag > kPivotMargin * tr;
  }

  double value(const Eigen::VectorXd& y) const override {
    Eigen::LLT<Eigen::MatrixXd> llt = factorize(y);
    return -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const override {
    Eigen::LLT<Eigen::MatrixXd> llt = factorize(y);
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n_, n_));
    return sym_to_vec(-inv);
  }

  double hess_qform(const Eigen::VectorXd& y,
                    const Eigen::VectorXd& u) const override {
    Eigen::LLT<Eigen::MatrixXd> llt = factorize(y);
    Eigen::MatrixXd w = vec_to_sym(u, n_);
    // trace((M^-1 U)^2) = |L^-1 U L^-T|_F^2
    llt.matrixL().solveInPlace(w);
    llt.matrixL().transpose().template solveInPlace<Eigen::OnTheRight>(w);
    return w.squaredNorm();
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::VectorXd& y) const {
    if (!in_domain(y))
      throw std::domain_error("logdet barrier: point not in int K");
    return Eigen::LLT<Eigen::MatrixXd>(vec_to_sym(y, n_));
  }

  int n_;
};

class NegLogBarrier final : public Barrier {
 public:
  explicit NegLogBarrier(int m) : Barrier(static_cast<double>(m), m) {
    if (m < 1) throw std::invalid_argument("neglog barrier: m >= 1 required");
  }

  bool in_domain(const Eigen::VectorXd& y) const override {
    return y.size() == ambient_dim() && (y.array() > 0.0).all();
  }

  double value(const Eigen::VectorXd& y) const override {
    require(y);
    return -y.array().log().sum();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const override {
    require(y);
    return -y.cwiseInverse();
  }

  double hess_qform(const Eigen::VectorXd& y,
                    const Eigen::VectorXd& u) const override {
    require(y);
    return (u.array() / y.array()).square().sum();
  }

 private:
  void require(const Eigen::VectorXd& y) const {
    if (!in_domain(y))
      throw std::domain_error("neglog barrier: point not in int K");
  }
};

}  // namespace

std::unique_ptr<Barrier> make_logdet_barrier(int n) {
  return std::make_unique<LogDetBarrier>(n);
}

std::unique_ptr<Barrier> make_neglog_barrier(int m) {
  return std::make_unique<NegLogBarrier>(m);
}

bool check_lhscb_identities(const Barrier& barrier, const Eigen::VectorXd& y,
                            double tol) {
  if (!barrier.in_domain(y)) return false;
  double theta = barrier.theta();
  double grad_pairing = barrier.gradient(y).dot(y);
  double norm_sq = barrier.hess_qform(y, y);
  double slack = tol * theta;
  return std::abs(grad_pairing + theta) <= slack &&
         std::abs(norm_sq - theta) <= slack &&
         std::abs(norm_sq + grad_pairing) <= slack;
}

Eigen::VectorXd sym_to_vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd vec_to_sym(const Eigen::VectorXd& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n)
    throw std::invalid_argument("vec_to_sym: size mismatch");
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
}

}  // namespace afw
