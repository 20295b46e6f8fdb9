#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "sos_tensor/tensor.hpp"

namespace sos_tensor {

/// sum_i lambda_i u_i (x) v_i (x) w_i with column-orthonormal U, V, W.
class OrthogonalTensor {
 public:
  /// Validates shapes, r <= d and orthonormality of the factor blocks.
  OrthogonalTensor(Eigen::VectorXd lambdas, Eigen::MatrixXd u, Eigen::MatrixXd v, Eigen::MatrixXd w);

  int dim() const { return static_cast<int>(u_.rows()); }
  int rank() const { return static_cast<int>(lambdas_.size()); }

  const Eigen::VectorXd& lambdas() const { return lambdas_; }
  const Eigen::MatrixXd& u() const { return u_; }
  const Eigen::MatrixXd& v() const { return v_; }
  const Eigen::MatrixXd& w() const { return w_; }

  Tensor3 densify() const;

  /// sum_i u_i (x) v_i (x) w_i.
  Tensor3 sign_tensor() const;

  /// sum_i |lambda_i|.
  double nuclear_value() const { return lambdas_.cwiseAbs().sum(); }

 private:
  Eigen::VectorXd lambdas_;
  Eigen::MatrixXd u_, v_, w_;
};

/// Factors from QR of Gaussian d x r matrices; deterministic in `seed`.
OrthogonalTensor random_orthogonal(int d, int r, const Eigen::VectorXd& lambdas, std::uint64_t seed);

/// Projections onto span(U), span(V), span(W) of an orthogonal tensor and
/// their complements.
struct SubspaceProjector {
  Eigen::MatrixXd pu, pv, pw;
  Eigen::MatrixXd pu_perp, pv_perp, pw_perp;

  static SubspaceProjector from(const OrthogonalTensor& t);

  int dim() const { return static_cast<int>(pu.rows()); }

  /// Q^0..Q^3 of the parallel family (index 0..3).
  Tensor3 parallel_term(int index, const Tensor3& x) const;
  /// Q^0..Q^3 of the perpendicular family (index 0..3).
  Tensor3 perp_term(int index, const Tensor3& x) const;
};

Tensor3 project_parallel(const SubspaceProjector& p, const Tensor3& x);
Tensor3 project_perp(const SubspaceProjector& p, const Tensor3& x);

}  // namespace sos_tensor
