#include "sos_tensor/orthogonal.hpp"

#include <random>
#include <stdexcept>

namespace sos_tensor {

namespace {

constexpr double kOrthonormalTol = 1e-10;

void check_orthonormal(const Eigen::MatrixXd& m, const char* name) {
  const Eigen::MatrixXd gram = m.transpose() * m;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m.cols(), m.cols());
  if ((gram - eye).cwiseAbs().maxCoeff() > kOrthonormalTol) {
    throw std::invalid_argument(std::string("OrthogonalTensor: factor ") + name + " is not column-orthonormal");
  }
}

Eigen::MatrixXd gaussian_orthonormal(int d, int r, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(d, r);
  for (int c = 0; c < r; ++c)
    for (int i = 0; i < d; ++i) g(i, c) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, r);
  // Fix the sign ambiguity of QR so the draw is Haar distributed.
  const Eigen::MatrixXd& rr = qr.matrixQR();
  for (int c = 0; c < r; ++c) {
    if (rr(c, c) < 0) q.col(c) *= -1.0;
  }
  return q;
}

Eigen::MatrixXd complement(const Eigen::MatrixXd& p) {
  return Eigen::MatrixXd::Identity(p.rows(), p.cols()) - p;
}

}  // namespace

OrthogonalTensor::OrthogonalTensor(Eigen::VectorXd lambdas, Eigen::MatrixXd u, Eigen::MatrixXd v,
                                   Eigen::MatrixXd w)
    : lambdas_(std::move(lambdas)), u_(std::move(u)), v_(std::move(v)), w_(std::move(w)) {
  const auto d = u_.rows();
  const auto r = lambdas_.size();
  if (d < 1) throw std::invalid_argument("OrthogonalTensor: dimension must be positive");
  if (r > d) throw std::invalid_argument("OrthogonalTensor: rank exceeds dimension");
  for (const auto* m : {&u_, &v_, &w_}) {
    if (m->rows() != d || m->cols() != r) throw std::invalid_argument("OrthogonalTensor: factor shape mismatch");
  }
  if (!lambdas_.allFinite()) throw std::invalid_argument("OrthogonalTensor: non-finite weight");
  check_orthonormal(u_, "U");
  check_orthonormal(v_, "V");
  check_orthonormal(w_, "W");
}

Tensor3 OrthogonalTensor::densify() const {
  Tensor3 t(dim());
  for (int i = 0; i < rank(); ++i) {
    t += lambdas_(i) * outer3(Eigen::VectorXd(u_.col(i)), Eigen::VectorXd(v_.col(i)), Eigen::VectorXd(w_.col(i)));
  }
  return t;
}

Tensor3 OrthogonalTensor::sign_tensor() const {
  Tensor3 t(dim());
  for (int i = 0; i < rank(); ++i) {
    t += outer3(Eigen::VectorXd(u_.col(i)), Eigen::VectorXd(v_.col(i)), Eigen::VectorXd(w_.col(i)));
  }
  return t;
}

OrthogonalTensor random_orthogonal(int d, int r, const Eigen::VectorXd& lambdas, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("random_orthogonal: d must be positive");
  if (r > d) throw std::invalid_argument("random_orthogonal: r must not exceed d");
  if (lambdas.size() != r) throw std::invalid_argument("random_orthogonal: need r weights");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd u = gaussian_orthonormal(d, r, rng);
  Eigen::MatrixXd v = gaussian_orthonormal(d, r, rng);
  Eigen::MatrixXd w = gaussian_orthonormal(d, r, rng);
  return OrthogonalTensor(lambdas, std::move(u), std::move(v), std::move(w));
}

SubspaceProjector SubspaceProjector::from(const OrthogonalTensor& t) {
  SubspaceProjector p;
  p.pu = t.u() * t.u().transpose();
  p.pv = t.v() * t.v().transpose();
  p.pw = t.w() * t.w().transpose();
  p.pu_perp = complement(p.pu);
  p.pv_perp = complement(p.pv);
  p.pw_perp = complement(p.pw);
  return p;
}

Tensor3 SubspaceProjector::parallel_term(int index, const Tensor3& x) const {
  switch (index) {
    case 0: return multilinear_apply(pu, pv, pw, x);
    case 1: return multilinear_apply(pu_perp, pv, pw, x);
    case 2: return multilinear_apply(pu, pv_perp, pw, x);
    case 3: return multilinear_apply(pu, pv, pw_perp, x);
    default: throw std::out_of_range("parallel_term: index must be 0..3");
  }
}

Tensor3 SubspaceProjector::perp_term(int index, const Tensor3& x) const {
  switch (index) {
    case 0: return multilinear_apply(pu_perp, pv_perp, pw_perp, x);
    case 1: return multilinear_apply(pu, pv_perp, pw_perp, x);
    case 2: return multilinear_apply(pu_perp, pv, pw_perp, x);
    case 3: return multilinear_apply(pu_perp, pv_perp, pw, x);
    default: throw std::out_of_range("perp_term: index must be 0..3");
  }
}

Tensor3 project_parallel(const SubspaceProjector& p, const Tensor3& x) {
  if (p.dim() != x.dim()) throw std::invalid_argument("project_parallel: dimension mismatch");
  Tensor3 out = p.parallel_term(0, x);
  for (int i = 1; i < 4; ++i) out += p.parallel_term(i, x);
  return out;
}

Tensor3 project_perp(const SubspaceProjector& p, const Tensor3& x) {
  if (p.dim() != x.dim()) throw std::invalid_argument("project_perp: dimension mismatch");
  Tensor3 out = p.perp_term(0, x);
  for (int i = 1; i < 4; ++i) out += p.perp_term(i, x);
  return out;
}

}  // namespace sos_tensor
