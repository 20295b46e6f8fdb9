#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sos_tensor/orthogonal.hpp"
#include "sos_tensor/tensor.hpp"

namespace sos_tensor {
namespace {

Tensor3 gaussian(int d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Tensor3 t(d);
  for (Eigen::Index i = 0; i < t.vec().size(); ++i) t.vec()[i] = n(rng);
  return t;
}

TEST(Tensor3, LexicographicOffsets) {
  Tensor3 t(3);
  EXPECT_EQ(t.size(), 27u);
  EXPECT_EQ(t.offset(0, 0, 1), 1u);
  EXPECT_EQ(t.offset(0, 1, 0), 3u);
  EXPECT_EQ(t.offset(1, 0, 0), 9u);
  EXPECT_EQ(t.offset(2, 1, 2), 23u);
}

TEST(Tensor3, ArithmeticAndInner) {
  Tensor3 a = gaussian(3, 1), b = gaussian(3, 2);
  Tensor3 c = 2.0 * a - b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(c(i, j, k), 2 * a(i, j, k) - b(i, j, k));
  EXPECT_NEAR(inner(a, b), a.vec().dot(b.vec()), 1e-14);
  EXPECT_NEAR(frobenius(a), std::sqrt(inner(a, a)), 1e-14);
  EXPECT_THROW(inner(a, Tensor3(2)), std::invalid_argument);
}

TEST(Tensor3, FlattenLayouts) {
  Tensor3 t = gaussian(3, 3);
  Eigen::MatrixXd f1 = flatten(t, 1), f2 = flatten(t, 2), f3 = flatten(t, 3);
  ASSERT_EQ(f1.rows(), 3);
  ASSERT_EQ(f1.cols(), 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(f1(i, j * 3 + k), t(i, j, k));
        EXPECT_EQ(f2(j, i * 3 + k), t(i, j, k));
        EXPECT_EQ(f3(k, i * 3 + j), t(i, j, k));
      }
  for (int mode = 1; mode <= 3; ++mode) EXPECT_EQ(unflatten(flatten(t, mode), mode).vec(), t.vec());
  EXPECT_THROW(flatten(t, 4), std::invalid_argument);
}

TEST(Tensor3, OuterProductHasRankOne) {
  Eigen::VectorXd u(3), v(3), w(3);
  u << 1, 2, 3;
  v << -1, 0, 2;
  w << 0.5, 0.5, -1;
  Tensor3 t = outer3(u, v, w);
  EXPECT_DOUBLE_EQ(t(2, 2, 0), 3 * 2 * 0.5);
  EXPECT_EQ(multilinear_rank(t), (MultilinearRank{1, 1, 1}));
  EXPECT_NEAR(frobenius(t), u.norm() * v.norm() * w.norm(), 1e-12);
}

TEST(Tensor3, MatrixNormsAgainstSingularValues) {
  Eigen::MatrixXd m(2, 2);
  m << 3, 0, 0, -4;
  EXPECT_NEAR(matrix_nuclear(m), 7.0, 1e-12);
  EXPECT_NEAR(matrix_op(m), 4.0, 1e-12);
}

TEST(Tensor3, MultilinearApplyIdentityAndComposition) {
  Tensor3 x = gaussian(3, 4);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_EQ(multilinear_apply(id, id, id, x).vec(), x.vec());
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 3), b = Eigen::MatrixXd::Random(3, 3);
  Tensor3 twice = multilinear_apply(b, b, b, multilinear_apply(a, a, a, x));
  Tensor3 once = multilinear_apply(b * a, b * a, b * a, x);
  EXPECT_LT((twice - once).vec().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Tensor3, TextRoundTripIsExact) {
  Tensor3 t = gaussian(2, 5);
  std::stringstream ss;
  write_tensor(ss, t);
  Tensor3 back = read_tensor(ss);
  EXPECT_EQ(back.vec(), t.vec());
  std::istringstream bad("2\n1 2 3\n");
  EXPECT_THROW(read_tensor(bad), std::runtime_error);
}

TEST(Orthogonal, FactorsAreOrthonormalAndDensifyMatchesSum) {
  Eigen::VectorXd lam(2);
  lam << 2.0, -1.0;
  OrthogonalTensor t = random_orthogonal(4, 2, lam, 7);
  EXPECT_LT((t.u().transpose() * t.u() - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-12);
  Tensor3 sum = 2.0 * outer3(Eigen::VectorXd(t.u().col(0)), Eigen::VectorXd(t.v().col(0)), Eigen::VectorXd(t.w().col(0))) -
                outer3(Eigen::VectorXd(t.u().col(1)), Eigen::VectorXd(t.v().col(1)), Eigen::VectorXd(t.w().col(1)));
  EXPECT_LT((t.densify() - sum).vec().norm(), 1e-12);
  EXPECT_DOUBLE_EQ(t.nuclear_value(), 3.0);
  EXPECT_EQ(multilinear_rank(t.densify()), (MultilinearRank{2, 2, 2}));
}

TEST(Orthogonal, RejectsNonOrthogonalFactors) {
  Eigen::VectorXd lam(2);
  lam << 1, 1;
  Eigen::MatrixXd u = Eigen::MatrixXd::Ones(3, 2);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(3, 2);
  EXPECT_THROW(OrthogonalTensor(lam, u, q, q), std::invalid_argument);
}

class ProjectorProperty : public ::testing::TestWithParam<int> {};

TEST_P(ProjectorProperty, FamiliesAreComplementaryAndIdempotent) {
  int seed = GetParam();
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(1 + seed % 3);
  OrthogonalTensor t = random_orthogonal(4, static_cast<int>(lam.size()), lam, seed);
  SubspaceProjector p = SubspaceProjector::from(t);
  Tensor3 x = gaussian(4, 100 + seed);
  Tensor3 par = project_parallel(p, x), perp = project_perp(p, x);
  EXPECT_LT((par + perp - x).vec().norm(), 1e-10 * frobenius(x));
  EXPECT_LT((project_perp(p, perp) - perp).vec().norm(), 1e-10 * frobenius(x));
  EXPECT_LT(project_perp(p, t.densify()).vec().norm(), 1e-10);
  // Q_perp kills u_i (x) v_i (x) z for arbitrary z.
  Eigen::VectorXd z = Eigen::VectorXd::Random(4);
  Tensor3 k = outer3(Eigen::VectorXd(t.u().col(0)), Eigen::VectorXd(t.v().col(0)), z);
  EXPECT_LT(frobenius(project_perp(p, k)), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ProjectorProperty, ::testing::Range(1, 7));

}  // namespace
}  // namespace sos_tensor
