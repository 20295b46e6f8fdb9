#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>

#include "sos_tensor/conic.hpp"
#include "sos_tensor/conic_builder.hpp"
#include "sos_tensor/learners.hpp"

namespace sos_tensor::conic {
namespace {

// min c'x over {x in R^2 : G x <= h} by enumerating every vertex.
double lp_vertex_oracle(const Eigen::Vector2d& c, const Eigen::MatrixXd& g, const Eigen::VectorXd& h) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.rows(); ++a)
    for (int b = a + 1; b < g.rows(); ++b) {
      Eigen::Matrix2d m;
      m << g.row(a), g.row(b);
      if (std::abs(m.determinant()) < 1e-12) continue;
      Eigen::Vector2d x = m.partialPivLu().solve(Eigen::Vector2d(h[a], h[b]));
      if (((g * x - h).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
    }
  return best;
}

ConicProblem lp_problem(const Eigen::Vector2d& c, const Eigen::MatrixXd& g, const Eigen::VectorXd& h) {
  ConicProblem p;
  p.c = c;
  p.A = g.sparseView();
  p.b = h;
  p.cones.nonneg(static_cast<int>(h.size()));
  return p;
}

class LpOracle : public ::testing::TestWithParam<int> {};

TEST_P(LpOracle, MatchesVertexEnumeration) {
  std::mt19937_64 rng(GetParam());
  std::normal_distribution<double> n;
  const int m = 7;
  Eigen::MatrixXd g(m, 2);
  Eigen::VectorXd h(m);
  for (int i = 0; i < m; ++i) {
    double ang = 2 * M_PI * i / m + 0.3 * n(rng);
    g(i, 0) = std::cos(ang);
    g(i, 1) = std::sin(ang);
    h[i] = 1.0 + 0.5 * std::abs(n(rng));
  }
  Eigen::Vector2d c(n(rng), n(rng));
  double oracle = lp_vertex_oracle(c, g, h);
  ConicSolution sol = solve(lp_problem(c, g, h));
  ASSERT_TRUE(sol.optimal()) << to_string(sol.status);
  EXPECT_NEAR(sol.objective, oracle, 1e-5 * (1 + std::abs(oracle)));
  EXPECT_LE(sol.residuals.primal, 1e-7);
  EXPECT_LE(sol.residuals.dual, 1e-7);
}

INSTANTIATE_TEST_SUITE_P(Seeds, LpOracle, ::testing::Range(1, 9));

TEST(Conic, SecondOrderConeClosedForm) {
  // min -x1 - x2 s.t. |(x1, x2)| <= 1: optimum -sqrt(2).
  ProblemBuilder pb(2);
  pb.set_cost(0, -1);
  pb.set_cost(1, -1);
  pb.open_block(ConeKind::kSoc, 3);
  pb.add_row({}, 1.0);
  pb.add_row({{0, 1.0}}, 0.0);
  pb.add_row({{1, 1.0}}, 0.0);
  ConicSolution sol = solve(pb.build());
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, -std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(sol.x[0], 1 / std::sqrt(2.0), 1e-5);
}

TEST(Conic, DetectsPrimalInfeasibility) {
  // x >= 1 and x <= 0.
  ConicProblem p;
  p.c = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd a(2, 1);
  a << -1, 1;
  p.A = a.sparseView();
  p.b = Eigen::Vector2d(-1, 0);
  p.cones.nonneg(2);
  EXPECT_EQ(solve(p).status, SolveStatus::kInfeasible);
}

TEST(Conic, DetectsUnboundedness) {
  // min -x s.t. x >= 0.
  ConicProblem p;
  p.c = -Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd a(1, 1);
  a << -1;
  p.A = a.sparseView();
  p.b = Eigen::VectorXd::Zero(1);
  p.cones.nonneg(1);
  EXPECT_EQ(solve(p).status, SolveStatus::kUnbounded);
}

TEST(Conic, ValidateRejectsShapeMismatch) {
  ConicProblem p;
  p.c = Eigen::VectorXd::Ones(2);
  p.A = SparseMatrix(3, 2);
  p.b = Eigen::VectorXd::Zero(3);
  p.cones.nonneg(2);
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(solve(p), std::invalid_argument);
}

TEST(Conic, SvecPreservesInnerProducts) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(4, 4), b = Eigen::MatrixXd::Random(4, 4);
  a = (a + a.transpose()).eval();
  b = (b + b.transpose()).eval();
  EXPECT_NEAR(svec(a).dot(svec(b)), (a.array() * b.array()).sum(), 1e-12);
  EXPECT_LT((smat(svec(a), 4) - a).norm(), 1e-12);
  EXPECT_EQ(svec(a).size(), 10);
  EXPECT_EQ(svec_index(0, 0, 4), 0);
  EXPECT_EQ(svec_index(1, 0, 4), 1);
  EXPECT_EQ(svec_index(1, 1, 4), 4);
}

TEST(Conic, PsdProjectionMatchesEigenClipping) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd m(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) m(i, j) = n(rng);
    m = (m + m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::MatrixXd oracle =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd p = project_psd(m);
    EXPECT_LT((p - oracle).norm(), 1e-10);
    EXPECT_LT((project_psd(p) - p).norm(), 1e-10);
    // Residual is negative semidefinite and orthogonal to the projection.
    EXPECT_LT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m - p).eigenvalues().maxCoeff(), 1e-10);
    EXPECT_NEAR(((m - p).array() * p.array()).sum(), 0.0, 1e-9);
  }
}

TEST(Conic, SocProjectionCases) {
  Eigen::VectorXd inside(3);
  inside << 2, 1, 1;
  Eigen::VectorXd v = inside;
  project_soc(v);
  EXPECT_EQ(v, inside);

  Eigen::VectorXd polar(3);
  polar << -2, 1, 1;
  project_soc(polar);
  EXPECT_LT(polar.norm(), 1e-15);

  Eigen::VectorXd out(3);
  out << 0, 3, 4;
  project_soc(out);
  EXPECT_NEAR(out[0], 2.5, 1e-12);
  EXPECT_NEAR(out.tail(2).norm(), 2.5, 1e-12);
}

TEST(Conic, ConeViolationIsZeroInside) {
  ConeSpec k;
  k.zero(1).nonneg(2).psd(2);
  Eigen::VectorXd s(6);
  s << 0, 1, 2, svec(Eigen::Matrix2d::Identity());
  EXPECT_NEAR(cone_violation(k, s), 0.0, 1e-15);
  s[1] = -0.5;
  EXPECT_NEAR(cone_violation(k, s), 0.5, 1e-15);
}

TEST(Conic, ProblemTextRoundTrip) {
  Eigen::MatrixXd g(3, 2);
  g << 1, 0, 0, 1, -1, -1;
  ConicProblem p = lp_problem(Eigen::Vector2d(1, 2), g, Eigen::Vector3d(1, 1, 1));
  std::stringstream ss;
  write_problem(ss, p);
  ConicProblem q = read_problem(ss);
  EXPECT_EQ(q.c, p.c);
  EXPECT_EQ(q.b, p.b);
  EXPECT_EQ(Eigen::MatrixXd(q.A), Eigen::MatrixXd(p.A));
  ASSERT_EQ(q.cones.blocks.size(), 1u);
  EXPECT_EQ(q.cones.blocks[0].kind, ConeKind::kNonneg);
}

TEST(Conic, PlainDouglasRachfordAgreesWithAccelerated) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(4, 4);
  SolverSettings plain;
  plain.anderson_memory = 0;
  plain.adaptive_scale = false;
  double a = sos_tensor::matrix_nuclear_sdp(m, plain);
  double b = sos_tensor::matrix_nuclear_sdp(m);
  EXPECT_NEAR(a, b, 1e-5 * b);
}

class MatrixNuclearOracle : public ::testing::TestWithParam<int> {};

TEST_P(MatrixNuclearOracle, PsdEmbeddingMatchesSvd) {
  std::mt19937_64 rng(GetParam());
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = n(rng);
  double svd = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
  EXPECT_NEAR(sos_tensor::matrix_nuclear_sdp(m), svd, 1e-5 * svd);
}

INSTANTIATE_TEST_SUITE_P(Seeds, MatrixNuclearOracle, ::testing::Range(1, 6));

TEST(Conic, FixedMatrixNuclearOracleValue) {
  // Singular-value sum computed offline with LAPACK.
  Eigen::MatrixXd m(6, 6);
  m << 0.5, -1.2, 0.3, 0.8, -0.1, 0.0,  //
      1.1, 0.4, -0.7, 0.2, 0.9, -0.5,   //
      -0.3, 0.6, 1.5, -0.4, 0.2, 0.7,   //
      0.0, -0.8, 0.1, 1.3, -0.6, 0.4,   //
      0.7, 0.2, -0.9, 0.5, 1.0, -1.1,   //
      -0.4, 0.3, 0.6, -0.2, 0.8, 0.9;
  const double oracle = 8.603833765780378;
  EXPECT_NEAR(sos_tensor::matrix_nuclear(m), oracle, 1e-12);
  EXPECT_NEAR(sos_tensor::matrix_nuclear_sdp(m), oracle, 1e-5 * oracle);
}

}  // namespace
}  // namespace sos_tensor::conic
