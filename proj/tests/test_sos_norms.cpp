#include <gtest/gtest.h>

#include <random>

#include "sos_tensor/moments.hpp"
#include "sos_tensor/sos_norms.hpp"
#include "sos_tensor/theory.hpp"

namespace sos_tensor {
namespace {

// Reference values come from an independent moment program over the
// unreduced basis, solved by an interior-point method (tests/oracles).
const std::vector<double> kA2 = {0.9, -0.3, 0.4, 1.1, -0.7, 0.2, 0.5, -1.2};
const std::vector<double> kB3 = {0.3, -1.1, 0.8, 0.05, 0.6, -0.4, 1.3,  0.2,  -0.9, -0.5, 0.7,  0.1, 0.9, -1.4,
                                 0.35, -0.2, 0.45, 1.0, 0.25, -0.6, -0.8, 0.4, 0.15, 1.2, -1.0, 0.55, -0.3};

constexpr double kA2Injective = 1.7239563347016436;  // exhaustive search over the circle
constexpr double kA2Inj4 = 1.7239563346755964;
constexpr double kA2Nuc4 = 3.471310985297915;
constexpr double kA2Inj6 = 1.723956334746768;
constexpr double kA2Nuc6 = 3.4713109915423885;
constexpr double kB3Inj4 = 2.243564924398194;
constexpr double kB3Nuc4 = 8.527702457710584;

Tensor3 from(const std::vector<double>& v, int d) {
  return Tensor3(d, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

TEST(MonomialBasis, SizesAndOrdering) {
  MonomialBasis full = MonomialBasis::build(2, 4, false);
  // 1 + 6 + 21 monomials of degree <= 2 in 6 variables.
  EXPECT_EQ(full.size(), 28);
  EXPECT_EQ(full[0].degree(), 0);
  EXPECT_EQ(full[full.linear_index(1, 0)], Monomial::var(2, 1, 0));
  EXPECT_EQ(full.blocks().size(), 1u);
  MonomialBasis reduced = MonomialBasis::build(2, 4, true);
  EXPECT_EQ(reduced.size(), 28);
  EXPECT_EQ(reduced.blocks().size(), 4u);
  std::size_t total = 0;
  for (const auto& b : reduced.blocks()) total += b.size();
  EXPECT_EQ(total, 28u);
}

TEST(Monomial, ParityClasses) {
  Monomial xyz = Monomial::trilinear(2, 0, 1, 1);
  EXPECT_EQ(xyz.degree(), 3);
  EXPECT_EQ(xyz.parity_class(), 0);
  EXPECT_EQ(Monomial::one(2).parity_class(), 0);
  Monomial x = Monomial::var(2, 0, 0);
  EXPECT_NE(x.parity_class(), 0);
  EXPECT_EQ((x * x).parity_class(), 0);
  EXPECT_EQ((x * Monomial::var(2, 1, 1)).parity_class(), Monomial::var(2, 2, 0).parity_class());
  ASSERT_TRUE(xyz.divide(x).has_value());
  EXPECT_FALSE(x.divide(xyz).has_value());
}

TEST(PseudoMoments, DiracIsConsistentAndFeasible) {
  MonomialBasis basis = MonomialBasis::build(2, 4, false);
  Eigen::Vector2d x(0.6, 0.8), y(1, 0), z(0, -1);
  PseudoMomentMatrix m = PseudoMomentMatrix::dirac(basis, x, y, z, 2.0);
  EXPECT_NEAR(m.normalization(), 2.0, 1e-15);
  EXPECT_GT(m.min_eigenvalue(), -1e-12);
  EXPECT_LT(m.consistency_error(), 1e-15);
  EXPECT_LT(m.ideal_residual(2), 1e-12);
  Tensor3 t = extract_moment_tensor(m);
  EXPECT_NEAR(t(1, 0, 1), 2.0 * 0.8 * 1 * -1, 1e-15);
  EXPECT_NEAR(m.expect_square_norm(0), 2.0, 1e-12);
}

TEST(InjectiveNorm, OracleValuesDegreeFour) {
  Tensor3 a = from(kA2, 2);
  NormResult r = injective_norm(a, 4);
  EXPECT_NEAR(r.value, kA2Inj4, kSolverTol);
  EXPECT_NEAR(kA2Inj4, kA2Injective, 1e-8);
  EXPECT_EQ(r.diagnostics.status, conic::SolveStatus::kOptimal);
  EXPECT_NEAR(r.certificate.normalization(), 1.0, 1e-5);
  EXPECT_GT(r.certificate.min_eigenvalue(), -1e-5);
  EXPECT_NEAR(inner(a, extract_moment_tensor(r.certificate)), r.value, 1e-5);
  EXPECT_NEAR(injective_norm(from(kB3, 3), 4).value, kB3Inj4, kSolverTol);
}

TEST(NuclearNorm, OracleValuesDegreeFour) {
  EXPECT_NEAR(nuclear_norm(from(kA2, 2), 4).value, kA2Nuc4, kSolverTol);
  EXPECT_NEAR(nuclear_norm(from(kB3, 3), 4).value, kB3Nuc4, kSolverTol);
}

TEST(SosNorms, OracleValuesDegreeSix) {
  Tensor3 a = from(kA2, 2);
  EXPECT_NEAR(injective_norm(a, 6).value, kA2Inj6, kSolverTol);
  EXPECT_NEAR(nuclear_norm(a, 6).value, kA2Nuc6, kSolverTol);
}

TEST(SosNorms, ParityReductionDoesNotChangeValues) {
  Tensor3 a = from(kA2, 2);
  NormOptions off;
  off.parity_reduce = false;
  EXPECT_NEAR(injective_norm(a, 4, off).value, kA2Inj4, kSolverTol);
  EXPECT_NEAR(nuclear_norm(a, 4, off).value, kA2Nuc4, kSolverTol);
}

class ParityReduction : public ::testing::TestWithParam<int> {};

TEST_P(ParityReduction, MatchesUnreducedProgramOnRandomTensors) {
  Tensor3 x = random_tensor(3, 700 + static_cast<std::uint64_t>(GetParam()));
  NormOptions off;
  off.parity_reduce = false;
  EXPECT_NEAR(injective_norm(x, 4).value, injective_norm(x, 4, off).value, kSolverTol);
  if (GetParam() % 4 == 0) EXPECT_NEAR(nuclear_norm(x, 4).value, nuclear_norm(x, 4, off).value, kSolverTol);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ParityReduction, ::testing::Range(0, 20));

TEST(SosNorms, RejectsOddDegree) {
  Tensor3 a = from(kA2, 2);
  EXPECT_THROW(injective_norm(a, 3), std::invalid_argument);
  EXPECT_THROW(nuclear_norm(a, 5), std::invalid_argument);
}

TEST(SosNorms, ZeroTensor) {
  EXPECT_NEAR(nuclear_norm(Tensor3(2), 4).value, 0.0, 1e-6);
  EXPECT_NEAR(injective_norm(Tensor3(2), 4).value, 0.0, 1e-6);
}

TEST(SosNorms, HomogeneityAndSignSymmetry) {
  Tensor3 a = from(kA2, 2);
  EXPECT_NEAR(nuclear_norm(2.5 * a, 4).value, 2.5 * kA2Nuc4, 2.5 * kSolverTol);
  EXPECT_NEAR(injective_norm(-1.0 * a, 4).value, kA2Inj4, kSolverTol);
}

TEST(SosNorms, OrthogonalTensorsAreExact) {
  Eigen::VectorXd lam(2);
  lam << 2.0, 1.0;
  OrthogonalTensor t = random_orthogonal(3, 2, lam, 11);
  CheckResult c = check_orthogonal_exactness(t, 4, 1e-4);
  EXPECT_TRUE(c.passed) << c.observed;
}

TEST(SosNorms, DualityOnOracleTensors) {
  Tensor3 a = from(kA2, 2), b = from(kB3, 3);
  // <T, T> <= inj(T) nuc(T) and |T|_F^2 attains it only when rank one.
  EXPECT_LE(inner(a, a), kA2Inj4 * kA2Nuc4 + 1e-9);
  EXPECT_LE(inner(b, b), kB3Inj4 * kB3Nuc4 + 1e-9);
  EXPECT_LE(frobenius(b), kB3Nuc4);
  EXPECT_LE(kB3Inj4, frobenius(b));
}

TEST(SubgradientDual, ReducesToSignTensorOnParallelPart) {
  Eigen::VectorXd lam(2);
  lam << 1.5, -0.5;
  OrthogonalTensor t = random_orthogonal(3, 2, lam, 5);
  SubspaceProjector p = SubspaceProjector::from(t);
  Tensor3 x = random_tensor(3, 9);
  Tensor3 g = subgradient_dual(t, x);
  Tensor3 expect(3);
  expect += outer3(Eigen::VectorXd(t.u().col(0)), Eigen::VectorXd(t.v().col(0)), Eigen::VectorXd(t.w().col(0)));
  expect -= outer3(Eigen::VectorXd(t.u().col(1)), Eigen::VectorXd(t.v().col(1)), Eigen::VectorXd(t.w().col(1)));
  EXPECT_LT((project_parallel(p, g) - expect).vec().norm(), 1e-10);
  EXPECT_NEAR(inner(g, t.densify()), t.nuclear_value(), 1e-10);
}

TEST(PseudoCauchySchwarz, HoldsOnDiracAndFailsOnIndefiniteMatrix) {
  MonomialBasis basis = MonomialBasis::build(2, 4, false);
  PseudoMomentMatrix m = PseudoMomentMatrix::dirac(basis, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                                                   Eigen::Vector2d(0.6, 0.8));
  LinearPoly f{0.5, Eigen::VectorXd::Zero(6)}, g{-0.2, Eigen::VectorXd::Zero(6)};
  f.coefs << 1, 2, 0, -1, 0.5, 0;
  g.coefs << 0, 1, 1, 0, -2, 3;
  EXPECT_TRUE(pseudo_cs_check(m, f, g));
  EXPECT_TRUE(pseudo_cs_check(m, f, f));

  // E~[x1 y1] = 2 with E~[x1^2] = E~[y1^2] = 1 is not a pseudo-distribution.
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(basis.size(), basis.size());
  const int x1 = basis.linear_index(0, 0), y1 = basis.linear_index(1, 0);
  bad(x1, y1) = bad(y1, x1) = 2.0;
  PseudoMomentMatrix indefinite(basis, bad);
  LinearPoly fx{0.0, Eigen::VectorXd::Zero(6)}, gy{0.0, Eigen::VectorXd::Zero(6)};
  fx.coefs[x1 - 1] = 1.0;
  gy.coefs[y1 - 1] = 1.0;
  EXPECT_LT(indefinite.min_eigenvalue(), 0.0);
  EXPECT_FALSE(pseudo_cs_check(indefinite, fx, gy));
}

class TheoryProperty : public ::testing::TestWithParam<int> {};

TEST_P(TheoryProperty, SmallChecksPass) {
  std::uint64_t s = static_cast<std::uint64_t>(GetParam());
  EXPECT_TRUE(check_projection_completeness(3, 5, s).passed);
  EXPECT_TRUE(check_kernel_property(3, 5, s).passed);
  EXPECT_TRUE(check_projection_contraction(2, 2, s, 1e-5).passed);
  EXPECT_TRUE(check_flattening_bound(2, 2, s, 1e-5).passed);
}

INSTANTIATE_TEST_SUITE_P(Seeds, TheoryProperty, ::testing::Values(1, 2, 3));

TEST(TheoryMutation, CorruptedPerpendicularFamilyIsCaught) {
  CheckResult good = check_projection_completeness(3, 5, 4, false);
  CheckResult bad = check_projection_completeness(3, 5, 4, true);
  EXPECT_TRUE(good.passed);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.observed, 1e-3);
}

}  // namespace
}  // namespace sos_tensor
