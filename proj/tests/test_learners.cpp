#include <gtest/gtest.h>

#include "sos_tensor/learners.hpp"

namespace sos_tensor {
namespace {

// Six completion samples at d = 2, one entry observed twice.
Dataset small_dataset() {
  Dataset data;
  data.law = Law::kCompletion;
  data.d = 2;
  data.samples = {{Entry{0, 0, 0}, 0.8}, {Entry{1, 1, 1}, -0.5}, {Entry{0, 1, 0}, 0.3},
                  {Entry{1, 0, 1}, 0.6}, {Entry{0, 0, 1}, -0.2}, {Entry{0, 0, 0}, 0.7}};
  return data;
}

// Optimal risks of the same programs solved by an interior-point method over
// the unreduced moment basis (tests/oracles).
constexpr double kSosRisk = 0.03969637738521551;
constexpr double kSosBoxRisk = 0.04197893498865196;
constexpr double kUnfoldingRisk = 0.03794088083332584;

TEST(EmpiricalRisk, MeanSquaredResidual) {
  Dataset data = small_dataset();
  const double expect = (0.64 + 0.25 + 0.09 + 0.36 + 0.04 + 0.49) / 6.0;
  EXPECT_NEAR(empirical_risk(data, Tensor3(2)), expect, 1e-15);
}

TEST(ErmDirect, MatchesOracleRisk) {
  ErmConfig cfg;
  cfg.tau = 1.0;
  ErmResult r = erm_direct(small_dataset(), cfg);
  EXPECT_NEAR(r.empirical_risk, kSosRisk, 1e-5);
  EXPECT_NEAR(r.certified_nuclear, 1.0, 1e-5);
  EXPECT_LE(nuclear_norm(r.t_hat, 4).value, 1.0 + 1e-4);
}

TEST(ErmDirect, BoxConstraintMatchesOracle) {
  ErmConfig cfg;
  cfg.tau = 1.0;
  cfg.R = 0.5;
  ErmResult r = erm_direct(small_dataset(), cfg);
  EXPECT_NEAR(r.empirical_risk, kSosBoxRisk, 1e-5);
  EXPECT_LE(r.max_abs_entry, 0.5 + 1e-5);
}

TEST(ErmUnfolding, MatchesOracleRisk) {
  ErmResult r = erm_unfolding(small_dataset(), 1, 1.0);
  EXPECT_NEAR(r.empirical_risk, kUnfoldingRisk, 1e-5);
  EXPECT_LE(r.certified_nuclear, 1.0 + 1e-5);
  EXPECT_THROW(erm_unfolding(small_dataset(), 0, 1.0), std::invalid_argument);
}

TEST(ErmUnfolding, AllModesAgreeOnSymmetricData) {
  // Data invariant under every mode permutation gives equal risks.
  Dataset data;
  data.law = Law::kCompletion;
  data.d = 2;
  data.samples = {{Entry{0, 0, 0}, 1.0}, {Entry{1, 1, 1}, -1.0}};
  const double r1 = erm_unfolding(data, 1, 0.8).empirical_risk;
  EXPECT_NEAR(erm_unfolding(data, 2, 0.8).empirical_risk, r1, 1e-6);
  EXPECT_NEAR(erm_unfolding(data, 3, 0.8).empirical_risk, r1, 1e-6);
}

TEST(ErmFrankWolfe, ApproachesDirectSolution) {
  ErmConfig cfg;
  cfg.tau = 1.0;
  cfg.method = ErmMethod::kFrankWolfe;
  cfg.fw_iterations = 150;
  ErmResult fw = erm_frank_wolfe(small_dataset(), cfg);
  EXPECT_GE(fw.empirical_risk, kSosRisk - 1e-5);
  EXPECT_LE(fw.empirical_risk, kSosRisk + 2e-3);
  EXPECT_LE(fw.certified_nuclear, 1.0 + 1e-4);
  ASSERT_FALSE(fw.trace.empty());
  for (std::size_t s = 1; s < fw.trace.size(); ++s) EXPECT_LE(fw.trace[s], fw.trace[s - 1]);
  // The duality gap bounds the suboptimality.
  EXPECT_GE(fw.trace.back() + 1e-5, fw.empirical_risk - kSosRisk);
}

TEST(ErmFrankWolfe, RejectsInitOutsideBall) {
  ErmConfig cfg;
  cfg.tau = 0.1;
  Tensor3 init(2);
  init(0, 0, 0) = 1.0;
  cfg.fw_init = init;
  EXPECT_THROW(erm_frank_wolfe(small_dataset(), cfg), std::invalid_argument);
}

TEST(ErmConfig, Validation) {
  ErmConfig cfg;
  cfg.tau = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.degree = 5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_EQ(parse_method("fw"), ErmMethod::kFrankWolfe);
  EXPECT_THROW(parse_method("newton"), std::invalid_argument);
}

TEST(ErmDirect, BudgetRefusesLargeDegreeSix) {
  Dataset data;
  data.law = Law::kCompletion;
  data.d = 5;
  data.samples = {{Entry{0, 0, 0}, 1.0}};
  ErmConfig cfg;
  cfg.degree = 6;
  EXPECT_THROW(erm_direct(data, cfg), BudgetExceeded);
}

TEST(ErmDirect, FullCoverageRecoversRankOneTeacher) {
  const int d = 3;
  Eigen::VectorXd lam(1);
  lam << 2.0;
  OrthogonalTensor teacher = random_orthogonal(d, 1, lam, 21);
  Tensor3 t = teacher.densify();
  Dataset data;
  data.law = Law::kCompletion;
  data.d = d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) data.samples.push_back({Entry{i, j, k}, t(i, j, k)});
  ErmConfig cfg;
  cfg.tau = teacher.nuclear_value();
  ErmResult r = erm_direct(data, cfg);
  EXPECT_LE(r.empirical_risk, 1e-8);
  EXPECT_LE(linf(r.t_hat - t), 1e-3);
  PopulationModel pop{Law::kCompletion, WellSpecified{t, 0.0}};
  EXPECT_NEAR(excess_risk(pop, r, teacher), r.empirical_risk, 1e-12);
}

TEST(MatrixNuclear, RectangularSdpMatchesSvd) {
  Eigen::MatrixXd m(3, 5);
  m << 1, 0, 2, -1, 0.5, 0, 3, 0, 1, -2, 1, 1, 1, 1, 1;
  EXPECT_NEAR(matrix_nuclear_sdp(m), matrix_nuclear(m), 1e-5 * matrix_nuclear(m));
}

}  // namespace
}  // namespace sos_tensor
