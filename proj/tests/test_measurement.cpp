#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sos_tensor/measurement.hpp"
#include "sos_tensor/orthogonal.hpp"

namespace sos_tensor {

void PrintTo(Law law, std::ostream* os) { *os << to_string(law); }

namespace {

Tensor3 rank_one_teacher(int d, double norm, std::uint64_t seed) {
  Eigen::VectorXd lam(1);
  lam << norm;
  return random_orthogonal(d, 1, lam, seed).densify();
}

TEST(Sampling, CompletionFrequenciesWithinBinomialBand) {
  const int d = 3, n = 1000000;
  const auto xs = sample_completion(d, n, 42);
  ASSERT_EQ(static_cast<int>(xs.size()), n);
  std::vector<int> counts(27, 0);
  for (const auto& m : xs) {
    const Entry& e = std::get<Entry>(m);
    ++counts[static_cast<std::size_t>((e.i * d + e.j) * d + e.k)];
  }
  const double p = 1.0 / 27.0;
  const double band = 4.0 * std::sqrt(p * (1 - p) / n);
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, p, band);
}

TEST(Sampling, GaussianEntriesHaveUnitMoments) {
  const auto xs = sample_gaussian(4, 12500, 7);
  double sum = 0, sq = 0;
  long count = 0;
  for (const auto& m : xs) {
    const Tensor3& t = std::get<Tensor3>(m);
    sum += t.vec().sum();
    sq += t.vec().squaredNorm();
    count += static_cast<long>(t.size());
  }
  ASSERT_EQ(count, 800000);
  EXPECT_NEAR(sum / count, 0.0, 4.0 / std::sqrt(8e5));
  // Var of a chi-square(1) draw is 2.
  EXPECT_NEAR(sq / count, 1.0, 4.0 * std::sqrt(2.0 / 8e5));
}

TEST(Sampling, DeterministicInSeed) {
  auto entries = [](const std::vector<Measurement>& xs) {
    std::vector<int> out;
    for (const auto& m : xs) {
      const Entry& e = std::get<Entry>(m);
      out.push_back((e.i * 4 + e.j) * 4 + e.k);
    }
    return out;
  };
  EXPECT_EQ(entries(sample_completion(4, 50, 9)), entries(sample_completion(4, 50, 9)));
  EXPECT_NE(entries(sample_completion(4, 50, 9)), entries(sample_completion(4, 50, 10)));
}

TEST(Measure, EntryAndDenseAgree) {
  Tensor3 t = rank_one_teacher(3, 2.0, 1);
  Tensor3 e(3);
  e(1, 2, 0) = 1.0;
  EXPECT_DOUBLE_EQ(measure(t, Entry{1, 2, 0}), measure(t, e));
}

TEST(Responses, CompletionIsClipped) {
  WellSpecified model{rank_one_teacher(3, 4.0, 2), 5.0, 0.5};
  Dataset data = make_dataset(Law::kCompletion, 500, model, 3);
  EXPECT_EQ(data.bound, 0.5);
  for (const auto& s : data.samples) EXPECT_LE(std::abs(s.y), 0.5);
  EXPECT_NO_THROW(data.validate());
}

TEST(Responses, NoiselessEqualsTeacher) {
  Tensor3 t = rank_one_teacher(3, 2.0, 4);
  Dataset data = make_dataset(Law::kGaussian, 30, WellSpecified{t, 0.0}, 5);
  EXPECT_LT((apply_design(data, t) - responses(data)).norm(), 1e-12);
}

TEST(Responses, LookupTableRejectsGaussianMeasurements) {
  LookupTable lt{Tensor3(2), 0.1, 1.0};
  EXPECT_THROW(make_dataset(Law::kGaussian, 3, lt, 1), std::invalid_argument);
  PopulationModel pop{Law::kGaussian, lt};
  EXPECT_THROW(population_risk(pop, Tensor3(2)), UnsupportedModel);
}

TEST(Responses, EntryIndexOutOfRange) {
  WellSpecified model{Tensor3(2), 0.0};
  EXPECT_THROW(respond(model, Entry{0, 2, 0}, 1), std::out_of_range);
}

TEST(Dataset, TextRoundTripCompletionAndGaussian) {
  for (Law law : {Law::kCompletion, Law::kGaussian}) {
    Dataset data = make_dataset(law, 20, WellSpecified{rank_one_teacher(3, 1.5, 6), 0.3, 2.0}, 8);
    std::stringstream ss;
    write_dataset(ss, data);
    Dataset back = read_dataset(ss);
    EXPECT_EQ(back.law, data.law);
    EXPECT_EQ(back.size(), data.size());
    EXPECT_EQ(back.seed, data.seed);
    EXPECT_EQ(back.bound, data.bound);
    EXPECT_EQ(responses(back), responses(data));
    Tensor3 probe = rank_one_teacher(3, 1.0, 9);
    EXPECT_EQ(apply_design(back, probe), apply_design(data, probe));
  }
  std::istringstream bad("sos-tensor-dataset 2\n");
  EXPECT_THROW(read_dataset(bad), std::runtime_error);
}

TEST(EntryMoments, ClippedNormalMatchesMonteCarlo) {
  Tensor3 t(1);
  t(0, 0, 0) = 0.7;
  WellSpecified model{t, 0.5, 1.0};
  EntryMoments em = entry_moments(model, 0, 0, 0);
  Dataset data = make_dataset(Law::kCompletion, 400000, model, 11);
  Eigen::VectorXd y = responses(data);
  const double mean = y.mean();
  const double var = (y.array() - mean).square().mean();
  EXPECT_NEAR(mean, em.mean, 4 * std::sqrt(em.variance / y.size()));
  EXPECT_NEAR(var, em.variance, 0.01 * em.variance);
  EXPECT_LT(em.mean, 0.7);
}

TEST(EntryMoments, LookupTableIsTwoPoint) {
  Tensor3 means(1);
  means(0, 0, 0) = 0.9;
  EntryMoments em = entry_moments(LookupTable{means, 0.3, 1.0}, 0, 0, 0);
  EXPECT_DOUBLE_EQ(em.mean, 0.5 * (1.0 + 0.6));
  EXPECT_DOUBLE_EQ(em.variance, 0.25 * 0.4 * 0.4);
}

class PopulationRisk : public ::testing::TestWithParam<Law> {};

TEST_P(PopulationRisk, ClosedFormMatchesMonteCarlo) {
  const int d = 3;
  Tensor3 teacher = rank_one_teacher(d, 2.0, 12);
  WellSpecified model{teacher, 0.4, 0.8};
  PopulationModel pop{GetParam(), model};
  Tensor3 guess = 0.5 * teacher + 0.1 * rank_one_teacher(d, 1.0, 13);
  Dataset data = make_dataset(GetParam(), 200000, model, 14);
  Eigen::ArrayXd loss = (apply_design(data, guess) - responses(data)).array().square();
  const double mc = loss.mean();
  const double se = std::sqrt((loss - mc).square().mean() / loss.size());
  EXPECT_NEAR(population_risk(pop, guess), mc, 5 * se);
}

INSTANTIATE_TEST_SUITE_P(Laws, PopulationRisk, ::testing::Values(Law::kCompletion, Law::kGaussian),
                         [](const ::testing::TestParamInfo<Law>& info) { return to_string(info.param); });

TEST(ReProbe, FullCoverageHasNoSlack) {
  const int d = 3;
  Dataset data;
  data.law = Law::kCompletion;
  data.d = d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) data.samples.push_back({Entry{i, j, k}, 0.0});
  PopulationModel pop{Law::kCompletion, WellSpecified{Tensor3(d), 0.0}};
  std::vector<Tensor3> deltas = {rank_one_teacher(d, 1.0, 1), rank_one_teacher(d, 3.0, 2)};
  ReProbeReport r = re_probe(data, pop, deltas, 1.0);
  for (const auto& row : r.rows) EXPECT_NEAR(row.population, row.empirical, 1e-14);
  EXPECT_NEAR(r.gamma_hat, 0.0, 1e-14);
}

TEST(ReProbe, UnobservedDirectionIsAllSlack) {
  Dataset data;
  data.law = Law::kCompletion;
  data.d = 2;
  data.samples.push_back({Entry{0, 0, 0}, 0.0});
  PopulationModel pop{Law::kCompletion, WellSpecified{Tensor3(2), 0.0}};
  Tensor3 delta(2);
  delta(1, 1, 1) = 2.0;
  ReProbeReport r = re_probe(data, pop, {delta});
  EXPECT_DOUBLE_EQ(r.gamma_hat, 4.0 / 8.0);
  EXPECT_THROW(re_probe(data, pop, {Tensor3(2)}), std::invalid_argument);
}

TEST(Rademacher, SignedSumAndBudget) {
  std::vector<Measurement> xs = {Entry{0, 0, 0}, Entry{0, 0, 0}, Entry{1, 0, 1}};
  Tensor3 s = signed_entry_sum(2, xs, {1.0, 1.0, -1.0});
  EXPECT_DOUBLE_EQ(s(0, 0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s(1, 0, 1), -1.0);
  EXPECT_THROW(rademacher_estimate(6, 10, 1, 1), BudgetExceeded);
  EXPECT_THROW(rademacher_estimate(4, 500, 1, 1), BudgetExceeded);
  RademacherEstimate e = rademacher_estimate(2, 4, 3, 1);
  ASSERT_EQ(e.values.size(), 3u);
  // Bounded by the Frobenius norm, hence by n.
  for (double v : e.values) {
    EXPECT_GE(v, -1e-5);
    EXPECT_LE(v, 4.0 + 1e-5);
  }
}

}  // namespace
}  // namespace sos_tensor
