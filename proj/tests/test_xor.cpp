#include <gtest/gtest.h>

#include <map>
#include <tuple>

#include "sos_tensor/xor.hpp"

namespace sos_tensor {
namespace {

TEST(XorThreshold, ExactValues) {
  EXPECT_DOUBLE_EQ(xor_threshold(0.0), 0.5);
  EXPECT_NEAR(xor_threshold(0.05), 0.7952, 1e-15);
  EXPECT_DOUBLE_EQ(xor_threshold(0.25), 1.0);
}

TEST(XorGen, NoiselessPlantedSatisfiesEveryClause) {
  XorInstance inst = gen_planted(5, 200, 0.0, 3);
  ASSERT_EQ(inst.size(), 200);
  ASSERT_EQ(inst.assignment.size(), 5u);
  for (const auto& c : inst.clauses) {
    EXPECT_EQ(c.z, inst.assignment[c.i] * inst.assignment[c.j] * inst.assignment[c.k]);
  }
}

TEST(XorGen, NoiseRateIsRoughlyEta) {
  const int m = 20000;
  XorInstance inst = gen_planted(30, m, 0.1, 4);
  int violated = 0;
  for (const auto& c : inst.clauses) violated += c.z != inst.assignment[c.i] * inst.assignment[c.j] * inst.assignment[c.k];
  // Repeats inherit signs, so only distinct triples are independent; 30^3 >> m.
  EXPECT_NEAR(static_cast<double>(violated) / m, 0.1, 4 * std::sqrt(0.09 / m) + 0.01);
}

TEST(XorGen, RepeatedTriplesRepeatTheirSign) {
  for (XorInstance inst : {gen_planted(2, 100, 0.2, 5), gen_random(2, 100, 6)}) {
    std::map<std::tuple<int, int, int>, int> seen;
    for (const auto& c : inst.clauses) {
      auto [it, fresh] = seen.emplace(std::make_tuple(c.i, c.j, c.k), c.z);
      if (!fresh) {
        EXPECT_EQ(it->second, c.z);
      }
    }
    EXPECT_NO_THROW(inst.validate());
  }
}

TEST(XorGen, FixedAssignmentAndEtaRange) {
  PlantedOptions opts;
  opts.assignment = std::vector<int>{1, -1, 1};
  XorInstance inst = gen_planted(3, 10, 0.0, 1, opts);
  EXPECT_EQ(inst.assignment, *opts.assignment);
  EXPECT_THROW(gen_planted(3, 10, 0.3, 1), std::invalid_argument);
  EXPECT_THROW(gen_planted(3, 10, -0.1, 1), std::invalid_argument);
  PlantedOptions loose;
  loose.allow_eta_out_of_range = true;
  EXPECT_NO_THROW(gen_planted(3, 10, 0.3, 1, loose));
}

TEST(XorInstance, ValidateRejectsConflicts) {
  XorInstance inst;
  inst.d = 2;
  inst.clauses = {{0, 1, 1, 1}, {0, 1, 1, -1}};
  EXPECT_THROW(inst.validate(), std::invalid_argument);
  inst.clauses = {{0, 2, 1, 1}};
  EXPECT_THROW(inst.validate(), std::invalid_argument);
  inst.clauses = {{0, 1, 1, 0}};
  EXPECT_THROW(inst.validate(), std::invalid_argument);
}

TEST(XorDataset, EncodesClausesAsBoundedEntries) {
  XorInstance inst = gen_random(3, 12, 7);
  Dataset data = to_dataset(inst);
  EXPECT_EQ(data.bound, 1.0);
  ASSERT_EQ(data.size(), 12);
  for (int q = 0; q < 12; ++q) {
    const Entry& e = std::get<Entry>(data.samples[q].x);
    EXPECT_EQ(e.i, inst.clauses[q].i);
    EXPECT_EQ(data.samples[q].y, inst.clauses[q].z);
  }
}

TEST(XorLearner, BallRadiusAndBox) {
  ErmConfig c = xor_learner_config(4);
  EXPECT_DOUBLE_EQ(c.tau, 8.0);
  ASSERT_TRUE(c.R.has_value());
  EXPECT_EQ(*c.R, 1.0);
}

TEST(Distinguish, NoiselessPlantedBeatsRandom) {
  const ErmConfig learner = xor_learner_config(3);
  Verdict planted = distinguish(gen_planted(3, 81, 0.0, 11), learner, 0.0, 12);
  Verdict random = distinguish(gen_random(3, 81, 13), learner, 0.0, 12);
  EXPECT_LT(planted.holdout_loss, random.holdout_loss);
  EXPECT_DOUBLE_EQ(planted.threshold, 0.5);
  EXPECT_EQ(planted.tag, VerdictTag::kPlanted);
  EXPECT_EQ(to_string(random.tag), random.holdout_loss <= 0.5 ? "Planted" : "Random");
}

}  // namespace
}  // namespace sos_tensor
