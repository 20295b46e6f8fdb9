#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sos_tensor/learners.hpp"
#include "sos_tensor/measurement.hpp"

namespace sos_tensor {

struct Clause {
  int i = 0, j = 0, k = 0;
  int z = 1;
};

enum class XorKind { kPlanted, kRandom };

/// Clauses drawn with replacement; a repeated triple repeats its sign.
struct XorInstance {
  int d = 0;
  std::vector<Clause> clauses;
  XorKind kind = XorKind::kRandom;
  /// Hidden +-1 assignment (planted only).
  std::vector<int> assignment;
  double eta = 0.0;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(clauses.size()); }
  void validate() const;
};

struct PlantedOptions {
  /// Fixed assignment instead of a seeded draw.
  std::optional<std::vector<int>> assignment;
  /// Accept eta outside [0, 1/4) with a warning on stderr.
  bool allow_eta_out_of_range = false;
};

XorInstance gen_planted(int d, int m, double eta, std::uint64_t seed, const PlantedOptions& options = {});
XorInstance gen_random(int d, int m, std::uint64_t seed);

/// Completion-law dataset with X = e_i (x) e_j (x) e_k, y = z and R = 1.
Dataset to_dataset(const XorInstance& instance);

/// 1 - gamma^4 / 2 with gamma = 1 - 4 eta.
double xor_threshold(double eta);

/// erm_direct over the ball of radius d^{3/2} with |T|_inf <= 1.
ErmConfig xor_learner_config(int d, int degree = 4);

enum class VerdictTag { kPlanted, kRandom };
std::string to_string(VerdictTag tag);

struct Verdict {
  VerdictTag tag = VerdictTag::kRandom;
  double holdout_loss = 0.0;
  double threshold = 0.0;
};

/// Learns on one half of a seeded split and compares the loss on the other
/// half with xor_threshold(eta).
Verdict distinguish(const XorInstance& instance, const ErmConfig& learner, double eta, std::uint64_t seed);

}  // namespace sos_tensor
