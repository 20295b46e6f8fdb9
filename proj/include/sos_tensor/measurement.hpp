#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sos_tensor/sos_norms.hpp"
#include "sos_tensor/tensor.hpp"

namespace sos_tensor {

/// Indicator measurement e_i (x) e_j (x) e_k.
struct Entry {
  int i = 0, j = 0, k = 0;
  friend bool operator==(const Entry&, const Entry&) = default;
};

using Measurement = std::variant<Entry, Tensor3>;

enum class Law { kCompletion, kGaussian };

std::string to_string(Law law);
Law parse_law(const std::string& s);

/// <T, X> for either encoding.
double measure(const Tensor3& t, const Measurement& m);

struct Sample {
  Measurement x;
  double y = 0.0;
};

/// Samples share one measurement kind: Entry for completion, Tensor3 for
/// gaussian. |y| <= bound for completion datasets.
struct Dataset {
  Law law = Law::kCompletion;
  int d = 0;
  double bound = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::string model;
  std::vector<Sample> samples;

  int size() const { return static_cast<int>(samples.size()); }
  void validate() const;
};

/// Version 1 text format:
///   sos-tensor-dataset 1
///   law <completion|gaussian> d <d> n <n> R <bound|inf> seed <seed>
///   model <descriptor>
///   then n lines: "i j k y" (0-based) or d^3 entries followed by y.
void write_dataset(std::ostream& os, const Dataset& data);
Dataset read_dataset(std::istream& is);
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

std::vector<Measurement> sample_completion(int d, int n, std::uint64_t seed);
std::vector<Measurement> sample_gaussian(int d, int n, std::uint64_t seed);

/// y = clip(<teacher, X> + sigma * N(0,1), -clip, clip); clipping applies to
/// Entry measurements only.
struct WellSpecified {
  Tensor3 teacher;
  double noise_std = 0.0;
  double clip = std::numeric_limits<double>::infinity();
};

/// Same response law as WellSpecified; the teacher's rank exceeds what the
/// learner's benchmark class is allowed.
struct MisspecifiedTeacher {
  Tensor3 teacher;
  double noise_std = 0.0;
  double clip = std::numeric_limits<double>::infinity();
};

/// y = clip(means_ijk + noise * eps, -clip, clip) with eps a uniform sign.
/// Entry measurements only.
struct LookupTable {
  Tensor3 means;
  double noise = 0.0;
  double clip = std::numeric_limits<double>::infinity();
};

using ResponseModel = std::variant<WellSpecified, MisspecifiedTeacher, LookupTable>;

int model_dim(const ResponseModel& model);
double model_bound(const ResponseModel& model);
std::string describe(const ResponseModel& model);

double respond(const ResponseModel& model, const Measurement& m, std::uint64_t seed);

/// Measurements from the law, responses from the model, all from `seed`.
Dataset make_dataset(Law law, int n, const ResponseModel& model, std::uint64_t seed);

/// <T, X_t> for every sample.
Eigen::VectorXd apply_design(const Dataset& data, const Tensor3& t);
Eigen::VectorXd responses(const Dataset& data);

class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PopulationModel {
  Law law = Law::kCompletion;
  ResponseModel model;

  /// Sigma = scale * identity on vectorized measurements.
  double covariance_scale() const;
};

/// Conditional mean and variance of y at entry (i,j,k) of a completion law.
struct EntryMoments {
  double mean = 0.0;
  double variance = 0.0;
};
EntryMoments entry_moments(const ResponseModel& model, int i, int j, int k);

/// E (<T, X> - Y)^2 in closed form. Throws UnsupportedModel otherwise.
double population_risk(const PopulationModel& pop, const Tensor3& t);

struct ReProbeRow {
  double population = 0.0;  // |Sigma^{1/2} Delta|_F^2
  double empirical = 0.0;   // |X_n(Delta)|^2 / n
  double slack = 0.0;       // population - c * empirical
};

struct ReProbeReport {
  double c = 1.1;
  std::vector<ReProbeRow> rows;
  /// Smallest gamma >= 0 with population <= c * empirical + gamma for all rows.
  double gamma_hat = 0.0;
};

ReProbeReport re_probe(const Dataset& data, const PopulationModel& pop, const std::vector<Tensor3>& deltas,
                       double c = 1.1);

/// sum_t signs_t * X_t for Entry measurements.
Tensor3 signed_entry_sum(int d, const std::vector<Measurement>& entries, const std::vector<double>& signs);

struct RademacherBudget {
  int max_d = 5;
  int max_n = 200;
};

class BudgetExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RademacherEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> values;
};

/// Degree-4 injective norm of sum_t eps_t X_t over completion measurements.
RademacherEstimate rademacher_estimate(int d, int n, int trials, std::uint64_t seed,
                                       const RademacherBudget& budget = {}, const NormOptions& options = {});

}  // namespace sos_tensor
