#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sos_tensor/learners.hpp"
#include "sos_tensor/measurement.hpp"

namespace sos_tensor {

enum class ExperimentKind { kScalingCompletion, kScalingSensing, kTheorySuite, kRademacher, kReProbe, kXorSweep };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& s);

/// Flat key=value configuration. Keys (defaults in parentheses):
///   experiment (scaling-completion), d (4), r (1), degree (4),
///   tau_policy (benchmark | fixed), tau (fixed radius), teacher_norm (2),
///   R (auto | value), sigma (0.2), n_grid (32,64,128,256), trials (10),
///   seed (1), unfolding (true), method (direct | frank-wolfe),
///   fw_iterations (200), law (completion | gaussian, re-probe only),
///   probes (50), eta (0.05), m (81), max_psd_block (500), parity (true),
///   eps (1e-7), max_iters (100000), output (results.csv),
///   corrupt_projector (false).
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kScalingCompletion;
  int d = 4;
  int r = 1;
  int degree = 4;
  std::string tau_policy = "benchmark";
  double tau = 0.0;
  double teacher_norm = 2.0;
  /// Non-positive means auto: |T*|_inf + 6 sigma.
  double R = 0.0;
  double sigma = 0.2;
  std::vector<int> n_grid = {32, 64, 128, 256};
  int trials = 10;
  std::uint64_t seed = 1;
  bool unfolding = true;
  ErmMethod method = ErmMethod::kDirect;
  int fw_iterations = 200;
  Law law = Law::kCompletion;
  int probes = 50;
  double eta = 0.05;
  int m = 81;
  int max_psd_block = 500;
  bool parity = true;
  double eps = 1e-7;
  int max_iters = 100000;
  std::string output = "results.csv";
  bool corrupt_projector = false;

  /// Throws std::invalid_argument on an unknown key or malformed value.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  NormOptions norm_options() const;
  /// Ordered key/value view of every field.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Lines "key = value"; blank lines and '#' comments are skipped.
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Largest PSD block any solve of this configuration builds.
int estimated_psd_block(const ExperimentConfig& config);
/// Throws BudgetExceeded when estimated_psd_block exceeds max_psd_block.
void enforce_budget(const ExperimentConfig& config);

/// Comma-separated table with RFC 4180 quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os) const;
};

std::string csv_escape(const std::string& field);
std::string format_number(double v);

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::kScalingCompletion;
  CsvTable table;
  std::vector<std::pair<std::string, std::string>> summary;
  /// False when a theory check fails.
  bool passed = true;
  int failed_rows = 0;

  std::string summary_value(const std::string& key) const;
};

struct RunOptions {
  /// Include the wall_time column and the generated-at comment line.
  bool timestamp = true;
};

/// Least-squares fit of log y on log x with a two-sided 95% t half-width.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;
  int points = 0;
};
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

/// Seed for a named stream of a trial.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Teacher used by the scaling experiments for one trial seed.
OrthogonalTensor scaling_teacher(const ExperimentConfig& config, std::uint64_t trial_seed);

ExperimentReport run_scaling(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentReport run_theory_suite(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentReport run_rademacher(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentReport run_re_probe(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentReport run_xor(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// CSV text, preceded by a "# ..." line with the UTC time when timestamped.
void write_report_csv(std::ostream& os, const ExperimentReport& report, const RunOptions& options);
/// JSON manifest: config, seeds, version, solver settings and summary.
void write_manifest(std::ostream& os, const ExperimentConfig& config, const ExperimentReport& report,
                    const RunOptions& options);

std::string version_string();

}  // namespace sos_tensor
