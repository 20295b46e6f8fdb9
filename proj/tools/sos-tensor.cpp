#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sos_tensor/experiment.hpp"
#include "sos_tensor/learners.hpp"
#include "sos_tensor/sos_norms.hpp"
#include "sos_tensor/xor.hpp"

using namespace sos_tensor;

namespace {

void print_kv(std::ostream& os, const std::string& key, const std::string& value) { os << key << " = " << value << "\n"; }
void print_kv(std::ostream& os, const std::string& key, double value) { print_kv(os, key, format_number(value)); }

void print_diagnostics(std::ostream& os, const SolveDiagnostics& d) {
  print_kv(os, "status", conic::to_string(d.status));
  print_kv(os, "primal_residual", d.residuals.primal);
  print_kv(os, "dual_residual", d.residuals.dual);
  print_kv(os, "gap_residual", d.residuals.gap);
  print_kv(os, "cone_violation", d.cone_violation);
  print_kv(os, "iterations", std::to_string(d.iterations));
  print_kv(os, "seconds", d.seconds);
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  os << m.rows() << "\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << "\n";
  }
}

struct NormArgs {
  std::string tensor;
  int degree = 4;
  std::string which = "nuc";
  bool no_parity = false;
  std::string dump_conic;
  std::string certificate;
};

int run_norms(const NormArgs& a) {
  const Tensor3 t = load_tensor(a.tensor);
  NormOptions opts;
  if (a.no_parity) opts.parity_reduce = false;
  const bool parity = default_parity_reduce(opts, a.degree);
  if (!a.dump_conic.empty()) {
    std::ofstream out(a.dump_conic);
    conic::write_problem(out, a.which == "inj" ? injective_problem(t, a.degree, parity) : nuclear_problem(t, a.degree, parity));
  }
  const NormResult r = a.which == "inj" ? injective_norm(t, a.degree, opts) : nuclear_norm(t, a.degree, opts);
  print_kv(std::cout, "norm", a.which);
  print_kv(std::cout, "degree", std::to_string(a.degree));
  print_kv(std::cout, "value", r.value);
  print_diagnostics(std::cout, r.diagnostics);
  if (!a.certificate.empty()) {
    std::ofstream out(a.certificate);
    write_matrix(out, r.certificate.matrix());
  }
  return 0;
}

struct ErmArgs {
  std::string data;
  double tau = 0.0;
  double R = 0.0;
  int degree = 4;
  std::string method = "direct";
  int fw_iterations = 200;
  std::string output = "t_hat.txt";
  // Simulation of a dataset from a random orthogonal teacher.
  int simulate = 0;
  int d = 3;
  int r = 1;
  double teacher_norm = 1.0;
  double sigma = 0.1;
  std::uint64_t seed = 1;
  std::string save_data;
};

int run_erm(const ErmArgs& a, Law law) {
  Dataset data;
  if (!a.data.empty()) {
    data = load_dataset(a.data);
  } else if (a.simulate > 0) {
    const Eigen::VectorXd lambdas = Eigen::VectorXd::Constant(a.r, a.teacher_norm / std::sqrt(a.r));
    const Tensor3 teacher = random_orthogonal(a.d, a.r, lambdas, derive_seed(a.seed, 1)).densify();
    const double clip = law == Law::kCompletion ? linf(teacher) + 6 * a.sigma : std::numeric_limits<double>::infinity();
    data = make_dataset(law, a.simulate, WellSpecified{teacher, a.sigma, clip}, derive_seed(a.seed, 2));
    if (!a.save_data.empty()) save_dataset(a.save_data, data);
  } else {
    throw CLI::ValidationError("--data", "either --data or --simulate is required");
  }
  if (data.law != law) throw CLI::ValidationError("--data", "dataset law is " + to_string(data.law));

  ErmConfig c;
  c.tau = a.tau;
  c.degree = a.degree;
  c.method = parse_method(a.method);
  c.fw_iterations = a.fw_iterations;
  if (law == Law::kCompletion && a.R > 0) c.R = a.R;
  const ErmResult res = c.method == ErmMethod::kDirect ? erm_direct(data, c) : erm_frank_wolfe(data, c);
  save_tensor(a.output, res.t_hat);

  print_kv(std::cout, "method", to_string(res.method));
  print_kv(std::cout, "n", std::to_string(data.size()));
  print_kv(std::cout, "tau", c.tau);
  print_kv(std::cout, "empirical_risk", res.empirical_risk);
  print_kv(std::cout, "certified_nuclear", res.certified_nuclear);
  print_kv(std::cout, "max_abs_entry", res.max_abs_entry);
  if (!res.trace.empty()) print_kv(std::cout, "final_gap", res.trace.back());
  print_diagnostics(std::cout, res.diagnostics);
  print_kv(std::cout, "output", a.output);
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string output;
  std::string manifest;
  bool no_timestamp = false;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  ExperimentConfig config = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!a.output.empty()) config.output = a.output;
  const RunOptions options{!a.no_timestamp};
  const ExperimentReport report = run_experiment(config, options);
  {
    std::ofstream out(config.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + config.output);
    write_report_csv(out, report, options);
  }
  {
    const std::string path = a.manifest.empty() ? config.output + ".manifest.json" : a.manifest;
    std::ofstream out(path);
    write_manifest(out, config, report, options);
  }
  for (const auto& [k, v] : report.summary) print_kv(std::cout, k, v);
  print_kv(std::cout, "csv", config.output);
  if (report.kind == ExperimentKind::kTheorySuite) {
    for (const auto& row : report.table.rows) std::cout << row[1] << "  " << row[0] << "  " << row[5] << "\n";
  }
  return report.passed ? 0 : 1;
}

struct XorArgs {
  std::string mode = "sweep";
  int d = 3;
  int m = 81;
  double eta = 0.05;
  std::uint64_t seed = 1;
  int degree = 4;
  int trials = 20;
  bool no_timestamp = false;
};

int run_xor_cmd(const XorArgs& a) {
  if (a.mode == "sweep") {
    ExperimentConfig c;
    c.kind = ExperimentKind::kXorSweep;
    c.d = a.d;
    c.m = a.m;
    c.eta = a.eta;
    c.seed = a.seed;
    c.degree = a.degree;
    c.trials = a.trials;
    const RunOptions options{!a.no_timestamp};
    const ExperimentReport report = run_xor(c, options);
    write_report_csv(std::cout, report, options);
    for (const auto& [k, v] : report.summary) std::cerr << k << " = " << v << "\n";
    return 0;
  }
  const XorInstance inst = a.mode == "planted" ? gen_planted(a.d, a.m, a.eta, a.seed) : gen_random(a.d, a.m, a.seed);
  ErmConfig learner = xor_learner_config(a.d, a.degree);
  const std::uint64_t split = derive_seed(a.seed, 3);
  const Verdict v = distinguish(inst, learner, a.eta, split);
  CsvTable table;
  table.header = {"mode", "seed", "split_seed", "d", "m", "eta", "holdout_loss", "threshold", "verdict"};
  table.rows.push_back({a.mode, std::to_string(a.seed), std::to_string(split), std::to_string(a.d), std::to_string(a.m),
                        format_number(a.eta), format_number(v.holdout_loss), format_number(v.threshold),
                        to_string(v.tag)});
  table.write(std::cout);
  return 0;
}

struct VerifyArgs {
  int d = 4;
  int probes = 50;
  std::uint64_t seed = 1;
  bool corrupt = false;
  std::string output;
  bool no_timestamp = false;
};

int run_verify(const VerifyArgs& a) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kTheorySuite;
  c.d = a.d;
  c.probes = a.probes;
  c.seed = a.seed;
  c.corrupt_projector = a.corrupt;
  const RunOptions options{!a.no_timestamp};
  const ExperimentReport report = run_theory_suite(c, options);
  for (const auto& row : report.table.rows) {
    std::cout << (row[1] == "pass" ? "PASS" : "FAIL") << "  " << row[0] << "  observed " << row[2] << "  bound "
              << row[3] << "  (" << row[5] << ")\n";
  }
  if (!a.output.empty()) {
    std::ofstream out(a.output, std::ios::binary);
    write_report_csv(out, report, options);
  }
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SoS tensor norms, completion and sensing learners, and verification experiments"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  NormArgs na;
  auto* norms = app.add_subcommand("norms", "SoS injective or nuclear norm of a tensor file");
  norms->add_option("--tensor", na.tensor, "tensor text file")->required()->check(CLI::ExistingFile);
  norms->add_option("--degree", na.degree, "relaxation degree")->check(CLI::IsMember({4, 6}));
  norms->add_option("--which", na.which, "inj or nuc")->check(CLI::IsMember({"inj", "nuc"}));
  norms->add_flag("--no-parity", na.no_parity, "solve the unreduced program");
  norms->add_option("--dump-conic", na.dump_conic, "write the conic program in text form");
  norms->add_option("--certificate", na.certificate, "write the moment matrix");

  ErmArgs ca, sa;
  auto add_erm = [](CLI::App* sub, ErmArgs& a, bool completion) {
    sub->add_option("--data", a.data, "dataset file")->check(CLI::ExistingFile);
    sub->add_option("--tau", a.tau, "nuclear-ball radius")->required()->check(CLI::PositiveNumber);
    if (completion) sub->add_option("--R", a.R, "entrywise bound")->check(CLI::PositiveNumber);
    sub->add_option("--degree", a.degree, "relaxation degree")->check(CLI::IsMember({4, 6}));
    sub->add_option("--method", a.method, "direct or frank-wolfe")->check(CLI::IsMember({"direct", "frank-wolfe"}));
    sub->add_option("--fw-iterations", a.fw_iterations, "Frank-Wolfe iterations");
    sub->add_option("--output", a.output, "estimate output file");
    sub->add_option("--simulate", a.simulate, "draw n samples from a random orthogonal teacher instead of --data");
    sub->add_option("--d", a.d, "simulated dimension");
    sub->add_option("--r", a.r, "simulated teacher rank");
    sub->add_option("--teacher-norm", a.teacher_norm, "simulated teacher Frobenius norm");
    sub->add_option("--sigma", a.sigma, "simulated noise level");
    sub->add_option("--seed", a.seed, "simulation seed");
    sub->add_option("--save-data", a.save_data, "write the simulated dataset");
  };
  auto* complete = app.add_subcommand("complete", "tensor completion by ERM over the SoS nuclear ball");
  add_erm(complete, ca, true);
  auto* sense = app.add_subcommand("sense", "tensor sensing by ERM over the SoS nuclear ball");
  add_erm(sense, sa, false);

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "run a configured experiment and write CSV plus a manifest");
  experiment->add_option("--config", ea.config, "key = value config file")->check(CLI::ExistingFile);
  experiment->add_option("--set", ea.sets, "override, key=value (repeatable)");
  experiment->add_option("--output", ea.output, "CSV path (overrides config)");
  experiment->add_option("--manifest", ea.manifest, "manifest path (default <output>.manifest.json)");
  experiment->add_flag("--no-timestamp", ea.no_timestamp, "omit the time line and wall_time column");

  XorArgs xa;
  auto* xorc = app.add_subcommand("xor", "planted versus random 3-XOR distinguisher");
  xorc->add_option("--mode", xa.mode, "planted, random or sweep")->check(CLI::IsMember({"planted", "random", "sweep"}));
  xorc->add_option("--d", xa.d, "number of variables");
  xorc->add_option("--m", xa.m, "number of clauses");
  xorc->add_option("--eta", xa.eta, "planted noise rate");
  xorc->add_option("--seed", xa.seed, "seed");
  xorc->add_option("--degree", xa.degree, "learner degree")->check(CLI::IsMember({4, 6}));
  xorc->add_option("--trials", xa.trials, "sweep pairs");
  xorc->add_flag("--no-timestamp", xa.no_timestamp, "omit the time line and wall_time column");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the structural property suite");
  verify->add_option("--d", va.d, "larger dimension (the smaller is d - 1)");
  verify->add_option("--probes", va.probes, "random probes per check");
  verify->add_option("--seed", va.seed, "seed");
  verify->add_flag("--corrupt-projector", va.corrupt, "drop one perpendicular term (mutation check)");
  verify->add_option("--output", va.output, "CSV path");
  verify->add_flag("--no-timestamp", va.no_timestamp, "omit the time line and wall_time column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*norms) return run_norms(na);
    if (*complete) return run_erm(ca, Law::kCompletion);
    if (*sense) return run_erm(sa, Law::kGaussian);
    if (*experiment) return run_experiment_cmd(ea);
    if (*xorc) return run_xor_cmd(xa);
    if (*verify) return run_verify(va);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
