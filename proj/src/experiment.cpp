#include "sos_tensor/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "sos_tensor/theory.hpp"
#include "sos_tensor/xor.hpp"

namespace sos_tensor {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " expects true or false, got '" + v + "'");
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t q = 0; q < v.size(); ++q) out += (q ? "," : "") + std::to_string(v[q]);
  return out;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

int max_block(const MonomialBasis& basis) {
  int out = 0;
  for (const auto& b : basis.blocks()) out = std::max(out, static_cast<int>(b.size()));
  return out;
}

int sos_block(int d, int k, bool parity) { return max_block(MonomialBasis::build(d, k, parity)); }

// Rows of one learner on one (n, trial) cell.
struct ScalingRow {
  int n = 0;
  std::uint64_t seed = 0;
  std::string learner;
  std::string status;
  double excess = std::numeric_limits<double>::quiet_NaN();
  double empirical = std::numeric_limits<double>::quiet_NaN();
  double certified = std::numeric_limits<double>::quiet_NaN();
  double max_abs = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double seconds = 0.0;
};

template <class Fit>
ScalingRow run_learner(int n, std::uint64_t seed, const std::string& learner, const PopulationModel& pop,
                       const OrthogonalTensor& teacher, Fit&& fit) {
  ScalingRow row;
  row.n = n;
  row.seed = seed;
  row.learner = learner;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ErmResult res = fit();
    row.status = "ok";
    row.excess = excess_risk(pop, res, teacher);
    row.empirical = res.empirical_risk;
    row.certified = res.certified_nuclear;
    row.max_abs = res.max_abs_entry;
    row.iterations = res.diagnostics.iterations;
  } catch (const SolverError& e) {
    row.status = "failed:" + conic::to_string(e.status);
    row.iterations = e.iterations;
  }
  row.seconds = elapsed(t0);
  return row;
}

std::string opt_number(double v) { return std::isnan(v) ? "" : format_number(v); }

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kScalingCompletion: return "scaling-completion";
    case ExperimentKind::kScalingSensing: return "scaling-sensing";
    case ExperimentKind::kTheorySuite: return "theory-suite";
    case ExperimentKind::kRademacher: return "rademacher";
    case ExperimentKind::kReProbe: return "re-probe";
    case ExperimentKind::kXorSweep: return "xor-sweep";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& s) {
  for (auto k : {ExperimentKind::kScalingCompletion, ExperimentKind::kScalingSensing, ExperimentKind::kTheorySuite,
                 ExperimentKind::kRademacher, ExperimentKind::kReProbe, ExperimentKind::kXorSweep}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "experiment") kind = parse_experiment(v);
  else if (key == "d") d = parse_int(key, v);
  else if (key == "r") r = parse_int(key, v);
  else if (key == "degree") degree = parse_int(key, v);
  else if (key == "tau_policy") {
    if (v != "benchmark" && v != "fixed") throw std::invalid_argument("config: tau_policy must be benchmark or fixed");
    tau_policy = v;
  } else if (key == "tau") tau = parse_double(key, v);
  else if (key == "teacher_norm") teacher_norm = parse_double(key, v);
  else if (key == "R") R = v == "auto" ? 0.0 : parse_double(key, v);
  else if (key == "sigma") sigma = parse_double(key, v);
  else if (key == "n_grid") {
    n_grid.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) n_grid.push_back(parse_int(key, trim(item)));
  } else if (key == "trials") trials = parse_int(key, v);
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "unfolding") unfolding = parse_bool(key, v);
  else if (key == "method") method = parse_method(v);
  else if (key == "fw_iterations") fw_iterations = parse_int(key, v);
  else if (key == "law") law = parse_law(v);
  else if (key == "probes") probes = parse_int(key, v);
  else if (key == "eta") eta = parse_double(key, v);
  else if (key == "m") m = parse_int(key, v);
  else if (key == "max_psd_block") max_psd_block = parse_int(key, v);
  else if (key == "parity") parity = parse_bool(key, v);
  else if (key == "eps") eps = parse_double(key, v);
  else if (key == "max_iters") max_iters = parse_int(key, v);
  else if (key == "output") output = v;
  else if (key == "corrupt_projector") corrupt_projector = parse_bool(key, v);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void ExperimentConfig::validate() const {
  if (d < 1) throw std::invalid_argument("config: d must be positive");
  if (r < 1 || r > d) throw std::invalid_argument("config: r must lie in [1, d]");
  if (degree != 4 && degree != 6) throw std::invalid_argument("config: degree must be 4 or 6");
  if (degree == 6 && d > 4) throw std::invalid_argument("config: degree 6 requires d <= 4");
  if (tau_policy == "fixed" && !(tau > 0)) throw std::invalid_argument("config: fixed tau must be positive");
  if (!(sigma >= 0)) throw std::invalid_argument("config: sigma must be nonnegative");
  if (n_grid.empty()) throw std::invalid_argument("config: n_grid is empty");
  for (std::size_t q = 0; q < n_grid.size(); ++q) {
    if (n_grid[q] < 1) throw std::invalid_argument("config: n_grid entries must be positive");
    if (q > 0 && n_grid[q] <= n_grid[q - 1]) throw std::invalid_argument("config: n_grid must be strictly increasing");
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (probes < 1) throw std::invalid_argument("config: probes must be >= 1");
  if (m < 2) throw std::invalid_argument("config: m must be >= 2");
  if (max_psd_block < 1) throw std::invalid_argument("config: max_psd_block must be positive");
  if (!(eps > 0) || max_iters < 1) throw std::invalid_argument("config: invalid solver settings");
}

NormOptions ExperimentConfig::norm_options() const {
  NormOptions o;
  o.parity_reduce = parity;
  o.solver.eps_primal = o.solver.eps_dual = o.solver.eps_gap = eps;
  o.solver.max_iters = max_iters;
  return o;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  return {{"experiment", to_string(kind)},
          {"d", std::to_string(d)},
          {"r", std::to_string(r)},
          {"degree", std::to_string(degree)},
          {"tau_policy", tau_policy},
          {"tau", format_number(tau)},
          {"teacher_norm", format_number(teacher_norm)},
          {"R", R > 0 ? format_number(R) : "auto"},
          {"sigma", format_number(sigma)},
          {"n_grid", join_ints(n_grid)},
          {"trials", std::to_string(trials)},
          {"seed", std::to_string(seed)},
          {"unfolding", unfolding ? "true" : "false"},
          {"method", to_string(method)},
          {"fw_iterations", std::to_string(fw_iterations)},
          {"law", to_string(law)},
          {"probes", std::to_string(probes)},
          {"eta", format_number(eta)},
          {"m", std::to_string(m)},
          {"max_psd_block", std::to_string(max_psd_block)},
          {"parity", parity ? "true" : "false"},
          {"eps", format_number(eps)},
          {"max_iters", std::to_string(max_iters)},
          {"output", output},
          {"corrupt_projector", corrupt_projector ? "true" : "false"}};
}

ExperimentConfig parse_config(std::istream& is, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_config(in, std::move(base));
}

int estimated_psd_block(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::kScalingCompletion:
    case ExperimentKind::kScalingSensing: {
      int b = sos_block(c.d, c.degree, c.parity);
      if (c.unfolding) b = std::max(b, c.d + c.d * c.d);
      return b;
    }
    case ExperimentKind::kTheorySuite: return sos_block(c.d, 6, c.parity);
    case ExperimentKind::kRademacher: return sos_block(c.d, 4, c.parity);
    case ExperimentKind::kReProbe: return 0;
    case ExperimentKind::kXorSweep: return sos_block(c.d, c.degree, c.parity);
  }
  return 0;
}

void enforce_budget(const ExperimentConfig& config) {
  const int b = estimated_psd_block(config);
  if (b > config.max_psd_block) {
    throw BudgetExceeded("experiment needs a PSD block of side " + std::to_string(b) + ", above max_psd_block = " +
                         std::to_string(config.max_psd_block));
  }
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void CsvTable::write(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t q = 0; q < fields.size(); ++q) os << (q ? "," : "") << csv_escape(fields[q]);
    os << "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string ExperimentReport::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw std::out_of_range("report has no summary key '" + key + "'");
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog: need at least two points");
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd lx(n), ly(n);
  for (int q = 0; q < n; ++q) {
    if (!(x[q] > 0) || !(y[q] > 0)) throw std::invalid_argument("fit_loglog: values must be positive");
    lx(q) = std::log(x[q]);
    ly(q) = std::log(y[q]);
  }
  const double mx = lx.mean(), my = ly.mean();
  const double sxx = (lx.array() - mx).square().sum();
  SlopeFit fit;
  fit.points = n;
  fit.slope = ((lx.array() - mx) * (ly.array() - my)).sum() / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    const double sse = (ly.array() - fit.intercept - fit.slope * lx.array()).square().sum();
    const double se = std::sqrt(sse / (n - 2) / sxx);
    const boost::math::students_t dist(n - 2);
    fit.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  } else {
    fit.half_width = std::numeric_limits<double>::infinity();
  }
  return fit;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over a combined key.
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + stream + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

OrthogonalTensor scaling_teacher(const ExperimentConfig& config, std::uint64_t trial_seed) {
  const Eigen::VectorXd lambdas = Eigen::VectorXd::Constant(config.r, config.teacher_norm / std::sqrt(config.r));
  return random_orthogonal(config.d, config.r, lambdas, derive_seed(trial_seed, 1));
}

ExperimentReport run_scaling(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  enforce_budget(config);
  const Law law = config.kind == ExperimentKind::kScalingSensing ? Law::kGaussian : Law::kCompletion;
  const NormOptions norm = config.norm_options();

  std::vector<ScalingRow> rows;
  for (int t = 0; t < config.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
    const OrthogonalTensor teacher = scaling_teacher(config, trial_seed);
    const Tensor3 dense = teacher.densify();
    const double bound = config.R > 0 ? config.R : linf(dense) + 6.0 * config.sigma;
    const WellSpecified model{dense, config.sigma, law == Law::kCompletion ? bound : std::numeric_limits<double>::infinity()};
    const PopulationModel pop{law, model};

    ErmConfig erm;
    erm.degree = config.degree;
    erm.method = config.method;
    erm.fw_iterations = config.fw_iterations;
    erm.norm = norm;
    if (law == Law::kCompletion) erm.R = bound;
    erm.tau = config.tau_policy == "fixed" ? config.tau : nuclear_norm(dense, config.degree, norm).value;
    const double tau_matrix = config.tau_policy == "fixed" ? config.tau : matrix_nuclear(flatten(dense, 1));

    // Nested datasets: every n uses a prefix of the same sample stream.
    const std::uint64_t data_seed = derive_seed(trial_seed, 2);
    for (int n : config.n_grid) {
      const Dataset data = make_dataset(law, n, model, data_seed);
      rows.push_back(run_learner(n, trial_seed, "sos", pop, teacher, [&] {
        return erm.method == ErmMethod::kDirect ? erm_direct(data, erm) : erm_frank_wolfe(data, erm);
      }));
      if (config.unfolding) {
        rows.push_back(run_learner(n, trial_seed, "unfolding", pop, teacher,
                                   [&] { return erm_unfolding(data, 1, tau_matrix, norm.solver); }));
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ScalingRow& a, const ScalingRow& b) {
    return std::tie(a.n, a.seed, a.learner) < std::tie(b.n, b.seed, b.learner);
  });

  ExperimentReport report;
  report.kind = config.kind;
  report.table.header = {"n", "seed", "learner", "status", "excess_risk", "empirical_risk", "certified_nuclear",
                         "max_abs_entry", "iterations"};
  if (options.timestamp) report.table.header.push_back("wall_time");
  for (const auto& r : rows) {
    std::vector<std::string> f = {std::to_string(r.n),          std::to_string(r.seed),    r.learner,
                                  r.status,                     opt_number(r.excess),      opt_number(r.empirical),
                                  opt_number(r.certified),      opt_number(r.max_abs),     std::to_string(r.iterations)};
    if (options.timestamp) f.push_back(format_number(r.seconds));
    report.table.rows.push_back(std::move(f));
    if (r.status != "ok") ++report.failed_rows;
  }

  auto medians = [&](const std::string& learner) {
    std::vector<double> out;
    for (int n : config.n_grid) {
      std::vector<double> v;
      for (const auto& r : rows)
        if (r.n == n && r.learner == learner && r.status == "ok") v.push_back(r.excess);
      out.push_back(v.empty() ? std::numeric_limits<double>::quiet_NaN() : median(v));
    }
    return out;
  };
  const std::vector<double> sos = medians("sos");
  std::vector<double> xs;
  for (int n : config.n_grid) xs.push_back(n);
  for (std::size_t q = 0; q < xs.size(); ++q)
    report.summary.emplace_back("median_sos_n" + std::to_string(config.n_grid[q]), format_number(sos[q]));

  bool fit_ok = xs.size() >= 2;
  for (double v : sos) fit_ok = fit_ok && v > 0;
  if (fit_ok) {
    const SlopeFit fit = fit_loglog(xs, sos);
    report.summary.emplace_back("slope", format_number(fit.slope));
    report.summary.emplace_back("slope_half_width", format_number(fit.half_width));
  } else {
    report.summary.emplace_back("slope", "nan");
    report.summary.emplace_back("slope_half_width", "nan");
  }
  report.summary.emplace_back("median_ratio_first_last", format_number(sos.front() / sos.back()));

  if (config.unfolding) {
    const std::vector<double> unf = medians("unfolding");
    bool dominated = true;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      report.summary.emplace_back("median_unfolding_n" + std::to_string(config.n_grid[q]), format_number(unf[q]));
      dominated = dominated && sos[q] <= unf[q];
    }
    report.summary.emplace_back("sos_le_unfolding_all_n", dominated ? "true" : "false");
  }
  report.summary.emplace_back("failed_rows", std::to_string(report.failed_rows));
  return report;
}

ExperimentReport run_theory_suite(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  enforce_budget(config);
  const NormOptions norm = config.norm_options();
  const int big = config.d;
  const int small = std::max(2, config.d - 1);
  const int probes = config.probes;
  const int few = std::max(1, probes / 5);
  const std::uint64_t s = config.seed;

  std::vector<std::pair<CheckResult, double>> results;
  auto run = [&](auto&& check) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = check();
    } catch (const SolverError& e) {
      r.name = "solver failure";
      r.passed = false;
      r.detail = e.what();
    }
    results.emplace_back(std::move(r), elapsed(t0));
  };

  const Eigen::VectorXd two_one = (Eigen::VectorXd(2) << 2.0, 1.0).finished();
  run([&] { return check_projection_completeness(big, 2 * probes, derive_seed(s, 101), config.corrupt_projector); });
  run([&] { return check_kernel_property(big, probes, derive_seed(s, 102)); });
  run([&] {
    return check_orthogonal_exactness(random_orthogonal(big, 2, two_one, derive_seed(s, 103)), 4, 1e-4, norm);
  });
  run([&] {
    return check_orthogonal_exactness(random_orthogonal(small, 2, two_one, derive_seed(s, 104)), 6, 5e-4, norm);
  });
  run([&] { return check_norm_ordering(big, probes, derive_seed(s, 105), kSolverTol, norm); });
  run([&] { return check_degree_monotonicity(small, few, derive_seed(s, 106), 2 * kSolverTol, norm); });
  run([&] { return check_duality(big, probes, derive_seed(s, 107), 1e-4, norm); });
  run([&] { return check_subgradient(small, {1, 2}, probes, 4, derive_seed(s, 108), 1e-4, norm); });
  run([&] {
    return check_norm_comparison_suite(random_orthogonal(big, 2, two_one, derive_seed(s, 109)), probes,
                                       derive_seed(s, 110), norm);
  });
  run([&] { return check_pseudo_cs(small, 20, 5, derive_seed(s, 111), norm); });
  run([&] { return check_injective_upper_bound(small, few, derive_seed(s, 112), kSolverTol, norm); });
  run([&] { return check_projection_contraction(small, few, derive_seed(s, 113), kSolverTol, norm); });
  run([&] { return check_flattening_bound(small, few, derive_seed(s, 114), kSolverTol, norm); });

  ExperimentReport report;
  report.kind = config.kind;
  report.table.header = {"check", "result", "observed", "bound", "trials", "detail"};
  if (options.timestamp) report.table.header.push_back("wall_time");
  int failed = 0;
  for (const auto& [r, secs] : results) {
    std::vector<std::string> f = {r.name, r.passed ? "pass" : "fail", format_number(r.observed), format_number(r.bound),
                                  std::to_string(r.trials), r.detail};
    if (options.timestamp) f.push_back(format_number(secs));
    report.table.rows.push_back(std::move(f));
    if (!r.passed) ++failed;
    if (r.name == "norm comparison") {
      report.summary.emplace_back("norm_comparison_worst_ratio", format_number(r.observed));
      report.summary.emplace_back("norm_comparison_bound", format_number(r.bound));
    }
  }
  report.passed = failed == 0;
  report.summary.emplace_back("checks", std::to_string(results.size()));
  report.summary.emplace_back("failed_checks", std::to_string(failed));
  return report;
}

ExperimentReport run_rademacher(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  enforce_budget(config);
  ExperimentReport report;
  report.kind = config.kind;
  report.table.header = {"n", "seed", "trials", "mean", "stddev"};
  if (options.timestamp) report.table.header.push_back("wall_time");
  std::vector<double> means;
  for (int n : config.n_grid) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(n));
    const RademacherEstimate est = rademacher_estimate(config.d, n, config.trials, seed, {}, config.norm_options());
    std::vector<std::string> f = {std::to_string(n), std::to_string(seed), std::to_string(config.trials),
                                  format_number(est.mean), format_number(est.stddev)};
    if (options.timestamp) f.push_back(format_number(elapsed(t0)));
    report.table.rows.push_back(std::move(f));
    means.push_back(est.mean);
  }
  for (std::size_t q = 1; q < means.size(); ++q) {
    report.summary.emplace_back(
        "ratio_n" + std::to_string(config.n_grid[q]) + "_n" + std::to_string(config.n_grid[q - 1]),
        format_number(means[q] / means[q - 1]));
  }
  return report;
}

ExperimentReport run_re_probe(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  enforce_budget(config);
  const int d = config.d;
  const int cells = d * d * d;

  // Fixed probe set: entry indicators (completion only) then unit rank-1 atoms.
  std::vector<Tensor3> deltas;
  std::mt19937_64 rng(derive_seed(config.seed, 7));
  std::normal_distribution<double> normal;
  const int indicators = config.law == Law::kCompletion ? std::min(config.probes / 2, cells) : 0;
  for (int q = 0; q < indicators; ++q) {
    Tensor3 e(d);
    e.vec()(q * (cells / std::max(indicators, 1))) = 1.0;
    deltas.push_back(std::move(e));
  }
  while (static_cast<int>(deltas.size()) < config.probes) {
    Eigen::VectorXd u(d), v(d), w(d);
    for (int i = 0; i < d; ++i) {
      u(i) = normal(rng);
      v(i) = normal(rng);
      w(i) = normal(rng);
    }
    deltas.push_back(outer3(u.normalized(), v.normalized(), w.normalized()));
  }

  const Eigen::VectorXd lambdas = Eigen::VectorXd::Constant(1, config.teacher_norm);
  const WellSpecified model{random_orthogonal(d, 1, lambdas, derive_seed(config.seed, 8)).densify(), config.sigma};
  const PopulationModel pop{config.law, model};

  ExperimentReport report;
  report.kind = config.kind;
  report.table.header = {"n", "seed", "gamma_hat", "min_ratio", "max_ratio"};
  if (options.timestamp) report.table.header.push_back("wall_time");
  std::vector<double> gamma_medians;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int n : config.n_grid) {
    std::vector<double> gammas;
    for (int t = 0; t < config.trials; ++t) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::uint64_t seed = derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(t));
      const ReProbeReport rep = re_probe(make_dataset(config.law, n, model, seed), pop, deltas);
      double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
      for (const auto& row : rep.rows) {
        const double ratio = row.empirical / row.population;
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
      }
      lo = std::min(lo, rmin);
      hi = std::max(hi, rmax);
      gammas.push_back(rep.gamma_hat);
      std::vector<std::string> f = {std::to_string(n), std::to_string(seed), format_number(rep.gamma_hat),
                                    format_number(rmin), format_number(rmax)};
      if (options.timestamp) f.push_back(format_number(elapsed(t0)));
      report.table.rows.push_back(std::move(f));
    }
    gamma_medians.push_back(median(gammas));
    report.summary.emplace_back("median_gamma_n" + std::to_string(n), format_number(gamma_medians.back()));
  }
  bool nonincreasing = true;
  for (std::size_t q = 1; q < gamma_medians.size(); ++q) nonincreasing = nonincreasing && gamma_medians[q] <= gamma_medians[q - 1];
  report.summary.emplace_back("gamma_nonincreasing", nonincreasing ? "true" : "false");
  report.summary.emplace_back("min_ratio", format_number(lo));
  report.summary.emplace_back("max_ratio", format_number(hi));
  return report;
}

ExperimentReport run_xor(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  enforce_budget(config);
  ErmConfig learner = xor_learner_config(config.d, config.degree);
  learner.norm = config.norm_options();
  // Pair t uses planted seed base+100+t, random seed base+200+t and split seed base+300+t.
  const std::uint64_t base = (config.seed - 1) * 1000;

  ExperimentReport report;
  report.kind = config.kind;
  report.table.header = {"pair",          "planted_seed", "random_seed", "split_seed", "planted_loss",
                         "planted_verdict", "random_loss",  "random_verdict", "planted_below_random"};
  if (options.timestamp) report.table.header.push_back("wall_time");
  int wins = 0, planted_right = 0, random_right = 0;
  for (int t = 0; t < config.trials; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t ps = base + 100 + t, rs = base + 200 + t, ss = base + 300 + t;
    const Verdict vp = distinguish(gen_planted(config.d, config.m, config.eta, ps), learner, config.eta, ss);
    const Verdict vr = distinguish(gen_random(config.d, config.m, rs), learner, config.eta, ss);
    const bool win = vp.holdout_loss < vr.holdout_loss;
    wins += win;
    planted_right += vp.tag == VerdictTag::kPlanted;
    random_right += vr.tag == VerdictTag::kRandom;
    std::vector<std::string> f = {std::to_string(t),         std::to_string(ps),      std::to_string(rs),
                                  std::to_string(ss),        format_number(vp.holdout_loss), to_string(vp.tag),
                                  format_number(vr.holdout_loss), to_string(vr.tag), win ? "1" : "0"};
    if (options.timestamp) f.push_back(format_number(elapsed(t0)));
    report.table.rows.push_back(std::move(f));
  }
  report.summary.emplace_back("threshold", format_number(xor_threshold(config.eta)));
  report.summary.emplace_back("pairs", std::to_string(config.trials));
  report.summary.emplace_back("wins", std::to_string(wins));
  report.summary.emplace_back("planted_accuracy", format_number(static_cast<double>(planted_right) / config.trials));
  report.summary.emplace_back("random_accuracy", format_number(static_cast<double>(random_right) / config.trials));
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  switch (config.kind) {
    case ExperimentKind::kScalingCompletion:
    case ExperimentKind::kScalingSensing: return run_scaling(config, options);
    case ExperimentKind::kTheorySuite: return run_theory_suite(config, options);
    case ExperimentKind::kRademacher: return run_rademacher(config, options);
    case ExperimentKind::kReProbe: return run_re_probe(config, options);
    case ExperimentKind::kXorSweep: return run_xor(config, options);
  }
  throw std::invalid_argument("unknown experiment");
}

void write_report_csv(std::ostream& os, const ExperimentReport& report, const RunOptions& options) {
  if (options.timestamp) os << "# " << to_string(report.kind) << " generated " << utc_now() << "\r\n";
  report.table.write(os);
}

void write_manifest(std::ostream& os, const ExperimentConfig& config, const ExperimentReport& report,
                    const RunOptions& options) {
  nlohmann::ordered_json j;
  j["version"] = version_string();
  if (options.timestamp) j["generated"] = utc_now();
  for (const auto& [k, v] : config.entries()) j["config"][k] = v;
  std::vector<std::uint64_t> seeds;
  if (config.kind == ExperimentKind::kScalingCompletion || config.kind == ExperimentKind::kScalingSensing) {
    for (int t = 0; t < config.trials; ++t) seeds.push_back(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
  } else {
    seeds.push_back(config.seed);
  }
  j["seeds"] = seeds;
  const NormOptions n = config.norm_options();
  j["solver"] = {{"eps_primal", n.solver.eps_primal}, {"eps_dual", n.solver.eps_dual},
                 {"eps_gap", n.solver.eps_gap},       {"max_iters", n.solver.max_iters},
                 {"alpha", n.solver.alpha},           {"rho_x", n.solver.rho_x},
                 {"scale", n.solver.scale},           {"adaptive_scale", n.solver.adaptive_scale},
                 {"equilibration_passes", n.solver.equilibration_passes}};
  for (const auto& [k, v] : report.summary) j["summary"][k] = v;
  j["passed"] = report.passed;
  j["failed_rows"] = report.failed_rows;
  os << j.dump(2) << "\n";
}

std::string version_string() { return std::string("sos-tensor ") + kVersion; }

}  // namespace sos_tensor
