#include "sos_tensor/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace sos_tensor {

namespace {

double clamp(double v, double r) { return std::clamp(v, -r, r); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// Mean and variance of clip(mu + sigma * N(0,1), -r, r).
EntryMoments clipped_normal(double mu, double sigma, double r) {
  if (sigma == 0.0) return {clamp(mu, r), 0.0};
  if (!std::isfinite(r)) return {mu, sigma * sigma};
  const double a = (-r - mu) / sigma;
  const double b = (r - mu) / sigma;
  const double fa = std_normal_cdf(a), fb = std_normal_cdf(b);
  const double pa = std_normal_pdf(a), pb = std_normal_pdf(b);
  const double tail_lo = fa, tail_hi = 1.0 - fb, mid = fb - fa;
  const double m1 = -r * tail_lo + r * tail_hi + mu * mid + sigma * (pa - pb);
  const double m2 = r * r * (tail_lo + tail_hi) + mu * mu * mid + 2.0 * mu * sigma * (pa - pb) +
                    sigma * sigma * (mid + a * pa - b * pb);
  return {m1, std::max(0.0, m2 - m1 * m1)};
}

template <class Teacher>
double respond_teacher(const Teacher& m, const Measurement& x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double noise = m.noise_std > 0 ? m.noise_std * normal(rng) : 0.0;
  const double v = measure(m.teacher, x) + noise;
  return std::holds_alternative<Entry>(x) ? clamp(v, m.clip) : v;
}

void check_entry(const Entry& e, int d) {
  if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= d || e.j >= d || e.k >= d) {
    throw std::out_of_range("Entry index outside [0, d)");
  }
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void expect_token(std::istream& is, const std::string& want) {
  std::string tok;
  if (!(is >> tok) || tok != want) throw std::runtime_error("read_dataset: expected '" + want + "'");
}

double read_double(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw std::runtime_error("read_dataset: truncated input");
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("read_dataset: bad number '" + tok + "'");
  }
}

}  // namespace

std::string to_string(Law law) { return law == Law::kCompletion ? "completion" : "gaussian"; }

Law parse_law(const std::string& s) {
  if (s == "completion") return Law::kCompletion;
  if (s == "gaussian") return Law::kGaussian;
  throw std::invalid_argument("unknown law '" + s + "'");
}

double measure(const Tensor3& t, const Measurement& m) {
  if (const auto* e = std::get_if<Entry>(&m)) {
    check_entry(*e, t.dim());
    return t(e->i, e->j, e->k);
  }
  return inner(t, std::get<Tensor3>(m));
}

void Dataset::validate() const {
  if (d < 1) throw std::invalid_argument("Dataset: d must be positive");
  for (const auto& s : samples) {
    if (law == Law::kCompletion) {
      const auto* e = std::get_if<Entry>(&s.x);
      if (!e) throw std::invalid_argument("Dataset: completion samples must be entries");
      check_entry(*e, d);
      if (std::abs(s.y) > bound) throw std::invalid_argument("Dataset: response exceeds declared bound");
    } else {
      const auto* t = std::get_if<Tensor3>(&s.x);
      if (!t || t->dim() != d) throw std::invalid_argument("Dataset: gaussian samples must be dense d-tensors");
      if (!t->all_finite()) throw std::invalid_argument("Dataset: non-finite measurement");
    }
    if (!std::isfinite(s.y)) throw std::invalid_argument("Dataset: non-finite response");
  }
}

void write_dataset(std::ostream& os, const Dataset& data) {
  data.validate();
  os << "sos-tensor-dataset 1\n";
  os << "law " << to_string(data.law) << " d " << data.d << " n " << data.size() << " R " << format_double(data.bound)
     << " seed " << data.seed << "\n";
  os << "model " << (data.model.empty() ? "-" : data.model) << "\n";
  for (const auto& s : data.samples) {
    if (const auto* e = std::get_if<Entry>(&s.x)) {
      os << e->i << ' ' << e->j << ' ' << e->k;
    } else {
      const auto& v = std::get<Tensor3>(s.x).vec();
      for (Eigen::Index q = 0; q < v.size(); ++q) os << (q ? " " : "") << format_double(v(q));
    }
    os << ' ' << format_double(s.y) << '\n';
  }
}

Dataset read_dataset(std::istream& is) {
  expect_token(is, "sos-tensor-dataset");
  int version = 0;
  if (!(is >> version) || version != 1) throw std::runtime_error("read_dataset: unsupported version");
  Dataset data;
  std::string law;
  int n = 0;
  expect_token(is, "law");
  is >> law;
  data.law = parse_law(law);
  expect_token(is, "d");
  is >> data.d;
  expect_token(is, "n");
  is >> n;
  expect_token(is, "R");
  data.bound = read_double(is);
  expect_token(is, "seed");
  is >> data.seed;
  expect_token(is, "model");
  is >> std::ws;
  std::getline(is, data.model);
  if (!is || data.d < 1 || n < 0) throw std::runtime_error("read_dataset: bad header");
  data.samples.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    Sample s;
    if (data.law == Law::kCompletion) {
      Entry e;
      if (!(is >> e.i >> e.j >> e.k)) throw std::runtime_error("read_dataset: truncated sample");
      s.x = e;
    } else {
      Tensor3 x(data.d);
      for (Eigen::Index q = 0; q < x.vec().size(); ++q) x.vec()(q) = read_double(is);
      s.x = std::move(x);
    }
    s.y = read_double(is);
    data.samples.push_back(std::move(s));
  }
  data.validate();
  return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_dataset(os, data);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_dataset(is);
}

std::vector<Measurement> sample_completion(int d, int n, std::uint64_t seed) {
  if (d < 1 || n < 1) throw std::invalid_argument("sample_completion: d and n must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> idx(0, d - 1);
  std::vector<Measurement> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    Entry e;
    e.i = idx(rng);
    e.j = idx(rng);
    e.k = idx(rng);
    out.emplace_back(e);
  }
  return out;
}

std::vector<Measurement> sample_gaussian(int d, int n, std::uint64_t seed) {
  if (d < 1 || n < 1) throw std::invalid_argument("sample_gaussian: d and n must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Measurement> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    Tensor3 x(d);
    for (Eigen::Index q = 0; q < x.vec().size(); ++q) x.vec()(q) = normal(rng);
    out.emplace_back(std::move(x));
  }
  return out;
}

int model_dim(const ResponseModel& model) {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LookupTable>) {
          return m.means.dim();
        } else {
          return m.teacher.dim();
        }
      },
      model);
}

double model_bound(const ResponseModel& model) {
  return std::visit([](const auto& m) { return m.clip; }, model);
}

std::string describe(const ResponseModel& model) {
  std::ostringstream os;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, WellSpecified>) {
          os << "well-specified sigma=" << m.noise_std;
        } else if constexpr (std::is_same_v<M, MisspecifiedTeacher>) {
          os << "misspecified-teacher sigma=" << m.noise_std;
        } else {
          os << "lookup-table noise=" << m.noise;
        }
        os << " R=" << format_double(m.clip);
      },
      model);
  return os.str();
}

double respond(const ResponseModel& model, const Measurement& x, std::uint64_t seed) {
  if (const auto* e = std::get_if<Entry>(&x)) {
    check_entry(*e, model_dim(model));
  } else if (std::get<Tensor3>(x).dim() != model_dim(model)) {
    throw std::invalid_argument("respond: dimension mismatch");
  }
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LookupTable>) {
          const auto* e = std::get_if<Entry>(&x);
          if (!e) throw std::invalid_argument("respond: lookup tables answer entry measurements only");
          double v = m.means(e->i, e->j, e->k);
          if (m.noise > 0) {
            std::mt19937_64 rng(seed);
            v += (rng() & 1u) ? m.noise : -m.noise;
          }
          return clamp(v, m.clip);
        } else {
          return respond_teacher(m, x, seed);
        }
      },
      model);
}

Dataset make_dataset(Law law, int n, const ResponseModel& model, std::uint64_t seed) {
  const int d = model_dim(model);
  Dataset data;
  data.law = law;
  data.d = d;
  data.bound = law == Law::kCompletion ? model_bound(model) : std::numeric_limits<double>::infinity();
  data.seed = seed;
  data.model = describe(model);
  auto xs = law == Law::kCompletion ? sample_completion(d, n, seed) : sample_gaussian(d, n, seed);
  std::mt19937_64 noise_seeds(seed ^ 0x9e3779b97f4a7c15ULL);
  data.samples.reserve(xs.size());
  for (auto& x : xs) {
    const double y = respond(model, x, noise_seeds());
    data.samples.push_back({std::move(x), y});
  }
  return data;
}

Eigen::VectorXd apply_design(const Dataset& data, const Tensor3& t) {
  if (t.dim() != data.d) throw std::invalid_argument("apply_design: dimension mismatch");
  Eigen::VectorXd out(data.size());
  for (int s = 0; s < data.size(); ++s) out(s) = measure(t, data.samples[static_cast<std::size_t>(s)].x);
  return out;
}

Eigen::VectorXd responses(const Dataset& data) {
  Eigen::VectorXd out(data.size());
  for (int s = 0; s < data.size(); ++s) out(s) = data.samples[static_cast<std::size_t>(s)].y;
  return out;
}

double PopulationModel::covariance_scale() const {
  const int d = model_dim(model);
  return law == Law::kCompletion ? 1.0 / (static_cast<double>(d) * d * d) : 1.0;
}

EntryMoments entry_moments(const ResponseModel& model, int i, int j, int k) {
  return std::visit(
      [&](const auto& m) -> EntryMoments {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LookupTable>) {
          const double mu = m.means(i, j, k);
          const double hi = clamp(mu + m.noise, m.clip), lo = clamp(mu - m.noise, m.clip);
          const double mean = 0.5 * (hi + lo);
          return {mean, 0.25 * (hi - lo) * (hi - lo)};
        } else {
          return clipped_normal(m.teacher(i, j, k), m.noise_std, m.clip);
        }
      },
      model);
}

double population_risk(const PopulationModel& pop, const Tensor3& t) {
  const int d = model_dim(pop.model);
  if (t.dim() != d) throw std::invalid_argument("population_risk: dimension mismatch");
  if (pop.law == Law::kCompletion) {
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          const EntryMoments em = entry_moments(pop.model, i, j, k);
          const double bias = t(i, j, k) - em.mean;
          sum += bias * bias + em.variance;
        }
      }
    }
    return sum / (static_cast<double>(d) * d * d);
  }
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LookupTable>) {
          throw UnsupportedModel("population_risk: lookup tables have no gaussian-law closed form");
        } else {
          const double f = frobenius(t - m.teacher);
          return f * f + m.noise_std * m.noise_std;
        }
      },
      pop.model);
}

ReProbeReport re_probe(const Dataset& data, const PopulationModel& pop, const std::vector<Tensor3>& deltas,
                       double c) {
  if (deltas.empty()) throw std::invalid_argument("re_probe: empty probe set");
  if (data.size() == 0) throw std::invalid_argument("re_probe: empty dataset");
  ReProbeReport report;
  report.c = c;
  const double scale = pop.covariance_scale();
  for (const auto& delta : deltas) {
    if (frobenius(delta) == 0.0) throw std::invalid_argument("re_probe: zero probe");
    ReProbeRow row;
    const double f = frobenius(delta);
    row.population = scale * f * f;
    row.empirical = apply_design(data, delta).squaredNorm() / data.size();
    row.slack = row.population - c * row.empirical;
    report.gamma_hat = std::max(report.gamma_hat, row.slack);
    report.rows.push_back(row);
  }
  return report;
}

Tensor3 signed_entry_sum(int d, const std::vector<Measurement>& entries, const std::vector<double>& signs) {
  if (entries.size() != signs.size()) throw std::invalid_argument("signed_entry_sum: length mismatch");
  Tensor3 t(d);
  for (std::size_t s = 0; s < entries.size(); ++s) {
    const auto* e = std::get_if<Entry>(&entries[s]);
    if (!e) throw std::invalid_argument("signed_entry_sum: entry measurements only");
    check_entry(*e, d);
    t(e->i, e->j, e->k) += signs[s];
  }
  return t;
}

RademacherEstimate rademacher_estimate(int d, int n, int trials, std::uint64_t seed, const RademacherBudget& budget,
                                       const NormOptions& options) {
  if (trials < 1) throw std::invalid_argument("rademacher_estimate: trials must be >= 1");
  if (d > budget.max_d || n > budget.max_n) {
    std::ostringstream os;
    os << "rademacher_estimate: d=" << d << ", n=" << n << " exceeds the budget (d <= " << budget.max_d
       << ", n <= " << budget.max_n << "); each trial solves a degree-4 program in 3d variables";
    throw BudgetExceeded(os.str());
  }
  RademacherEstimate est;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const auto entries = sample_completion(d, n, rng());
    std::vector<double> signs(static_cast<std::size_t>(n));
    for (auto& s : signs) s = (rng() & 1u) ? 1.0 : -1.0;
    est.values.push_back(injective_norm(signed_entry_sum(d, entries, signs), 4, options).value);
  }
  const Eigen::Map<const Eigen::VectorXd> v(est.values.data(), static_cast<Eigen::Index>(est.values.size()));
  est.mean = v.mean();
  est.stddev = trials > 1 ? std::sqrt((v.array() - est.mean).square().sum() / (trials - 1)) : 0.0;
  return est;
}

}  // namespace sos_tensor
