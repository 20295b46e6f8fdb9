#include "sos_tensor/learners.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "sos_tensor/conic_builder.hpp"

namespace sos_tensor {

namespace {

using conic::ConeKind;
using conic::Term;

void check_budget(int d, int k) {
  const int max_d = k == 6 ? 4 : 8;
  if (d > max_d) {
    throw BudgetExceeded("ERM at degree " + std::to_string(k) + " is limited to d <= " + std::to_string(max_d));
  }
}

// Appends the terms of <T, X> given the variable index of each entry of T.
template <class VarOf>
void design_terms(const Measurement& x, int d, double sign, const VarOf& var_of, std::vector<Term>& terms) {
  if (const auto* e = std::get_if<Entry>(&x)) {
    terms.push_back({var_of(e->i, e->j, e->k), sign});
    return;
  }
  const Tensor3& t = std::get<Tensor3>(x);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) terms.push_back({var_of(i, j, k), sign * t(i, j, k)});
}

// Second-order cone (t, X_n(T) - y); the epigraph variable is `tvar`.
template <class VarOf>
void add_loss_cone(conic::ProblemBuilder& b, const Dataset& data, int tvar, const VarOf& var_of) {
  b.open_block(ConeKind::kSoc, data.size() + 1);
  b.add_row({{tvar, -1.0}}, 0.0);
  std::vector<Term> terms;
  for (const auto& s : data.samples) {
    terms.clear();
    design_terms(s.x, data.d, -1.0, var_of, terms);
    b.add_row(terms, -s.y);
  }
}

conic::ConicSolution solve_checked(const conic::ConicProblem& p, const conic::SolverSettings& s, const char* what,
                                   double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  conic::ConicSolution sol = conic::solve(p, s);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!sol.optimal()) {
    throw SolverError(std::string(what) + ": solver returned " + conic::to_string(sol.status), sol.status,
                      sol.residuals, sol.iterations);
  }
  return sol;
}

// Variable index of Z(r, c) for the lower-triangle parameterization of a
// symmetric matrix of side n.
int lower_var(int r, int c, int n) {
  if (r < c) std::swap(r, c);
  return conic::svec_index(r, c, n);
}

void add_symmetric_psd(conic::ProblemBuilder& b, int first_var, int side) {
  const double r2 = std::sqrt(2.0);
  b.open_block(ConeKind::kPsd, side);
  for (int c = 0; c < side; ++c)
    for (int r = c; r < side; ++r) b.add_row({{first_var + lower_var(r, c, side), r == c ? -1.0 : -r2}}, 0.0);
}

// Row and column of entry (i,j,k) in flatten(T, mode).
std::pair<int, int> flat_position(int mode, int d, int i, int j, int k) {
  switch (mode) {
    case 1: return {i, j * d + k};
    case 2: return {j, i * d + k};
    case 3: return {k, i * d + j};
    default: throw std::invalid_argument("flattening mode must be 1, 2 or 3");
  }
}

}  // namespace

std::string to_string(ErmMethod m) { return m == ErmMethod::kDirect ? "direct" : "frank-wolfe"; }

ErmMethod parse_method(const std::string& s) {
  if (s == "direct" || s == "direct-conic") return ErmMethod::kDirect;
  if (s == "frank-wolfe" || s == "fw") return ErmMethod::kFrankWolfe;
  throw std::invalid_argument("unknown ERM method '" + s + "'");
}

void ErmConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("ErmConfig: tau must be positive");
  if (R && !(*R > 0.0)) throw std::invalid_argument("ErmConfig: R must be positive");
  if (degree != 4 && degree != 6) throw std::invalid_argument("ErmConfig: degree must be 4 or 6");
  if (fw_iterations < 1) throw std::invalid_argument("ErmConfig: fw_iterations must be positive");
}

double empirical_risk(const Dataset& data, const Tensor3& t) {
  if (data.size() == 0) throw std::invalid_argument("empirical_risk: empty dataset");
  return (apply_design(data, t) - responses(data)).squaredNorm() / data.size();
}

ErmResult erm_direct(const Dataset& data, const ErmConfig& config) {
  config.validate();
  if (data.size() == 0) throw std::invalid_argument("erm_direct: empty dataset");
  data.validate();
  check_budget(data.d, config.degree);
  const int d = data.d;

  MomentProgram program(d, config.degree, default_parity_reduce(config.norm, config.degree));
  conic::ProblemBuilder b;
  const int off = program.add_variables(b);
  const int tvar = b.add_vars(1);
  b.set_cost(tvar, 1.0);
  auto var_of = [&](int i, int j, int k) { return off + program.trilinear_index(i, j, k); };

  b.add_equality(std::vector<Term>{{off + program.constant_index(), 1.0}}, config.tau);
  program.add_ideal_constraints(b, off);
  const bool box = config.R && data.law == Law::kCompletion;
  if (box) {
    b.open_block(ConeKind::kNonneg, 2 * d * d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          b.add_row({{var_of(i, j, k), 1.0}}, *config.R);
          b.add_row({{var_of(i, j, k), -1.0}}, *config.R);
        }
  }
  add_loss_cone(b, data, tvar, var_of);
  program.add_psd_blocks(b, off);

  ErmResult r;
  r.method = ErmMethod::kDirect;
  double seconds = 0.0;
  const conic::ConicSolution sol = solve_checked(b.build(), config.norm.solver, "erm_direct", seconds);
  r.t_hat = program.trilinear_moments(sol.x, off);
  r.empirical_risk = empirical_risk(data, r.t_hat);
  r.certified_nuclear = sol.x(off + program.constant_index());
  r.max_abs_entry = linf(r.t_hat);
  r.diagnostics = {sol.status, sol.residuals, sol.cone_violation, sol.iterations, seconds};
  return r;
}

ErmResult erm_frank_wolfe(const Dataset& data, const ErmConfig& config) {
  config.validate();
  if (data.size() == 0) throw std::invalid_argument("erm_frank_wolfe: empty dataset");
  data.validate();
  check_budget(data.d, config.degree);
  const int d = data.d;
  const Eigen::VectorXd y = responses(data);

  Tensor3 t = config.fw_init ? *config.fw_init : Tensor3(d);
  if (t.dim() != d) throw std::invalid_argument("erm_frank_wolfe: init dimension mismatch");
  double bound = config.fw_init ? nuclear_norm(t, config.degree, config.norm).value : 0.0;
  if (bound > config.tau * (1.0 + 2.0 * kSolverTol)) throw std::invalid_argument("erm_frank_wolfe: init outside ball");

  ErmResult r;
  r.method = ErmMethod::kFrankWolfe;
  r.t_hat = t;
  r.empirical_risk = empirical_risk(data, t);
  r.certified_nuclear = bound;
  double best_gap = std::numeric_limits<double>::infinity();

  for (int s = 0; s < config.fw_iterations; ++s) {
    const Eigen::VectorXd resid = apply_design(data, t) - y;
    Tensor3 grad(d);
    for (int q = 0; q < data.size(); ++q) {
      const double w = 2.0 * resid(q) / data.size();
      const auto& x = data.samples[static_cast<std::size_t>(q)].x;
      if (const auto* e = std::get_if<Entry>(&x)) {
        grad(e->i, e->j, e->k) += w;
      } else {
        grad += w * std::get<Tensor3>(x);
      }
    }
    if (frobenius(grad) == 0.0) {
      best_gap = 0.0;
      r.trace.push_back(best_gap);
      break;
    }
    // argmin_{S in tau K} <grad, S> = tau * E~[x (x) y (x) z] at the maximizer for -grad.
    Tensor3 neg = -1.0 * grad;
    const NormResult lmo = injective_norm(neg, config.degree, config.norm);
    r.diagnostics.iterations += lmo.diagnostics.iterations;
    r.diagnostics.seconds += lmo.diagnostics.seconds;
    const Tensor3 vertex = config.tau * extract_moment_tensor(lmo.certificate);
    const double gap = inner(grad, t - vertex);
    best_gap = std::min(best_gap, gap);
    r.trace.push_back(best_gap);
    if (gap <= 1e-12 * (1.0 + r.empirical_risk)) break;

    const double eta = 2.0 / (s + 2.0);
    t = (1.0 - eta) * t + eta * vertex;
    bound = (1.0 - eta) * bound + eta * config.tau * lmo.certificate.normalization();
    const double risk = empirical_risk(data, t);
    if (risk < r.empirical_risk) {
      r.t_hat = t;
      r.empirical_risk = risk;
      r.certified_nuclear = bound;
    }
  }
  r.max_abs_entry = linf(r.t_hat);
  r.diagnostics.status = conic::SolveStatus::kOptimal;
  return r;
}

ErmResult erm_unfolding(const Dataset& data, int mode, double tau_matrix, const conic::SolverSettings& settings) {
  if (data.size() == 0) throw std::invalid_argument("erm_unfolding: empty dataset");
  if (!(tau_matrix > 0.0)) throw std::invalid_argument("erm_unfolding: tau_matrix must be positive");
  data.validate();
  const int d = data.d;
  flat_position(mode, d, 0, 0, 0);
  const int side = d + d * d;

  conic::ProblemBuilder b;
  const int zoff = b.add_vars(side * (side + 1) / 2);
  const int tvar = b.add_vars(1);
  b.set_cost(tvar, 1.0);
  // Entry (i,j,k) of T sits in the off-diagonal block Z(d + col, row).
  auto var_of = [&](int i, int j, int k) {
    const auto [row, col] = flat_position(mode, d, i, j, k);
    return zoff + lower_var(d + col, row, side);
  };

  b.open_block(ConeKind::kNonneg, 1);
  std::vector<Term> trace;
  for (int q = 0; q < side; ++q) trace.push_back({zoff + lower_var(q, q, side), 0.5});
  b.add_row(trace, tau_matrix);
  add_loss_cone(b, data, tvar, var_of);
  add_symmetric_psd(b, zoff, side);

  ErmResult r;
  r.method = ErmMethod::kDirect;
  double seconds = 0.0;
  const conic::ConicSolution sol = solve_checked(b.build(), settings, "erm_unfolding", seconds);
  Tensor3 t(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) t(i, j, k) = sol.x(var_of(i, j, k));
  r.t_hat = std::move(t);
  r.empirical_risk = empirical_risk(data, r.t_hat);
  r.certified_nuclear = matrix_nuclear(flatten(r.t_hat, mode));
  r.max_abs_entry = linf(r.t_hat);
  r.diagnostics = {sol.status, sol.residuals, sol.cone_violation, sol.iterations, seconds};
  return r;
}

double excess_risk(const PopulationModel& pop, const ErmResult& result, const OrthogonalTensor& benchmark) {
  return population_risk(pop, result.t_hat) - population_risk(pop, benchmark.densify());
}

conic::ConicProblem matrix_nuclear_problem(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw std::invalid_argument("matrix_nuclear_problem: non-finite matrix");
  const int p = static_cast<int>(m.rows()), q = static_cast<int>(m.cols());
  const int side = p + q;
  conic::ProblemBuilder b(side * (side + 1) / 2);
  for (int i = 0; i < side; ++i) b.set_cost(lower_var(i, i, side), 0.5);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) b.add_equality(std::vector<Term>{{lower_var(p + j, i, side), 1.0}}, m(i, j));
  add_symmetric_psd(b, 0, side);
  return b.build();
}

double matrix_nuclear_sdp(const Eigen::MatrixXd& m, const conic::SolverSettings& settings) {
  double seconds = 0.0;
  return solve_checked(matrix_nuclear_problem(m), settings, "matrix_nuclear_sdp", seconds).objective;
}

}  // namespace sos_tensor
