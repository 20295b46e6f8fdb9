#include "sos_tensor/sos_norms.hpp"

#include <chrono>
#include <cmath>

namespace sos_tensor {

namespace {

struct Built {
  MomentProgram program;
  conic::ConicProblem problem;
};

Built build_injective(const Tensor3& x, int k, bool parity_reduce) {
  if (!x.all_finite()) throw std::invalid_argument("injective_norm: non-finite tensor");
  MomentProgram program(x.dim(), k, parity_reduce);
  conic::ProblemBuilder b;
  const int off = program.add_variables(b);
  const int d = x.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) b.set_cost(off + program.trilinear_index(i, j, l), -x(i, j, l));
  b.add_equality(std::vector<conic::Term>{{off + program.constant_index(), 1.0}}, 1.0);
  program.add_ideal_constraints(b, off);
  program.add_psd_blocks(b, off);
  return {std::move(program), b.build()};
}

Built build_nuclear(const Tensor3& t, int k, bool parity_reduce) {
  if (!t.all_finite()) throw std::invalid_argument("nuclear_norm: non-finite tensor");
  MomentProgram program(t.dim(), k, parity_reduce);
  conic::ProblemBuilder b;
  const int off = program.add_variables(b);
  const int d = t.dim();
  b.set_cost(off + program.constant_index(), 1.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l)
        b.add_equality(std::vector<conic::Term>{{off + program.trilinear_index(i, j, l), 1.0}}, t(i, j, l));
  program.add_ideal_constraints(b, off);
  program.add_psd_blocks(b, off);
  return {std::move(program), b.build()};
}

SolveDiagnostics diagnostics_of(const conic::ConicSolution& sol, double seconds) {
  return {sol.status, sol.residuals, sol.cone_violation, sol.iterations, seconds};
}

conic::ConicSolution run(const conic::ConicProblem& p, const conic::SolverSettings& s, const char* what,
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

}  // namespace

bool default_parity_reduce(const NormOptions& options, int /*k*/) { return options.parity_reduce.value_or(true); }

conic::ConicProblem injective_problem(const Tensor3& x, int k, bool parity_reduce) {
  return build_injective(x, k, parity_reduce).problem;
}

conic::ConicProblem nuclear_problem(const Tensor3& t, int k, bool parity_reduce) {
  return build_nuclear(t, k, parity_reduce).problem;
}

NormResult injective_norm(const Tensor3& x, int k, const NormOptions& options) {
  Built built = build_injective(x, k, default_parity_reduce(options, k));
  double seconds = 0.0;
  const conic::ConicSolution sol = run(built.problem, options.solver, "injective_norm", seconds);
  return {std::max(0.0, -sol.objective), built.program.moment_matrix(sol.x, 0), diagnostics_of(sol, seconds)};
}

NormResult nuclear_norm(const Tensor3& t, int k, const NormOptions& options) {
  Built built = build_nuclear(t, k, default_parity_reduce(options, k));
  double seconds = 0.0;
  const conic::ConicSolution sol = run(built.problem, options.solver, "nuclear_norm", seconds);
  return {std::max(0.0, sol.objective), built.program.moment_matrix(sol.x, 0), diagnostics_of(sol, seconds)};
}

Tensor3 subgradient_dual(const OrthogonalTensor& t, const Tensor3& x) {
  if (t.dim() != x.dim()) throw std::invalid_argument("subgradient_dual: dimension mismatch");
  if (!x.all_finite()) throw std::invalid_argument("subgradient_dual: non-finite tensor");
  Tensor3 out(t.dim());
  for (int i = 0; i < t.rank(); ++i) {
    const double lam = t.lambdas()(i);
    if (lam == 0.0) continue;
    out += (lam > 0 ? 1.0 : -1.0) * outer3(Eigen::VectorXd(t.u().col(i)), Eigen::VectorXd(t.v().col(i)),
                                           Eigen::VectorXd(t.w().col(i)));
  }
  out += project_perp(SubspaceProjector::from(t), x);
  return out;
}

SubgradientCheck check_subgradient_inequality(const OrthogonalTensor& t, const Tensor3& tprime, const Tensor3& x,
                                              int k, const NormOptions& options) {
  if (tprime.dim() != t.dim()) throw std::invalid_argument("check_subgradient_inequality: dimension mismatch");
  const Tensor3 dense = t.densify();
  SubgradientCheck c;
  c.nuclear_tprime = nuclear_norm(tprime, k + 2, options).value;
  c.nuclear_t = nuclear_norm(dense, k + 2, options).value;
  c.linear_term = inner(subgradient_dual(t, x), tprime - dense);
  c.slack = c.nuclear_tprime - c.nuclear_t - c.linear_term;
  return c;
}

double check_norm_comparison(const OrthogonalTensor& t, const Tensor3& tprime, const NormOptions& options) {
  if (tprime.dim() != t.dim()) throw std::invalid_argument("check_norm_comparison: dimension mismatch");
  const Tensor3 delta = tprime - t.densify();
  const double f = frobenius(delta);
  if (f == 0.0) return 0.0;
  return nuclear_norm(delta, 4, options).value / f;
}

bool pseudo_cs_check(const PseudoMomentMatrix& m, const LinearPoly& f, const LinearPoly& g) {
  if (m.basis().half_degree() < 1) throw std::invalid_argument("pseudo_cs_check: basis lacks linear monomials");
  const double fg = m.expect_product(f, g);
  const double ff = m.expect_product(f, f);
  const double gg = m.expect_product(g, g);
  return fg <= std::sqrt(std::max(0.0, ff) * std::max(0.0, gg)) + 1e-8;
}

}  // namespace sos_tensor
