#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "sos_tensor/conic.hpp"
#include "sos_tensor/moments.hpp"
#include "sos_tensor/orthogonal.hpp"
#include "sos_tensor/tensor.hpp"

namespace sos_tensor {

/// Slack allowed in every comparison between SoS norm values.
inline constexpr double kSolverTol = 1e-5;

/// Raised when the conic solver does not reach an optimal status.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, conic::SolveStatus status, conic::Residuals residuals, int iterations)
      : std::runtime_error(what), status(status), residuals(residuals), iterations(iterations) {}

  conic::SolveStatus status;
  conic::Residuals residuals;
  int iterations;
};

struct NormOptions {
  /// Unset: parity reduction on at every degree.
  std::optional<bool> parity_reduce;
  conic::SolverSettings solver;
};

struct SolveDiagnostics {
  conic::SolveStatus status = conic::SolveStatus::kMaxIters;
  conic::Residuals residuals;
  double cone_violation = 0.0;
  int iterations = 0;
  double seconds = 0.0;
};

struct NormResult {
  double value = 0.0;
  PseudoMomentMatrix certificate;
  SolveDiagnostics diagnostics;
};

bool default_parity_reduce(const NormOptions& options, int k);

/// max <X, E~[x (x) y (x) z]> over degree-k pseudo-distributions on the
/// product of unit spheres.
conic::ConicProblem injective_problem(const Tensor3& x, int k, bool parity_reduce);
NormResult injective_norm(const Tensor3& x, int k, const NormOptions& options = {});

/// min E~[1] over homogenized degree-k pseudo-moments whose trilinear block
/// equals T.
conic::ConicProblem nuclear_problem(const Tensor3& t, int k, bool parity_reduce);
NormResult nuclear_norm(const Tensor3& t, int k, const NormOptions& options = {});

/// sum_i sign(lambda_i) u_i (x) v_i (x) w_i + Q_perp(X).
Tensor3 subgradient_dual(const OrthogonalTensor& t, const Tensor3& x);

struct SubgradientCheck {
  double slack = 0.0;
  double nuclear_tprime = 0.0;
  double nuclear_t = 0.0;
  double linear_term = 0.0;
};

/// |T'|_nuc(k+2) - |T|_nuc(k+2) - <subgradient_dual(T, X), T' - T>.
SubgradientCheck check_subgradient_inequality(const OrthogonalTensor& t, const Tensor3& tprime, const Tensor3& x,
                                              int k, const NormOptions& options = {});

/// |T' - T|_nuc4 / |T' - T|_F, or 0 when T' = T.
double check_norm_comparison(const OrthogonalTensor& t, const Tensor3& tprime, const NormOptions& options = {});

/// E~[fg] <= sqrt(E~[f^2] E~[g^2]) + 1e-8.
bool pseudo_cs_check(const PseudoMomentMatrix& m, const LinearPoly& f, const LinearPoly& g);

}  // namespace sos_tensor
