#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sos_tensor/conic.hpp"
#include "sos_tensor/measurement.hpp"
#include "sos_tensor/orthogonal.hpp"
#include "sos_tensor/sos_norms.hpp"

namespace sos_tensor {

enum class ErmMethod { kDirect, kFrankWolfe };

std::string to_string(ErmMethod m);
ErmMethod parse_method(const std::string& s);

struct ErmConfig {
  double tau = 1.0;
  /// Entrywise box; completion datasets only.
  std::optional<double> R;
  int degree = 4;
  ErmMethod method = ErmMethod::kDirect;
  int fw_iterations = 200;
  /// Frank-Wolfe starting point (zero tensor if unset); must lie in the ball.
  std::optional<Tensor3> fw_init;
  NormOptions norm;

  void validate() const;
};

struct ErmResult {
  Tensor3 t_hat;
  double empirical_risk = 0.0;
  /// Upper bound on the SoS nuclear norm carried by the returned witness.
  double certified_nuclear = 0.0;
  double max_abs_entry = 0.0;
  ErmMethod method = ErmMethod::kDirect;
  /// Frank-Wolfe: best duality gap seen after each iteration.
  std::vector<double> trace;
  SolveDiagnostics diagnostics;
};

/// (1/n) sum_t (<T, X_t> - y_t)^2.
double empirical_risk(const Dataset& data, const Tensor3& t);

/// Literal ERM over {T : |T|_nuc(k) <= tau} (and |T|_inf <= R) as one conic
/// program; R is ignored for gaussian datasets.
ErmResult erm_direct(const Dataset& data, const ErmConfig& config);

/// Conditional gradient over tau * K_k with an injective-norm oracle; no box.
ErmResult erm_frank_wolfe(const Dataset& data, const ErmConfig& config);

/// ERM over {T : |flatten(T, mode)|_* <= tau_matrix}.
ErmResult erm_unfolding(const Dataset& data, int mode, double tau_matrix,
                        const conic::SolverSettings& settings = {});

/// population_risk(T_hat) - population_risk(densify(benchmark)).
double excess_risk(const PopulationModel& pop, const ErmResult& result, const OrthogonalTensor& benchmark);

/// Matrix nuclear norm as min (tr W1 + tr W2) / 2 over [[W1, M], [M', W2]] PSD.
conic::ConicProblem matrix_nuclear_problem(const Eigen::MatrixXd& m);
double matrix_nuclear_sdp(const Eigen::MatrixXd& m, const conic::SolverSettings& settings = {});

}  // namespace sos_tensor
