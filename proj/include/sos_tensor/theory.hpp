#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sos_tensor/orthogonal.hpp"
#include "sos_tensor/sos_norms.hpp"

namespace sos_tensor {

/// Outcome of one numerical check: `observed` is the worst value seen and
/// `bound` the value it is compared against.
struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  int trials = 0;
  std::string detail;
};

/// Gaussian tensor with iid N(0,1) entries.
Tensor3 random_tensor(int d, std::uint64_t seed);

/// |Q_par X + Q_perp X - X|_F / |X|_F <= 1e-8 on random pairs. With
/// `corrupt`, the perpendicular family drops its last term.
CheckResult check_projection_completeness(int d, int trials, std::uint64_t seed, bool corrupt = false);

/// Q_perp annihilates u_i (x) v_i (x) z, u_i (x) y (x) w_i and x (x) v_i (x) w_i.
CheckResult check_kernel_property(int d, int trials, std::uint64_t seed);

/// |nuc_k - sum|lambda|| and |inj_k - max|lambda|| for one orthogonal tensor.
CheckResult check_orthogonal_exactness(const OrthogonalTensor& t, int k, double tol, const NormOptions& opts = {});

/// |T|_F <= |T|_nuc4 + tol and |X|_inj4 <= |X|_F + tol on Gaussian tensors.
CheckResult check_norm_ordering(int d, int trials, std::uint64_t seed, double tol, const NormOptions& opts = {});

/// nuc4 <= nuc6 + tol and inj6 <= inj4 + tol.
CheckResult check_degree_monotonicity(int d, int trials, std::uint64_t seed, double tol, const NormOptions& opts = {});

/// <X, T> <= (1 + rel) inj4(X) nuc4(T). Half of the pairs are aligned:
/// T is the certificate tensor of X plus a small perturbation.
CheckResult check_duality(int d, int trials, std::uint64_t seed, double rel, const NormOptions& opts = {});

/// Minimum subgradient slack over trials with |X|_inj(k) = 1/64.
CheckResult check_subgradient(int d, const std::vector<int>& ranks, int trials_per_rank, int k, std::uint64_t seed,
                              double tol, const NormOptions& opts = {});

/// Maximum |Delta|_nuc4 / |Delta|_F over T' rescaled into the degree-6 ball
/// of the benchmark; compared with 68 r.
CheckResult check_norm_comparison_suite(const OrthogonalTensor& t, int trials, std::uint64_t seed,
                                        const NormOptions& opts = {});

/// Pseudo Cauchy-Schwarz on injective certificates with random linear f, g.
CheckResult check_pseudo_cs(int d, int certificates, int pairs_per_certificate, std::uint64_t seed,
                            const NormOptions& opts = {});

/// Injective upper bound on Dirac mixtures: block-constant norms against the
/// product of second moments, and |z| <= 1 mixtures against the AM-GM form.
CheckResult check_injective_upper_bound(int d, int trials, std::uint64_t seed, double tol,
                                        const NormOptions& opts = {});

/// inj4(Q_perp X) <= 4 inj4(X) + tol and inj4((P_U x P_V x P_W) X) <= inj4(X) + tol.
CheckResult check_projection_contraction(int d, int trials, std::uint64_t seed, double tol,
                                         const NormOptions& opts = {});

/// nuc4(T) <= sqrt(min(r2, r3)) |flatten_1(T)|_* + tol on low multilinear rank T.
CheckResult check_flattening_bound(int d, int trials, std::uint64_t seed, double tol, const NormOptions& opts = {});

}  // namespace sos_tensor
