#include "sos_tensor/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

namespace sos_tensor {

namespace {

Eigen::VectorXd gaussian_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

Eigen::VectorXd unit_vector(int d, std::mt19937_64& rng) {
  Eigen::VectorXd v = gaussian_vector(d, rng);
  return v / v.norm();
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Weights in [0.5, 2] with random signs.
Eigen::VectorXd random_lambdas(int r, std::mt19937_64& rng, bool signed_weights) {
  Eigen::VectorXd l(r);
  for (int i = 0; i < r; ++i) {
    l(i) = uniform(rng, 0.5, 2.0);
    if (signed_weights && (rng() & 1u)) l(i) = -l(i);
  }
  return l;
}

Tensor3 perp_corrupted(const SubspaceProjector& p, const Tensor3& x) {
  Tensor3 out(x.dim());
  for (int q = 0; q < 3; ++q) out += p.perp_term(q, x);
  return out;
}

// Higher-order power iteration for an approximate maximizer of <T, x y z>.
void power_iteration(const Tensor3& t, Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& z, int iters) {
  const int d = t.dim();
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd nx = Eigen::VectorXd::Zero(d), ny = Eigen::VectorXd::Zero(d), nz = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) nx(i) += t(i, j, k) * y(j) * z(k);
    x = nx / std::max(nx.norm(), 1e-300);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) ny(j) += t(i, j, k) * x(i) * z(k);
    y = ny / std::max(ny.norm(), 1e-300);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) nz(k) += t(i, j, k) * x(i) * y(j);
    z = nz / std::max(nz.norm(), 1e-300);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Tensor3 random_tensor(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Tensor3 t(d);
  for (Eigen::Index q = 0; q < t.vec().size(); ++q) t.vec()(q) = normal(rng);
  return t;
}

CheckResult check_projection_completeness(int d, int trials, std::uint64_t seed, bool corrupt) {
  CheckResult res{"projection completeness", false, 0.0, 1e-8, trials, ""};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const int r = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d));
    const auto ot = random_orthogonal(d, r, random_lambdas(r, rng, true), rng());
    const Tensor3 x = random_tensor(d, rng());
    const SubspaceProjector p = SubspaceProjector::from(ot);
    const Tensor3 perp = corrupt ? perp_corrupted(p, x) : project_perp(p, x);
    res.observed = std::max(res.observed, frobenius(project_parallel(p, x) + perp - x) / frobenius(x));
  }
  res.passed = res.observed <= res.bound;
  res.detail = "max relative residual " + fmt(res.observed);
  return res;
}

CheckResult check_kernel_property(int d, int trials, std::uint64_t seed) {
  CheckResult res{"perp kernel", false, 0.0, 1e-10, trials, ""};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const int r = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d));
    const auto ot = random_orthogonal(d, r, random_lambdas(r, rng, false), rng());
    const SubspaceProjector p = SubspaceProjector::from(ot);
    const Eigen::VectorXd in_u = ot.u() * gaussian_vector(r, rng);
    const Eigen::VectorXd in_v = ot.v() * gaussian_vector(r, rng);
    const Eigen::VectorXd in_w = ot.w() * gaussian_vector(r, rng);
    const Tensor3 cases[3] = {outer3(in_u, in_v, gaussian_vector(d, rng)), outer3(in_u, gaussian_vector(d, rng), in_w),
                              outer3(gaussian_vector(d, rng), in_v, in_w)};
    for (const auto& c : cases) res.observed = std::max(res.observed, frobenius(project_perp(p, c)) / frobenius(c));
  }
  res.passed = res.observed <= res.bound;
  res.detail = "max |Q_perp(X)|/|X| " + fmt(res.observed);
  return res;
}

CheckResult check_orthogonal_exactness(const OrthogonalTensor& t, int k, double tol, const NormOptions& opts) {
  CheckResult res{"orthogonal exactness (k=" + std::to_string(k) + ", d=" + std::to_string(t.dim()) + ")", false, 0.0,
                  tol, 1, ""};
  const Tensor3 dense = t.densify();
  const double nuc = nuclear_norm(dense, k, opts).value;
  const double inj = injective_norm(dense, k, opts).value;
  const double want_nuc = t.nuclear_value();
  const double want_inj = t.lambdas().cwiseAbs().maxCoeff();
  res.observed = std::max(std::abs(nuc - want_nuc), std::abs(inj - want_inj));
  res.passed = res.observed <= tol;
  res.detail = "nuclear " + fmt(nuc) + " (expected " + fmt(want_nuc) + "), injective " + fmt(inj) + " (expected " +
               fmt(want_inj) + ")";
  return res;
}

CheckResult check_norm_ordering(int d, int trials, std::uint64_t seed, double tol, const NormOptions& opts) {
  CheckResult res{"norm ordering", false, -std::numeric_limits<double>::infinity(), tol, trials, ""};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Tensor3 x = random_tensor(d, rng());
    const double f = frobenius(x);
    const double nuc = nuclear_norm(x, 4, opts).value;
    const double inj = injective_norm(x, 4, opts).value;
    res.observed = std::max({res.observed, f - nuc, inj - f});
  }
  res.passed = res.observed <= tol;
  res.detail = "max of |T|_F - nuc4 and inj4 - |X|_F: " + fmt(res.observed);
  return res;
}

CheckResult check_degree_monotonicity(int d, int trials, std::uint64_t seed, double tol, const NormOptions& opts) {
  CheckResult res{"degree monotonicity", false, -std::numeric_limits<double>::infinity(), tol, trials, ""};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Tensor3 x = random_tensor(d, rng());
    const double nuc4 = nuclear_norm(x, 4, opts).value, nuc6 = nuclear_norm(x, 6, opts).value;
    const double inj4 = injective_norm(x, 4, opts).value, inj6 = injective_norm(x, 6, opts).value;
    res.observed = std::max({res.observed, nuc4 - nuc6, inj6 - inj4});
  }
  res.passed = res.observed <= tol;
  res.detail = "max of nuc4 - nuc6 and inj6 - inj4: " + fmt(res.observed);
  return res;
}

CheckResult check_duality(int d, int trials, std::uint64_t seed, double rel, const NormOptions& opts) {
  CheckResult res{"norm duality", false, 0.0, 1.0 + rel, trials, ""};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Tensor3 x = random_tensor(d, rng());
    const NormResult injx = injective_norm(x, 4, opts);
    Tensor3 tt = random_tensor(d, rng());
    if (t % 2 == 1) tt = extract_moment_tensor(injx.certificate) + 1e-3 * tt;
    const double nuc = nuclear_norm(tt, 4, opts).value;
    const double denom = injx.value * nuc;
    if (denom > 0) res.observed = std::max(res.observed, inner(x, tt) / denom);
  }
  res.passed = res.observed <= res.bound;
  res.detail = "max <X,T> / (inj4 nuc4) " + fmt(res.observed);
  return res;
}

CheckResult check_subgradient(int d, const std::vector<int>& ranks, int trials_per_rank, int k, std::uint64_t seed,
                              double tol, const NormOptions& opts) {
  CheckResult res{"subgradient inequality", false, std::numeric_limits<double>::infinity(), -tol, 0, ""};
  std::mt19937_64 rng(seed);
  for (int r : ranks) {
    for (int t = 0; t < trials_per_rank; ++t) {
      const auto ot = random_orthogonal(d, r, random_lambdas(r, rng, true), rng());
      const Tensor3 dense = ot.densify();
      Tensor3 x = random_tensor(d, rng());
      x *= (1.0 / 64.0) / injective_norm(x, k, opts).value;
      const Tensor3 g = random_tensor(d, rng());
      const double scale = frobenius(dense) / frobenius(g);
      Tensor3 tp(d);
      switch (t % 4) {
        case 0: tp = dense + std::pow(10.0, uniform(rng, -2.0, 0.0)) * scale * g; break;
        case 1: tp = scale * g; break;
        case 2: tp = uniform(rng, 0.0, 2.0) * dense + 0.05 * scale * g; break;
        default:
          tp = dense + std::pow(10.0, uniform(rng, -2.0, 0.0)) * scale * project_perp(SubspaceProjector::from(ot), g);
          break;
      }
      const SubgradientCheck c = check_subgradient_inequality(ot, tp, x, k, opts);
      res.observed = std::min(res.observed, c.slack);
      ++res.trials;
    }
  }
  res.passed = res.observed >= -tol;
  res.detail = "min slack " + fmt(res.observed);
  return res;
}

CheckResult check_norm_comparison_suite(const OrthogonalTensor& t, int trials, std::uint64_t seed,
                                        const NormOptions& opts) {
  CheckResult res{"norm comparison", false, 0.0, 68.0 * t.rank(), trials, ""};
  std::mt19937_64 rng(seed);
  const Tensor3 dense = t.densify();
  const double ball = nuclear_norm(dense, 6, opts).value;
  for (int q = 0; q < trials; ++q) {
    const Tensor3 g = random_tensor(t.dim(), rng());
    const double scale = frobenius(dense) / frobenius(g);
    Tensor3 tp = q % 3 == 2 ? scale * g : dense + std::pow(10.0, uniform(rng, -1.5, 0.5)) * scale * g;
    const double n6 = nuclear_norm(tp, 6, opts).value;
    // Homogeneity places the rescaled T' inside the ball.
    if (n6 > ball) tp *= (ball / n6) * (1.0 - 1e-6);
    res.observed = std::max(res.observed, check_norm_comparison(t, tp, opts));
  }
  res.passed = res.observed <= res.bound;
  res.detail = "max |Delta|_nuc4/|Delta|_F " + fmt(res.observed) + " vs 68r = " + fmt(res.bound);
  return res;
}

CheckResult check_pseudo_cs(int d, int certificates, int pairs_per_certificate, std::uint64_t seed,
                            const NormOptions& opts) {
  CheckResult res{"pseudo Cauchy-Schwarz", true, -std::numeric_limits<double>::infinity(), 1e-8, 0, ""};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < certificates; ++c) {
    const NormResult cert = injective_norm(random_tensor(d, rng()), 4, opts);
    const auto& m = cert.certificate;
    for (int p = 0; p < pairs_per_certificate; ++p) {
      LinearPoly f{std::normal_distribution<double>()(rng), gaussian_vector(3 * d, rng)};
      LinearPoly g{std::normal_distribution<double>()(rng), gaussian_vector(3 * d, rng)};
      if (p == 0) {
        f = {0.0, Eigen::VectorXd::Unit(3 * d, 0)};
        g = {0.0, Eigen::VectorXd::Unit(3 * d, d)};
      } else if (p == 1) {
        g = f;
      }
      const double lhs = m.expect_product(f, g);
      const double rhs = std::sqrt(std::max(0.0, m.expect_product(f, f)) * std::max(0.0, m.expect_product(g, g)));
      res.observed = std::max(res.observed, lhs - rhs);
      res.passed = res.passed && pseudo_cs_check(m, f, g);
      ++res.trials;
    }
  }
  res.detail = "max E[fg] - sqrt(E[f^2]E[g^2]) " + fmt(res.observed);
  return res;
}

CheckResult check_injective_upper_bound(int d, int trials, std::uint64_t seed, double tol, const NormOptions& opts) {
  CheckResult res{"injective upper bound", false, -std::numeric_limits<double>::infinity(), tol, trials, ""};
  std::mt19937_64 rng(seed);
  const MonomialBasis basis = MonomialBasis::build(d, 4, false);
  for (int t = 0; t < trials; ++t) {
    const Tensor3 tt = random_tensor(d, rng());
    const double inj = injective_norm(tt, 4, opts).value;
    Eigen::VectorXd hx = unit_vector(d, rng), hy = unit_vector(d, rng), hz = unit_vector(d, rng);
    power_iteration(tt, hx, hy, hz, 50);

    const int points = 3;
    Eigen::VectorXd w(points);
    for (int p = 0; p < points; ++p) w(p) = uniform(rng, 0.1, 1.0);
    w /= w.sum();

    // Block-constant norms a, b, c.
    const double a = uniform(rng, 0.5, 2.0), b = uniform(rng, 0.5, 2.0), c = uniform(rng, 0.5, 2.0);
    std::optional<PseudoMomentMatrix> mix;
    for (int p = 0; p < points; ++p) {
      const Eigen::VectorXd x = a * (p == 0 ? hx : unit_vector(d, rng));
      const Eigen::VectorXd y = b * (p == 0 ? hy : unit_vector(d, rng));
      const Eigen::VectorXd z = c * (p == 0 ? hz : unit_vector(d, rng));
      auto dp = PseudoMomentMatrix::dirac(basis, x, y, z, w(p));
      mix = mix ? *mix + dp : dp;
    }
    const double lhs = inner(tt, extract_moment_tensor(*mix));
    const double rhs = inj * std::sqrt(mix->expect_square_norm(0) * mix->expect_square_norm(1) * mix->expect_square_norm(2));
    res.observed = std::max(res.observed, lhs - rhs);

    // Varying norms with |z| <= 1 against the AM-GM form.
    std::optional<PseudoMomentMatrix> amgm;
    for (int p = 0; p < points; ++p) {
      const Eigen::VectorXd x = uniform(rng, 0.3, 2.0) * (p == 0 ? hx : unit_vector(d, rng));
      const Eigen::VectorXd y = uniform(rng, 0.3, 2.0) * (p == 0 ? hy : unit_vector(d, rng));
      const Eigen::VectorXd z = uniform(rng, 0.3, 1.0) * (p == 0 ? hz : unit_vector(d, rng));
      auto dp = PseudoMomentMatrix::dirac(basis, x, y, z, w(p));
      amgm = amgm ? *amgm + dp : dp;
    }
    const double lhs2 = inner(tt, extract_moment_tensor(*amgm));
    const double rhs2 = inj * 0.5 * (amgm->expect_square_norm(0) + amgm->expect_square_norm(1));
    res.observed = std::max(res.observed, lhs2 - rhs2);
  }
  res.passed = res.observed <= tol;
  res.detail = "max lhs - rhs " + fmt(res.observed);
  return res;
}

CheckResult check_projection_contraction(int d, int trials, std::uint64_t seed, double tol, const NormOptions& opts) {
  CheckResult res{"projection contraction", false, -std::numeric_limits<double>::infinity(), tol, trials, ""};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const int r = 1 + static_cast<int>(rng() % 2u);
    const auto ot = random_orthogonal(d, r, random_lambdas(r, rng, false), rng());
    const SubspaceProjector p = SubspaceProjector::from(ot);
    const Tensor3 x = random_tensor(d, rng());
    const double injx = injective_norm(x, 4, opts).value;
    const double perp = injective_norm(project_perp(p, x), 4, opts).value;
    const double par = injective_norm(multilinear_apply(p.pu, p.pv, p.pw, x), 4, opts).value;
    res.observed = std::max({res.observed, perp - 4.0 * injx, par - injx});
  }
  res.passed = res.observed <= tol;
  res.detail = "max of inj(Q_perp X) - 4 inj(X) and inj(P X) - inj(X): " + fmt(res.observed);
  return res;
}

CheckResult check_flattening_bound(int d, int trials, std::uint64_t seed, double tol, const NormOptions& opts) {
  CheckResult res{"flattening bound", false, -std::numeric_limits<double>::infinity(), tol, trials, ""};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const int terms = 1 + t % 3;
    Tensor3 tt(d);
    for (int q = 0; q < terms; ++q) tt += outer3(gaussian_vector(d, rng), gaussian_vector(d, rng), gaussian_vector(d, rng));
    const MultilinearRank mr = multilinear_rank(tt);
    const double rhs = std::sqrt(static_cast<double>(std::min(mr.r2, mr.r3))) * matrix_nuclear(flatten(tt, 1));
    res.observed = std::max(res.observed, nuclear_norm(tt, 4, opts).value - rhs);
  }
  res.passed = res.observed <= tol;
  res.detail = "max nuc4 - sqrt(min(r2,r3)) |flat_1|_* " + fmt(res.observed);
  return res;
}

}  // namespace sos_tensor
