#include "sos_tensor/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace sos_tensor::conic {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kMinScale = 1e-4;
constexpr double kMaxScale = 1e4;
constexpr double kConeTol = 1e-7;

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double clamp_scale(double v) { return std::clamp(v, kMinScale, kMaxScale); }

// Row/column scaling state produced by equilibration. The solver works on
//   A_hat = diag(row) A diag(col),  b_hat = sigma_b row.*b,  c_hat = sigma_c col.*c.
struct Scaling {
  Eigen::VectorXd row;
  Eigen::VectorXd col;
  double sigma_b = 1.0;
  double sigma_c = 1.0;
};

Eigen::VectorXd row_inf_norms(const SparseMatrix& a) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(a.rows());
  for (int j = 0; j < a.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) r(it.row()) = std::max(r(it.row()), std::abs(it.value()));
  return r;
}

Eigen::VectorXd col_inf_norms(const SparseMatrix& a) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(a.cols());
  for (int j = 0; j < a.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) c(j) = std::max(c(j), std::abs(it.value()));
  return c;
}

// Ruiz equilibration. Rows of SOC and PSD blocks share one factor so the
// scaled slack stays in the same cone.
Scaling equilibrate(const ConicProblem& p, const SolverSettings& settings, SparseMatrix& a_hat) {
  const int m = p.num_rows();
  const int n = p.num_vars();
  Scaling sc;
  sc.row = Eigen::VectorXd::Ones(m);
  sc.col = Eigen::VectorXd::Ones(n);
  a_hat = p.A;

  for (int pass = 0; pass < settings.equilibration_passes; ++pass) {
    Eigen::VectorXd rn = row_inf_norms(a_hat);
    Eigen::VectorXd cn = col_inf_norms(a_hat);
    int offset = 0;
    for (const auto& blk : p.cones.blocks) {
      const int len = blk.slack_size();
      if (blk.kind == ConeKind::kSoc || blk.kind == ConeKind::kPsd) {
        const double mean = rn.segment(offset, len).mean();
        rn.segment(offset, len).setConstant(mean);
      }
      offset += len;
    }
    Eigen::VectorXd dr(m), dc(n);
    for (int i = 0; i < m; ++i) dr(i) = rn(i) > 1e-12 ? clamp_scale(1.0 / std::sqrt(rn(i))) : 1.0;
    for (int j = 0; j < n; ++j) dc(j) = cn(j) > 1e-12 ? clamp_scale(1.0 / std::sqrt(cn(j))) : 1.0;
    a_hat = dr.asDiagonal() * a_hat * dc.asDiagonal();
    sc.row.array() *= dr.array();
    sc.col.array() *= dc.array();
  }

  const Eigen::VectorXd b_hat = sc.row.cwiseProduct(p.b);
  const Eigen::VectorXd c_hat = sc.col.cwiseProduct(p.c);
  const double mean_row = m ? row_inf_norms(a_hat).mean() : 1.0;
  const double mean_col = n ? col_inf_norms(a_hat).mean() : 1.0;
  sc.sigma_b = clamp_scale(std::max(mean_row, 1e-6) / std::max(b_hat.norm(), kMinScale));
  sc.sigma_c = clamp_scale(std::max(mean_col, 1e-6) / std::max(c_hat.norm(), kMinScale));
  return sc;
}

void check_finite(const Eigen::VectorXd& v, const char* name) {
  if (!v.allFinite()) throw std::invalid_argument(std::string("ConicProblem: non-finite entries in ") + name);
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kMaxIters: return "max_iters";
  }
  return "unknown";
}

int ConeSpec::slack_size() const {
  int total = 0;
  for (const auto& b : blocks) total += b.slack_size();
  return total;
}

void ConeSpec::validate() const {
  for (const auto& b : blocks) {
    if (b.dim < 1) throw std::invalid_argument("ConeSpec: block dimensions must be positive");
  }
}

void ConicProblem::validate() const {
  cones.validate();
  if (A.rows() != b.size() || A.cols() != c.size()) {
    throw std::invalid_argument("ConicProblem: A must be (rows of b) x (length of c)");
  }
  if (cones.slack_size() != b.size()) {
    throw std::invalid_argument("ConicProblem: cone sizes do not sum to the number of rows");
  }
  check_finite(c, "c");
  check_finite(b, "b");
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it)
      if (!std::isfinite(it.value())) throw std::invalid_argument("ConicProblem: non-finite entries in A");
}

int svec_index(int row, int col, int side) {
  if (row < col) std::swap(row, col);
  // Columns 0..col-1 hold side, side-1, ... entries.
  return col * side - col * (col - 1) / 2 + (row - col);
}

Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const int s = static_cast<int>(m.rows());
  Eigen::VectorXd v(s * (s + 1) / 2);
  int idx = 0;
  for (int j = 0; j < s; ++j)
    for (int i = j; i < s; ++i) v(idx++) = (i == j) ? m(i, j) : kSqrt2 * m(i, j);
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int side) {
  if (v.size() != side * (side + 1) / 2) throw std::invalid_argument("smat: length mismatch");
  Eigen::MatrixXd m(side, side);
  int idx = 0;
  for (int j = 0; j < side; ++j)
    for (int i = j; i < side; ++i) {
      const double val = (i == j) ? v(idx) : v(idx) / kSqrt2;
      m(i, j) = val;
      m(j, i) = val;
      ++idx;
    }
  return m;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& q = es.eigenvectors();
  return q * lam.asDiagonal() * q.transpose();
}

void project_soc(Eigen::Ref<Eigen::VectorXd> v) {
  const double t = v(0);
  const double nz = v.tail(v.size() - 1).norm();
  if (nz <= t) return;
  if (nz <= -t) {
    v.setZero();
    return;
  }
  const double a = 0.5 * (t + nz);
  v(0) = a;
  v.tail(v.size() - 1) *= a / nz;
}

namespace {

// PSD projection acting directly on an svec block. Only the eigenpairs on
// the smaller side of zero are used to form the correction.
void project_psd_svec(Eigen::Ref<Eigen::VectorXd> v, int side,
                      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, Eigen::MatrixXd& work) {
  work.resize(side, side);
  int idx = 0;
  for (int j = 0; j < side; ++j)
    for (int i = j; i < side; ++i) {
      work(i, j) = (i == j) ? v(idx) : v(idx) / kSqrt2;
      ++idx;
    }
  es.compute(work, Eigen::ComputeEigenvectors);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::MatrixXd& q = es.eigenvectors();
  int neg = 0;
  while (neg < side && lam(neg) < 0) ++neg;
  if (neg == 0) return;
  if (neg <= side - neg) {
    // X - sum_{lam<0} lam q q'
    const Eigen::MatrixXd qn = q.leftCols(neg);
    work = work.selfadjointView<Eigen::Lower>();
    work.noalias() -= qn * lam.head(neg).asDiagonal() * qn.transpose();
  } else {
    const Eigen::MatrixXd qp = q.rightCols(side - neg);
    work.noalias() = qp * lam.tail(side - neg).asDiagonal() * qp.transpose();
  }
  idx = 0;
  for (int j = 0; j < side; ++j)
    for (int i = j; i < side; ++i) {
      v(idx) = (i == j) ? work(i, j) : kSqrt2 * work(i, j);
      ++idx;
    }
}

}  // namespace

void project_cone(const ConeSpec& cones, Eigen::Ref<Eigen::VectorXd> v, bool dual) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  Eigen::MatrixXd work;
  int offset = 0;
  for (const auto& blk : cones.blocks) {
    const int len = blk.slack_size();
    auto seg = v.segment(offset, len);
    switch (blk.kind) {
      case ConeKind::kZero:
        if (!dual) seg.setZero();
        break;
      case ConeKind::kNonneg: seg = seg.cwiseMax(0.0); break;
      case ConeKind::kSoc: project_soc(seg); break;
      case ConeKind::kPsd: project_psd_svec(seg, blk.dim, es, work); break;
    }
    offset += len;
  }
}

double cone_violation(const ConeSpec& cones, const Eigen::VectorXd& s) {
  double worst = 0.0;
  int offset = 0;
  for (const auto& blk : cones.blocks) {
    const int len = blk.slack_size();
    const Eigen::VectorXd seg = s.segment(offset, len);
    switch (blk.kind) {
      case ConeKind::kZero: worst = std::max(worst, inf_norm(seg)); break;
      case ConeKind::kNonneg: worst = std::max(worst, std::max(0.0, -seg.minCoeff())); break;
      case ConeKind::kSoc: worst = std::max(worst, std::max(0.0, seg.tail(len - 1).norm() - seg(0))); break;
      case ConeKind::kPsd: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(seg, blk.dim), Eigen::EigenvaluesOnly);
        worst = std::max(worst, std::max(0.0, -es.eigenvalues()(0)));
        break;
      }
    }
    offset += len;
  }
  return worst;
}

Residuals residuals(const ConicProblem& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& s) {
  if (x.size() != p.num_vars() || y.size() != p.num_rows() || s.size() != p.num_rows()) {
    throw std::invalid_argument("residuals: dimension mismatch");
  }
  Residuals r;
  const Eigen::VectorXd pr = p.A * x + s - p.b;
  const Eigen::VectorXd dr = p.A.transpose() * y + p.c;
  r.primal = inf_norm(pr) / (1.0 + inf_norm(p.b));
  r.dual = inf_norm(dr) / (1.0 + inf_norm(p.c));
  const double cx = p.c.dot(x);
  const double by = p.b.dot(y);
  r.gap = std::abs(cx + by) / (1.0 + std::abs(cx) + std::abs(by));
  return r;
}

namespace {

// Douglas-Rachford splitting on the homogeneous self-dual embedding
//   Q u = v,  u = (x, y, tau) in R^n x K* x R+,  v in {0} x K x R+,
// in the diagonal metric R = diag(rho_x I, r_y, r_tau). The affine step
// solves (R + Q) z = R w; r_y is constant on every cone block, so the cone
// projection is the Euclidean one.
class Splitting {
 public:
  Splitting(const SparseMatrix& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c, const ConeSpec& cones,
            double rho_x)
      : a_(a), at_(a.transpose()), b_(b), c_(c), cones_(cones), rho_x_(rho_x) {
    llt_.analyzePattern(pattern());
  }

  void set_scale(double scale) {
    scale_ = scale;
    ry_.resize(a_.rows());
    int offset = 0;
    for (const auto& blk : cones_.blocks) {
      const int len = blk.slack_size();
      // Equality rows carry a much heavier primal weight.
      ry_.segment(offset, len).setConstant(blk.kind == ConeKind::kZero ? 1.0 / (1000.0 * scale) : 1.0 / scale);
      offset += len;
    }
    SparseMatrix eye(a_.cols(), a_.cols());
    eye.setIdentity();
    const SparseMatrix k = SparseMatrix(at_ * ry_.cwiseInverse().asDiagonal() * a_) + rho_x_ * eye;
    llt_.factorize(k);
    if (llt_.info() != Eigen::Success) throw std::runtime_error("conic::solve: factorization failed");
    solve_k(c_, b_, gx_, gy_);
    hg_ = c_.dot(gx_) + b_.dot(gy_);
  }

  double scale() const { return scale_; }
  double rho_x() const { return rho_x_; }
  const Eigen::VectorXd& ry() const { return ry_; }

  // z = (R + Q)^{-1} R w.
  void affine(const Eigen::VectorXd& wx, const Eigen::VectorXd& wy, double wtau, Eigen::VectorXd& zx,
              Eigen::VectorXd& zy, double& ztau) {
    px_ = rho_x_ * wx;
    py_ = ry_.cwiseProduct(wy);
    solve_k(px_, py_, zx, zy);
    ztau = (kTauWeight * wtau + c_.dot(zx) + b_.dot(zy)) / (kTauWeight + hg_);
    zx -= ztau * gx_;
    zy -= ztau * gy_;
  }

  static constexpr double kTauWeight = 10.0;

 private:
  SparseMatrix pattern() const {
    SparseMatrix k = at_ * a_;
    SparseMatrix eye(a_.cols(), a_.cols());
    eye.setIdentity();
    return k + eye;
  }

  // [[rho_x I, A'], [-A, diag(r_y)]] (ox, oy) = (px, py).
  void solve_k(const Eigen::VectorXd& px, const Eigen::VectorXd& py, Eigen::VectorXd& ox, Eigen::VectorXd& oy) {
    ox = llt_.solve(px - at_ * py.cwiseQuotient(ry_));
    oy = (py + a_ * ox).cwiseQuotient(ry_);
  }

  const SparseMatrix& a_;
  SparseMatrix at_;
  const Eigen::VectorXd& b_;
  const Eigen::VectorXd& c_;
  const ConeSpec& cones_;
  double rho_x_;
  double scale_ = 1.0;
  Eigen::VectorXd ry_, gx_, gy_, px_, py_;
  double hg_ = 0.0;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
};

void project_dual_cone(const ConeSpec& cones, Eigen::Ref<Eigen::VectorXd> v, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                       Eigen::MatrixXd& work) {
  int offset = 0;
  for (const auto& blk : cones.blocks) {
    const int len = blk.slack_size();
    auto seg = v.segment(offset, len);
    switch (blk.kind) {
      case ConeKind::kZero: break;
      case ConeKind::kNonneg: seg = seg.cwiseMax(0.0); break;
      case ConeKind::kSoc: project_soc(seg); break;
      case ConeKind::kPsd: project_psd_svec(seg, blk.dim, es, work); break;
    }
    offset += len;
  }
}

// Type-II Anderson acceleration of a fixed-point map F(w) = w + g(w): the
// next iterate is F(w) minus the combination of past (dw + dg) columns that
// best cancels g in least squares.
class Anderson {
 public:
  Anderson(int dim, int memory) : s_(dim, memory), y_(dim, memory) {}

  void reset() {
    count_ = 0;
    have_prev_ = false;
  }

  Eigen::VectorXd step(const Eigen::VectorXd& w, const Eigen::VectorXd& g) {
    const int memory = static_cast<int>(s_.cols());
    if (have_prev_) {
      const int col = count_ % memory;
      s_.col(col) = w - w_prev_;
      y_.col(col) = g - g_prev_;
      ++count_;
    }
    w_prev_ = w;
    g_prev_ = g;
    have_prev_ = true;
    Eigen::VectorXd next = w + g;
    const int k = std::min(count_, memory);
    if (k == 0) return next;
    const auto yk = y_.leftCols(k);
    Eigen::MatrixXd gram = yk.transpose() * yk;
    gram.diagonal().array() += 1e-10 * (gram.diagonal().maxCoeff() + 1e-30);
    const Eigen::VectorXd gamma = gram.ldlt().solve(yk.transpose() * g);
    if (!gamma.allFinite()) {
      reset();
      return next;
    }
    next.noalias() -= (s_.leftCols(k) + yk) * gamma;
    return next;
  }

 private:
  Eigen::MatrixXd s_, y_;
  Eigen::VectorXd w_prev_, g_prev_;
  int count_ = 0;
  bool have_prev_ = false;
};

constexpr int kMinItersBetweenRescales = 100;
constexpr double kRescaleTrigger = 2.0;
constexpr double kTailRescaleTrigger = 1.2;

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverSettings& settings) {
  problem.validate();
  const int m = problem.num_rows();
  const int n = problem.num_vars();

  SparseMatrix a_hat;
  const Scaling sc = equilibrate(problem, settings, a_hat);
  const Eigen::VectorXd b_hat = sc.sigma_b * sc.row.cwiseProduct(problem.b);
  const Eigen::VectorXd c_hat = sc.sigma_c * sc.col.cwiseProduct(problem.c);
  const SparseMatrix a_hat_t = a_hat.transpose();

  Splitting split(a_hat, b_hat, c_hat, problem.cones, settings.rho_x);
  split.set_scale(clamp_scale(settings.scale));

  // w is the splitting state; u = (ux, uy, utau) the projected point and
  // v = (vx, vy, vkappa) its complementary slack.
  Eigen::VectorXd wx = Eigen::VectorXd::Zero(n), wy = Eigen::VectorXd::Zero(m);
  double wtau = 1.0 + 1.0 / Splitting::kTauWeight;
  Eigen::VectorXd ux = Eigen::VectorXd::Zero(n), uy = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd vy = Eigen::VectorXd::Zero(m), vx = Eigen::VectorXd::Zero(n);
  double utau = 1.0, vkappa = 1.0;
  Eigen::VectorXd zx(n), zy(m), qx(n), qy(m);
  double ztau = 0.0;
  const double alpha = settings.alpha;

  ConicSolution best;
  best.x = Eigen::VectorXd::Zero(n);
  best.y = Eigen::VectorXd::Zero(m);
  best.s = Eigen::VectorXd::Zero(m);
  double best_score = std::numeric_limits<double>::infinity();

  auto unscale = [&](double tau, Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& s) {
    x = sc.col.cwiseProduct(ux) / (sc.sigma_b * tau);
    y = sc.row.cwiseProduct(uy) / (sc.sigma_c * tau);
    s = vy.cwiseQuotient(sc.row) / (sc.sigma_b * tau);
  };

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  Eigen::MatrixXd work;
  int last_rescale = 0;

  std::optional<Anderson> accel;
  if (settings.anderson_memory > 0) accel.emplace(n + m + 1, settings.anderson_memory);
  Eigen::VectorXd wv(n + m + 1), gv(n + m + 1), fallback(n + m + 1);
  bool accel_pending = false;
  double accel_ref = 0.0;

  int iter = 0;
  for (; iter < settings.max_iters; ++iter) {
    split.affine(wx, wy, wtau, zx, zy, ztau);

    // u = Pi_C(2 z - w)
    qx = 2.0 * zx - wx;
    qy = 2.0 * zy - wy;
    const double qtau = 2.0 * ztau - wtau;
    ux = qx;
    uy = qy;
    project_dual_cone(problem.cones, uy, es, work);
    utau = std::max(qtau, 0.0);

    // v = R (u - q)
    vx = split.rho_x() * (ux - qx);
    vy = split.ry().cwiseProduct(uy - qy);
    vkappa = Splitting::kTauWeight * (utau - qtau);

    if (!accel) {
      wx += alpha * (ux - zx);
      wy += alpha * (uy - zy);
      wtau += alpha * (utau - ztau);
    } else {
      // g = F(w) - w for the relaxed Douglas-Rachford map F.
      wv << wx, wy, wtau;
      gv << alpha * (ux - zx), alpha * (uy - zy), alpha * (utau - ztau);
      const double gnorm = gv.norm();
      if (accel_pending && gnorm > accel_ref) {
        // The extrapolated point did worse than its base: take the plain step.
        wv = fallback;
        accel->reset();
        accel_pending = false;
      } else {
        fallback = wv + gv;
        accel_ref = gnorm;
        wv = accel->step(wv, gv);
        accel_pending = true;
      }
      wx = wv.head(n);
      wy = wv.segment(n, m);
      wtau = wv(n + m);
    }

    const bool last = iter + 1 == settings.max_iters;
    if ((iter + 1) % settings.check_interval != 0 && !last) continue;

    if (utau > 1e-12) {
      Eigen::VectorXd x, y, s;
      unscale(utau, x, y, s);
      Residuals r = residuals(problem, x, y, s);
      // The projection of b - Ax is an alternative slack; keep the closer one.
      Eigen::VectorXd s_proj = problem.b - problem.A * x;
      project_cone(problem.cones, s_proj, false);
      const Residuals r_proj = residuals(problem, x, y, s_proj);
      if (r_proj.primal < r.primal) {
        r = r_proj;
        s = std::move(s_proj);
      }
      const double score = std::max({r.primal / settings.eps_primal, r.dual / settings.eps_dual,
                                     r.gap / settings.eps_gap});
      if (settings.verbose && ((iter + 1) % (settings.check_interval * 100) == 0)) {
        std::cerr << "iter " << iter + 1 << " pri " << r.primal << " dua " << r.dual << " gap " << r.gap
                  << " obj " << problem.c.dot(x) << " scale " << split.scale() << '\n';
      }
      if (score < best_score) {
        best_score = score;
        best.x = std::move(x);
        best.y = std::move(y);
        best.s = std::move(s);
        best.residuals = r;
      }
      if (score <= 1.0) {
        best.status = SolveStatus::kOptimal;
        ++iter;
        break;
      }

      if (settings.adaptive_scale && iter + 1 - last_rescale >= kMinItersBetweenRescales) {
        // Balance the measured residuals relative to their targets.
        const double pri = r.primal / settings.eps_primal, dua = r.dual / settings.eps_dual;
        const double factor = std::sqrt(std::max(pri, 1e-18) / std::max(dua, 1e-18));
        // A looser trigger applies once only one side misses its target.
        const double trigger = (pri > 1.0) != (dua > 1.0) ? kTailRescaleTrigger : kRescaleTrigger;
        if (factor > trigger || factor < 1.0 / trigger) {
          const double next = clamp_scale(split.scale() * factor);
          if (next != split.scale()) {
            split.set_scale(next);
            // Keep (u, v) and rebuild w = u + R^{-1} v for the new metric.
            wx = ux + vx / split.rho_x();
            wy = uy + vy.cwiseQuotient(split.ry());
            wtau = utau + vkappa / Splitting::kTauWeight;
            last_rescale = iter + 1;
            if (accel) accel->reset();
            accel_pending = false;
          }
        }
      }
    }

    // Infeasibility certificates from the unnormalized iterate.
    const Eigen::VectorXd yc = sc.row.cwiseProduct(uy);
    const double by = problem.b.dot(yc);
    if (by < 0 && utau < vkappa) {
      const double aty = inf_norm(problem.A.transpose() * yc);
      if (aty <= settings.eps_dual * -by) {
        best.status = SolveStatus::kInfeasible;
        best.y = yc / -by;
        best.x = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
        best.s = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
        ++iter;
        break;
      }
    }
    const Eigen::VectorXd xc = sc.col.cwiseProduct(ux);
    const double cx = problem.c.dot(xc);
    if (cx < 0 && utau < vkappa) {
      const Eigen::VectorXd sc_s = vy.cwiseQuotient(sc.row);
      const double axs = inf_norm(problem.A * xc + sc_s);
      if (axs <= settings.eps_primal * -cx) {
        best.status = SolveStatus::kUnbounded;
        best.x = xc / -cx;
        best.s = sc_s / -cx;
        best.y = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
        ++iter;
        break;
      }
    }
  }

  best.iterations = iter;
  if (best.status == SolveStatus::kOptimal || best.status == SolveStatus::kMaxIters) {
    best.objective = problem.c.dot(best.x);
    best.cone_violation = cone_violation(problem.cones, best.s);
    if (best.status == SolveStatus::kOptimal &&
        best.cone_violation > kConeTol * (1.0 + inf_norm(best.s))) {
      best.status = SolveStatus::kMaxIters;
    }
  } else if (best.status == SolveStatus::kInfeasible) {
    best.objective = std::numeric_limits<double>::infinity();
  } else {
    best.objective = -std::numeric_limits<double>::infinity();
  }
  return best;
}

namespace {

const char* cone_name(ConeKind k) {
  switch (k) {
    case ConeKind::kZero: return "zero";
    case ConeKind::kNonneg: return "nonneg";
    case ConeKind::kSoc: return "soc";
    case ConeKind::kPsd: return "psd";
  }
  return "?";
}

ConeKind parse_cone(const std::string& s) {
  if (s == "zero") return ConeKind::kZero;
  if (s == "nonneg") return ConeKind::kNonneg;
  if (s == "soc") return ConeKind::kSoc;
  if (s == "psd") return ConeKind::kPsd;
  throw std::runtime_error("read_problem: unknown cone '" + s + "'");
}

void expect(std::istream& is, const std::string& word) {
  std::string tok;
  if (!(is >> tok) || tok != word) throw std::runtime_error("read_problem: expected '" + word + "'");
}

}  // namespace

void write_problem(std::ostream& os, const ConicProblem& p) {
  const int m = p.num_rows();
  const int n = p.num_vars();
  os << "sos-tensor-conic 1\n";
  os << "dims " << m << ' ' << n << '\n';
  os << "cones " << p.cones.blocks.size() << '\n';
  for (const auto& b : p.cones.blocks) os << cone_name(b.kind) << ' ' << b.dim << '\n';
  os << std::setprecision(17);
  os << "c\n";
  for (int j = 0; j < n; ++j) os << (j ? " " : "") << p.c(j);
  os << "\nb\n";
  for (int i = 0; i < m; ++i) os << (i ? " " : "") << p.b(i);
  os << "\nA\n";
  const Eigen::MatrixXd dense(p.A);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) os << (j ? " " : "") << dense(i, j);
    os << '\n';
  }
}

ConicProblem read_problem(std::istream& is) {
  expect(is, "sos-tensor-conic");
  int version = 0;
  if (!(is >> version) || version != 1) throw std::runtime_error("read_problem: unsupported version");
  expect(is, "dims");
  int m = 0, n = 0;
  if (!(is >> m >> n) || m < 0 || n < 0) throw std::runtime_error("read_problem: bad dims");
  expect(is, "cones");
  int count = 0;
  if (!(is >> count) || count < 0) throw std::runtime_error("read_problem: bad cone count");
  ConicProblem p;
  for (int i = 0; i < count; ++i) {
    std::string kind;
    int dim = 0;
    if (!(is >> kind >> dim)) throw std::runtime_error("read_problem: bad cone line");
    p.cones.blocks.push_back({parse_cone(kind), dim});
  }
  p.c.resize(n);
  p.b.resize(m);
  expect(is, "c");
  for (int j = 0; j < n; ++j)
    if (!(is >> p.c(j))) throw std::runtime_error("read_problem: truncated c");
  expect(is, "b");
  for (int i = 0; i < m; ++i)
    if (!(is >> p.b(i))) throw std::runtime_error("read_problem: truncated b");
  expect(is, "A");
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0;
      if (!(is >> v)) throw std::runtime_error("read_problem: truncated A");
      if (v != 0.0) trips.emplace_back(i, j, v);
    }
  p.A.resize(m, n);
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.validate();
  return p;
}

}  // namespace sos_tensor::conic
