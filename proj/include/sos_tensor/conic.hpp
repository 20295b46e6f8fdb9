#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sos_tensor::conic {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

enum class ConeKind { kZero, kNonneg, kSoc, kPsd };

/// One block of the slack vector. For kPsd, `dim` is the matrix side s and
/// the block occupies s(s+1)/2 slack coordinates (see svec).
struct ConeBlock {
  ConeKind kind = ConeKind::kZero;
  int dim = 0;

  int slack_size() const { return kind == ConeKind::kPsd ? dim * (dim + 1) / 2 : dim; }
};

struct ConeSpec {
  std::vector<ConeBlock> blocks;

  ConeSpec& zero(int n) { return add(ConeKind::kZero, n); }
  ConeSpec& nonneg(int n) { return add(ConeKind::kNonneg, n); }
  ConeSpec& soc(int n) { return add(ConeKind::kSoc, n); }
  ConeSpec& psd(int side) { return add(ConeKind::kPsd, side); }

  int slack_size() const;
  void validate() const;

 private:
  ConeSpec& add(ConeKind kind, int dim) {
    blocks.push_back({kind, dim});
    return *this;
  }
};

/// minimize c'x  subject to  A x + s = b,  s in K.
struct ConicProblem {
  Eigen::VectorXd c;
  SparseMatrix A;
  Eigen::VectorXd b;
  ConeSpec cones;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }

  /// Throws std::invalid_argument on inconsistent shapes or non-finite data.
  void validate() const;
};

struct SolverSettings {
  double eps_primal = 1e-7;
  double eps_dual = 1e-7;
  double eps_gap = 1e-7;
  int max_iters = 100000;
  double alpha = 1.5;
  /// Proximal weight on x in the splitting metric.
  double rho_x = 1e-6;
  /// Initial dual scale; larger values weight primal feasibility.
  double scale = 0.1;
  /// Rebalance the dual scale from the residual ratio (refactors on change).
  bool adaptive_scale = true;
  /// Anderson acceleration memory; 0 runs plain Douglas-Rachford.
  int anderson_memory = 5;
  int equilibration_passes = 10;
  int check_interval = 10;
  bool verbose = false;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIters };

std::string to_string(SolveStatus status);

/// primal = |Ax + s - b|_inf / (1 + |b|_inf)
/// dual   = |A'y + c|_inf / (1 + |c|_inf)
/// gap    = |c'x + b'y| / (1 + |c'x| + |b'y|)
struct Residuals {
  double primal = 0;
  double dual = 0;
  double gap = 0;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::kMaxIters;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  double objective = 0;
  Residuals residuals;
  double cone_violation = 0;
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

ConicSolution solve(const ConicProblem& problem, const SolverSettings& settings = {});

Residuals residuals(const ConicProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& s);

// Symmetric vectorization: lower triangle, column by column, off-diagonal
// entries scaled by sqrt(2) so that <M, N>_F = svec(M)'svec(N).
Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd smat(const Eigen::VectorXd& v, int side);
int svec_index(int row, int col, int side);

/// Euclidean projection of a symmetric matrix onto the PSD cone.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m);
/// Euclidean projection onto the second-order cone {(t, z) : |z| <= t}.
void project_soc(Eigen::Ref<Eigen::VectorXd> v);
/// Projects `v` block by block onto K (dual = false) or K* (dual = true).
void project_cone(const ConeSpec& cones, Eigen::Ref<Eigen::VectorXd> v, bool dual);

/// Largest violation of membership of s in K (0 when s is inside).
double cone_violation(const ConeSpec& cones, const Eigen::VectorXd& s);

/// Plain-text dump:
///   sos-tensor-conic 1
///   dims <m> <n>
///   cones <count>            followed by <count> lines "<zero|nonneg|soc|psd> <dim>"
///   c                        followed by n values
///   b                        followed by m values
///   A                        followed by m rows of n values (dense)
void write_problem(std::ostream& os, const ConicProblem& problem);
ConicProblem read_problem(std::istream& is);

}  // namespace sos_tensor::conic
