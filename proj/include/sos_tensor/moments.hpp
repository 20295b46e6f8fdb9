#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "sos_tensor/conic_builder.hpp"
#include "sos_tensor/tensor.hpp"

namespace sos_tensor {

/// Monomial in the 3d indeterminates x_1..x_d, y_1..y_d, z_1..z_d, stored
/// as an exponent vector in that variable order.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int d) : d_(d), exps_(static_cast<std::size_t>(3 * d), 0) {}

  static Monomial one(int d) { return Monomial(d); }
  /// Single variable; block 0 = x, 1 = y, 2 = z.
  static Monomial var(int d, int block, int index);
  static Monomial trilinear(int d, int i, int j, int k);

  int dim() const { return d_; }
  int num_vars() const { return static_cast<int>(exps_.size()); }
  int exponent(int var) const { return exps_[static_cast<std::size_t>(var)]; }
  int degree() const;
  int block_degree(int block) const;

  /// Sign-symmetry class 0..3 of the per-block degree parities. Class 0
  /// holds the parities (0,0,0) and (1,1,1), which are the monomials fixed
  /// by every (sx, sy, sz) with sx*sy*sz = 1.
  int parity_class() const;

  Monomial operator*(const Monomial& other) const;
  /// this / other, if other divides this.
  std::optional<Monomial> divide(const Monomial& other) const;

  bool operator==(const Monomial& other) const { return exps_ == other.exps_; }

  std::uint64_t hash() const;
  std::string to_string() const;

 private:
  int d_ = 0;
  std::vector<std::uint8_t> exps_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return static_cast<std::size_t>(m.hash()); }
};

/// All monomials of degree <= k/2, graded lexicographic (degree first, then
/// lexicographic with x_1 > ... > x_d > y_1 > ... > z_d).
class MonomialBasis {
 public:
  static MonomialBasis build(int d, int k, bool parity_reduce);

  int dim() const { return d_; }
  int relaxation_degree() const { return k_; }
  int half_degree() const { return k_ / 2; }
  bool parity_reduced() const { return parity_reduce_; }

  int size() const { return static_cast<int>(monomials_.size()); }
  const Monomial& operator[](int i) const { return monomials_[static_cast<std::size_t>(i)]; }
  const std::vector<Monomial>& monomials() const { return monomials_; }

  std::optional<int> lookup(const Monomial& m) const;

  /// Index of the degree-one monomial of `block` (0,1,2) and coordinate i.
  int linear_index(int block, int i) const { return 1 + block * d_ + i; }

  /// Basis indices grouped into the diagonal blocks of the moment matrix:
  /// one group per parity class when reduced, otherwise a single group.
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }

  /// Whether entry (a, b) of a moment matrix can be nonzero.
  bool entry_allowed(int a, int b) const;

 private:
  int d_ = 0;
  int k_ = 0;
  bool parity_reduce_ = false;
  std::vector<Monomial> monomials_;
  std::unordered_map<Monomial, int, MonomialHash> index_;
  std::vector<std::vector<int>> blocks_;
};

/// Linear polynomial c0 + sum_v coef_v * var_v over the 3d indeterminates.
struct LinearPoly {
  double constant = 0.0;
  Eigen::VectorXd coefs;
};

/// Symmetric matrix indexed by a monomial basis holding pseudo-expectations
/// M(a, b) = E~[u_a u_b].
class PseudoMomentMatrix {
 public:
  PseudoMomentMatrix(MonomialBasis basis, Eigen::MatrixXd m);

  /// Point mass at (x, y, z) with the given weight.
  static PseudoMomentMatrix dirac(const MonomialBasis& basis, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& z, double weight = 1.0);

  const MonomialBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double normalization() const { return m_(0, 0); }

  PseudoMomentMatrix scaled(double s) const;
  PseudoMomentMatrix operator+(const PseudoMomentMatrix& other) const;

  /// E~[m], averaged over every basis pair whose product is m. Throws when
  /// m has degree above k.
  double moment(const Monomial& m) const;

  /// E~[f g] for linear f, g.
  double expect_product(const LinearPoly& f, const LinearPoly& g) const;

  /// E~[|x|^2], E~[|y|^2], E~[|z|^2] for block 0, 1, 2.
  double expect_square_norm(int block) const;

  double min_eigenvalue() const;
  /// Largest spread among entries that represent the same monomial.
  double consistency_error() const;
  /// max over blocks and monomials q with deg q <= max_q_degree of
  /// |E~[|x_block|^2 q] - E~[q]|.
  double ideal_residual(int max_q_degree) const;

 private:
  MonomialBasis basis_;
  Eigen::MatrixXd m_;
};

/// E~[x (x) y (x) z] read from a moment matrix; flags spreads above 1e-6.
Tensor3 extract_moment_tensor(const PseudoMomentMatrix& m);

/// Moment variables and constraints of a degree-k pseudo-distribution over
/// (x, y, z): one variable per monomial of degree <= k (class 0 only when
/// parity reduced), the PSD moment-matrix blocks, and the ideal constraints
/// E~[(|x|^2 - 1) q] = 0 for every q with deg q <= k - 2 (likewise y, z),
/// written homogeneously as E~[|x|^2 q] = E~[q].
class MomentProgram {
 public:
  MomentProgram(int d, int k, bool parity_reduce);

  const MonomialBasis& basis() const { return basis_; }
  int dim() const { return basis_.dim(); }
  int degree() const { return basis_.relaxation_degree(); }
  int num_moments() const { return static_cast<int>(moments_.size()); }

  /// Variable index of a moment relative to the first moment variable.
  int moment_index(const Monomial& m) const;
  std::optional<int> find_moment(const Monomial& m) const;
  int trilinear_index(int i, int j, int k) const { return trilinear_[(static_cast<std::size_t>(i) * dim() + j) * dim() + k]; }
  int constant_index() const { return 0; }

  /// Appends the moment variables to the builder, returning the offset of
  /// the first one.
  int add_variables(conic::ProblemBuilder& builder) const;
  void add_ideal_constraints(conic::ProblemBuilder& builder, int offset) const;
  void add_psd_blocks(conic::ProblemBuilder& builder, int offset) const;

  PseudoMomentMatrix moment_matrix(const Eigen::VectorXd& x, int offset) const;
  Tensor3 trilinear_moments(const Eigen::VectorXd& x, int offset) const;

 private:
  MonomialBasis basis_;
  std::vector<Monomial> moments_;
  std::unordered_map<Monomial, int, MonomialHash> moment_index_;
  std::vector<int> trilinear_;
  // product_[a * size + b] = moment index of u_a u_b, or -1 if not allowed.
  std::vector<int> product_;
};

}  // namespace sos_tensor
