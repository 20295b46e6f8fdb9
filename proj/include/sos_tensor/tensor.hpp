#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace sos_tensor {

/// Dense d x d x d real tensor. Entry (i,j,k) lives at offset (i*d + j)*d + k,
/// so the storage order is lexicographic in (i,j,k).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int d);
  Tensor3(int d, Eigen::VectorXd values);

  static Tensor3 zeros(int d) { return Tensor3(d); }

  int dim() const { return d_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  double operator()(int i, int j, int k) const { return values_[offset(i, j, k)]; }
  double& operator()(int i, int j, int k) { return values_[offset(i, j, k)]; }

  std::size_t offset(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * d_ + j) * d_ + k;
  }

  const Eigen::VectorXd& vec() const { return values_; }
  Eigen::VectorXd& vec() { return values_; }

  bool all_finite() const { return values_.allFinite(); }

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double s);

 private:
  int d_ = 0;
  Eigen::VectorXd values_;
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(double s, Tensor3 a);
Tensor3 operator*(Tensor3 a, double s);

/// Frobenius inner product. Throws std::invalid_argument on dimension mismatch.
double inner(const Tensor3& a, const Tensor3& b);

double frobenius(const Tensor3& t);
double linf(const Tensor3& t);

double matrix_nuclear(const Eigen::MatrixXd& m);
double matrix_op(const Eigen::MatrixXd& m);

/// u (x) v (x) w.
Tensor3 outer3(std::span<const double> u, std::span<const double> v, std::span<const double> w);
Tensor3 outer3(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w);

/// Mode-`mode` flattening (mode in {1,2,3}) into a d x d^2 matrix.
///   mode 1: row i, column j*d + k
///   mode 2: row j, column i*d + k
///   mode 3: row k, column i*d + j
Eigen::MatrixXd flatten(const Tensor3& t, int mode);

/// Inverse of flatten for the same mode.
Tensor3 unflatten(const Eigen::MatrixXd& m, int mode);

struct MultilinearRank {
  int r1 = 0;
  int r2 = 0;
  int r3 = 0;
  friend bool operator==(const MultilinearRank&, const MultilinearRank&) = default;
};

/// Counts singular values of each flattening above tol * sigma_max.
MultilinearRank multilinear_rank(const Tensor3& t, double tol = 1e-8);

/// (A1 (x) A2 (x) A3) X, i.e. Y_abc = sum_ijk A1_ai A2_bj A3_ck X_ijk.
Tensor3 multilinear_apply(const Eigen::MatrixXd& a1, const Eigen::MatrixXd& a2,
                          const Eigen::MatrixXd& a3, const Tensor3& x);

/// Text format: first line "d", then d^3 values in lexicographic (i,j,k)
/// order, printed with 17 significant digits.
void write_tensor(std::ostream& os, const Tensor3& t);
Tensor3 read_tensor(std::istream& is);
void save_tensor(const std::string& path, const Tensor3& t);
Tensor3 load_tensor(const std::string& path);

}  // namespace sos_tensor
