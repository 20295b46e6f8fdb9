#include "sos_tensor/tensor.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sos_tensor {

namespace {

void require_same_dim(const Tensor3& a, const Tensor3& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": tensor dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

std::size_t cube(int d) { return static_cast<std::size_t>(d) * d * d; }

}  // namespace

Tensor3::Tensor3(int d) : d_(d), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cube(d)))) {
  if (d < 1) throw std::invalid_argument("Tensor3: dimension must be positive");
}

Tensor3::Tensor3(int d, Eigen::VectorXd values) : d_(d), values_(std::move(values)) {
  if (d < 1) throw std::invalid_argument("Tensor3: dimension must be positive");
  if (static_cast<std::size_t>(values_.size()) != cube(d)) {
    throw std::invalid_argument("Tensor3: expected d^3 values");
  }
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require_same_dim(*this, other, "Tensor3::operator+=");
  values_ += other.values_;
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  require_same_dim(*this, other, "Tensor3::operator-=");
  values_ -= other.values_;
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  values_ *= s;
  return *this;
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }
Tensor3 operator*(Tensor3 a, double s) { return a *= s; }

double inner(const Tensor3& a, const Tensor3& b) {
  require_same_dim(a, b, "inner");
  return a.vec().dot(b.vec());
}

double frobenius(const Tensor3& t) { return t.vec().norm(); }

double linf(const Tensor3& t) { return t.size() == 0 ? 0.0 : t.vec().cwiseAbs().maxCoeff(); }

double matrix_nuclear(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues().sum();
}

double matrix_op(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

Tensor3 outer3(std::span<const double> u, std::span<const double> v, std::span<const double> w) {
  if (u.size() != v.size() || u.size() != w.size()) {
    throw std::invalid_argument("outer3: vectors must have equal length");
  }
  const int d = static_cast<int>(u.size());
  Tensor3 t(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) t(i, j, k) = u[i] * v[j] * w[k];
  return t;
}

Tensor3 outer3(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return outer3(std::span<const double>(u.data(), u.size()), std::span<const double>(v.data(), v.size()),
                std::span<const double>(w.data(), w.size()));
}

Eigen::MatrixXd flatten(const Tensor3& t, int mode) {
  const int d = t.dim();
  Eigen::MatrixXd m(d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        switch (mode) {
          case 1: m(i, j * d + k) = t(i, j, k); break;
          case 2: m(j, i * d + k) = t(i, j, k); break;
          case 3: m(k, i * d + j) = t(i, j, k); break;
          default: throw std::invalid_argument("flatten: mode must be 1, 2 or 3");
        }
      }
  return m;
}

Tensor3 unflatten(const Eigen::MatrixXd& m, int mode) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != static_cast<Eigen::Index>(d) * d) {
    throw std::invalid_argument("unflatten: expected a d x d^2 matrix");
  }
  Tensor3 t(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        switch (mode) {
          case 1: t(i, j, k) = m(i, j * d + k); break;
          case 2: t(i, j, k) = m(j, i * d + k); break;
          case 3: t(i, j, k) = m(k, i * d + j); break;
          default: throw std::invalid_argument("unflatten: mode must be 1, 2 or 3");
        }
      }
  return t;
}

MultilinearRank multilinear_rank(const Tensor3& t, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("multilinear_rank: tol must be positive");
  int ranks[3] = {0, 0, 0};
  for (int mode = 1; mode <= 3; ++mode) {
    const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(flatten(t, mode)).singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    if (smax <= 0.0) continue;
    ranks[mode - 1] = static_cast<int>((sv.array() > tol * smax).count());
  }
  return {ranks[0], ranks[1], ranks[2]};
}

Tensor3 multilinear_apply(const Eigen::MatrixXd& a1, const Eigen::MatrixXd& a2, const Eigen::MatrixXd& a3,
                          const Tensor3& x) {
  const int d = x.dim();
  for (const auto* a : {&a1, &a2, &a3}) {
    if (a->rows() != d || a->cols() != d) {
      throw std::invalid_argument("multilinear_apply: factor matrices must be d x d");
    }
  }
  // Contract one mode at a time: mode 1 via flatten, then modes 2 and 3.
  Tensor3 y1 = unflatten(a1 * flatten(x, 1), 1);
  Tensor3 y2 = unflatten(a2 * flatten(y1, 2), 2);
  return unflatten(a3 * flatten(y2, 3), 3);
}

void write_tensor(std::ostream& os, const Tensor3& t) {
  const int d = t.dim();
  os << d << '\n';
  os << std::setprecision(17);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        if (k) os << ' ';
        os << t(i, j, k);
      }
      os << '\n';
    }
  }
}

Tensor3 read_tensor(std::istream& is) {
  int d = 0;
  if (!(is >> d) || d < 1) throw std::runtime_error("read_tensor: bad dimension header");
  Tensor3 t(d);
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    double v = 0;
    if (!(is >> v)) throw std::runtime_error("read_tensor: expected d^3 values");
    t.vec()[static_cast<Eigen::Index>(idx)] = v;
  }
  if (!t.all_finite()) throw std::runtime_error("read_tensor: non-finite entry");
  return t;
}

void save_tensor(const std::string& path, const Tensor3& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_tensor: cannot open " + path);
  write_tensor(os, t);
}

Tensor3 load_tensor(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_tensor: cannot open " + path);
  return read_tensor(is);
}

}  // namespace sos_tensor
