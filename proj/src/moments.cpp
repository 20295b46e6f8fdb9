#include "sos_tensor/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sos_tensor {

namespace {

void require_same_dim(const Monomial& a, const Monomial& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("Monomial: dimension mismatch");
}

// All exponent vectors over `nvars` variables with total degree `deg`, in
// descending lexicographic order.
void enumerate_degree(int nvars, int deg, std::vector<std::uint8_t>& cur, int var,
                      const std::function<void(const std::vector<std::uint8_t>&)>& emit) {
  if (var == nvars - 1) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(deg);
    emit(cur);
    cur[static_cast<std::size_t>(var)] = 0;
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
    enumerate_degree(nvars, deg - e, cur, var + 1, emit);
  }
  cur[static_cast<std::size_t>(var)] = 0;
}

std::vector<Monomial> monomials_up_to(int d, int max_degree) {
  std::vector<Monomial> out;
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(3 * d), 0);
  for (int t = 0; t <= max_degree; ++t) {
    enumerate_degree(3 * d, t, cur, 0, [&](const std::vector<std::uint8_t>& e) {
      Monomial m(d);
      for (int v = 0; v < 3 * d; ++v) {
        for (int p = 0; p < e[static_cast<std::size_t>(v)]; ++p) m = m * Monomial::var(d, v / d, v % d);
      }
      out.push_back(std::move(m));
    });
  }
  return out;
}

double evaluate(const Monomial& m, const Eigen::VectorXd& point) {
  double v = 1.0;
  for (int var = 0; var < m.num_vars(); ++var) {
    for (int p = 0; p < m.exponent(var); ++p) v *= point(var);
  }
  return v;
}

void check_k(int k) {
  if (k != 4 && k != 6) throw std::invalid_argument("relaxation degree must be 4 or 6");
}

}  // namespace

Monomial Monomial::var(int d, int block, int index) {
  if (block < 0 || block > 2 || index < 0 || index >= d) throw std::out_of_range("Monomial::var: bad variable");
  Monomial m(d);
  m.exps_[static_cast<std::size_t>(block * d + index)] = 1;
  return m;
}

Monomial Monomial::trilinear(int d, int i, int j, int k) { return var(d, 0, i) * var(d, 1, j) * var(d, 2, k); }

int Monomial::degree() const {
  int s = 0;
  for (auto e : exps_) s += e;
  return s;
}

int Monomial::block_degree(int block) const {
  int s = 0;
  for (int i = 0; i < d_; ++i) s += exps_[static_cast<std::size_t>(block * d_ + i)];
  return s;
}

int Monomial::parity_class() const {
  const int px = block_degree(0) & 1;
  const int py = block_degree(1) & 1;
  const int pz = block_degree(2) & 1;
  return 2 * (py ^ px) + (pz ^ px);
}

Monomial Monomial::operator*(const Monomial& other) const {
  require_same_dim(*this, other);
  Monomial r(d_);
  for (std::size_t v = 0; v < exps_.size(); ++v) r.exps_[v] = static_cast<std::uint8_t>(exps_[v] + other.exps_[v]);
  return r;
}

std::optional<Monomial> Monomial::divide(const Monomial& other) const {
  require_same_dim(*this, other);
  Monomial r(d_);
  for (std::size_t v = 0; v < exps_.size(); ++v) {
    if (other.exps_[v] > exps_[v]) return std::nullopt;
    r.exps_[v] = static_cast<std::uint8_t>(exps_[v] - other.exps_[v]);
  }
  return r;
}

std::uint64_t Monomial::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto e : exps_) {
    h ^= e;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string Monomial::to_string() const {
  if (degree() == 0) return "1";
  static const char kNames[3] = {'x', 'y', 'z'};
  std::ostringstream os;
  bool first = true;
  for (int v = 0; v < num_vars(); ++v) {
    const int e = exps_[static_cast<std::size_t>(v)];
    if (e == 0) continue;
    if (!first) os << '*';
    first = false;
    os << kNames[v / d_] << (v % d_ + 1);
    if (e > 1) os << '^' << e;
  }
  return os.str();
}

MonomialBasis MonomialBasis::build(int d, int k, bool parity_reduce) {
  check_k(k);
  if (d < 1) throw std::invalid_argument("MonomialBasis: d must be positive");
  MonomialBasis b;
  b.d_ = d;
  b.k_ = k;
  b.parity_reduce_ = parity_reduce;
  b.monomials_ = monomials_up_to(d, k / 2);
  for (int i = 0; i < b.size(); ++i) b.index_.emplace(b.monomials_[static_cast<std::size_t>(i)], i);
  if (parity_reduce) {
    b.blocks_.assign(4, {});
    for (int i = 0; i < b.size(); ++i) b.blocks_[static_cast<std::size_t>(b[i].parity_class())].push_back(i);
    std::erase_if(b.blocks_, [](const std::vector<int>& g) { return g.empty(); });
  } else {
    b.blocks_.assign(1, {});
    for (int i = 0; i < b.size(); ++i) b.blocks_[0].push_back(i);
  }
  return b;
}

std::optional<int> MonomialBasis::lookup(const Monomial& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool MonomialBasis::entry_allowed(int a, int b) const {
  return !parity_reduce_ || (*this)[a].parity_class() == (*this)[b].parity_class();
}

// ---------------------------------------------------------------------------

PseudoMomentMatrix::PseudoMomentMatrix(MonomialBasis basis, Eigen::MatrixXd m) : basis_(std::move(basis)), m_(std::move(m)) {
  if (m_.rows() != basis_.size() || m_.cols() != basis_.size()) {
    throw std::invalid_argument("PseudoMomentMatrix: matrix size does not match basis");
  }
  if (!m_.allFinite()) throw std::invalid_argument("PseudoMomentMatrix: non-finite entries");
}

PseudoMomentMatrix PseudoMomentMatrix::dirac(const MonomialBasis& basis, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& y, const Eigen::VectorXd& z, double weight) {
  const int d = basis.dim();
  if (x.size() != d || y.size() != d || z.size() != d) throw std::invalid_argument("dirac: point dimension mismatch");
  Eigen::VectorXd point(3 * d);
  point << x, y, z;
  Eigen::VectorXd v(basis.size());
  for (int a = 0; a < basis.size(); ++a) v(a) = evaluate(basis[a], point);
  Eigen::MatrixXd m = weight * v * v.transpose();
  // Reduced bases keep only sign-invariant entries: the symmetrized mixture.
  for (int a = 0; a < basis.size(); ++a) {
    for (int b = 0; b < basis.size(); ++b) {
      if (!basis.entry_allowed(a, b)) m(a, b) = 0.0;
    }
  }
  return PseudoMomentMatrix(basis, std::move(m));
}

PseudoMomentMatrix PseudoMomentMatrix::scaled(double s) const { return PseudoMomentMatrix(basis_, s * m_); }

PseudoMomentMatrix PseudoMomentMatrix::operator+(const PseudoMomentMatrix& other) const {
  if (other.basis_.size() != basis_.size() || other.basis_.dim() != basis_.dim() ||
      other.basis_.parity_reduced() != basis_.parity_reduced()) {
    throw std::invalid_argument("PseudoMomentMatrix: basis mismatch");
  }
  return PseudoMomentMatrix(basis_, m_ + other.m_);
}

double PseudoMomentMatrix::moment(const Monomial& m) const {
  if (m.dim() != basis_.dim()) throw std::invalid_argument("moment: dimension mismatch");
  if (m.degree() > basis_.relaxation_degree()) throw std::out_of_range("moment: degree exceeds relaxation degree");
  if (basis_.parity_reduced() && m.parity_class() != 0) return 0.0;
  double sum = 0.0;
  int count = 0;
  for (int a = 0; a < basis_.size(); ++a) {
    auto rest = m.divide(basis_[a]);
    if (!rest) continue;
    auto b = basis_.lookup(*rest);
    if (!b || !basis_.entry_allowed(a, *b)) continue;
    sum += m_(a, *b);
    ++count;
  }
  if (count == 0) throw std::logic_error("moment: monomial not representable in basis");
  return sum / count;
}

double PseudoMomentMatrix::expect_product(const LinearPoly& f, const LinearPoly& g) const {
  const int nv = 3 * basis_.dim();
  if (f.coefs.size() != nv || g.coefs.size() != nv) throw std::invalid_argument("expect_product: coefficient length");
  // Coefficient vectors over the basis entries {1, linear monomials}.
  Eigen::VectorXd fv = Eigen::VectorXd::Zero(basis_.size());
  Eigen::VectorXd gv = Eigen::VectorXd::Zero(basis_.size());
  fv(0) = f.constant;
  gv(0) = g.constant;
  for (int v = 0; v < nv; ++v) {
    fv(1 + v) = f.coefs(v);
    gv(1 + v) = g.coefs(v);
  }
  return fv.dot(m_ * gv);
}

double PseudoMomentMatrix::expect_square_norm(int block) const {
  if (block < 0 || block > 2) throw std::out_of_range("expect_square_norm: block");
  double s = 0.0;
  for (int i = 0; i < basis_.dim(); ++i) {
    const int a = basis_.linear_index(block, i);
    s += m_(a, a);
  }
  return s;
}

double PseudoMomentMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double PseudoMomentMatrix::consistency_error() const {
  std::unordered_map<Monomial, std::pair<double, double>, MonomialHash> range;
  double worst = 0.0;
  for (int a = 0; a < basis_.size(); ++a) {
    for (int b = a; b < basis_.size(); ++b) {
      if (!basis_.entry_allowed(a, b)) continue;
      const double v = m_(a, b);
      worst = std::max(worst, std::abs(v - m_(b, a)));
      auto [it, inserted] = range.emplace(basis_[a] * basis_[b], std::make_pair(v, v));
      if (!inserted) {
        it->second.first = std::min(it->second.first, v);
        it->second.second = std::max(it->second.second, v);
        worst = std::max(worst, it->second.second - it->second.first);
      }
    }
  }
  return worst;
}

double PseudoMomentMatrix::ideal_residual(int max_q_degree) const {
  const int d = basis_.dim();
  const int qmax = std::min(max_q_degree, basis_.relaxation_degree() - 2);
  double worst = 0.0;
  for (const auto& q : monomials_up_to(d, qmax)) {
    if (basis_.parity_reduced() && q.parity_class() != 0) continue;
    const double eq = moment(q);
    for (int block = 0; block < 3; ++block) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const Monomial xi = Monomial::var(d, block, i);
        s += moment(q * xi * xi);
      }
      worst = std::max(worst, std::abs(s - eq));
    }
  }
  return worst;
}

Tensor3 extract_moment_tensor(const PseudoMomentMatrix& m) {
  const MonomialBasis& basis = m.basis();
  const int d = basis.dim();
  Tensor3 t(d);
  double worst_spread = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        const Monomial xi = Monomial::var(d, 0, i);
        const Monomial yj = Monomial::var(d, 1, j);
        const Monomial zk = Monomial::var(d, 2, k);
        const int a_x = basis.linear_index(0, i), a_y = basis.linear_index(1, j), a_z = basis.linear_index(2, k);
        const double v1 = m.matrix()(a_x, *basis.lookup(yj * zk));
        const double v2 = m.matrix()(a_y, *basis.lookup(xi * zk));
        const double v3 = m.matrix()(a_z, *basis.lookup(xi * yj));
        const double mean = (v1 + v2 + v3) / 3.0;
        worst_spread = std::max({worst_spread, std::abs(v1 - mean), std::abs(v2 - mean), std::abs(v3 - mean)});
        t(i, j, k) = mean;
      }
    }
  }
  if (worst_spread > 1e-6) {
    throw std::runtime_error("extract_moment_tensor: inconsistent trilinear moments (spread " +
                             std::to_string(worst_spread) + ")");
  }
  return t;
}

// ---------------------------------------------------------------------------

MomentProgram::MomentProgram(int d, int k, bool parity_reduce) : basis_(MonomialBasis::build(d, k, parity_reduce)) {
  for (auto& m : monomials_up_to(d, k)) {
    if (parity_reduce && m.parity_class() != 0) continue;
    moment_index_.emplace(m, static_cast<int>(moments_.size()));
    moments_.push_back(std::move(m));
  }
  trilinear_.resize(static_cast<std::size_t>(d) * d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l)
        trilinear_[(static_cast<std::size_t>(i) * d + j) * d + l] = moment_index(Monomial::trilinear(d, i, j, l));
  const int n = basis_.size();
  product_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (basis_.entry_allowed(a, b)) product_[static_cast<std::size_t>(a) * n + b] = moment_index(basis_[a] * basis_[b]);
    }
  }
}

std::optional<int> MomentProgram::find_moment(const Monomial& m) const {
  auto it = moment_index_.find(m);
  if (it == moment_index_.end()) return std::nullopt;
  return it->second;
}

int MomentProgram::moment_index(const Monomial& m) const {
  auto idx = find_moment(m);
  if (!idx) throw std::out_of_range("MomentProgram: monomial " + m.to_string() + " has no moment variable");
  return *idx;
}

int MomentProgram::add_variables(conic::ProblemBuilder& builder) const { return builder.add_vars(num_moments()); }

void MomentProgram::add_ideal_constraints(conic::ProblemBuilder& builder, int offset) const {
  const int d = dim();
  std::vector<conic::Term> terms;
  for (const auto& q : monomials_up_to(d, degree() - 2)) {
    auto qi = find_moment(q);
    if (!qi) continue;
    for (int block = 0; block < 3; ++block) {
      terms.clear();
      terms.push_back({offset + *qi, -1.0});
      for (int i = 0; i < d; ++i) {
        const Monomial xi = Monomial::var(d, block, i);
        terms.push_back({offset + moment_index(q * xi * xi), 1.0});
      }
      builder.add_equality(terms, 0.0);
    }
  }
}

void MomentProgram::add_psd_blocks(conic::ProblemBuilder& builder, int offset) const {
  const int n = basis_.size();
  const double r2 = std::sqrt(2.0);
  for (const auto& group : basis_.blocks()) {
    const int s = static_cast<int>(group.size());
    builder.open_block(conic::ConeKind::kPsd, s);
    // svec order: column by column, lower triangle.
    for (int c = 0; c < s; ++c) {
      for (int r = c; r < s; ++r) {
        const int a = group[static_cast<std::size_t>(r)];
        const int b = group[static_cast<std::size_t>(c)];
        const int mi = product_[static_cast<std::size_t>(a) * n + b];
        builder.add_row({{offset + mi, r == c ? -1.0 : -r2}}, 0.0);
      }
    }
  }
}

PseudoMomentMatrix MomentProgram::moment_matrix(const Eigen::VectorXd& x, int offset) const {
  const int n = basis_.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int mi = product_[static_cast<std::size_t>(a) * n + b];
      if (mi >= 0) m(a, b) = x(offset + mi);
    }
  }
  return PseudoMomentMatrix(basis_, std::move(m));
}

Tensor3 MomentProgram::trilinear_moments(const Eigen::VectorXd& x, int offset) const {
  const int d = dim();
  Tensor3 t(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) t(i, j, k) = x(offset + trilinear_index(i, j, k));
  return t;
}

}  // namespace sos_tensor
