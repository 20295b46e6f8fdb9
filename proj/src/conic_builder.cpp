#include "sos_tensor/conic_builder.hpp"

#include <stdexcept>

namespace sos_tensor::conic {

int ProblemBuilder::add_vars(int count) {
  const int first = num_vars();
  cost_.resize(cost_.size() + static_cast<std::size_t>(count), 0.0);
  return first;
}

void ProblemBuilder::close_block() const {
  if (!cones_.blocks.empty() && rows_in_open_block_ != cones_.blocks.back().slack_size()) {
    throw std::logic_error("ProblemBuilder: cone block closed with the wrong number of rows");
  }
}

void ProblemBuilder::open_block(ConeKind kind, int dim) {
  close_block();
  if (dim < 1) throw std::invalid_argument("ProblemBuilder: block dimension must be positive");
  // Consecutive zero/nonneg blocks coalesce into one.
  if ((kind == ConeKind::kZero || kind == ConeKind::kNonneg) && !cones_.blocks.empty() &&
      cones_.blocks.back().kind == kind) {
    cones_.blocks.back().dim += dim;
    return;
  }
  cones_.blocks.push_back({kind, dim});
  rows_in_open_block_ = 0;
}

void ProblemBuilder::add_row(std::span<const Term> terms, double rhs) {
  if (cones_.blocks.empty() || rows_in_open_block_ >= cones_.blocks.back().slack_size()) {
    throw std::logic_error("ProblemBuilder: no open cone block has room for another row");
  }
  const int row = num_rows();
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_vars()) throw std::out_of_range("ProblemBuilder: variable index out of range");
    if (t.coef != 0.0) triplets_.emplace_back(row, t.var, t.coef);
  }
  rhs_.push_back(rhs);
  ++rows_in_open_block_;
}

void ProblemBuilder::add_equality(std::span<const Term> terms, double rhs) {
  open_block(ConeKind::kZero, 1);
  add_row(terms, rhs);
}

ConicProblem ProblemBuilder::build() const {
  close_block();
  ConicProblem p;
  p.c = Eigen::Map<const Eigen::VectorXd>(cost_.data(), static_cast<Eigen::Index>(cost_.size()));
  p.b = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), static_cast<Eigen::Index>(rhs_.size()));
  p.A.resize(num_rows(), num_vars());
  p.A.setFromTriplets(triplets_.begin(), triplets_.end());
  p.cones = cones_;
  p.validate();
  return p;
}

}  // namespace sos_tensor::conic
