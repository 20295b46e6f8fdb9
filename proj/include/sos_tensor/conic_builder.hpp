#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "sos_tensor/conic.hpp"

namespace sos_tensor::conic {

struct Term {
  int var = 0;
  double coef = 0.0;
};

/// Incremental assembly of a ConicProblem. Rows are appended to the most
/// recently opened cone block; each row reads  s_i = rhs - sum coef * x[var].
class ProblemBuilder {
 public:
  explicit ProblemBuilder(int num_vars = 0) : cost_(num_vars, 0.0) {}

  int add_vars(int count);
  int num_vars() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  void set_cost(int var, double c) { cost_.at(static_cast<std::size_t>(var)) = c; }

  void open_block(ConeKind kind, int dim);
  void add_row(std::span<const Term> terms, double rhs);
  void add_row(std::initializer_list<Term> terms, double rhs) {
    add_row(std::span<const Term>(terms.begin(), terms.size()), rhs);
  }

  /// Convenience: sum coef * x[var] == rhs as a one-row zero block.
  void add_equality(std::span<const Term> terms, double rhs);

  ConicProblem build() const;

 private:
  void close_block() const;

  std::vector<double> cost_;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<double> rhs_;
  ConeSpec cones_;
  int rows_in_open_block_ = 0;
};

}  // namespace sos_tensor::conic
