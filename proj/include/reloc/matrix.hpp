#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reloc/error.hpp"

namespace reloc {

using State = std::uint32_t;

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> row_sums() const;
  double max_row_sum() const;
  double min_entry() const;

  Matrix transpose() const;
  Matrix scaled(double c) const;

  /// y = M x (column vector).
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = x M (row vector).
  void left_multiply(std::span<const double> x, std::span<double> y) const;

  std::vector<double> operator*(std::span<const double> x) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Ordered set of distinct state labels.
class StateSpace {
 public:
  explicit StateSpace(std::size_t m);
  explicit StateSpace(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t index_of(std::string_view label) const;

 private:
  std::vector<std::string> labels_;
};

struct StructureFlags {
  bool irreducible = false;
  bool aperiodic = false;
  bool strictly_positive = false;
};

/// Irreducibility and period of a digraph given in CSR form (offsets has
/// n+1 entries). Period is the gcd of depth(u) + 1 - depth(v) over all edges
/// of a BFS from node 0; it is only meaningful when the graph is strongly
/// connected.
struct GraphStructure {
  bool strongly_connected = false;
  std::size_t period = 0;
};
GraphStructure analyze_digraph(std::span<const std::size_t> offsets,
                               std::span<const std::size_t> targets);

/// Structure of the support digraph {(s,t) : M(s,t) > 0}.
StructureFlags structure_flags(const Matrix& raw);

/// Validated nonnegative matrix with row sums <= 1 that is irreducible and
/// aperiodic. Immutable after construction.
class SubStochasticMatrix {
 public:
  const StateSpace& space() const noexcept { return space_; }
  const Matrix& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.rows(); }
  double operator()(std::size_t s, std::size_t t) const { return entries_(s, t); }
  const StructureFlags& flags() const noexcept { return flags_; }
  bool proportional_to_stochastic() const noexcept { return proportional_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  std::vector<double> row_sums() const { return entries_.row_sums(); }

 private:
  friend SubStochasticMatrix validate_substochastic(const Matrix&, std::vector<std::string>);
  SubStochasticMatrix(StateSpace space, Matrix entries) : space_(std::move(space)), entries_(std::move(entries)) {}

  StateSpace space_;
  Matrix entries_;
  StructureFlags flags_;
  bool proportional_ = false;
  std::vector<std::string> warnings_;
};

inline constexpr double kRowSumTolerance = 1e-12;

/// Throws Error with NotSquare, NegativeEntry, RowSumExceedsOne, Reducible or
/// Periodic. Row sums within kRowSumTolerance above one are clamped to one.
/// Empty labels means "1".."m".
SubStochasticMatrix validate_substochastic(const Matrix& raw, std::vector<std::string> labels = {});

/// Text format: first token m, then m rows of m decimal reals.
Matrix parse_matrix_text(std::string_view text);
Matrix read_matrix_file(const std::string& path);
std::string format_matrix_text(const Matrix& m);

/// The 2x2 benchmark used throughout the numerical experiments.
Matrix benchmark_sigma();

}  // namespace reloc
