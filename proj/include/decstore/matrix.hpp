#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "decstore/gf.hpp"

namespace decstore {

// A symbol column: one payload position per element. A vector of blocks is an
// object whose entries are whole chunks; linear maps act position-wise.
using Block = std::vector<Element>;
using Blocks = std::vector<Block>;
using Column = std::vector<Element>;

class Matrix {
 public:
  Matrix(FieldPtr field, std::size_t rows, std::size_t cols);
  Matrix(FieldPtr field, std::size_t rows, std::size_t cols, std::vector<Element> entries);

  static Matrix identity(FieldPtr field, std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const FieldPtr& field() const noexcept { return field_; }
  const std::vector<Element>& entries() const noexcept { return entries_; }

  Element operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  const Element* row(std::size_t r) const { return entries_.data() + r * cols_; }

  Matrix select_rows(std::span<const std::size_t> idx) const;
  Matrix select_cols(std::span<const std::size_t> idx) const;
  Matrix stack(const Matrix& below) const;

  Matrix operator*(const Matrix& rhs) const;
  Column apply(const Column& x) const;
  Blocks apply(const Blocks& x) const;

  bool operator==(const Matrix& other) const;

 private:
  FieldPtr field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Element> entries_;
};

struct CauchySpec {
  std::vector<Element> xs;
  std::vector<Element> ys;
};

// Entry (i, j) = 1 / (xs[i] + ys[j]).
Matrix cauchy_matrix(const FieldPtr& field, const CauchySpec& spec);

// Rows: a^0..a^(rows-1) for each distinct node a_j (column j).
Matrix vandermonde_matrix(const FieldPtr& field, std::size_t rows, const std::vector<Element>& nodes);

std::size_t rank(const Matrix& m);
bool columns_independent(const Matrix& m, std::span<const std::size_t> cols);
std::optional<Matrix> inverse(const Matrix& m);

// Exhaustive check that every square submatrix is nonsingular.
bool all_square_submatrices_nonsingular(const Matrix& m);

enum class SolveStatus { Unique, NoSolution, Underdetermined };

template <typename T>
struct SolveResult {
  SolveStatus status;
  T x;
};

SolveResult<Column> solve(const Matrix& a, const Column& b);
SolveResult<Blocks> solve_blocks(const Matrix& a, const Blocks& b);

Blocks zero_blocks(std::size_t count, std::size_t len);
void add_into(Blocks& acc, const Blocks& x);
std::size_t block_length(const Blocks& x);

// Calls f(indices) for every size-r subset of {0..n-1} in lexicographic order;
// stops early when f returns false.
template <typename F>
bool for_each_combination(std::size_t n, std::size_t r, F&& f) {
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  if (r > n) return true;
  while (true) {
    if (!f(std::span<const std::size_t>(idx))) return false;
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace decstore
