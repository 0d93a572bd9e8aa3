#include "decstore/matrix.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "decstore/error.hpp"

namespace decstore {

Matrix::Matrix(FieldPtr field, std::size_t rows, std::size_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

Matrix::Matrix(FieldPtr field, std::size_t rows, std::size_t cols, std::vector<Element> entries)
    : field_(std::move(field)), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw Error(Errc::LengthMismatch, "matrix needs " + std::to_string(rows * cols) + " entries, got " +
                                          std::to_string(entries_.size()));
  }
  for (Element e : entries_) {
    if (!field_->contains(e)) throw Error(Errc::BadParameter, "matrix entry outside the field");
  }
}

Matrix Matrix::identity(FieldPtr field, std::size_t n) {
  Matrix m(std::move(field), n, n);
  for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = 1;
  return m;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  std::vector<Element> e;
  e.reserve(idx.size() * cols_);
  for (std::size_t r : idx) {
    if (r >= rows_) throw Error(Errc::IndexOutOfRange, "row " + std::to_string(r));
    e.insert(e.end(), row(r), row(r) + cols_);
  }
  return Matrix(field_, idx.size(), cols_, std::move(e));
}

Matrix Matrix::select_cols(std::span<const std::size_t> idx) const {
  for (std::size_t c : idx) {
    if (c >= cols_) throw Error(Errc::IndexOutOfRange, "column " + std::to_string(c));
  }
  std::vector<Element> e;
  e.reserve(idx.size() * rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c : idx) e.push_back((*this)(r, c));
  }
  return Matrix(field_, rows_, idx.size(), std::move(e));
}

Matrix Matrix::stack(const Matrix& below) const {
  if (below.cols_ != cols_) throw Error(Errc::LengthMismatch, "stack: column counts differ");
  std::vector<Element> e = entries_;
  e.insert(e.end(), below.entries_.begin(), below.entries_.end());
  return Matrix(field_, rows_ + below.rows_, cols_, std::move(e));
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw Error(Errc::LengthMismatch, "matrix product: inner dimensions differ");
  Matrix out(field_, rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Element* dst = out.entries_.data() + i * rhs.cols_;
    for (std::size_t j = 0; j < cols_; ++j) field_->mul_add(dst, rhs.row(j), rhs.cols_, (*this)(i, j));
  }
  return out;
}

Column Matrix::apply(const Column& x) const {
  if (x.size() != cols_) throw Error(Errc::LengthMismatch, "apply: vector length differs from column count");
  Column y(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    Element acc = 0;
    for (std::size_t j = 0; j < cols_; ++j) acc ^= field_->mul((*this)(i, j), x[j]);
    y[i] = acc;
  }
  return y;
}

Blocks Matrix::apply(const Blocks& x) const {
  if (x.size() != cols_) throw Error(Errc::LengthMismatch, "apply: block count differs from column count");
  const std::size_t len = block_length(x);
  Blocks y = zero_blocks(rows_, len);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) field_->mul_add(y[i].data(), x[j].data(), len, (*this)(i, j));
  }
  return y;
}

bool Matrix::operator==(const Matrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && entries_ == other.entries_ &&
         field_->bits() == other.field_->bits() && field_->polynomial() == other.field_->polynomial();
}

Matrix cauchy_matrix(const FieldPtr& field, const CauchySpec& spec) {
  std::set<Element> seen;
  for (Element v : spec.xs) {
    if (!field->contains(v)) throw Error(Errc::BadParameter, "Cauchy x outside the field");
    if (!seen.insert(v).second) throw Error(Errc::DistinctnessViolation, "repeated Cauchy element " + std::to_string(v));
  }
  for (Element v : spec.ys) {
    if (!field->contains(v)) throw Error(Errc::BadParameter, "Cauchy y outside the field");
    if (!seen.insert(v).second) throw Error(Errc::DistinctnessViolation, "repeated Cauchy element " + std::to_string(v));
  }
  std::vector<Element> e;
  e.reserve(spec.xs.size() * spec.ys.size());
  for (Element x : spec.xs) {
    for (Element y : spec.ys) e.push_back(field->inv(Field::add(x, y)));
  }
  return Matrix(field, spec.xs.size(), spec.ys.size(), std::move(e));
}

Matrix vandermonde_matrix(const FieldPtr& field, std::size_t rows, const std::vector<Element>& nodes) {
  std::set<Element> seen(nodes.begin(), nodes.end());
  if (seen.size() != nodes.size()) throw Error(Errc::DistinctnessViolation, "Vandermonde nodes repeat");
  std::vector<Element> e(rows * nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    Element p = 1;
    for (std::size_t i = 0; i < rows; ++i) {
      e[i * nodes.size() + j] = p;
      p = field->mul(p, nodes[j]);
    }
  }
  return Matrix(field, rows, nodes.size(), std::move(e));
}

namespace {

struct Reduced {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;
  bool consistent = true;
};

// Reduced row echelon form of [a | rhs], first-nonzero pivoting. rhs rows are
// blocks that receive the same row operations.
Reduced reduce(const Field& f, std::size_t rows, std::size_t cols, std::vector<Element>& a, Blocks* rhs) {
  Reduced out;
  const std::size_t len = rhs ? block_length(*rhs) : 0;
  std::size_t prow = 0;
  for (std::size_t c = 0; c < cols && prow < rows; ++c) {
    std::size_t r = prow;
    while (r < rows && a[r * cols + c] == 0) ++r;
    if (r == rows) continue;
    if (r != prow) {
      std::swap_ranges(a.begin() + r * cols, a.begin() + (r + 1) * cols, a.begin() + prow * cols);
      if (rhs) std::swap((*rhs)[r], (*rhs)[prow]);
    }
    const Element piv_inv = f.inv(a[prow * cols + c]);
    f.scale(a.data() + prow * cols, cols, piv_inv);
    if (rhs) f.scale((*rhs)[prow].data(), len, piv_inv);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == prow) continue;
      const Element factor = a[i * cols + c];
      if (factor == 0) continue;
      f.mul_add(a.data() + i * cols, a.data() + prow * cols, cols, factor);
      if (rhs) f.mul_add((*rhs)[i].data(), (*rhs)[prow].data(), len, factor);
    }
    out.pivot_cols.push_back(c);
    ++prow;
  }
  out.rank = prow;
  if (rhs) {
    for (std::size_t i = out.rank; i < rows && out.consistent; ++i) {
      const Block& b = (*rhs)[i];
      out.consistent = std::all_of(b.begin(), b.end(), [](Element e) { return e == 0; });
    }
  }
  return out;
}

}  // namespace

std::size_t rank(const Matrix& m) {
  std::vector<Element> a = m.entries();
  return reduce(*m.field(), m.rows(), m.cols(), a, nullptr).rank;
}

bool columns_independent(const Matrix& m, std::span<const std::size_t> cols) {
  std::set<std::size_t> distinct(cols.begin(), cols.end());
  if (distinct.size() != cols.size()) return false;
  return rank(m.select_cols(cols)) == cols.size();
}

std::optional<Matrix> inverse(const Matrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  const std::size_t n = m.rows();
  std::vector<Element> a = m.entries();
  Blocks rhs(n, Block(n, 0));
  for (std::size_t i = 0; i < n; ++i) rhs[i][i] = 1;
  if (reduce(*m.field(), n, n, a, &rhs).rank != n) return std::nullopt;
  std::vector<Element> e;
  e.reserve(n * n);
  for (const Block& row : rhs) e.insert(e.end(), row.begin(), row.end());
  return Matrix(m.field(), n, n, std::move(e));
}

bool all_square_submatrices_nonsingular(const Matrix& m) {
  const std::size_t top = std::min(m.rows(), m.cols());
  for (std::size_t s = 1; s <= top; ++s) {
    const bool ok = for_each_combination(m.rows(), s, [&](std::span<const std::size_t> rs) {
      const Matrix sub = m.select_rows(rs);
      return for_each_combination(m.cols(), s, [&](std::span<const std::size_t> cs) {
        return rank(sub.select_cols(cs)) == s;
      });
    });
    if (!ok) return false;
  }
  return true;
}

SolveResult<Blocks> solve_blocks(const Matrix& a, const Blocks& b) {
  if (a.rows() != b.size()) throw Error(Errc::LengthMismatch, "solve: right-hand side length differs from row count");
  const std::size_t len = block_length(b);
  std::vector<Element> work = a.entries();
  Blocks rhs = b;
  const Reduced red = reduce(*a.field(), a.rows(), a.cols(), work, &rhs);
  SolveResult<Blocks> out{SolveStatus::Unique, zero_blocks(a.cols(), len)};
  if (!red.consistent) {
    out.status = SolveStatus::NoSolution;
    return out;
  }
  for (std::size_t i = 0; i < red.rank; ++i) out.x[red.pivot_cols[i]] = std::move(rhs[i]);
  if (red.rank < a.cols()) out.status = SolveStatus::Underdetermined;
  return out;
}

SolveResult<Column> solve(const Matrix& a, const Column& b) {
  Blocks bb;
  bb.reserve(b.size());
  for (Element e : b) bb.push_back(Block{e});
  auto r = solve_blocks(a, bb);
  Column x;
  x.reserve(r.x.size());
  for (const Block& blk : r.x) x.push_back(blk.empty() ? Element{0} : blk[0]);
  return {r.status, std::move(x)};
}

Blocks zero_blocks(std::size_t count, std::size_t len) { return Blocks(count, Block(len, 0)); }

void add_into(Blocks& acc, const Blocks& x) {
  if (acc.size() != x.size()) throw Error(Errc::LengthMismatch, "add: block counts differ");
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i].size() != x[i].size()) throw Error(Errc::LengthMismatch, "add: block lengths differ");
    for (std::size_t p = 0; p < acc[i].size(); ++p) acc[i][p] ^= x[i][p];
  }
}

std::size_t block_length(const Blocks& x) {
  if (x.empty()) return 0;
  const std::size_t len = x.front().size();
  for (const Block& b : x) {
    if (b.size() != len) throw Error(Errc::LengthMismatch, "blocks have unequal lengths");
  }
  return len;
}

}  // namespace decstore
