#pragma once

#include <optional>
#include <vector>

#include "decstore/matrix.hpp"

namespace decstore {

// A measurement matrix Phi (2*capacity x k) whose every 2*capacity columns are
// linearly independent, so capacity-sparse vectors are recoverable.
class MeasurementMatrix {
 public:
  // 2*gamma x k Cauchy matrix; requires 1 <= gamma, 2*gamma < k and
  // 2*gamma + k <= 2^m.
  static MeasurementMatrix cauchy(std::size_t gamma, std::size_t k, const FieldPtr& field);
  // As cauchy() but allows 2*gamma = k (the two-level matrix at T = k/2).
  static MeasurementMatrix cauchy_threshold(std::size_t threshold, std::size_t k, const FieldPtr& field);
  // Explicit matrix; the independence property is checked exhaustively for
  // k <= 12 and by sampling above. Cauchy-ness is detected for small shapes.
  static MeasurementMatrix from_matrix(Matrix phi, std::size_t gamma);

  const Matrix& phi() const noexcept { return phi_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t k() const noexcept { return phi_.cols(); }
  bool is_cauchy() const noexcept { return cauchy_; }

 private:
  MeasurementMatrix(Matrix phi, std::size_t capacity, bool cauchy)
      : phi_(std::move(phi)), capacity_(capacity), cauchy_(cauchy) {}
  static MeasurementMatrix verified(Matrix phi, std::size_t gamma, bool known_cauchy);
  static MeasurementMatrix build_cauchy(std::size_t gamma, std::size_t k, const FieldPtr& field);
  friend MeasurementMatrix row_subset_measurement(const MeasurementMatrix&, const std::vector<std::size_t>&);

  Matrix phi_;
  std::size_t capacity_;
  bool cauchy_;
};

MeasurementMatrix make_measurement(std::size_t gamma, std::size_t k, const FieldPtr& field);

struct CompressedDelta {
  Blocks data;
  std::size_t gamma = 0;
  std::size_t k = 0;
};

CompressedDelta compress(const MeasurementMatrix& phi, const Blocks& z);

// Unique gamma-sparse z with phi*z = zprime. Supports are enumerated in order
// of ascending size, then lexicographically.
Blocks recover_sparse(const MeasurementMatrix& phi, const CompressedDelta& zprime, std::size_t gamma);

struct RowSubsetRead {
  MeasurementMatrix phi;
  CompressedDelta data;
  std::vector<std::size_t> rows;
};

// Keeps rows of a Cauchy matrix; any 2*gamma rows suffice. With no preferred
// rows given, the first 2*gamma are used.
RowSubsetRead row_subset_compressed_read(const MeasurementMatrix& phi_t, const CompressedDelta& zprime_full,
                                         std::size_t gamma, std::optional<std::vector<std::size_t>> rows = {});

// Restriction of a Cauchy matrix to the given rows (2*gamma of them).
MeasurementMatrix row_subset_measurement(const MeasurementMatrix& phi_t, const std::vector<std::size_t>& rows);

// Number of nonzero blocks.
std::size_t sparsity(const Blocks& z);

}  // namespace decstore
