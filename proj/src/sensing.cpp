#include "decstore/sensing.hpp"

#include <algorithm>
#include <string>

#include "decstore/error.hpp"
#include "decstore/rng.hpp"

namespace decstore {

namespace {

constexpr std::size_t kExhaustiveColumnLimit = 12;
constexpr std::size_t kCauchyDetectLimit = 72;
constexpr int kColumnSamples = 512;

bool columns_property(const Matrix& phi, std::size_t width) {
  const std::size_t k = phi.cols();
  if (width > k) return false;
  auto independent = [&](std::span<const std::size_t> cols) { return columns_independent(phi, cols); };
  if (k <= kExhaustiveColumnLimit) return for_each_combination(k, width, independent);
  Rng rng(derive_seed(k * 7919 + width, phi.rows()));
  std::vector<std::size_t> all(k);
  for (std::size_t i = 0; i < k; ++i) all[i] = i;
  for (int t = 0; t < kColumnSamples; ++t) {
    for (std::size_t i = 0; i < width; ++i) std::swap(all[i], all[i + rng.uniform_int(0, k - 1 - i)]);
    std::vector<std::size_t> cols(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(width));
    std::sort(cols.begin(), cols.end());
    if (!independent(cols)) return false;
  }
  return true;
}

}  // namespace

MeasurementMatrix MeasurementMatrix::build_cauchy(std::size_t gamma, std::size_t k, const FieldPtr& field) {
  const std::size_t rows = 2 * gamma;
  if (rows + k > field->size()) {
    throw Error(Errc::FieldTooSmall, std::to_string(rows) + "x" + std::to_string(k) + " Cauchy matrix needs " +
                                         std::to_string(rows + k) + " distinct elements");
  }
  CauchySpec spec;
  for (std::size_t i = 0; i < rows; ++i) spec.xs.push_back(static_cast<Element>(k + i));
  for (std::size_t j = 0; j < k; ++j) spec.ys.push_back(static_cast<Element>(j));
  return MeasurementMatrix::verified(cauchy_matrix(field, spec), gamma, true);
}

MeasurementMatrix MeasurementMatrix::cauchy(std::size_t gamma, std::size_t k, const FieldPtr& field) {
  if (gamma < 1 || 2 * gamma >= k) {
    throw Error(Errc::BadParameter, "measurement needs 1 <= gamma < k/2, got gamma=" + std::to_string(gamma) +
                                        " k=" + std::to_string(k));
  }
  return build_cauchy(gamma, k, field);
}

MeasurementMatrix MeasurementMatrix::cauchy_threshold(std::size_t threshold, std::size_t k, const FieldPtr& field) {
  if (threshold < 1 || 2 * threshold > k) {
    throw Error(Errc::BadParameter, "threshold must satisfy 1 <= T <= k/2, got T=" + std::to_string(threshold) +
                                        " k=" + std::to_string(k));
  }
  return build_cauchy(threshold, k, field);
}

MeasurementMatrix MeasurementMatrix::from_matrix(Matrix phi, std::size_t gamma) {
  return verified(std::move(phi), gamma, false);
}

MeasurementMatrix MeasurementMatrix::verified(Matrix phi, std::size_t gamma, bool known_cauchy) {
  if (gamma < 1 || phi.rows() != 2 * gamma || phi.rows() > phi.cols()) {
    throw Error(Errc::BadParameter, "measurement matrix must be 2*gamma x k with 2*gamma <= k");
  }
  if (!columns_property(phi, 2 * gamma)) {
    throw Error(Errc::BadParameter, "some " + std::to_string(2 * gamma) + " columns are linearly dependent");
  }
  const bool cauchy =
      known_cauchy || (phi.rows() * phi.cols() <= kCauchyDetectLimit && all_square_submatrices_nonsingular(phi));
  return MeasurementMatrix(std::move(phi), gamma, cauchy);
}

MeasurementMatrix make_measurement(std::size_t gamma, std::size_t k, const FieldPtr& field) {
  return MeasurementMatrix::cauchy(gamma, k, field);
}

CompressedDelta compress(const MeasurementMatrix& phi, const Blocks& z) {
  if (z.size() != phi.k()) {
    throw Error(Errc::LengthMismatch, "compress expects " + std::to_string(phi.k()) + " blocks, got " +
                                          std::to_string(z.size()));
  }
  return CompressedDelta{phi.phi().apply(z), phi.capacity(), phi.k()};
}

Blocks recover_sparse(const MeasurementMatrix& phi, const CompressedDelta& zprime, std::size_t gamma) {
  if (gamma > phi.capacity()) {
    throw Error(Errc::BadParameter, "gamma " + std::to_string(gamma) + " exceeds matrix capacity " +
                                        std::to_string(phi.capacity()));
  }
  const Matrix& m = phi.phi();
  if (zprime.data.size() != m.rows()) {
    throw Error(Errc::LengthMismatch, "compressed delta has " + std::to_string(zprime.data.size()) + " rows, matrix " +
                                          std::to_string(m.rows()));
  }
  const std::size_t k = m.cols();
  const std::size_t len = block_length(zprime.data);
  if (sparsity(zprime.data) == 0) return zero_blocks(k, len);

  // A fixed nonzero combination of payload positions filters most supports
  // with a single scalar solve before the full block solve.
  const Field& f = *m.field();
  Column probe(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Element acc = 0;
    for (std::size_t p = 0; p < len; ++p) acc ^= f.mul(f.exp(static_cast<std::uint32_t>(p)), zprime.data[i][p]);
    probe[i] = acc;
  }

  Blocks found;
  for (std::size_t s = 1; s <= gamma && found.empty(); ++s) {
    for_each_combination(k, s, [&](std::span<const std::size_t> support) {
      const Matrix sub = m.select_cols(support);
      if (len > 1 && solve(sub, probe).status == SolveStatus::NoSolution) return true;
      auto res = solve_blocks(sub, zprime.data);
      if (res.status != SolveStatus::Unique) return true;
      found = zero_blocks(k, len);
      for (std::size_t i = 0; i < support.size(); ++i) found[support[i]] = std::move(res.x[i]);
      return false;
    });
  }
  if (found.empty()) {
    throw Error(Errc::NoSparseSolution, "no support of size <= " + std::to_string(gamma) + " fits");
  }
  return found;
}

MeasurementMatrix row_subset_measurement(const MeasurementMatrix& phi_t, const std::vector<std::size_t>& rows) {
  if (!phi_t.is_cauchy()) throw Error(Errc::NotCauchy, "row subsets need the all-square-submatrix property");
  if (rows.empty() || rows.size() % 2 != 0 || rows.size() > phi_t.phi().rows()) {
    throw Error(Errc::BadParameter, "row subset must have an even size in 2..2T");
  }
  return MeasurementMatrix(phi_t.phi().select_rows(rows), rows.size() / 2, true);
}

RowSubsetRead row_subset_compressed_read(const MeasurementMatrix& phi_t, const CompressedDelta& zprime_full,
                                         std::size_t gamma, std::optional<std::vector<std::size_t>> rows) {
  if (gamma > phi_t.capacity()) {
    throw Error(Errc::BadParameter, "gamma " + std::to_string(gamma) + " exceeds T " + std::to_string(phi_t.capacity()));
  }
  if (zprime_full.data.size() != phi_t.phi().rows()) throw Error(Errc::LengthMismatch, "compressed delta row count");
  std::vector<std::size_t> idx;
  if (rows) {
    idx = *rows;
  } else {
    for (std::size_t i = 0; i < 2 * gamma; ++i) idx.push_back(i);
  }
  if (idx.size() != 2 * gamma) throw Error(Errc::BadParameter, "row subset must have 2*gamma rows");
  if (gamma == 0) {
    return RowSubsetRead{phi_t, CompressedDelta{zero_blocks(phi_t.phi().rows(), block_length(zprime_full.data)), 0, phi_t.k()}, {}};
  }
  MeasurementMatrix sub = row_subset_measurement(phi_t, idx);
  CompressedDelta data{{}, gamma, zprime_full.k};
  for (std::size_t r : idx) data.data.push_back(zprime_full.data.at(r));
  return RowSubsetRead{std::move(sub), std::move(data), std::move(idx)};
}

std::size_t sparsity(const Blocks& z) {
  return static_cast<std::size_t>(std::count_if(z.begin(), z.end(), [](const Block& b) {
    return std::any_of(b.begin(), b.end(), [](Element e) { return e != 0; });
  }));
}

}  // namespace decstore
