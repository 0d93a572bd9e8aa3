#include <doctest.h>

#include "decstore/error.hpp"
#include "decstore/rng.hpp"
#include "decstore/sensing.hpp"
#include "decstore/workload.hpp"

using namespace decstore;

namespace {

constexpr Element w = 2;  // generator of GF(8)*, w^3 = w + 1

MeasurementMatrix phi1() {
  return MeasurementMatrix::from_matrix(Matrix(gf8(), 2, 4, {1, 0, w, w ^ 1, 0, 1, w ^ 1, w}), 1);
}

Blocks as_blocks(const Column& c) {
  Blocks out;
  for (Element e : c) out.push_back(Block{e});
  return out;
}

// Every gamma-sparse block vector of length k, one symbol per block.
template <typename F>
void for_each_sparse(const Field& f, std::size_t k, std::size_t gamma, F&& fn) {
  for_each_combination(k, gamma, [&](std::span<const std::size_t> support) {
    std::vector<Element> vals(gamma, 1);
    while (true) {
      Column z(k, 0);
      for (std::size_t i = 0; i < gamma; ++i) z[support[i]] = vals[i];
      fn(z);
      std::size_t i = 0;
      while (i < gamma && vals[i] == f.order()) vals[i++] = 1;
      if (i == gamma) break;
      ++vals[i];
    }
    return true;
  });
}

}  // namespace

TEST_CASE("worked example: compression of a 1-sparse difference") {
  const Column x1{1, w ^ 1, w, w};
  const Column x2{1, w ^ 1, w ^ 1, w};
  Column z(4);
  for (std::size_t i = 0; i < 4; ++i) z[i] = Field::sub(x2[i], x1[i]);
  CHECK(z == Column{0, 0, 1, 0});
  const MeasurementMatrix phi = phi1();
  const CompressedDelta c = compress(phi, as_blocks(z));
  CHECK(c.data == Blocks{{w}, {w ^ 1}});
  CHECK(recover_sparse(phi, c, 1) == as_blocks(z));
}

TEST_CASE("measurement matrix validation") {
  // Columns 0 and 2 of this matrix are dependent.
  CHECK_THROWS_AS(MeasurementMatrix::from_matrix(Matrix(gf8(), 2, 4, {1, 0, 1, 1, 0, 1, 0, 1}), 1), Error);
  CHECK_THROWS_AS(MeasurementMatrix::cauchy(2, 4, gf8()), Error);  // 2 * gamma must stay below k
  CHECK_NOTHROW(MeasurementMatrix::cauchy_threshold(2, 4, gf8()));
  CHECK_THROWS_AS(MeasurementMatrix::cauchy(3, 7, gf8()), Error);  // 2 * gamma + k exceeds 8
  const MeasurementMatrix m = MeasurementMatrix::cauchy(3, 10, gf256());
  CHECK(m.phi().rows() == 6);
  CHECK(m.capacity() == 3);
  CHECK(m.is_cauchy());
  CHECK_FALSE(phi1().is_cauchy());
}

TEST_CASE("exhaustive sparse recovery over GF(8) and GF(16)") {
  for (const FieldPtr& f : {gf8(), gf16()}) {
    for (std::size_t k = 3; k <= 6; ++k) {
      for (std::size_t gamma = 1; 2 * gamma < k; ++gamma) {
        if (2 * gamma + k > f->size()) continue;
        const MeasurementMatrix phi = MeasurementMatrix::cauchy(gamma, k, f);
        for (std::size_t g = 0; g <= gamma; ++g) {
          for_each_sparse(*f, k, g, [&](const Column& z) {
            const CompressedDelta c = compress(phi, as_blocks(z));
            REQUIRE(recover_sparse(phi, c, gamma) == as_blocks(z));
          });
        }
      }
    }
  }
}

TEST_CASE("multi-symbol blocks share one support") {
  const FieldPtr f = gf256();
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 4 + rng.uniform_int(0, 12);
    const std::size_t gamma = 1 + rng.uniform_int(0, (k - 1) / 2 - 1);
    const MeasurementMatrix phi = make_measurement(gamma, k, f);
    const Column pattern = sparse_vector(k, gamma, *f, rng);
    Blocks z(k, Block(7, 0));
    for (std::size_t i = 0; i < k; ++i) {
      if (pattern[i] == 0) continue;
      for (auto& e : z[i]) e = static_cast<Element>(rng.uniform_int(0, 255));
      z[i][0] = pattern[i];
    }
    REQUIRE(recover_sparse(phi, compress(phi, z), gamma) == z);
  }
}

TEST_CASE("a dense difference is not recoverable") {
  const FieldPtr f = gf256();
  const MeasurementMatrix phi = MeasurementMatrix::cauchy(1, 5, f);
  const Blocks dense{{1}, {2}, {3}, {4}, {5}};
  try {
    recover_sparse(phi, compress(phi, dense), 1);
    FAIL("expected NoSparseSolution");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoSparseSolution);
  }
}

TEST_CASE("row subsets of a Cauchy matrix recover lower sparsity") {
  const FieldPtr f = gf256();
  Rng rng(5);
  const std::size_t k = 10;
  const std::size_t t = 3;
  const MeasurementMatrix phi_t = MeasurementMatrix::cauchy(t, k, f);
  for (std::size_t gamma = 1; gamma <= t; ++gamma) {
    const Blocks z = as_blocks(sparse_vector(k, gamma, *f, rng));
    const CompressedDelta full = compress(phi_t, z);
    const RowSubsetRead first = row_subset_compressed_read(phi_t, full, gamma);
    CHECK(first.rows.size() == 2 * gamma);
    CHECK(recover_sparse(first.phi, first.data, gamma) == z);
    for_each_combination(2 * t, 2 * gamma, [&](std::span<const std::size_t> rows) {
      const RowSubsetRead r =
          row_subset_compressed_read(phi_t, full, gamma, std::vector<std::size_t>(rows.begin(), rows.end()));
      REQUIRE(recover_sparse(r.phi, r.data, gamma) == z);
      return true;
    });
  }
  CHECK_THROWS_AS(row_subset_measurement(phi1(), {0, 1}), Error);
}

TEST_CASE("sparsity counts nonzero blocks") {
  CHECK(sparsity(Blocks{{0, 0}, {0, 1}, {0, 0}, {2, 0}}) == 2);
  CHECK(sparsity(Blocks{}) == 0);
}
