#include <doctest.h>

#include "decstore/error.hpp"
#include "decstore/matrix.hpp"
#include "decstore/rng.hpp"

using namespace decstore;

namespace {

Matrix random_matrix(const FieldPtr& f, std::size_t r, std::size_t c, Rng& rng) {
  std::vector<Element> e(r * c);
  for (auto& x : e) x = static_cast<Element>(rng.uniform_int(0, f->order()));
  return Matrix(f, r, c, e);
}

// Determinant by cofactor expansion, used as an independent singularity oracle.
Element det(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  Element acc = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 1; i < n; ++i) rows.push_back(i);
    for (std::size_t c = 0; c < n; ++c) {
      if (c != j) cols.push_back(c);
    }
    acc ^= m.field()->mul(m(0, j), det(m.select_rows(rows).select_cols(cols)));
  }
  return acc;
}

}  // namespace

TEST_CASE("identity and products") {
  const FieldPtr f = gf256();
  Rng rng(1);
  const Matrix a = random_matrix(f, 3, 5, rng);
  CHECK(Matrix::identity(f, 3) * a == a);
  CHECK(a * Matrix::identity(f, 5) == a);
  CHECK_THROWS_AS(a * a, Error);
}

TEST_CASE("apply on blocks is position-wise") {
  const FieldPtr f = gf16();
  Rng rng(2);
  const Matrix a = random_matrix(f, 3, 4, rng);
  Blocks x(4, Block(6));
  for (auto& b : x) {
    for (auto& e : b) e = static_cast<Element>(rng.uniform_int(0, 15));
  }
  const Blocks y = a.apply(x);
  for (std::size_t p = 0; p < 6; ++p) {
    Column col(4);
    for (std::size_t i = 0; i < 4; ++i) col[i] = x[i][p];
    const Column out = a.apply(col);
    for (std::size_t r = 0; r < 3; ++r) CHECK(y[r][p] == out[r]);
  }
}

TEST_CASE("Cauchy construction") {
  const FieldPtr f = gf8();
  const Matrix c = cauchy_matrix(f, CauchySpec{{4, 5}, {0, 1, 2, 3}});
  CHECK(c.rows() == 2);
  CHECK(c(0, 0) == f->inv(4));
  CHECK(c(1, 3) == f->inv(5 ^ 3));
  CHECK_THROWS_AS(cauchy_matrix(f, CauchySpec{{1, 2}, {2, 3}}), Error);
  CHECK_THROWS_AS(cauchy_matrix(f, CauchySpec{{1, 1}, {2, 3}}), Error);
}

TEST_CASE("every square Cauchy submatrix is nonsingular for sizes up to 6") {
  for (const FieldPtr& f : {gf16(), gf256()}) {
    for (std::size_t r = 1; r <= 6; ++r) {
      for (std::size_t c = 1; c <= 6; ++c) {
        CauchySpec s;
        for (std::size_t i = 0; i < r; ++i) s.xs.push_back(static_cast<Element>(c + i));
        for (std::size_t j = 0; j < c; ++j) s.ys.push_back(static_cast<Element>(j));
        const Matrix m = cauchy_matrix(f, s);
        REQUIRE(all_square_submatrices_nonsingular(m));
        // Cross-check the largest square minors against cofactor determinants.
        const std::size_t t = std::min(r, c);
        for_each_combination(r, t, [&](std::span<const std::size_t> rows) {
          return for_each_combination(c, t, [&](std::span<const std::size_t> cols) {
            CHECK(det(m.select_rows(rows).select_cols(cols)) != 0);
            return true;
          });
        });
      }
    }
  }
}

TEST_CASE("rank, inverse and singular detection agree with determinants") {
  const FieldPtr f = gf8();
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 3);
    const Matrix m = random_matrix(f, n, n, rng);
    const bool singular = det(m) == 0;
    const auto inv = inverse(m);
    CHECK(inv.has_value() == !singular);
    CHECK((rank(m) == n) == !singular);
    if (inv) CHECK(m * *inv == Matrix::identity(f, n));
  }
}

TEST_CASE("solve reports unique, missing and ambiguous solutions") {
  const FieldPtr f = gf8();
  const Matrix a(f, 2, 2, {1, 2, 3, 4});
  const Column x{5, 6};
  const auto r = solve(a, a.apply(x));
  REQUIRE(r.status == SolveStatus::Unique);
  CHECK(r.x == x);

  const Matrix s(f, 2, 2, {1, 2, 1, 2});
  CHECK(solve(s, Column{1, 0}).status == SolveStatus::NoSolution);
  CHECK(solve(s, Column{1, 1}).status == SolveStatus::Underdetermined);

  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix t = random_matrix(f, 4, 3, rng);
    if (rank(t) < 3) continue;
    Blocks xb(3, Block(5));
    for (auto& b : xb) {
      for (auto& e : b) e = static_cast<Element>(rng.uniform_int(0, 7));
    }
    const auto sb = solve_blocks(t, t.apply(xb));
    REQUIRE(sb.status == SolveStatus::Unique);
    CHECK(sb.x == xb);
  }
}

TEST_CASE("Vandermonde columns are independent for distinct nodes") {
  const FieldPtr f = gf8();
  const Matrix v = vandermonde_matrix(f, 3, {1, 2, 3, 4, 5, 6});
  for_each_combination(6, 3, [&](std::span<const std::size_t> cols) {
    CHECK(columns_independent(v, cols));
    return true;
  });
}

TEST_CASE("combinations enumerate C(n, r) subsets in lexicographic order") {
  std::vector<std::vector<std::size_t>> seen;
  for_each_combination(5, 3, [&](std::span<const std::size_t> s) {
    seen.emplace_back(s.begin(), s.end());
    return true;
  });
  CHECK(seen.size() == 10);
  CHECK(seen.front() == std::vector<std::size_t>{0, 1, 2});
  CHECK(seen.back() == std::vector<std::size_t>{2, 3, 4});
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  std::size_t calls = 0;
  CHECK_FALSE(for_each_combination(5, 2, [&](std::span<const std::size_t>) { return ++calls < 3; }));
  CHECK(calls == 3);
}

TEST_CASE("block helpers") {
  Blocks a = zero_blocks(2, 3);
  add_into(a, Blocks{{1, 2, 3}, {4, 5, 6}});
  add_into(a, Blocks{{1, 0, 0}, {0, 0, 6}});
  CHECK(a == Blocks{{0, 2, 3}, {4, 5, 0}});
  CHECK(block_length(a) == 3);
  CHECK_THROWS_AS(add_into(a, Blocks{{1}}), Error);
}
