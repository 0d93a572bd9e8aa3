#include <doctest.h>

#include "decstore/error.hpp"
#include "decstore/gf.hpp"
#include "decstore/rng.hpp"

using namespace decstore;

namespace {

// Shift-and-add multiplication with reduction, independent of the tables.
std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b, unsigned m, std::uint32_t poly) {
  std::uint32_t acc = 0;
  while (b) {
    if (b & 1) acc ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1u << m)) a ^= poly;
  }
  return acc;
}

}  // namespace

TEST_CASE("GF(8) with w^3 = w + 1") {
  const FieldPtr f = gf8();
  CHECK(f->polynomial() == 0xB);
  CHECK(f->size() == 8);
  const Element w = 2;
  CHECK(f->mul(w, f->mul(w, w)) == (w ^ 1));  // w^3 = w + 1
  CHECK(f->pow(w, 7) == 1);
  CHECK(f->inv(w) == (1 ^ f->mul(w, w)));  // w^-1 = w^6 = w^2 + 1
  CHECK_THROWS_AS(f->inv(0), Error);
}

TEST_CASE("GF(256) default polynomial") {
  const FieldPtr f = gf256();
  CHECK(f->polynomial() == 0x11D);
  CHECK(f->mul(0x80, 2) == 0x1D);
  CHECK(f->exp(255) == 1);
}

TEST_CASE("multiplication matches the shift-and-add oracle") {
  for (unsigned m : {2u, 3u, 4u, 8u}) {
    const FieldPtr f = make_field(m);
    for (std::uint32_t a = 0; a < f->size(); ++a) {
      for (std::uint32_t b = 0; b < f->size(); ++b) {
        REQUIRE(f->mul(a, b) == slow_mul(a, b, m, f->polynomial()));
      }
    }
  }
  const FieldPtr f16 = make_field(16);
  Rng rng(7);
  for (int i = 0; i < 20000; ++i) {
    const auto a = static_cast<Element>(rng.uniform_int(0, 0xFFFF));
    const auto b = static_cast<Element>(rng.uniform_int(0, 0xFFFF));
    REQUIRE(f16->mul(a, b) == slow_mul(a, b, 16, f16->polynomial()));
  }
}

TEST_CASE("field axioms hold exhaustively for m <= 4") {
  for (unsigned m = 2; m <= 4; ++m) {
    const FieldPtr f = make_field(m);
    const std::uint32_t q = f->size();
    for (std::uint32_t a = 0; a < q; ++a) {
      CHECK(Field::add(a, 0) == a);
      CHECK(f->mul(a, 1) == a);
      CHECK(Field::add(a, a) == 0);
      if (a != 0) CHECK(f->mul(a, f->inv(a)) == 1);
      for (std::uint32_t b = 0; b < q; ++b) {
        CHECK(f->mul(a, b) == f->mul(b, a));
        if (b != 0) CHECK(f->mul(f->div(a, b), b) == a);
        for (std::uint32_t c = 0; c < q; ++c) {
          REQUIRE(f->mul(a, f->mul(b, c)) == f->mul(f->mul(a, b), c));
          REQUIRE(f->mul(a, Field::add(b, c)) == Field::add(f->mul(a, b), f->mul(a, c)));
        }
      }
    }
  }
}

TEST_CASE("log and exp are inverse") {
  const FieldPtr f = gf256();
  for (std::uint32_t a = 1; a < 256; ++a) CHECK(f->exp(f->log(a)) == a);
  CHECK_THROWS_AS(f->log(0), Error);
}

TEST_CASE("polynomial validation") {
  CHECK(Field::is_primitive(3, 0xB));
  CHECK(Field::is_irreducible(8, 0x11B));
  CHECK_FALSE(Field::is_primitive(8, 0x11B));  // AES polynomial: x is not a generator
  CHECK_FALSE(Field::is_irreducible(3, 0x9));  // x^3 + 1 = (x + 1)(x^2 + x + 1)
  CHECK_THROWS_AS(Field(3, 0x9), Error);
  CHECK_THROWS_AS(Field(8, 0x11B), Error);
  CHECK_THROWS_AS(Field(1, 0x3), Error);
  CHECK_THROWS_AS(Field(17, 0), Error);
  for (unsigned m = 2; m <= 16; ++m) CHECK(Field::is_primitive(m, Field::default_polynomial(m)));
}

TEST_CASE("mul_add and scale act element-wise") {
  const FieldPtr f = gf16();
  Rng rng(3);
  std::vector<Element> src(33), dst(33), expect(33);
  for (std::size_t i = 0; i < src.size(); ++i) {
    src[i] = static_cast<Element>(rng.uniform_int(0, 15));
    dst[i] = static_cast<Element>(rng.uniform_int(0, 15));
  }
  const Element c = 11;
  for (std::size_t i = 0; i < src.size(); ++i) expect[i] = dst[i] ^ f->mul(c, src[i]);
  f->mul_add(dst.data(), src.data(), src.size(), c);
  CHECK(dst == expect);
  for (auto& e : expect) e = f->mul(e, 5);
  f->scale(dst.data(), dst.size(), 5);
  CHECK(dst == expect);
}

TEST_CASE("error messages carry the code name") {
  try {
    gf8()->inv(0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroInverse);
    CHECK(std::string(e.what()).rfind("ZeroInverse", 0) == 0);
  }
}
