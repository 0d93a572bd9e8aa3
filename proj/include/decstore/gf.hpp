#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace decstore {

using Element = std::uint16_t;

// GF(2^m) for 2 <= m <= 16 with log/antilog tables. The element 2 (the
// polynomial x) is the table generator, so the polynomial must be primitive.
class Field {
 public:
  Field(unsigned m, std::uint32_t prim_poly);

  unsigned bits() const noexcept { return m_; }
  std::uint32_t polynomial() const noexcept { return poly_; }
  std::uint32_t size() const noexcept { return 1u << m_; }
  std::uint32_t order() const noexcept { return size() - 1; }
  bool contains(std::uint32_t v) const noexcept { return v < size(); }

  static Element add(Element a, Element b) noexcept { return a ^ b; }
  static Element sub(Element a, Element b) noexcept { return a ^ b; }

  Element mul(Element a, Element b) const noexcept {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Element div(Element a, Element b) const;
  Element inv(Element a) const;
  Element pow(Element a, std::uint64_t e) const noexcept;
  Element exp(std::uint32_t i) const noexcept { return exp_[i % order()]; }
  std::uint32_t log(Element a) const;

  // dst[i] ^= c * src[i]
  void mul_add(Element* dst, const Element* src, std::size_t len, Element c) const noexcept;
  void scale(Element* dst, std::size_t len, Element c) const noexcept;

  static std::uint32_t default_polynomial(unsigned m);
  static bool is_irreducible(unsigned m, std::uint32_t poly);
  static bool is_primitive(unsigned m, std::uint32_t poly);

 private:
  unsigned m_;
  std::uint32_t poly_;
  std::vector<Element> exp_;   // doubled so mul needs no reduction
  std::vector<std::uint32_t> log_;
};

using FieldPtr = std::shared_ptr<const Field>;

FieldPtr make_field(unsigned m, std::uint32_t prim_poly = 0);
FieldPtr gf8();
FieldPtr gf16();
FieldPtr gf256();

}  // namespace decstore
