#include "decstore/gf.hpp"

#include <map>
#include <mutex>
#include <string>

#include "decstore/error.hpp"

namespace decstore {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::BadPolynomial: return "BadPolynomial";
    case Errc::BadParameter: return "BadParameter";
    case Errc::DistinctnessViolation: return "DistinctnessViolation";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::FieldTooSmall: return "FieldTooSmall";
    case Errc::InsufficientShards: return "InsufficientShards";
    case Errc::InconsistentShards: return "InconsistentShards";
    case Errc::NotMds: return "NotMds";
    case Errc::NoSparseSolution: return "NoSparseSolution";
    case Errc::NotCauchy: return "NotCauchy";
    case Errc::OverheadMismatch: return "OverheadMismatch";
    case Errc::SchemeMismatch: return "SchemeMismatch";
    case Errc::VersionUnavailable: return "VersionUnavailable";
    case Errc::UniverseTooLarge: return "UniverseTooLarge";
    case Errc::BadGeometry: return "BadGeometry";
    case Errc::GeometryMismatch: return "GeometryMismatch";
    case Errc::NodeFailed: return "NodeFailed";
    case Errc::PlacementSizeMismatch: return "PlacementSizeMismatch";
    case Errc::InsufficientLiveShards: return "InsufficientLiveShards";
    case Errc::NoSuchShard: return "NoSuchShard";
    case Errc::IoError: return "IoError";
    case Errc::CorruptManifest: return "CorruptManifest";
    case Errc::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

namespace {

unsigned degree(std::uint32_t p) {
  unsigned d = 0;
  while (p >> (d + 1)) ++d;
  return d;
}

// Remainder of carry-less division a mod b.
std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
  const unsigned db = degree(b);
  while (a != 0 && degree(a) >= db) a ^= b << (degree(a) - db);
  return a;
}

}  // namespace

bool Field::is_irreducible(unsigned m, std::uint32_t poly) {
  if (m < 1 || m > 16 || (poly >> m) != 1) return false;
  for (std::uint32_t d = 2; degree(d) <= m / 2; ++d) {
    if (poly_mod(poly, d) == 0) return false;
  }
  return true;
}

bool Field::is_primitive(unsigned m, std::uint32_t poly) {
  if (!is_irreducible(m, poly)) return false;
  const std::uint32_t order = (1u << m) - 1;
  std::uint32_t x = 1;
  for (std::uint32_t i = 1; i <= order; ++i) {
    x <<= 1;
    if (x >> m) x ^= poly;
    if (x == 1) return i == order;
  }
  return false;
}

std::uint32_t Field::default_polynomial(unsigned m) {
  static constexpr std::uint32_t table[17] = {0,      0,      0x7,    0xB,    0x13,   0x25,
                                              0x43,   0x89,   0x11D,  0x211,  0x409,  0x805,
                                              0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};
  if (m < 2 || m > 16) throw Error(Errc::BadParameter, "field width must be in 2..16, got " + std::to_string(m));
  return table[m];
}

Field::Field(unsigned m, std::uint32_t prim_poly) : m_(m), poly_(prim_poly) {
  if (m < 2 || m > 16) throw Error(Errc::BadParameter, "field width must be in 2..16, got " + std::to_string(m));
  if ((prim_poly >> m) != 1) throw Error(Errc::BadPolynomial, "polynomial degree is not " + std::to_string(m));
  if (!is_irreducible(m, prim_poly)) throw Error(Errc::BadPolynomial, "polynomial is reducible");
  if (!is_primitive(m, prim_poly)) throw Error(Errc::BadPolynomial, "polynomial is not primitive");

  const std::uint32_t n = order();
  exp_.assign(2 * n, 0);
  log_.assign(size(), 0);
  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    exp_[i] = static_cast<Element>(x);
    log_[x] = i;
    x <<= 1;
    if (x >> m) x ^= prim_poly;
  }
  for (std::uint32_t i = n; i < 2 * n; ++i) exp_[i] = exp_[i - n];
}

Element Field::inv(Element a) const {
  if (a == 0) throw Error(Errc::ZeroInverse, "zero has no inverse");
  return exp_[(order() - log_[a]) % order()];
}

Element Field::div(Element a, Element b) const {
  if (b == 0) throw Error(Errc::ZeroInverse, "division by zero");
  if (a == 0) return 0;
  return exp_[(log_[a] + order() - log_[b]) % order()];
}

Element Field::pow(Element a, std::uint64_t e) const noexcept {
  if (e == 0) return 1;
  if (a == 0) return 0;
  return exp_[static_cast<std::uint32_t>((static_cast<std::uint64_t>(log_[a]) * (e % order())) % order())];
}

std::uint32_t Field::log(Element a) const {
  if (a == 0) throw Error(Errc::ZeroInverse, "log of zero");
  return log_[a];
}

void Field::mul_add(Element* dst, const Element* src, std::size_t len, Element c) const noexcept {
  if (c == 0) return;
  if (c == 1) {
    for (std::size_t i = 0; i < len; ++i) dst[i] ^= src[i];
    return;
  }
  const std::uint32_t lc = log_[c];
  for (std::size_t i = 0; i < len; ++i) {
    const Element s = src[i];
    if (s != 0) dst[i] ^= exp_[lc + log_[s]];
  }
}

void Field::scale(Element* dst, std::size_t len, Element c) const noexcept {
  if (c == 1) return;
  if (c == 0) {
    for (std::size_t i = 0; i < len; ++i) dst[i] = 0;
    return;
  }
  const std::uint32_t lc = log_[c];
  for (std::size_t i = 0; i < len; ++i) {
    if (dst[i] != 0) dst[i] = exp_[lc + log_[dst[i]]];
  }
}

FieldPtr make_field(unsigned m, std::uint32_t prim_poly) {
  if (prim_poly == 0) prim_poly = Field::default_polynomial(m);
  static std::mutex mu;
  static std::map<std::pair<unsigned, std::uint32_t>, FieldPtr> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{m, prim_poly}];
  if (!slot) slot = std::make_shared<const Field>(m, prim_poly);
  return slot;
}

FieldPtr gf8() { return make_field(3); }
FieldPtr gf16() { return make_field(4); }
FieldPtr gf256() { return make_field(8); }

}  // namespace decstore
