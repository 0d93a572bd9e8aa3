#include "decstore/erasure.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "decstore/error.hpp"
#include "decstore/rng.hpp"

namespace decstore {

namespace {

constexpr std::size_t kExhaustiveMdsLimit = 16;
constexpr int kMdsSamples = 256;

Matrix systematic_generator(const Matrix& parity) {
  return Matrix::identity(parity.field(), parity.cols()).stack(parity);
}

Matrix cauchy_parity(std::size_t n, std::size_t k, const FieldPtr& field) {
  if (k < 1 || n <= k) {
    throw Error(Errc::BadParameter, "code needs n > k >= 1, got (" + std::to_string(n) + "," + std::to_string(k) + ")");
  }
  if (n > field->size()) {
    throw Error(Errc::FieldTooSmall, "(" + std::to_string(n) + "," + std::to_string(k) + ") code needs " +
                                         std::to_string(n) + " distinct elements, GF(2^" +
                                         std::to_string(field->bits()) + ") has " + std::to_string(field->size()));
  }
  CauchySpec spec;
  for (std::size_t i = k; i < n; ++i) spec.xs.push_back(static_cast<Element>(i));
  for (std::size_t j = 0; j < k; ++j) spec.ys.push_back(static_cast<Element>(j));
  return cauchy_matrix(field, spec);
}

}  // namespace

std::size_t ShardSet::payload_length() const {
  if (shards.empty()) return 0;
  const std::size_t len = shards.front().payload.size();
  for (const Shard& s : shards) {
    if (s.payload.size() != len) throw Error(Errc::LengthMismatch, "shard payloads have unequal lengths");
  }
  return len;
}

MdsCode::MdsCode(std::size_t n, std::size_t k, FieldPtr field)
    : n_(n), k_(k), generator_(systematic_generator(cauchy_parity(n, k, field))) {
  if (n_ <= kExhaustiveMdsLimit) verify_mds();
}

MdsCode::MdsCode(Matrix generator, bool verify)
    : n_(generator.rows()), k_(generator.cols()), generator_(std::move(generator)) {
  if (k_ < 1 || n_ <= k_) throw Error(Errc::BadParameter, "code needs n > k >= 1");
  if (verify) verify_mds();
}

MdsCode MdsCode::from_parity(Matrix parity) { return MdsCode(systematic_generator(parity), true); }

MdsCode MdsCode::single_parity(std::size_t k, FieldPtr field) {
  return from_parity(Matrix(field, 1, k, std::vector<Element>(k, 1)));
}

void MdsCode::verify_mds() const {
  auto invertible = [&](std::span<const std::size_t> rows) {
    return rank(generator_.select_rows(rows)) == k_;
  };
  bool ok = true;
  if (n_ <= kExhaustiveMdsLimit) {
    ok = for_each_combination(n_, k_, invertible);
  } else {
    Rng rng(derive_seed(n_ * 1000003 + k_, generator_.entries().size()));
    std::vector<std::size_t> all(n_);
    for (std::size_t i = 0; i < n_; ++i) all[i] = i;
    for (int t = 0; t < kMdsSamples && ok; ++t) {
      for (std::size_t i = 0; i < k_; ++i) std::swap(all[i], all[i + rng.uniform_int(0, n_ - 1 - i)]);
      std::vector<std::size_t> rows(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k_));
      std::sort(rows.begin(), rows.end());
      ok = invertible(rows);
    }
  }
  if (!ok) throw Error(Errc::NotMds, "generator has a singular k-row submatrix");
}

ShardSet MdsCode::encode(const Blocks& data) const {
  if (data.size() != k_) {
    throw Error(Errc::LengthMismatch, "encode expects " + std::to_string(k_) + " blocks, got " + std::to_string(data.size()));
  }
  const std::size_t len = block_length(data);
  ShardSet out;
  out.shards.reserve(n_);
  for (std::size_t i = 0; i < k_; ++i) out.shards.push_back({i, data[i]});
  const Field& f = *field();
  for (std::size_t i = k_; i < n_; ++i) {
    Block p(len, 0);
    for (std::size_t j = 0; j < k_; ++j) f.mul_add(p.data(), data[j].data(), len, generator_(i, j));
    out.shards.push_back({i, std::move(p)});
  }
  return out;
}

Blocks MdsCode::decode(const ShardSet& available) const {
  std::vector<const Shard*> by_index;
  std::set<std::size_t> seen;
  for (const Shard& s : available.shards) {
    if (s.index >= n_) throw Error(Errc::IndexOutOfRange, "shard index " + std::to_string(s.index));
    if (!seen.insert(s.index).second) throw Error(Errc::BadParameter, "duplicate shard index " + std::to_string(s.index));
    by_index.push_back(&s);
  }
  if (by_index.size() < k_) {
    throw Error(Errc::InsufficientShards, "need " + std::to_string(k_) + " shards, have " + std::to_string(by_index.size()));
  }
  const std::size_t len = available.payload_length();
  std::sort(by_index.begin(), by_index.end(), [](const Shard* a, const Shard* b) { return a->index < b->index; });

  std::vector<std::size_t> rows;
  Blocks rhs;
  for (std::size_t i = 0; i < k_; ++i) {
    rows.push_back(by_index[i]->index);
    rhs.push_back(by_index[i]->payload);
  }
  Blocks data;
  if (rows.back() == k_ - 1) {
    data = std::move(rhs);
  } else {
    auto res = solve_blocks(generator_.select_rows(rows), rhs);
    if (res.status != SolveStatus::Unique) throw Error(Errc::NotMds, "selected generator rows are singular");
    data = std::move(res.x);
  }

  const Field& f = *field();
  for (std::size_t t = k_; t < by_index.size(); ++t) {
    const std::size_t i = by_index[t]->index;
    Block expect(len, 0);
    for (std::size_t j = 0; j < k_; ++j) f.mul_add(expect.data(), data[j].data(), len, generator_(i, j));
    if (expect != by_index[t]->payload) {
      throw Error(Errc::InconsistentShards, "shard " + std::to_string(i) + " disagrees with the decoded data");
    }
  }
  return data;
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::size_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

void put_u32(std::vector<std::uint8_t>& out, std::size_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::size_t get_le(std::span<const std::uint8_t> b, std::size_t at, int width) {
  std::size_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::size_t>(b[at + i]) << (8 * i);
  return v;
}

constexpr std::size_t kHeaderSize = 4 + 1 + 1 + 2 + 2 + 2 + 4;

}  // namespace

std::vector<std::uint8_t> serialize_shard(const ShardHeader& h, const Block& payload) {
  if (h.m < 2 || h.m > 16) throw Error(Errc::BadParameter, "shard header m out of range");
  if (h.n > 0xFFFF || h.k > 0xFFFF || h.index > 0xFFFF) throw Error(Errc::BadParameter, "shard header field exceeds 16 bits");
  const std::size_t width = h.m == 8 ? 1 : 2;
  std::vector<std::uint8_t> out{'D', 'E', 'C', 'S', 0x01, static_cast<std::uint8_t>(h.m)};
  put_u16(out, h.n);
  put_u16(out, h.k);
  put_u16(out, h.index);
  put_u32(out, payload.size() * width);
  out.reserve(out.size() + payload.size() * width);
  for (Element e : payload) {
    if (width == 1) {
      out.push_back(static_cast<std::uint8_t>(e));
    } else {
      put_u16(out, e);
    }
  }
  return out;
}

std::pair<ShardHeader, Block> parse_shard(std::span<const std::uint8_t> b) {
  if (b.size() < kHeaderSize) throw Error(Errc::CorruptManifest, "shard shorter than its header");
  if (b[0] != 'D' || b[1] != 'E' || b[2] != 'C' || b[3] != 'S') throw Error(Errc::CorruptManifest, "bad shard magic");
  if (b[4] != 0x01) throw Error(Errc::CorruptManifest, "unsupported shard format version " + std::to_string(b[4]));
  ShardHeader h;
  h.m = b[5];
  if (h.m < 2 || h.m > 16) throw Error(Errc::CorruptManifest, "shard header m out of range");
  h.n = get_le(b, 6, 2);
  h.k = get_le(b, 8, 2);
  h.index = get_le(b, 10, 2);
  const std::size_t bytes = get_le(b, 12, 4);
  const std::size_t width = h.m == 8 ? 1 : 2;
  if (b.size() - kHeaderSize != bytes) throw Error(Errc::CorruptManifest, "shard payload length mismatch");
  if (bytes % width != 0) throw Error(Errc::CorruptManifest, "shard payload not a whole number of symbols");
  Block payload(bytes / width);
  for (std::size_t i = 0; i < payload.size(); ++i) {
    payload[i] = static_cast<Element>(get_le(b, kHeaderSize + i * width, static_cast<int>(width)));
    if (payload[i] >> h.m) throw Error(Errc::CorruptManifest, "shard symbol outside GF(2^m)");
  }
  return {h, std::move(payload)};
}

}  // namespace decstore
