#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "decstore/matrix.hpp"

namespace decstore {

struct Shard {
  std::size_t index = 0;
  Block payload;
};

struct ShardSet {
  std::vector<Shard> shards;
  std::size_t payload_length() const;
};

// Systematic (n, k) MDS code: generator = [I_k ; P] with an (n-k) x k parity P.
class MdsCode {
 public:
  // Parity P is Cauchy with xs = {k..n-1}, ys = {0..k-1}; needs n <= 2^m.
  MdsCode(std::size_t n, std::size_t k, FieldPtr field);

  // Explicit parity rows; the MDS property is verified.
  static MdsCode from_parity(Matrix parity);
  // (k+1, k) code with an all-ones parity row.
  static MdsCode single_parity(std::size_t k, FieldPtr field);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  const Matrix& generator() const noexcept { return generator_; }
  const FieldPtr& field() const noexcept { return generator_.field(); }
  double overhead() const noexcept { return static_cast<double>(n_) / static_cast<double>(k_); }

  ShardSet encode(const Blocks& data) const;
  // Uses systematic shards first, then parity by index. Extra shards beyond k
  // are checked against the decoded data.
  Blocks decode(const ShardSet& available) const;

 private:
  explicit MdsCode(Matrix generator, bool verify);
  void verify_mds() const;

  std::size_t n_;
  std::size_t k_;
  Matrix generator_;
};

// On-disk shard header. Payload symbols take one byte for m = 8, else two
// bytes little-endian.
struct ShardHeader {
  unsigned m = 8;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t index = 0;
};

std::vector<std::uint8_t> serialize_shard(const ShardHeader& header, const Block& payload);
std::pair<ShardHeader, Block> parse_shard(std::span<const std::uint8_t> bytes);

}  // namespace decstore
