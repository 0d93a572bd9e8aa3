#pragma once

#include <atomic>
#include <compare>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "decstore/erasure.hpp"

namespace decstore {

using NodeId = std::size_t;

struct ShardKey {
  std::string object;
  std::size_t version = 0;
  std::size_t index = 0;
  auto operator<=>(const ShardKey&) const = default;
};

struct StoredShard {
  NodeId node = 0;
  ShardHeader header;
  Block payload;
  bool operator==(const StoredShard& o) const {
    return node == o.node && header.m == o.header.m && header.n == o.header.n && header.k == o.header.k &&
           header.index == o.header.index && payload == o.payload;
  }
};

// In-process storage cluster. Every shard returned by a read costs one unit on
// the meter; failed nodes never serve reads.
class Cluster {
 public:
  explicit Cluster(std::size_t node_count = 0);
  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  std::size_t node_count() const;
  void ensure_nodes(std::size_t count);

  void store_shards(const std::string& object, std::size_t version, const MdsCode& code, const ShardSet& shards,
                    std::span<const NodeId> placement);
  void remove(const std::string& object, std::size_t version);
  bool contains(const std::string& object, std::size_t version) const;

  // Indices of shards of (object, version) on live nodes, ascending.
  std::vector<std::size_t> live_indices(const std::string& object, std::size_t version) const;
  std::vector<NodeId> placement(const std::string& object, std::size_t version) const;

  // The `want` lowest-index live shards (systematic first).
  ShardSet read_shards(const std::string& object, std::size_t version, std::size_t want) const;
  ShardSet read_shards(const std::string& object, std::size_t version, std::span<const std::size_t> indices) const;

  void fail_nodes(std::span<const NodeId> nodes);
  void heal_nodes(std::span<const NodeId> nodes);
  void heal_all();
  bool is_failed(NodeId node) const;
  std::vector<NodeId> failed_nodes() const;

  std::size_t reads() const noexcept { return reads_.load(); }
  std::size_t node_reads(NodeId node) const;
  void reset_meter();

  // Stored shard payloads, in shard units.
  std::size_t stored_units() const;
  std::size_t stored_units(const std::string& object, std::size_t version) const;
  std::map<ShardKey, StoredShard> snapshot() const;

  // Writes node_XXX/<object>/v<version>_s<index>.shard files and cluster.tsv.
  // Only shards changed since the last persist or load are rewritten.
  void persist(const std::filesystem::path& root);
  static std::unique_ptr<Cluster> load(const std::filesystem::path& root);

  static std::string shard_file_name(std::size_t version, std::size_t index);
  static std::filesystem::path shard_path(NodeId node, const ShardKey& key);

 private:
  void check_object_id(const std::string& object) const;

  mutable std::shared_mutex mu_;
  std::size_t node_count_;
  std::vector<bool> failed_;
  std::map<ShardKey, StoredShard> shards_;
  std::set<ShardKey> dirty_;
  std::set<std::pair<ShardKey, NodeId>> removed_;
  mutable std::atomic<std::size_t> reads_{0};
  mutable std::deque<std::atomic<std::size_t>> node_reads_;
};

}  // namespace decstore
