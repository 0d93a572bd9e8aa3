#include "decstore/cluster.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "decstore/error.hpp"

namespace decstore {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::CorruptManifest, "missing file " + p.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, std::span<const std::uint8_t> bytes) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::IoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::size_t parse_count(const std::string& s, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw Error(Errc::CorruptManifest, std::string("bad ") + what + " '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

Cluster::Cluster(std::size_t node_count) : node_count_(0) { ensure_nodes(node_count); }

std::size_t Cluster::node_count() const {
  std::shared_lock lock(mu_);
  return node_count_;
}

void Cluster::ensure_nodes(std::size_t count) {
  std::unique_lock lock(mu_);
  while (node_count_ < count) {
    failed_.push_back(false);
    node_reads_.emplace_back(0);
    ++node_count_;
  }
}

void Cluster::check_object_id(const std::string& object) const {
  const bool ok = !object.empty() && std::all_of(object.begin(), object.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
  if (!ok) throw Error(Errc::BadParameter, "object id must be [A-Za-z0-9_-]+, got '" + object + "'");
}

void Cluster::store_shards(const std::string& object, std::size_t version, const MdsCode& code, const ShardSet& shards,
                           std::span<const NodeId> placement) {
  check_object_id(object);
  if (placement.size() != shards.shards.size()) {
    throw Error(Errc::PlacementSizeMismatch, std::to_string(shards.shards.size()) + " shards for " +
                                                 std::to_string(placement.size()) + " nodes");
  }
  std::unique_lock lock(mu_);
  for (NodeId node : placement) {
    if (node >= node_count_) throw Error(Errc::IndexOutOfRange, "node " + std::to_string(node));
    if (failed_[node]) throw Error(Errc::NodeFailed, "node " + std::to_string(node) + " is down");
  }
  for (std::size_t i = 0; i < placement.size(); ++i) {
    const Shard& s = shards.shards[i];
    ShardKey key{object, version, s.index};
    if (shards_.count(key)) throw Error(Errc::BadParameter, "shard already stored; remove the version first");
    StoredShard stored{placement[i], ShardHeader{code.field()->bits(), code.n(), code.k(), s.index}, s.payload};
    shards_.emplace(key, std::move(stored));
    dirty_.insert(key);
  }
}

void Cluster::remove(const std::string& object, std::size_t version) {
  std::unique_lock lock(mu_);
  auto it = shards_.lower_bound(ShardKey{object, version, 0});
  while (it != shards_.end() && it->first.object == object && it->first.version == version) {
    removed_.insert({it->first, it->second.node});
    dirty_.erase(it->first);
    it = shards_.erase(it);
  }
}

bool Cluster::contains(const std::string& object, std::size_t version) const {
  std::shared_lock lock(mu_);
  auto it = shards_.lower_bound(ShardKey{object, version, 0});
  return it != shards_.end() && it->first.object == object && it->first.version == version;
}

std::vector<std::size_t> Cluster::live_indices(const std::string& object, std::size_t version) const {
  std::shared_lock lock(mu_);
  std::vector<std::size_t> out;
  for (auto it = shards_.lower_bound(ShardKey{object, version, 0});
       it != shards_.end() && it->first.object == object && it->first.version == version; ++it) {
    if (!failed_[it->second.node]) out.push_back(it->first.index);
  }
  return out;
}

std::vector<NodeId> Cluster::placement(const std::string& object, std::size_t version) const {
  std::shared_lock lock(mu_);
  std::vector<NodeId> out;
  for (auto it = shards_.lower_bound(ShardKey{object, version, 0});
       it != shards_.end() && it->first.object == object && it->first.version == version; ++it) {
    out.push_back(it->second.node);
  }
  return out;
}

ShardSet Cluster::read_shards(const std::string& object, std::size_t version, std::size_t want) const {
  std::vector<std::size_t> live = live_indices(object, version);
  if (live.size() < want) {
    throw Error(Errc::InsufficientLiveShards, object + " v" + std::to_string(version) + ": need " +
                                                  std::to_string(want) + " live shards, have " +
                                                  std::to_string(live.size()));
  }
  live.resize(want);
  return read_shards(object, version, live);
}

ShardSet Cluster::read_shards(const std::string& object, std::size_t version,
                              std::span<const std::size_t> indices) const {
  std::shared_lock lock(mu_);
  ShardSet out;
  for (std::size_t idx : indices) {
    auto it = shards_.find(ShardKey{object, version, idx});
    if (it == shards_.end()) {
      throw Error(Errc::NoSuchShard, object + " v" + std::to_string(version) + " shard " + std::to_string(idx));
    }
    if (failed_[it->second.node]) {
      throw Error(Errc::InsufficientLiveShards, object + " v" + std::to_string(version) + " shard " +
                                                    std::to_string(idx) + " is on failed node " +
                                                    std::to_string(it->second.node));
    }
  }
  for (std::size_t idx : indices) {
    const StoredShard& s = shards_.find(ShardKey{object, version, idx})->second;
    out.shards.push_back({idx, s.payload});
    node_reads_[s.node].fetch_add(1);
  }
  reads_.fetch_add(indices.size());
  return out;
}

void Cluster::fail_nodes(std::span<const NodeId> nodes) {
  std::unique_lock lock(mu_);
  for (NodeId n : nodes) {
    if (n >= node_count_) throw Error(Errc::IndexOutOfRange, "node " + std::to_string(n));
    failed_[n] = true;
  }
}

void Cluster::heal_nodes(std::span<const NodeId> nodes) {
  std::unique_lock lock(mu_);
  for (NodeId n : nodes) {
    if (n >= node_count_) throw Error(Errc::IndexOutOfRange, "node " + std::to_string(n));
    failed_[n] = false;
  }
}

void Cluster::heal_all() {
  std::unique_lock lock(mu_);
  std::fill(failed_.begin(), failed_.end(), false);
}

bool Cluster::is_failed(NodeId node) const {
  std::shared_lock lock(mu_);
  return node < node_count_ && failed_[node];
}

std::vector<NodeId> Cluster::failed_nodes() const {
  std::shared_lock lock(mu_);
  std::vector<NodeId> out;
  for (NodeId n = 0; n < node_count_; ++n) {
    if (failed_[n]) out.push_back(n);
  }
  return out;
}

std::size_t Cluster::node_reads(NodeId node) const {
  std::shared_lock lock(mu_);
  if (node >= node_count_) throw Error(Errc::IndexOutOfRange, "node " + std::to_string(node));
  return node_reads_[node].load();
}

void Cluster::reset_meter() {
  std::unique_lock lock(mu_);
  reads_.store(0);
  for (auto& r : node_reads_) r.store(0);
}

std::size_t Cluster::stored_units() const {
  std::shared_lock lock(mu_);
  return shards_.size();
}

std::size_t Cluster::stored_units(const std::string& object, std::size_t version) const {
  return placement(object, version).size();
}

std::map<ShardKey, StoredShard> Cluster::snapshot() const {
  std::shared_lock lock(mu_);
  return shards_;
}

std::string Cluster::shard_file_name(std::size_t version, std::size_t index) {
  return "v" + std::to_string(version) + "_s" + std::to_string(index) + ".shard";
}

fs::path Cluster::shard_path(NodeId node, const ShardKey& key) {
  char dir[32];
  std::snprintf(dir, sizeof dir, "node_%03zu", node);
  return fs::path(dir) / key.object / shard_file_name(key.version, key.index);
}

void Cluster::persist(const fs::path& root) {
  std::unique_lock lock(mu_);
  try {
    fs::create_directories(root);
    for (const auto& [key, node] : removed_) {
      std::error_code ec;
      fs::remove(root / shard_path(node, key), ec);
    }
    for (const ShardKey& key : dirty_) {
      const StoredShard& s = shards_.at(key);
      write_file(root / shard_path(s.node, key), serialize_shard(s.header, s.payload));
    }
    std::ostringstream idx;
    idx << "# decstore cluster\n";
    idx << "nodes\t" << node_count_ << '\n';
    idx << "failed\t";
    bool any = false;
    for (NodeId n = 0; n < node_count_; ++n) {
      if (!failed_[n]) continue;
      idx << (any ? "," : "") << n;
      any = true;
    }
    idx << (any ? "" : "-") << '\n';
    for (const auto& [key, s] : shards_) {
      idx << "shard\t" << key.object << '\t' << key.version << '\t' << key.index << '\t' << s.node << '\t'
          << shard_path(s.node, key).generic_string() << '\n';
    }
    const std::string text = idx.str();
    write_file(root / "cluster.tsv", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  } catch (const fs::filesystem_error& e) {
    throw Error(Errc::IoError, e.what());
  }
  dirty_.clear();
  removed_.clear();
}

std::unique_ptr<Cluster> Cluster::load(const fs::path& root) {
  const fs::path index = root / "cluster.tsv";
  if (!fs::exists(index)) throw Error(Errc::IoError, "no cluster index at " + index.string());
  std::ifstream in(index);
  std::string line;
  auto cluster = std::make_unique<Cluster>(0);
  bool saw_nodes = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, '\t');
    if (f[0] == "nodes" && f.size() == 2) {
      cluster->ensure_nodes(parse_count(f[1], "node count"));
      saw_nodes = true;
    } else if (f[0] == "failed" && f.size() == 2) {
      if (f[1] == "-") continue;
      for (const auto& n : split(f[1], ',')) {
        const NodeId node = parse_count(n, "failed node");
        if (node >= cluster->node_count_) throw Error(Errc::CorruptManifest, "failed node out of range");
        cluster->failed_[node] = true;
      }
    } else if (f[0] == "shard" && f.size() == 6) {
      ShardKey key{f[1], parse_count(f[2], "version"), parse_count(f[3], "shard index")};
      const NodeId node = parse_count(f[4], "node");
      if (!saw_nodes || node >= cluster->node_count_) throw Error(Errc::CorruptManifest, "shard node out of range");
      if (fs::path(f[5]) != shard_path(node, key)) throw Error(Errc::CorruptManifest, "unexpected shard path " + f[5]);
      const auto bytes = read_file(root / f[5]);
      auto [header, payload] = parse_shard(bytes);
      if (header.index != key.index) throw Error(Errc::CorruptManifest, "shard header index disagrees with " + f[5]);
      if (!cluster->shards_.emplace(key, StoredShard{node, header, std::move(payload)}).second) {
        throw Error(Errc::CorruptManifest, "duplicate shard " + f[5]);
      }
    } else {
      throw Error(Errc::CorruptManifest, "unrecognized line in " + index.string());
    }
  }
  return cluster;
}

}  // namespace decstore
