#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decstore/cluster.hpp"
#include "decstore/dec.hpp"
#include "decstore/layout.hpp"

namespace decstore {

struct RepoConfig {
  std::size_t delta_cap = 500;
  std::size_t pad = 20;
  std::size_t k = 8;
  std::size_t n = 16;
  Placement placement = Placement::Collocated;

  void validate() const;
  bool operator==(const RepoConfig&) const = default;
};

struct CommitSummary {
  std::size_t version = 0;
  std::size_t batch = 0;
  ResetDecision reset = ResetDecision::None;
  bool new_batch = false;
  std::vector<std::size_t> gammas;  // per group against the previous version; empty for a new batch
  std::size_t delta_units = 0;      // sum of min(2 gamma, k) * chunk_size, or the full batch size on a reset
};

struct LogEntry {
  std::size_t version = 0;
  std::size_t batch = 0;
  ResetDecision reset = ResetDecision::None;
  std::size_t file_size = 0;
  std::size_t groups = 0;
  std::size_t gamma = 0;        // modified chunks against the previous version, over all groups
  std::size_t full_groups = 0;  // groups whose record is currently a full object
  std::size_t storage_units = 0;
  std::size_t predicted_reads = 0;
};

// Variable-size archive: the file is chunked with distributed zero pads and
// every group of k chunks is a reverse DEC chain. Batches start at resets.
class Repository {
 public:
  explicit Repository(RepoConfig config);
  ~Repository();
  Repository(const Repository&) = delete;
  Repository& operator=(const Repository&) = delete;

  static std::unique_ptr<Repository> init(const std::filesystem::path& root, RepoConfig config);
  static std::unique_ptr<Repository> open(const std::filesystem::path& root);
  static bool exists(const std::filesystem::path& root);

  const RepoConfig& config() const noexcept { return config_; }
  Cluster& cluster() noexcept { return *cluster_; }
  const Cluster& cluster() const noexcept { return *cluster_; }
  std::size_t versions() const noexcept { return versions_.size(); }
  std::size_t batches() const noexcept { return batches_.size(); }
  const ChunkLayout& latest_layout() const;

  CommitSummary commit(std::span<const std::uint8_t> file);
  CommitSummary commit_edits(const EditScript& edits);

  // Metered retrieval; `reads` receives the shards read. Throws on a content
  // checksum mismatch.
  Units checkout(std::size_t version, std::size_t* reads = nullptr) const;
  std::size_t predicted_reads(std::size_t version) const;
  std::vector<LogEntry> log() const;

  // Writes the cluster and manifest.tsv under the root given to init/open.
  void persist();

 private:
  struct VersionInfo {
    std::size_t batch = 0;
    std::size_t local = 0;  // version index inside the batch, from 1
    ResetDecision reset = ResetDecision::None;
    std::vector<std::size_t> lengths;
    std::uint64_t checksum = 0;
    std::size_t file_size = 0;
  };
  struct Batch {
    std::size_t first_version = 0;
    std::size_t groups = 0;
    std::vector<std::unique_ptr<Archive>> archives;
  };

  static std::string object_id(std::size_t batch, std::size_t group);
  ArchiveConfig archive_config() const;
  CommitSummary start_batch(const ChunkLayout& layout, ResetDecision reason);
  void commit_layout(const ChunkLayout& layout, std::uint64_t checksum);
  void load_manifest();
  void write_manifest() const;

  RepoConfig config_;
  std::optional<std::filesystem::path> root_;
  std::unique_ptr<Cluster> cluster_;
  std::shared_ptr<const Codebook> codebook_;
  std::vector<Batch> batches_;
  std::vector<VersionInfo> versions_;
  std::optional<ChunkLayout> latest_;
};

// 64-bit FNV-1a, used as the per-version content checksum.
std::uint64_t content_checksum(std::span<const std::uint8_t> bytes);

}  // namespace decstore
