#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "decstore/cluster.hpp"
#include "decstore/erasure.hpp"
#include "decstore/sensing.hpp"

namespace decstore {

enum class Scheme { Forward, Reverse, TwoLevel };
enum class Placement { Collocated, Distributed };
enum class RecordMode { FullObject, RawDelta, CompressedDelta, FullVersionReset };

inline constexpr std::size_t kNoIterationLimit = SIZE_MAX;

std::string_view scheme_name(Scheme s);
std::string_view mode_name(RecordMode m);
Scheme parse_scheme(std::string_view s);
RecordMode parse_mode(std::string_view s);
Placement parse_placement(std::string_view s);
std::string_view placement_name(Placement p);

struct ArchiveConfig {
  Scheme scheme = Scheme::Forward;
  bool optimized = false;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t threshold = 0;  // two-level T
  bool cauchy_reads = false;  // two-level: read 2*gamma of the 2T rows
  std::size_t iota = 10;      // optimized step: force a full version after this many sparse ones
  Placement placement = Placement::Collocated;

  void validate() const;
  // Code length for a code of dimension `dim` at the configured overhead n/k.
  std::size_t scaled_length(std::size_t dim) const;
};

// Codes and measurement matrices shared by the archives of one configuration.
// Entries are built on first use; overrides replace the default constructions.
class Codebook {
 public:
  Codebook(FieldPtr field, std::size_t n, std::size_t k);

  const FieldPtr& field() const noexcept { return field_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }

  const MdsCode& full_code() const;
  // (2w * n/k, 2w) code used for compressed deltas of width w.
  const MdsCode& level_code(std::size_t width) const;
  // 2*gamma x k matrix for the k/2-level scheme (2*gamma < k).
  const MeasurementMatrix& measurement(std::size_t gamma) const;
  // 2T x k matrix for the two-level scheme (2T <= k).
  const MeasurementMatrix& threshold_measurement(std::size_t threshold) const;

  void set_full_code(MdsCode code);
  void set_level(std::size_t gamma, MeasurementMatrix phi, MdsCode code);

 private:
  FieldPtr field_;
  std::size_t n_;
  std::size_t k_;
  mutable std::mutex mu_;
  mutable std::unique_ptr<MdsCode> full_;
  mutable std::map<std::size_t, std::unique_ptr<MdsCode>> codes_;
  mutable std::map<std::size_t, std::unique_ptr<MeasurementMatrix>> phis_;
  mutable std::map<std::size_t, std::unique_ptr<MeasurementMatrix>> thresholds_;
};

struct VersionRecord {
  std::size_t version = 0;
  RecordMode mode = RecordMode::FullObject;
  std::size_t gamma = 0;  // sparsity of x_j - x_{j-1}; 0 for the first version
  std::size_t code_n = 0;  // code of the stored payload; 0 for a zero delta
  std::size_t code_k = 0;
  std::vector<NodeId> nodes;
  std::size_t anchor = 0;  // full version this record is resolved against

  bool is_full() const { return mode == RecordMode::FullObject || mode == RecordMode::FullVersionReset; }
  bool is_zero_delta() const { return mode == RecordMode::CompressedDelta && code_n == 0; }
  bool operator==(const VersionRecord&) const = default;
};

struct IoLedger {
  std::vector<std::size_t> retrieval_reads;  // last measured reads per version, index j-1
  std::size_t total_reads = 0;
  std::size_t storage_units = 0;
};

struct Retrieved {
  Blocks value;
  std::size_t reads = 0;
};

// One object's version chain stored on a cluster.
class Archive {
 public:
  Archive(Cluster& cluster, std::string object, ArchiveConfig config, std::shared_ptr<const Codebook> codebook,
          NodeId base_node = 0);

  // Rebuilds an archive from persisted records; the cache is refilled by one
  // retrieval of the latest version (its reads land on the cluster meter).
  static std::unique_ptr<Archive> restore(Cluster& cluster, std::string object, ArchiveConfig config,
                                          std::shared_ptr<const Codebook> codebook, NodeId base_node,
                                          std::vector<VersionRecord> records);

  const ArchiveConfig& config() const noexcept { return config_; }
  const std::string& object() const noexcept { return object_; }
  const Codebook& codebook() const noexcept { return *codebook_; }
  std::size_t versions() const noexcept { return records_.size(); }
  const std::vector<VersionRecord>& records() const noexcept { return records_; }
  const Blocks& cache() const noexcept { return cache_; }
  // gamma_j for j = 2..L.
  std::vector<std::size_t> profile() const;
  NodeId base_node() const noexcept { return base_node_; }

  // Dispatches on the configured scheme.
  const VersionRecord& commit(const Blocks& x);

  VersionRecord forward_step(const Blocks& x);
  VersionRecord forward_step_optimized(const Blocks& x);
  std::pair<VersionRecord, std::optional<VersionRecord>> reverse_step(const Blocks& x);
  VersionRecord two_level_step(const Blocks& x);

  Retrieved retrieve(std::size_t l) const;

  IoLedger ledger() const;
  std::size_t storage_units() const;

 private:
  Blocks diff_against_cache(const Blocks& x) const;
  std::vector<NodeId> fresh_nodes(std::size_t count);
  std::vector<NodeId> base_nodes();
  VersionRecord store_full(std::size_t version, const Blocks& x, RecordMode mode, std::vector<NodeId> nodes);
  VersionRecord store_delta(std::size_t version, const Blocks& z, std::size_t gamma, std::size_t level,
                            bool raw, std::vector<NodeId> nodes);
  VersionRecord store_forward_delta(std::size_t version, const Blocks& z, std::size_t gamma);
  std::size_t sparse_run_before(std::size_t version) const;
  void accept(const Blocks& x, VersionRecord rec);

  // Payload gamma for the delta stored in record index i.
  std::size_t payload_gamma(std::size_t i) const;
  std::size_t full_anchor(std::size_t l) const;
  Blocks read_full(const VersionRecord& rec, std::size_t& reads) const;
  void apply_deltas(Blocks& value, const std::vector<std::size_t>& delta_indices, std::size_t& reads) const;

  Cluster& cluster_;
  std::string object_;
  ArchiveConfig config_;
  std::shared_ptr<const Codebook> codebook_;
  NodeId base_node_;
  NodeId next_free_;
  std::vector<VersionRecord> records_;
  Blocks cache_;
  std::size_t payload_len_ = 0;
  mutable std::mutex ledger_mu_;
  mutable std::vector<std::size_t> retrieval_reads_;
  mutable std::size_t total_reads_ = 0;
};

// Closed-form I/O and storage accounting for a sparsity profile.
struct PredictConfig {
  Scheme scheme = Scheme::Forward;
  bool optimized = false;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t threshold = 0;
  bool cauchy_reads = false;
  std::size_t iota = kNoIterationLimit;

  static PredictConfig from(const ArchiveConfig& c);
};

// Reads to fetch one delta of sparsity gamma.
std::size_t delta_read_cost(std::size_t gamma, const PredictConfig& cfg);
// Shard units of one delta of sparsity gamma.
std::size_t delta_storage_cost(std::size_t gamma, const PredictConfig& cfg);
// Which of versions 1..L are stored in full.
std::vector<bool> predicted_full_versions(const std::vector<std::size_t>& profile, const PredictConfig& cfg);
// Reads to fetch each stored record, in version order.
std::vector<std::size_t> predict_object_reads(const std::vector<std::size_t>& profile, const PredictConfig& cfg);
// Reads to retrieve version l of an archive holding 1 + |profile| versions.
std::size_t predict_reads(const std::vector<std::size_t>& profile, const PredictConfig& cfg, std::size_t l);
// Storage after the first l versions have been committed.
std::size_t predict_storage(const std::vector<std::size_t>& profile, const PredictConfig& cfg, std::size_t l);

}  // namespace decstore
