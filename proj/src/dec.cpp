#include "decstore/dec.hpp"

#include <algorithm>
#include <string>

#include "decstore/error.hpp"

namespace decstore {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Forward: return "forward";
    case Scheme::Reverse: return "reverse";
    case Scheme::TwoLevel: return "two-level";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "forward") return Scheme::Forward;
  if (s == "reverse") return Scheme::Reverse;
  if (s == "two-level") return Scheme::TwoLevel;
  throw Error(Errc::BadConfig, "unknown scheme '" + std::string(s) + "'");
}

std::string_view mode_name(RecordMode m) {
  switch (m) {
    case RecordMode::FullObject: return "FullObject";
    case RecordMode::RawDelta: return "RawDelta";
    case RecordMode::CompressedDelta: return "CompressedDelta";
    case RecordMode::FullVersionReset: return "FullVersionReset";
  }
  return "?";
}

RecordMode parse_mode(std::string_view s) {
  if (s == "FullObject") return RecordMode::FullObject;
  if (s == "RawDelta") return RecordMode::RawDelta;
  if (s == "CompressedDelta") return RecordMode::CompressedDelta;
  if (s == "FullVersionReset") return RecordMode::FullVersionReset;
  throw Error(Errc::CorruptManifest, "unknown record mode '" + std::string(s) + "'");
}

std::string_view placement_name(Placement p) { return p == Placement::Collocated ? "collocated" : "distributed"; }

Placement parse_placement(std::string_view s) {
  if (s == "collocated") return Placement::Collocated;
  if (s == "distributed") return Placement::Distributed;
  throw Error(Errc::BadConfig, "unknown placement '" + std::string(s) + "'");
}

void ArchiveConfig::validate() const {
  if (k < 1 || n <= k) {
    throw Error(Errc::BadParameter, "need n > k >= 1, got n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  if (scheme == Scheme::TwoLevel) {
    if (threshold < 1 || 2 * threshold > k) {
      throw Error(Errc::BadParameter, "two-level threshold must be in 1..floor(k/2), got " + std::to_string(threshold));
    }
    if (optimized) throw Error(Errc::BadParameter, "the optimized step applies to forward and reverse schemes");
    scaled_length(2 * threshold);
  } else if (cauchy_reads) {
    throw Error(Errc::BadParameter, "Cauchy reads apply to the two-level scheme");
  }
  if (iota < 1) throw Error(Errc::BadParameter, "iteration threshold must be >= 1");
}

std::size_t ArchiveConfig::scaled_length(std::size_t dim) const {
  if ((dim * n) % k != 0) {
    throw Error(Errc::OverheadMismatch, "code of dimension " + std::to_string(dim) + " has non-integral length at n/k=" +
                                            std::to_string(n) + "/" + std::to_string(k));
  }
  return dim * n / k;
}

Codebook::Codebook(FieldPtr field, std::size_t n, std::size_t k) : field_(std::move(field)), n_(n), k_(k) {
  if (k < 1 || n <= k) throw Error(Errc::BadParameter, "codebook needs n > k >= 1");
}

const MdsCode& Codebook::full_code() const {
  std::lock_guard lock(mu_);
  if (!full_) full_ = std::make_unique<MdsCode>(n_, k_, field_);
  return *full_;
}

const MdsCode& Codebook::level_code(std::size_t width) const {
  std::lock_guard lock(mu_);
  auto& slot = codes_[width];
  if (!slot) {
    const std::size_t dim = 2 * width;
    if ((dim * n_) % k_ != 0) {
      codes_.erase(width);
      throw Error(Errc::OverheadMismatch, "level " + std::to_string(width) + " code length " + std::to_string(dim) +
                                              "*" + std::to_string(n_) + "/" + std::to_string(k_) + " is not integral");
    }
    try {
      slot = std::make_unique<MdsCode>(dim * n_ / k_, dim, field_);
    } catch (...) {
      codes_.erase(width);
      throw;
    }
  }
  return *slot;
}

const MeasurementMatrix& Codebook::measurement(std::size_t gamma) const {
  std::lock_guard lock(mu_);
  auto& slot = phis_[gamma];
  if (!slot) {
    try {
      slot = std::make_unique<MeasurementMatrix>(MeasurementMatrix::cauchy(gamma, k_, field_));
    } catch (...) {
      phis_.erase(gamma);
      throw;
    }
  }
  return *slot;
}

const MeasurementMatrix& Codebook::threshold_measurement(std::size_t threshold) const {
  std::lock_guard lock(mu_);
  auto& slot = thresholds_[threshold];
  if (!slot) {
    try {
      slot = std::make_unique<MeasurementMatrix>(MeasurementMatrix::cauchy_threshold(threshold, k_, field_));
    } catch (...) {
      thresholds_.erase(threshold);
      throw;
    }
  }
  return *slot;
}

void Codebook::set_full_code(MdsCode code) {
  if (code.n() != n_ || code.k() != k_) throw Error(Errc::BadParameter, "full code must be (n, k)");
  std::lock_guard lock(mu_);
  full_ = std::make_unique<MdsCode>(std::move(code));
}

void Codebook::set_level(std::size_t gamma, MeasurementMatrix phi, MdsCode code) {
  if (phi.capacity() != gamma || phi.k() != k_) throw Error(Errc::BadParameter, "measurement shape does not match");
  if (code.k() != 2 * gamma || code.n() * k_ != n_ * code.k()) {
    throw Error(Errc::OverheadMismatch, "level code must be (2*gamma*n/k, 2*gamma)");
  }
  std::lock_guard lock(mu_);
  phis_[gamma] = std::make_unique<MeasurementMatrix>(std::move(phi));
  codes_[gamma] = std::make_unique<MdsCode>(std::move(code));
}

Archive::Archive(Cluster& cluster, std::string object, ArchiveConfig config, std::shared_ptr<const Codebook> codebook,
                 NodeId base_node)
    : cluster_(cluster),
      object_(std::move(object)),
      config_(config),
      codebook_(std::move(codebook)),
      base_node_(base_node),
      next_free_(base_node) {
  config_.validate();
  if (codebook_->n() != config_.n || codebook_->k() != config_.k) {
    throw Error(Errc::BadParameter, "codebook and archive disagree on (n, k)");
  }
}

std::unique_ptr<Archive> Archive::restore(Cluster& cluster, std::string object, ArchiveConfig config,
                                          std::shared_ptr<const Codebook> codebook, NodeId base_node,
                                          std::vector<VersionRecord> records) {
  auto a = std::make_unique<Archive>(cluster, std::move(object), config, std::move(codebook), base_node);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].version != i + 1) throw Error(Errc::CorruptManifest, a->object_ + ": records out of order");
    for (NodeId n : records[i].nodes) a->next_free_ = std::max(a->next_free_, n + 1);
  }
  a->records_ = std::move(records);
  a->retrieval_reads_.assign(a->records_.size(), 0);
  if (!a->records_.empty()) {
    a->cache_ = a->retrieve(a->records_.size()).value;
    a->payload_len_ = block_length(a->cache_);
  }
  return a;
}

std::vector<std::size_t> Archive::profile() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < records_.size(); ++i) out.push_back(records_[i].gamma);
  return out;
}

Blocks Archive::diff_against_cache(const Blocks& x) const {
  if (x.size() != config_.k) {
    throw Error(Errc::LengthMismatch, "version must have " + std::to_string(config_.k) + " blocks, got " +
                                          std::to_string(x.size()));
  }
  const std::size_t len = block_length(x);
  if (len == 0) throw Error(Errc::LengthMismatch, "blocks must be non-empty");
  for (const Block& b : x) {
    for (Element e : b) {
      if (!codebook_->field()->contains(e)) throw Error(Errc::BadParameter, "symbol outside the field");
    }
  }
  if (records_.empty()) {
    return {};
  }
  if (len != payload_len_) throw Error(Errc::LengthMismatch, "block length differs from earlier versions");
  Blocks z = x;
  add_into(z, cache_);
  return z;
}

std::vector<NodeId> Archive::fresh_nodes(std::size_t count) {
  std::vector<NodeId> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = next_free_ + i;
  next_free_ += count;
  cluster_.ensure_nodes(next_free_);
  return out;
}

std::vector<NodeId> Archive::base_nodes() {
  if (config_.placement == Placement::Distributed) return fresh_nodes(config_.n);
  std::vector<NodeId> out(config_.n);
  for (std::size_t i = 0; i < config_.n; ++i) out[i] = base_node_ + i;
  cluster_.ensure_nodes(base_node_ + config_.n);
  next_free_ = std::max(next_free_, base_node_ + config_.n);
  return out;
}

VersionRecord Archive::store_full(std::size_t version, const Blocks& x, RecordMode mode, std::vector<NodeId> nodes) {
  const MdsCode& code = codebook_->full_code();
  cluster_.store_shards(object_, version, code, code.encode(x), nodes);
  VersionRecord rec;
  rec.version = version;
  rec.mode = mode;
  rec.code_n = code.n();
  rec.code_k = code.k();
  rec.nodes = std::move(nodes);
  rec.anchor = version;
  return rec;
}

VersionRecord Archive::store_delta(std::size_t version, const Blocks& z, std::size_t gamma, std::size_t level,
                                   bool raw, std::vector<NodeId> nodes) {
  VersionRecord rec;
  rec.version = version;
  rec.gamma = gamma;
  if (gamma == 0) {
    rec.mode = RecordMode::CompressedDelta;
    return rec;
  }
  if (raw) {
    const MdsCode& code = codebook_->full_code();
    nodes.resize(code.n());
    cluster_.store_shards(object_, version, code, code.encode(z), nodes);
    rec.mode = RecordMode::RawDelta;
    rec.code_n = code.n();
    rec.code_k = code.k();
  } else {
    const MeasurementMatrix& phi = config_.scheme == Scheme::TwoLevel ? codebook_->threshold_measurement(level)
                                                                      : codebook_->measurement(level);
    const MdsCode& code = codebook_->level_code(level);
    nodes.resize(code.n());
    cluster_.store_shards(object_, version, code, code.encode(compress(phi, z).data), nodes);
    rec.mode = RecordMode::CompressedDelta;
    rec.code_n = code.n();
    rec.code_k = code.k();
  }
  rec.nodes = std::move(nodes);
  return rec;
}

VersionRecord Archive::store_forward_delta(std::size_t version, const Blocks& z, std::size_t gamma) {
  const std::size_t k = config_.k;
  bool raw;
  std::size_t level;
  if (config_.scheme == Scheme::TwoLevel) {
    raw = gamma > config_.threshold;
    level = config_.threshold;
  } else {
    raw = 2 * gamma >= k;
    level = gamma;
  }
  std::vector<NodeId> nodes;
  if (gamma > 0) {
    const std::size_t width = raw ? config_.n : codebook_->level_code(level).n();
    if (config_.placement == Placement::Distributed) {
      nodes = fresh_nodes(width);
    } else {
      nodes = base_nodes();
      nodes.resize(width);
    }
  }
  return store_delta(version, z, gamma, level, raw, std::move(nodes));
}

std::size_t Archive::sparse_run_before(std::size_t version) const {
  std::size_t run = 0;
  for (std::size_t v = version; v >= 1; --v) {
    if (records_[v - 1].is_full()) break;
    ++run;
  }
  return run;
}

void Archive::accept(const Blocks& x, VersionRecord rec) {
  records_.push_back(std::move(rec));
  cache_ = x;
  payload_len_ = block_length(x);
  std::lock_guard lock(ledger_mu_);
  retrieval_reads_.push_back(0);
}

VersionRecord Archive::forward_step(const Blocks& x) {
  if (config_.scheme != Scheme::Forward) throw Error(Errc::SchemeMismatch, "forward_step on a non-forward archive");
  const Blocks z = diff_against_cache(x);
  const std::size_t version = records_.size() + 1;
  VersionRecord rec;
  if (records_.empty()) {
    rec = store_full(version, x, RecordMode::FullObject, base_nodes());
  } else {
    rec = store_forward_delta(version, z, sparsity(z));
    rec.anchor = full_anchor(records_.size());
  }
  accept(x, rec);
  return rec;
}

VersionRecord Archive::forward_step_optimized(const Blocks& x) {
  if (config_.scheme != Scheme::Forward) throw Error(Errc::SchemeMismatch, "forward_step_optimized on a non-forward archive");
  const Blocks z = diff_against_cache(x);
  const std::size_t version = records_.size() + 1;
  VersionRecord rec;
  if (records_.empty()) {
    rec = store_full(version, x, RecordMode::FullObject, base_nodes());
  } else {
    const std::size_t gamma = sparsity(z);
    if (2 * gamma >= config_.k || sparse_run_before(records_.size()) >= config_.iota) {
      rec = store_full(version, x, RecordMode::FullVersionReset, base_nodes());
      rec.gamma = gamma;
    } else {
      rec = store_forward_delta(version, z, gamma);
      rec.anchor = full_anchor(records_.size());
    }
  }
  accept(x, rec);
  return rec;
}

VersionRecord Archive::two_level_step(const Blocks& x) {
  if (config_.scheme != Scheme::TwoLevel) throw Error(Errc::SchemeMismatch, "two_level_step on a non-two-level archive");
  const Blocks z = diff_against_cache(x);
  const std::size_t version = records_.size() + 1;
  VersionRecord rec;
  if (records_.empty()) {
    rec = store_full(version, x, RecordMode::FullObject, base_nodes());
  } else {
    rec = store_forward_delta(version, z, sparsity(z));
    rec.anchor = full_anchor(records_.size());
  }
  accept(x, rec);
  return rec;
}

std::pair<VersionRecord, std::optional<VersionRecord>> Archive::reverse_step(const Blocks& x) {
  if (config_.scheme != Scheme::Reverse) throw Error(Errc::SchemeMismatch, "reverse_step on a non-reverse archive");
  const Blocks z = diff_against_cache(x);
  const std::size_t version = records_.size() + 1;
  if (records_.empty()) {
    VersionRecord rec = store_full(version, x, RecordMode::FullObject, base_nodes());
    accept(x, rec);
    return {rec, std::nullopt};
  }
  const std::size_t gamma = sparsity(z);
  VersionRecord head = store_full(version, x, RecordMode::FullObject, base_nodes());
  head.gamma = gamma;

  std::optional<VersionRecord> overwritten;
  const std::size_t old = records_.size();
  const bool keep_full =
      config_.optimized && (2 * gamma >= config_.k || sparse_run_before(old - 1) >= config_.iota);
  if (!keep_full) {
    VersionRecord& prev = records_[old - 1];
    std::vector<NodeId> nodes = prev.nodes;
    cluster_.remove(object_, old);
    VersionRecord delta = store_delta(old, z, gamma, gamma, 2 * gamma >= config_.k, std::move(nodes));
    delta.gamma = prev.gamma;
    delta.anchor = version;
    prev = delta;
    for (std::size_t v = old - 1; v >= 1 && !records_[v - 1].is_full(); --v) records_[v - 1].anchor = version;
    overwritten = prev;
  }
  accept(x, head);
  return {head, overwritten};
}

const VersionRecord& Archive::commit(const Blocks& x) {
  switch (config_.scheme) {
    case Scheme::Forward:
      if (config_.optimized) {
        forward_step_optimized(x);
      } else {
        forward_step(x);
      }
      break;
    case Scheme::Reverse:
      reverse_step(x);
      break;
    case Scheme::TwoLevel:
      two_level_step(x);
      break;
  }
  return records_.back();
}

std::size_t Archive::payload_gamma(std::size_t i) const {
  return config_.scheme == Scheme::Reverse ? records_.at(i + 1).gamma : records_[i].gamma;
}

std::size_t Archive::full_anchor(std::size_t l) const {
  if (config_.scheme == Scheme::Reverse) {
    for (std::size_t v = l; v <= records_.size(); ++v) {
      if (records_[v - 1].is_full()) return v;
    }
  } else {
    for (std::size_t v = l; v >= 1; --v) {
      if (records_[v - 1].is_full()) return v;
    }
  }
  throw Error(Errc::VersionUnavailable, object_ + ": no full version anchors v" + std::to_string(l));
}

Blocks Archive::read_full(const VersionRecord& rec, std::size_t& reads) const {
  const MdsCode& code = codebook_->full_code();
  ShardSet s = cluster_.read_shards(object_, rec.version, code.k());
  reads += s.shards.size();
  return code.decode(s);
}

void Archive::apply_deltas(Blocks& value, const std::vector<std::size_t>& delta_indices, std::size_t& reads) const {
  const std::size_t k = config_.k;
  const std::size_t len = payload_len_;
  struct Bin {
    Blocks sum;
    std::size_t gamma = 0;
  };
  std::map<std::size_t, Bin> bins;
  auto flush = [&](std::size_t level, Bin& bin) {
    if (bin.gamma == 0) return;
    const MeasurementMatrix& phi = config_.scheme == Scheme::TwoLevel ? codebook_->threshold_measurement(level)
                                                                      : codebook_->measurement(level);
    add_into(value, recover_sparse(phi, CompressedDelta{bin.sum, bin.gamma, k}, bin.gamma));
    bin = Bin{};
  };

  for (std::size_t i : delta_indices) {
    const VersionRecord& rec = records_[i];
    if (rec.is_zero_delta()) continue;
    const std::size_t gamma = payload_gamma(i);
    if (rec.mode == RecordMode::RawDelta) {
      add_into(value, read_full(rec, reads));
      continue;
    }
    const std::size_t level = rec.code_k / 2;
    const MdsCode& code = codebook_->level_code(level);
    if (config_.scheme == Scheme::TwoLevel && config_.cauchy_reads) {
      const MeasurementMatrix& phi_t = codebook_->threshold_measurement(level);
      std::vector<std::size_t> rows;
      for (std::size_t idx : cluster_.live_indices(object_, rec.version)) {
        if (idx < code.k() && rows.size() < 2 * gamma) rows.push_back(idx);
      }
      if (rows.size() == 2 * gamma) {
        ShardSet s = cluster_.read_shards(object_, rec.version, rows);
        reads += s.shards.size();
        CompressedDelta part{{}, gamma, k};
        for (Shard& sh : s.shards) part.data.push_back(std::move(sh.payload));
        add_into(value, recover_sparse(row_subset_measurement(phi_t, rows), part, gamma));
      } else {
        ShardSet s = cluster_.read_shards(object_, rec.version, code.k());
        reads += s.shards.size();
        add_into(value, recover_sparse(phi_t, CompressedDelta{code.decode(s), gamma, k}, gamma));
      }
      continue;
    }
    ShardSet s = cluster_.read_shards(object_, rec.version, code.k());
    reads += s.shards.size();
    Blocks zprime = code.decode(s);
    Bin& bin = bins[level];
    if (bin.gamma + gamma > level) flush(level, bin);
    if (bin.gamma == 0) bin.sum = zero_blocks(code.k(), len);
    add_into(bin.sum, zprime);
    bin.gamma += gamma;
  }
  for (auto& [level, bin] : bins) flush(level, bin);
}

Retrieved Archive::retrieve(std::size_t l) const {
  if (l < 1 || l > records_.size()) {
    throw Error(Errc::VersionUnavailable, object_ + ": no version " + std::to_string(l));
  }
  Retrieved out;
  try {
    const std::size_t a = full_anchor(l);
    out.value = read_full(records_[a - 1], out.reads);
    std::vector<std::size_t> deltas;
    if (config_.scheme == Scheme::Reverse) {
      for (std::size_t v = l; v < a; ++v) deltas.push_back(v - 1);
    } else {
      for (std::size_t v = a + 1; v <= l; ++v) deltas.push_back(v - 1);
    }
    apply_deltas(out.value, deltas, out.reads);
  } catch (const Error& e) {
    if (e.code() == Errc::InsufficientLiveShards || e.code() == Errc::NoSuchShard ||
        e.code() == Errc::InsufficientShards) {
      throw Error(Errc::VersionUnavailable, object_ + " v" + std::to_string(l) + ": " + e.what());
    }
    throw;
  }
  std::lock_guard lock(ledger_mu_);
  retrieval_reads_[l - 1] = out.reads;
  total_reads_ += out.reads;
  return out;
}

IoLedger Archive::ledger() const {
  IoLedger out;
  {
    std::lock_guard lock(ledger_mu_);
    out.retrieval_reads = retrieval_reads_;
    out.total_reads = total_reads_;
  }
  out.storage_units = storage_units();
  return out;
}

std::size_t Archive::storage_units() const {
  std::size_t total = 0;
  for (const VersionRecord& r : records_) total += cluster_.stored_units(object_, r.version);
  return total;
}

}  // namespace decstore
