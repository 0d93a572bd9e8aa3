#include "decstore/repository.hpp"

#include <algorithm>
#include <cinttypes>
#include <fstream>
#include <map>
#include <sstream>

#include "decstore/byte_diff.hpp"
#include "decstore/error.hpp"

namespace decstore {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.tsv";
constexpr const char* kManifestMagic = "# decstore manifest 1";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(Errc::CorruptManifest, "bad " + what + " '" + s + "'");
  }
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    throw Error(Errc::CorruptManifest, "bad " + what + " '" + s + "'");
  }
}

std::string join_nodes(const std::vector<NodeId>& nodes) {
  if (nodes.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(nodes[i]);
  }
  return out;
}

std::vector<NodeId> parse_nodes(const std::string& s) {
  std::vector<NodeId> out;
  if (s == "-") return out;
  for (const std::string& t : split(s, ',')) out.push_back(parse_count(t, "node id"));
  return out;
}

// Run-length form: "480*7,421,0*8".
std::string encode_lengths(const std::vector<std::size_t>& lengths) {
  std::string out;
  for (std::size_t i = 0; i < lengths.size();) {
    std::size_t j = i;
    while (j < lengths.size() && lengths[j] == lengths[i]) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(lengths[i]);
    if (j - i > 1) out += '*' + std::to_string(j - i);
    i = j;
  }
  return out;
}

std::vector<std::size_t> decode_lengths(const std::string& s) {
  std::vector<std::size_t> out;
  for (const std::string& t : split(s, ',')) {
    const auto star = t.find('*');
    const std::size_t len = parse_count(t.substr(0, star), "chunk length");
    const std::size_t count = star == std::string::npos ? 1 : parse_count(t.substr(star + 1), "run count");
    if (out.size() + count > (1u << 26)) throw Error(Errc::CorruptManifest, "chunk list too long");
    out.insert(out.end(), count, len);
  }
  return out;
}

ResetDecision parse_reset(const std::string& s) {
  for (ResetDecision d : {ResetDecision::None, ResetDecision::Criterion1, ResetDecision::Criterion2}) {
    if (reset_name(d) == s) return d;
  }
  throw Error(Errc::CorruptManifest, "bad reset '" + s + "'");
}

Blocks group_blocks(const ChunkLayout& layout, std::size_t group) {
  const std::size_t k = layout.geometry().group_size;
  Blocks out(k);
  for (std::size_t t = 0; t < k; ++t) {
    const Units chunk = layout.padded(group * k + t);
    out[t].assign(chunk.begin(), chunk.end());
  }
  return out;
}

}  // namespace

std::uint64_t content_checksum(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void RepoConfig::validate() const {
  if (delta_cap == 0 || pad >= delta_cap) throw Error(Errc::BadConfig, "need 0 <= pad < delta_cap");
  if (k < 2) throw Error(Errc::BadConfig, "k must be >= 2");
  if (n <= k) throw Error(Errc::BadConfig, "n must exceed k");
  if ((2 * n) % k != 0) throw Error(Errc::BadConfig, "2n/k must be an integer so every delta code keeps n/k");
  if (n > 256) throw Error(Errc::BadConfig, "n must be <= 256 over GF(256)");
}

Repository::Repository(RepoConfig config) : config_(config) {
  config_.validate();
  cluster_ = std::make_unique<Cluster>(config_.n);
  codebook_ = std::make_shared<const Codebook>(gf256(), config_.n, config_.k);
}

Repository::~Repository() = default;

bool Repository::exists(const fs::path& root) { return fs::exists(root / kManifest); }

std::unique_ptr<Repository> Repository::init(const fs::path& root, RepoConfig config) {
  if (exists(root)) throw Error(Errc::BadConfig, root.string() + " already holds a repository");
  auto repo = std::make_unique<Repository>(config);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + root.string() + ": " + ec.message());
  repo->root_ = root;
  repo->persist();
  return repo;
}

std::unique_ptr<Repository> Repository::open(const fs::path& root) {
  std::ifstream in(root / kManifest);
  if (!in) throw Error(Errc::IoError, "no repository at " + root.string());
  std::string line;
  RepoConfig cfg;
  if (!std::getline(in, line) || line != kManifestMagic) throw Error(Errc::CorruptManifest, "bad manifest magic");
  while (std::getline(in, line)) {
    if (line.rfind("config\t", 0) != 0) continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) throw Error(Errc::CorruptManifest, "bad config line");
    if (f[1] == "delta_cap") {
      cfg.delta_cap = parse_count(f[2], "delta_cap");
    } else if (f[1] == "pad") {
      cfg.pad = parse_count(f[2], "pad");
    } else if (f[1] == "k") {
      cfg.k = parse_count(f[2], "k");
    } else if (f[1] == "n") {
      cfg.n = parse_count(f[2], "n");
    } else if (f[1] == "placement") {
      cfg.placement = parse_placement(f[2]);
    } else {
      throw Error(Errc::CorruptManifest, "unknown config key '" + f[1] + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(Errc::CorruptManifest, std::string("manifest config: ") + e.what());
  }
  auto repo = std::make_unique<Repository>(cfg);
  repo->root_ = root;
  repo->cluster_ = Cluster::load(root);
  repo->load_manifest();
  return repo;
}

std::string Repository::object_id(std::size_t batch, std::size_t group) {
  return "b" + std::to_string(batch) + "g" + std::to_string(group);
}

ArchiveConfig Repository::archive_config() const {
  ArchiveConfig c;
  c.scheme = Scheme::Reverse;
  c.n = config_.n;
  c.k = config_.k;
  c.placement = config_.placement;
  return c;
}

const ChunkLayout& Repository::latest_layout() const {
  if (!latest_) throw Error(Errc::VersionUnavailable, "repository is empty");
  return *latest_;
}

CommitSummary Repository::commit(std::span<const std::uint8_t> file) {
  if (!latest_) {
    return start_batch(init_layout(file, config_.delta_cap, config_.pad, config_.k), ResetDecision::None);
  }
  return commit_edits(diff_bytes(latest_->file_content(), file));
}

CommitSummary Repository::commit_edits(const EditScript& edits) {
  if (!latest_) throw Error(Errc::BadParameter, "the first version must be committed as a whole file");
  ChunkLayout next = apply_edits(*latest_, edits);
  if (!next.overflow().empty()) {
    const Units content = next.file_content();
    return start_batch(init_layout(content, config_.delta_cap, config_.pad, config_.k), ResetDecision::Criterion1);
  }
  const std::vector<std::size_t> gammas = group_gammas(diff_groups(*latest_, next));
  const ResetDecision decision = check_reset(*latest_, next.required_chunks(), gammas);
  if (decision == ResetDecision::Criterion1) {
    const Units content = next.file_content();
    return start_batch(init_layout(content, config_.delta_cap, config_.pad, config_.k), decision);
  }
  if (decision == ResetDecision::Criterion2) return start_batch(next, decision);

  CommitSummary s;
  s.version = versions_.size() + 1;
  s.batch = batches_.size() - 1;
  s.gammas = gammas;
  s.delta_units = compressed_units(gammas, config_.k, config_.delta_cap);
  commit_layout(next, content_checksum(next.file_content()));
  return s;
}

CommitSummary Repository::start_batch(const ChunkLayout& layout, ResetDecision reason) {
  Batch b;
  b.first_version = versions_.size() + 1;
  b.groups = layout.groups();
  const std::size_t id = batches_.size();
  for (std::size_t g = 0; g < b.groups; ++g) {
    b.archives.push_back(std::make_unique<Archive>(*cluster_, object_id(id, g), archive_config(), codebook_, 0));
  }
  batches_.push_back(std::move(b));

  const std::size_t before = versions_.size();
  commit_layout(layout, content_checksum(layout.file_content()));
  versions_.back().reset = reason;
  CommitSummary s;
  s.version = before + 1;
  s.batch = id;
  s.reset = reason;
  s.new_batch = true;
  s.delta_units = config_.k * config_.delta_cap * layout.groups();
  return s;
}

void Repository::commit_layout(const ChunkLayout& layout, std::uint64_t checksum) {
  Batch& b = batches_.back();
  for (std::size_t g = 0; g < b.groups; ++g) b.archives[g]->commit(group_blocks(layout, g));
  VersionInfo info;
  info.batch = batches_.size() - 1;
  info.local = versions_.size() + 2 - b.first_version;
  info.lengths = layout.content_lengths();
  info.checksum = checksum;
  info.file_size = layout.file_size();
  versions_.push_back(std::move(info));
  latest_ = layout;
}

Units Repository::checkout(std::size_t version, std::size_t* reads) const {
  if (version < 1 || version > versions_.size()) {
    throw Error(Errc::VersionUnavailable, "no version " + std::to_string(version) + " (have " +
                                              std::to_string(versions_.size()) + ")");
  }
  const VersionInfo& info = versions_[version - 1];
  const Batch& b = batches_[info.batch];
  const std::size_t k = config_.k;
  Units out;
  out.reserve(info.file_size);
  std::size_t total = 0;
  for (std::size_t g = 0; g < b.groups; ++g) {
    const Retrieved r = b.archives[g]->retrieve(info.local);
    total += r.reads;
    for (std::size_t t = 0; t < k; ++t) {
      const Block& chunk = r.value.at(t);
      const std::size_t len = info.lengths.at(g * k + t);
      for (std::size_t u = 0; u < chunk.size(); ++u) {
        if (chunk[u] > 0xFF || (u >= len && chunk[u] != 0)) {
          throw Error(Errc::InconsistentShards, "v" + std::to_string(version) + ": chunk " +
                                                    std::to_string(g * k + t) + " has data outside its content");
        }
      }
      for (std::size_t u = 0; u < len; ++u) out.push_back(static_cast<std::uint8_t>(chunk[u]));
    }
  }
  if (out.size() != info.file_size || content_checksum(out) != info.checksum) {
    throw Error(Errc::InconsistentShards, "v" + std::to_string(version) + ": content checksum mismatch");
  }
  if (reads) *reads = total;
  return out;
}

std::size_t Repository::predicted_reads(std::size_t version) const {
  if (version < 1 || version > versions_.size()) throw Error(Errc::VersionUnavailable, "no such version");
  const VersionInfo& info = versions_[version - 1];
  const PredictConfig pc = PredictConfig::from(archive_config());
  std::size_t total = 0;
  for (const auto& a : batches_[info.batch].archives) total += predict_reads(a->profile(), pc, info.local);
  return total;
}

std::vector<LogEntry> Repository::log() const {
  std::vector<LogEntry> out;
  for (std::size_t v = 1; v <= versions_.size(); ++v) {
    const VersionInfo& info = versions_[v - 1];
    LogEntry e;
    e.version = v;
    e.batch = info.batch;
    e.reset = info.reset;
    e.file_size = info.file_size;
    const Batch& b = batches_[info.batch];
    e.groups = b.groups;
    for (const auto& a : b.archives) {
      const VersionRecord& rec = a->records().at(info.local - 1);
      if (info.local > 1) e.gamma += rec.gamma;
      if (rec.is_full()) ++e.full_groups;
      e.storage_units += cluster_->stored_units(a->object(), info.local);
    }
    e.predicted_reads = predicted_reads(v);
    out.push_back(e);
  }
  return out;
}

void Repository::persist() {
  if (!root_) throw Error(Errc::IoError, "repository has no root directory");
  cluster_->persist(*root_);
  write_manifest();
}

void Repository::write_manifest() const {
  std::ostringstream m;
  m << kManifestMagic << '\n';
  m << "config\tdelta_cap\t" << config_.delta_cap << "\nconfig\tpad\t" << config_.pad << "\nconfig\tk\t" << config_.k
    << "\nconfig\tn\t" << config_.n << "\nconfig\tplacement\t" << placement_name(config_.placement) << '\n';
  m << "# version\tbatch\tlocal\treset\tsize\tchecksum\tlengths\n";
  for (std::size_t v = 0; v < versions_.size(); ++v) {
    const VersionInfo& i = versions_[v];
    char sum[17];
    std::snprintf(sum, sizeof sum, "%016" PRIx64, i.checksum);
    m << "version\t" << v + 1 << '\t' << i.batch << '\t' << i.local << '\t' << reset_name(i.reset) << '\t'
      << i.file_size << '\t' << sum << '\t' << encode_lengths(i.lengths) << '\n';
  }
  m << "# object\tversion\tmode\tgamma\tn\tk\tT\tanchor\tnodes\tfiles\n";
  for (const Batch& b : batches_) {
    for (const auto& a : b.archives) {
      for (const VersionRecord& r : a->records()) {
        std::string files = "-";
        if (r.code_n > 0) {
          files.clear();
          for (std::size_t s = 0; s < r.code_n; ++s) {
            if (s) files += ',';
            files += Cluster::shard_file_name(r.version, s);
          }
        }
        m << "record\t" << a->object() << '\t' << r.version << '\t' << mode_name(r.mode) << '\t' << r.gamma << '\t'
          << r.code_n << '\t' << r.code_k << "\t-\t" << r.anchor << '\t' << join_nodes(r.nodes) << '\t' << files
          << '\n';
      }
    }
  }
  const fs::path tmp = *root_ / "manifest.tsv.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << m.str();
    if (!out.flush()) throw Error(Errc::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, *root_ / kManifest, ec);
  if (ec) throw Error(Errc::IoError, "cannot replace manifest: " + ec.message());
}

void Repository::load_manifest() {
  std::ifstream in(*root_ / kManifest);
  std::string line;
  std::map<std::string, std::vector<VersionRecord>> records;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("config\t", 0) == 0) continue;
    const auto f = split(line, '\t');
    const std::string where = "manifest line " + std::to_string(lineno) + ": ";
    if (f[0] == "version") {
      if (f.size() != 8) throw Error(Errc::CorruptManifest, where + "expected 8 fields");
      if (parse_count(f[1], "version") != versions_.size() + 1) {
        throw Error(Errc::CorruptManifest, where + "versions out of order");
      }
      VersionInfo info;
      info.batch = parse_count(f[2], "batch");
      info.local = parse_count(f[3], "local version");
      info.reset = parse_reset(f[4]);
      info.file_size = parse_count(f[5], "size");
      if (f[6].size() != 16 || f[6].find_first_not_of("0123456789abcdef") != std::string::npos) {
        throw Error(Errc::CorruptManifest, where + "bad checksum");
      }
      info.checksum = std::stoull(f[6], nullptr, 16);
      info.lengths = decode_lengths(f[7]);
      versions_.push_back(std::move(info));
    } else if (f[0] == "record") {
      if (f.size() != 11) throw Error(Errc::CorruptManifest, where + "expected 11 fields");
      VersionRecord r;
      r.version = parse_count(f[2], "version");
      try {
        r.mode = parse_mode(f[3]);
      } catch (const Error&) {
        throw Error(Errc::CorruptManifest, where + "bad mode '" + f[3] + "'");
      }
      r.gamma = parse_count(f[4], "gamma");
      r.code_n = parse_count(f[5], "n");
      r.code_k = parse_count(f[6], "k");
      r.anchor = parse_count(f[8], "anchor");
      r.nodes = parse_nodes(f[9]);
      if (r.nodes.size() != r.code_n) throw Error(Errc::CorruptManifest, where + "node list does not match n");
      if (r.code_n > 0 && cluster_->placement(f[1], r.version) != r.nodes) {
        throw Error(Errc::CorruptManifest, where + "shards of " + f[1] + " v" + f[2] + " do not match the manifest");
      }
      records[f[1]].push_back(std::move(r));
    } else {
      throw Error(Errc::CorruptManifest, where + "unknown record type '" + f[0] + "'");
    }
  }

  const std::size_t k = config_.k;
  for (std::size_t v = 0; v < versions_.size(); ++v) {
    const VersionInfo& info = versions_[v];
    if (info.lengths.empty() || info.lengths.size() % k != 0) {
      throw Error(Errc::CorruptManifest, "version " + std::to_string(v + 1) + ": chunk count is not a multiple of k");
    }
    if (info.local == 1) {
      if (info.batch != batches_.size()) throw Error(Errc::CorruptManifest, "batches out of order");
      Batch b;
      b.first_version = v + 1;
      b.groups = info.lengths.size() / k;
      batches_.push_back(std::move(b));
    } else if (info.batch + 1 != batches_.size() || info.local != v + 2 - batches_.back().first_version ||
               info.lengths.size() / k != batches_.back().groups) {
      throw Error(Errc::CorruptManifest, "version " + std::to_string(v + 1) + " does not continue its batch");
    }
  }
  std::size_t restored = 0;
  for (std::size_t id = 0; id < batches_.size(); ++id) {
    Batch& b = batches_[id];
    const std::size_t count = (id + 1 < batches_.size() ? batches_[id + 1].first_version : versions_.size() + 1) -
                              b.first_version;
    for (std::size_t g = 0; g < b.groups; ++g) {
      const std::string obj = object_id(id, g);
      auto it = records.find(obj);
      if (it == records.end() || it->second.size() != count) {
        throw Error(Errc::CorruptManifest, obj + ": expected " + std::to_string(count) + " records");
      }
      b.archives.push_back(
          Archive::restore(*cluster_, obj, archive_config(), codebook_, 0, std::move(it->second)));
      ++restored;
    }
  }
  if (restored != records.size()) throw Error(Errc::CorruptManifest, "manifest lists objects outside any batch");

  if (!versions_.empty()) {
    const Units content = checkout(versions_.size());
    latest_ = layout_from_lengths(ChunkGeometry{config_.delta_cap, config_.pad, k}, PadPolicy::Intermediate, content,
                                  versions_.back().lengths);
  }
  cluster_->reset_meter();
}

}  // namespace decstore
