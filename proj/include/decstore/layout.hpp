#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace decstore {

// Layout content is a sequence of units: bytes for ordinary layouts, one bit
// per element for bit-striped ones.
using Units = std::vector<std::uint8_t>;

struct ChunkGeometry {
  std::size_t chunk_size = 500;  // Delta
  std::size_t pad = 20;          // delta, reserved per chunk at initialization
  std::size_t group_size = 8;    // k chunks per group
  bool operator==(const ChunkGeometry&) const = default;
};

// Intermediate: content is edited chunk-locally and pads absorb growth.
// End: content is kept densely packed, so every edit re-chunks the suffix.
enum class PadPolicy { Intermediate, End };

class ChunkLayout {
 public:
  ChunkLayout(ChunkGeometry geometry, PadPolicy policy, std::vector<Units> chunks, Units overflow = {});

  const ChunkGeometry& geometry() const noexcept { return geometry_; }
  PadPolicy policy() const noexcept { return policy_; }
  std::size_t chunk_count() const noexcept { return chunks_.size(); }
  std::size_t groups() const noexcept { return chunks_.size() / geometry_.group_size; }
  // Index of the last chunk with content, plus one.
  std::size_t occupied() const noexcept;
  std::size_t zero_chunks() const noexcept { return chunk_count() - occupied(); }
  const Units& content(std::size_t i) const { return chunks_.at(i); }
  std::size_t content_len(std::size_t i) const { return chunks_.at(i).size(); }
  std::vector<std::size_t> content_lengths() const;
  Units padded(std::size_t i) const;
  Units file_content() const;
  std::size_t file_size() const noexcept;
  // Units that did not fit after an edit; nonzero only when a reset is due.
  const Units& overflow() const noexcept { return overflow_; }
  std::size_t required_chunks() const noexcept;
  // Zero units across all chunks.
  std::size_t pad_units() const noexcept;

  bool operator==(const ChunkLayout&) const = default;

 private:
  ChunkGeometry geometry_;
  PadPolicy policy_;
  std::vector<Units> chunks_;
  Units overflow_;
};

// Fills chunks with chunk_size - pad units each, then appends zero chunks up to
// a multiple of k.
ChunkLayout init_layout(std::span<const std::uint8_t> file, std::size_t delta_cap, std::size_t pad, std::size_t k);
// Dense packing with all padding at the tail.
ChunkLayout make_zp_end_layout(std::span<const std::uint8_t> file, std::size_t delta_cap, std::size_t k);
// Builds a layout from explicit per-chunk lengths over the given content.
ChunkLayout layout_from_lengths(ChunkGeometry geometry, PadPolicy policy, std::span<const std::uint8_t> content,
                                std::span<const std::size_t> lengths);

struct Edit {
  enum class Kind { Insert, Delete, Alter };
  Kind kind = Kind::Insert;
  std::size_t pos = 0;  // offset into the content before the script is applied
  Units payload;        // Insert and Alter
  std::size_t len = 0;  // Delete

  static Edit insert(std::size_t pos, Units payload) { return {Kind::Insert, pos, std::move(payload), 0}; }
  static Edit erase(std::size_t pos, std::size_t len) { return {Kind::Delete, pos, {}, len}; }
  static Edit alter(std::size_t pos, Units payload) { return {Kind::Alter, pos, std::move(payload), 0}; }
  std::size_t span_len() const { return kind == Kind::Insert ? 0 : (kind == Kind::Delete ? len : payload.size()); }
};

// Edits are sorted by position, do not overlap, and all address the content
// as it was before the script.
using EditScript = std::vector<Edit>;

void validate_script(const EditScript& edits, std::size_t content_size);
Units apply_edits_to_content(std::span<const std::uint8_t> content, const EditScript& edits);

ChunkLayout apply_edits(const ChunkLayout& layout, const EditScript& edits);

struct GroupDiff {
  std::size_t gamma = 0;
  std::vector<std::size_t> modified;  // chunk offsets within the group
};

std::vector<GroupDiff> diff_groups(const ChunkLayout& old_layout, const ChunkLayout& new_layout);
std::vector<std::size_t> group_gammas(const std::vector<GroupDiff>& diffs);

enum class ResetDecision { None, Criterion1, Criterion2 };
std::string_view reset_name(ResetDecision d);

ResetDecision check_reset(const ChunkLayout& old_layout, std::size_t new_required_chunks,
                          std::span<const std::size_t> gammas);

// Pre-coding storage of the compressed group differences: sum of
// min(2 gamma, k) * chunk_size.
std::size_t compressed_units(std::span<const std::size_t> gammas, std::size_t k, std::size_t chunk_size);

struct BatchState {
  std::size_t batch = 0;
  std::size_t depth = 1;
  std::size_t groups = 0;
};

// Each chunk split into k partitions of chunk_size/k units; striped chunk t of
// a group is partition t of every chunk in the group.
struct StripedLayout {
  ChunkGeometry base;
  ChunkLayout partitions;
};

StripedLayout stripe(const ChunkLayout& layout);
ChunkLayout unstripe(const StripedLayout& striped);
StripedLayout apply_edits(const StripedLayout& striped, const EditScript& edits);
std::vector<Units> striped_chunks(const StripedLayout& striped, std::size_t group);
std::vector<GroupDiff> diff_striped(const StripedLayout& old_layout, const StripedLayout& new_layout);

Units bytes_to_bits(std::span<const std::uint8_t> bytes);
Units bits_to_bytes(std::span<const std::uint8_t> bits);
EditScript edits_to_bits(const EditScript& edits);

struct RsyncResult {
  std::size_t modified_chunks = 0;
  std::size_t units = 0;             // modified_chunks * chunk_size
  std::size_t units_with_index = 0;  // plus a 4-byte index per modified chunk
};

// Fixed-size chunking of both versions with tail padding only.
RsyncResult rsync_baseline_store(std::span<const std::uint8_t> old_content, std::span<const std::uint8_t> new_content,
                                 std::size_t chunk_size);
RsyncResult rsync_baseline_store(const ChunkLayout& old_layout, const ChunkLayout& new_layout);

}  // namespace decstore
