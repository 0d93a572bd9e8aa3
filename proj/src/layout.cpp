#include "decstore/layout.hpp"

#include <algorithm>
#include <string>

#include "decstore/error.hpp"

namespace decstore {

namespace {

void check_geometry(const ChunkGeometry& g) {
  if (g.chunk_size < 1 || g.group_size < 1) throw Error(Errc::BadGeometry, "chunk size and group size must be >= 1");
  if (g.pad >= g.chunk_size) {
    throw Error(Errc::BadGeometry, "pad " + std::to_string(g.pad) + " must be smaller than chunk size " +
                                       std::to_string(g.chunk_size));
  }
}

std::size_t round_up_groups(std::size_t chunks, std::size_t k) { return std::max<std::size_t>(1, (chunks + k - 1) / k) * k; }

ChunkLayout pack(ChunkGeometry g, PadPolicy policy, std::span<const std::uint8_t> content, std::size_t per_chunk,
                 std::size_t chunk_count) {
  std::vector<Units> chunks(chunk_count);
  std::size_t at = 0;
  for (std::size_t i = 0; i < chunk_count && at < content.size(); ++i) {
    const std::size_t take = std::min(per_chunk, content.size() - at);
    chunks[i].assign(content.begin() + static_cast<std::ptrdiff_t>(at),
                     content.begin() + static_cast<std::ptrdiff_t>(at + take));
    at += take;
  }
  Units overflow(content.begin() + static_cast<std::ptrdiff_t>(at), content.end());
  return ChunkLayout(g, policy, std::move(chunks), std::move(overflow));
}

}  // namespace

ChunkLayout::ChunkLayout(ChunkGeometry geometry, PadPolicy policy, std::vector<Units> chunks, Units overflow)
    : geometry_(geometry), policy_(policy), chunks_(std::move(chunks)), overflow_(std::move(overflow)) {
  if (geometry_.chunk_size < 1 || geometry_.group_size < 1) throw Error(Errc::BadGeometry, "empty geometry");
  if (chunks_.empty() || chunks_.size() % geometry_.group_size != 0) {
    throw Error(Errc::BadGeometry, "chunk count must be a positive multiple of k");
  }
  for (const Units& c : chunks_) {
    if (c.size() > geometry_.chunk_size) throw Error(Errc::BadGeometry, "chunk content exceeds chunk size");
  }
}

std::size_t ChunkLayout::occupied() const noexcept {
  std::size_t m = chunks_.size();
  while (m > 0 && chunks_[m - 1].empty()) --m;
  return m;
}

std::vector<std::size_t> ChunkLayout::content_lengths() const {
  std::vector<std::size_t> out;
  out.reserve(chunks_.size());
  for (const Units& c : chunks_) out.push_back(c.size());
  return out;
}

Units ChunkLayout::padded(std::size_t i) const {
  Units out = chunks_.at(i);
  out.resize(geometry_.chunk_size, 0);
  return out;
}

Units ChunkLayout::file_content() const {
  Units out;
  out.reserve(file_size());
  for (const Units& c : chunks_) out.insert(out.end(), c.begin(), c.end());
  out.insert(out.end(), overflow_.begin(), overflow_.end());
  return out;
}

std::size_t ChunkLayout::file_size() const noexcept {
  std::size_t n = overflow_.size();
  for (const Units& c : chunks_) n += c.size();
  return n;
}

std::size_t ChunkLayout::required_chunks() const noexcept {
  if (overflow_.empty()) return occupied();
  return chunks_.size() + (overflow_.size() + geometry_.chunk_size - 1) / geometry_.chunk_size;
}

std::size_t ChunkLayout::pad_units() const noexcept {
  std::size_t used = 0;
  for (const Units& c : chunks_) used += c.size();
  return chunks_.size() * geometry_.chunk_size - used;
}

ChunkLayout init_layout(std::span<const std::uint8_t> file, std::size_t delta_cap, std::size_t pad, std::size_t k) {
  const ChunkGeometry g{delta_cap, pad, k};
  check_geometry(g);
  if (file.empty()) throw Error(Errc::BadGeometry, "cannot lay out an empty file");
  const std::size_t per = delta_cap - pad;
  const std::size_t m = (file.size() + per - 1) / per;
  return pack(g, PadPolicy::Intermediate, file, per, round_up_groups(m, k));
}

ChunkLayout make_zp_end_layout(std::span<const std::uint8_t> file, std::size_t delta_cap, std::size_t k) {
  const ChunkGeometry g{delta_cap, 0, k};
  check_geometry(g);
  if (file.empty()) throw Error(Errc::BadGeometry, "cannot lay out an empty file");
  const std::size_t m = (file.size() + delta_cap - 1) / delta_cap;
  return pack(g, PadPolicy::End, file, delta_cap, round_up_groups(m, k));
}

ChunkLayout layout_from_lengths(ChunkGeometry geometry, PadPolicy policy, std::span<const std::uint8_t> content,
                                std::span<const std::size_t> lengths) {
  std::vector<Units> chunks;
  std::size_t at = 0;
  for (std::size_t len : lengths) {
    if (at + len > content.size()) throw Error(Errc::LengthMismatch, "chunk lengths exceed the content");
    chunks.emplace_back(content.begin() + static_cast<std::ptrdiff_t>(at),
                        content.begin() + static_cast<std::ptrdiff_t>(at + len));
    at += len;
  }
  if (at != content.size()) throw Error(Errc::LengthMismatch, "chunk lengths do not cover the content");
  return ChunkLayout(geometry, policy, std::move(chunks));
}

void validate_script(const EditScript& edits, std::size_t content_size) {
  std::size_t floor = 0;
  for (const Edit& e : edits) {
    if (e.pos < floor) throw Error(Errc::BadParameter, "edits must be sorted and non-overlapping");
    if (e.pos + e.span_len() > content_size) throw Error(Errc::BadParameter, "edit extends past the content");
    if (e.kind == Edit::Kind::Insert && e.payload.empty()) throw Error(Errc::BadParameter, "empty insertion");
    if (e.kind != Edit::Kind::Insert && e.span_len() == 0) throw Error(Errc::BadParameter, "empty deletion or alteration");
    floor = e.pos + e.span_len();
  }
}

Units apply_edits_to_content(std::span<const std::uint8_t> content, const EditScript& edits) {
  validate_script(edits, content.size());
  Units out;
  out.reserve(content.size());
  std::size_t cursor = 0;
  for (const Edit& e : edits) {
    out.insert(out.end(), content.begin() + static_cast<std::ptrdiff_t>(cursor),
               content.begin() + static_cast<std::ptrdiff_t>(e.pos));
    if (e.kind != Edit::Kind::Delete) out.insert(out.end(), e.payload.begin(), e.payload.end());
    cursor = e.pos + e.span_len();
  }
  out.insert(out.end(), content.begin() + static_cast<std::ptrdiff_t>(cursor), content.end());
  return out;
}

ChunkLayout apply_edits(const ChunkLayout& layout, const EditScript& edits) {
  if (!layout.overflow().empty()) throw Error(Errc::BadGeometry, "layout has pending overflow; reset first");
  const std::size_t total = layout.file_size();
  validate_script(edits, total);
  const ChunkGeometry& g = layout.geometry();

  if (layout.policy() == PadPolicy::End) {
    const Units content = apply_edits_to_content(layout.file_content(), edits);
    return pack(g, PadPolicy::End, content, g.chunk_size, layout.chunk_count());
  }

  // Split every edit into chunk-local pieces. An insertion belongs to the chunk
  // holding the unit it precedes, or to the last non-empty chunk at the end.
  const std::size_t count = layout.chunk_count();
  std::vector<std::size_t> start(count + 1, 0);
  for (std::size_t i = 0; i < count; ++i) start[i + 1] = start[i] + layout.content_len(i);
  std::size_t last_nonempty = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (layout.content_len(i) > 0) last_nonempty = i;
  }
  auto owner = [&](std::size_t pos) {
    if (pos >= total) return last_nonempty;
    const auto it = std::upper_bound(start.begin(), start.end(), pos);
    return static_cast<std::size_t>(it - start.begin()) - 1;
  };

  std::vector<EditScript> local(count);
  for (const Edit& e : edits) {
    if (e.kind == Edit::Kind::Insert) {
      const std::size_t c = owner(e.pos);
      local[c].push_back(Edit::insert(e.pos - start[c], e.payload));
      continue;
    }
    std::size_t pos = e.pos;
    std::size_t done = 0;
    const std::size_t len = e.span_len();
    while (done < len) {
      const std::size_t c = owner(pos);
      const std::size_t piece = std::min(len - done, start[c + 1] - pos);
      if (e.kind == Edit::Kind::Delete) {
        local[c].push_back(Edit::erase(pos - start[c], piece));
      } else {
        local[c].push_back(Edit::alter(pos - start[c], Units(e.payload.begin() + static_cast<std::ptrdiff_t>(done),
                                                             e.payload.begin() + static_cast<std::ptrdiff_t>(done + piece))));
      }
      pos += piece;
      done += piece;
    }
  }

  std::vector<Units> chunks(count);
  Units carry;
  for (std::size_t i = 0; i < count; ++i) {
    Units body = local[i].empty() ? layout.content(i) : apply_edits_to_content(layout.content(i), local[i]);
    if (!carry.empty()) body.insert(body.begin(), carry.begin(), carry.end());
    carry.clear();
    if (body.size() > g.chunk_size) {
      carry.assign(body.begin() + static_cast<std::ptrdiff_t>(g.chunk_size), body.end());
      body.resize(g.chunk_size);
    }
    chunks[i] = std::move(body);
  }
  return ChunkLayout(g, PadPolicy::Intermediate, std::move(chunks), std::move(carry));
}

std::vector<GroupDiff> diff_groups(const ChunkLayout& a, const ChunkLayout& b) {
  if (!(a.geometry().chunk_size == b.geometry().chunk_size && a.geometry().group_size == b.geometry().group_size) ||
      a.chunk_count() != b.chunk_count()) {
    throw Error(Errc::GeometryMismatch, "layouts differ in chunk size, k or group count");
  }
  const std::size_t k = a.geometry().group_size;
  std::vector<GroupDiff> out(a.groups());
  for (std::size_t g = 0; g < out.size(); ++g) {
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t i = g * k + t;
      if (a.padded(i) != b.padded(i)) out[g].modified.push_back(t);
    }
    out[g].gamma = out[g].modified.size();
  }
  return out;
}

std::vector<std::size_t> group_gammas(const std::vector<GroupDiff>& diffs) {
  std::vector<std::size_t> out;
  for (const GroupDiff& d : diffs) out.push_back(d.gamma);
  return out;
}

std::string_view reset_name(ResetDecision d) {
  switch (d) {
    case ResetDecision::None: return "none";
    case ResetDecision::Criterion1: return "criterion1";
    case ResetDecision::Criterion2: return "criterion2";
  }
  return "?";
}

ResetDecision check_reset(const ChunkLayout& old_layout, std::size_t new_required_chunks,
                          std::span<const std::size_t> gammas) {
  const std::size_t k = old_layout.geometry().group_size;
  if ((new_required_chunks + k - 1) / k > old_layout.groups()) return ResetDecision::Criterion1;
  if (!gammas.empty() && std::all_of(gammas.begin(), gammas.end(), [k](std::size_t g) { return 2 * g >= k; })) {
    return ResetDecision::Criterion2;
  }
  return ResetDecision::None;
}

std::size_t compressed_units(std::span<const std::size_t> gammas, std::size_t k, std::size_t chunk_size) {
  std::size_t total = 0;
  for (std::size_t g : gammas) total += std::min(2 * g, k) * chunk_size;
  return total;
}

StripedLayout stripe(const ChunkLayout& layout) {
  const ChunkGeometry& g = layout.geometry();
  const std::size_t k = g.group_size;
  if (g.chunk_size % k != 0 || g.pad % k != 0) {
    throw Error(Errc::BadGeometry, "striping needs k to divide both the chunk size and the pad");
  }
  if (!layout.overflow().empty()) throw Error(Errc::BadGeometry, "cannot stripe a layout with overflow");
  std::vector<Units> parts;
  parts.reserve(layout.chunk_count() * k);
  for (std::size_t i = 0; i < layout.chunk_count(); ++i) {
    const Units& c = layout.content(i);
    const std::size_t len = c.size();
    for (std::size_t t = 0; t < k; ++t) {
      parts.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(len * t / k),
                         c.begin() + static_cast<std::ptrdiff_t>(len * (t + 1) / k));
    }
  }
  const ChunkGeometry fine{g.chunk_size / k, g.pad / k, k * k};
  return StripedLayout{g, ChunkLayout(fine, PadPolicy::Intermediate, std::move(parts))};
}

ChunkLayout unstripe(const StripedLayout& s) {
  const std::size_t k = s.base.group_size;
  const ChunkLayout& p = s.partitions;
  if (!p.overflow().empty()) throw Error(Errc::BadGeometry, "cannot unstripe a layout with overflow");
  std::vector<Units> chunks(p.chunk_count() / k);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    for (std::size_t t = 0; t < k; ++t) {
      const Units& part = p.content(i * k + t);
      chunks[i].insert(chunks[i].end(), part.begin(), part.end());
    }
  }
  return ChunkLayout(s.base, PadPolicy::Intermediate, std::move(chunks));
}

StripedLayout apply_edits(const StripedLayout& s, const EditScript& edits) {
  return StripedLayout{s.base, apply_edits(s.partitions, edits)};
}

std::vector<Units> striped_chunks(const StripedLayout& s, std::size_t group) {
  const std::size_t k = s.base.group_size;
  std::vector<Units> out(k);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      const Units part = s.partitions.padded((group * k + i) * k + t);
      out[t].insert(out[t].end(), part.begin(), part.end());
    }
  }
  return out;
}

std::vector<GroupDiff> diff_striped(const StripedLayout& a, const StripedLayout& b) {
  if (!(a.base == b.base) || a.partitions.chunk_count() != b.partitions.chunk_count()) {
    throw Error(Errc::GeometryMismatch, "striped layouts differ in geometry");
  }
  const std::size_t k = a.base.group_size;
  const std::size_t groups = a.partitions.chunk_count() / (k * k);
  std::vector<GroupDiff> out(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const auto ca = striped_chunks(a, g);
    const auto cb = striped_chunks(b, g);
    for (std::size_t t = 0; t < k; ++t) {
      if (ca[t] != cb[t]) out[g].modified.push_back(t);
    }
    out[g].gamma = out[g].modified.size();
  }
  return out;
}

Units bytes_to_bits(std::span<const std::uint8_t> bytes) {
  Units out;
  out.reserve(bytes.size() * 8);
  for (std::uint8_t b : bytes) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((b >> i) & 1u));
  }
  return out;
}

Units bits_to_bytes(std::span<const std::uint8_t> bits) {
  if (bits.size() % 8 != 0) throw Error(Errc::LengthMismatch, "bit count is not a multiple of 8");
  Units out(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | (bits[i] << (7 - i % 8)));
  return out;
}

EditScript edits_to_bits(const EditScript& edits) {
  EditScript out;
  for (const Edit& e : edits) {
    Edit b = e;
    b.pos *= 8;
    b.len *= 8;
    b.payload = bytes_to_bits(e.payload);
    out.push_back(std::move(b));
  }
  return out;
}

RsyncResult rsync_baseline_store(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, std::size_t chunk_size) {
  if (chunk_size < 1) throw Error(Errc::BadGeometry, "chunk size must be >= 1");
  const std::size_t chunks = (std::max(a.size(), b.size()) + chunk_size - 1) / chunk_size;
  RsyncResult r;
  for (std::size_t i = 0; i < chunks; ++i) {
    const std::size_t lo = i * chunk_size;
    bool differs = false;
    for (std::size_t u = lo; u < lo + chunk_size && !differs; ++u) {
      const std::uint8_t x = u < a.size() ? a[u] : 0;
      const std::uint8_t y = u < b.size() ? b[u] : 0;
      differs = x != y;
    }
    r.modified_chunks += differs ? 1 : 0;
  }
  r.units = r.modified_chunks * chunk_size;
  r.units_with_index = r.units + 4 * r.modified_chunks;
  return r;
}

RsyncResult rsync_baseline_store(const ChunkLayout& a, const ChunkLayout& b) {
  if (a.geometry().chunk_size != b.geometry().chunk_size) throw Error(Errc::GeometryMismatch, "chunk sizes differ");
  return rsync_baseline_store(a.file_content(), b.file_content(), a.geometry().chunk_size);
}

}  // namespace decstore
