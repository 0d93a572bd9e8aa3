#include <doctest.h>

#include "decstore/error.hpp"
#include "decstore/layout.hpp"
#include "decstore/rng.hpp"

using namespace decstore;

namespace {

Units random_units(std::size_t n, Rng& rng, int lo = 1, int hi = 255) {
  Units u(n);
  for (auto& b : u) b = static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
  return u;
}

// Random valid script over content of the given size.
EditScript random_script(std::size_t size, Rng& rng, std::size_t max_edits, std::size_t max_len) {
  EditScript out;
  std::size_t pos = 0;
  const std::size_t count = rng.uniform_int(0, max_edits);
  for (std::size_t e = 0; e < count && pos <= size; ++e) {
    pos += rng.uniform_int(0, std::max<std::size_t>(1, (size - pos) / (count - e + 1)));
    if (pos > size) break;
    const int kind = static_cast<int>(rng.uniform_int(0, 2));
    const std::size_t room = size - pos;
    if (kind == 0 || room == 0) {
      out.push_back(Edit::insert(pos, random_units(1 + rng.uniform_int(0, max_len - 1), rng)));
      pos += 1;  // keep later edits strictly after this insertion point
    } else {
      const std::size_t len = 1 + rng.uniform_int(0, std::min(room, max_len) - 1);
      out.push_back(kind == 1 ? Edit::erase(pos, len) : Edit::alter(pos, random_units(len, rng)));
      pos += len;
    }
  }
  return out;
}

std::size_t conventional_units(const ChunkLayout& a, const ChunkLayout& b) {
  const auto gammas = group_gammas(diff_groups(a, b));
  return compressed_units(gammas, a.geometry().group_size, a.geometry().chunk_size);
}

}  // namespace

TEST_CASE("initial layout distributes the pads") {
  Rng rng(1);
  const Units file = random_units(3781, rng);
  const ChunkLayout l = init_layout(file, 500, 20, 8);
  CHECK(l.chunk_count() == 8);
  CHECK(l.groups() == 1);
  CHECK(l.occupied() == 8);
  for (std::size_t i = 0; i < 7; ++i) CHECK(l.content_len(i) == 480);
  CHECK(l.content_len(7) == 421);
  CHECK(l.pad_units() == 219);
  CHECK(l.file_content() == file);
  CHECK(l.padded(7).size() == 500);

  const ChunkLayout end = make_zp_end_layout(file, 500, 8);
  CHECK(end.chunk_count() == 8);
  CHECK(end.pad_units() == 219);
  CHECK(end.content_len(7) == 281);

  const ChunkLayout toy = init_layout(random_units(3871, rng), 500, 20, 8);
  CHECK(toy.occupied() == 9);
  CHECK(toy.chunk_count() == 16);
  CHECK(toy.groups() == 2);
  CHECK(toy.zero_chunks() == 7);
}

TEST_CASE("layout construction errors") {
  const Units one{1};
  CHECK_THROWS_AS(init_layout(Units{}, 500, 20, 8), Error);
  CHECK_THROWS_AS(init_layout(one, 20, 20, 8), Error);
  const ChunkGeometry g{4, 1, 2};
  CHECK_THROWS_AS(ChunkLayout(g, PadPolicy::Intermediate, {{1}, {2}, {3}}), Error);
  CHECK_THROWS_AS(ChunkLayout(g, PadPolicy::Intermediate, {{1, 2, 3, 4, 5}, {}}), Error);
  const Units content{1, 2, 3, 4, 5};
  const std::vector<std::size_t> lengths{3, 2};
  const ChunkLayout l = layout_from_lengths(g, PadPolicy::Intermediate, content, lengths);
  CHECK(l.content(1) == Units{4, 5});
  const std::vector<std::size_t> short_lengths{3, 1};
  CHECK_THROWS_AS(layout_from_lengths(g, PadPolicy::Intermediate, content, short_lengths), Error);
}

TEST_CASE("edit scripts validate and apply") {
  const Units c{1, 2, 3, 4, 5, 6};
  CHECK(apply_edits_to_content(c, {Edit::insert(0, {9}), Edit::erase(1, 2), Edit::alter(4, {7, 7}), Edit::insert(6, {8})}) ==
        Units{9, 1, 4, 7, 7, 8});
  CHECK_THROWS_AS(validate_script({Edit::erase(2, 2), Edit::erase(3, 1)}, 6), Error);
  CHECK_THROWS_AS(validate_script({Edit::erase(4, 1), Edit::erase(2, 1)}, 6), Error);
  CHECK_THROWS_AS(validate_script({Edit::erase(5, 2)}, 6), Error);
  CHECK_THROWS_AS(validate_script({Edit::insert(7, {1})}, 6), Error);
  CHECK_THROWS_AS(validate_script({Edit::insert(1, {})}, 6), Error);
  CHECK_THROWS_AS(validate_script({Edit::erase(1, 0)}, 6), Error);
  CHECK_NOTHROW(validate_script({Edit::insert(2, {1}), Edit::erase(2, 1)}, 6));
}

TEST_CASE("small insertions are absorbed by the pads of one chunk") {
  Rng rng(2);
  const Units file = random_units(3781, rng);
  const ChunkLayout l = init_layout(file, 500, 20, 8);
  const ChunkLayout e = apply_edits(l, {Edit::insert(10, random_units(5, rng))});
  CHECK(e.content_len(0) == 485);
  for (std::size_t i = 1; i < 8; ++i) CHECK(e.content(i) == l.content(i));
  const auto diffs = diff_groups(l, e);
  REQUIRE(diffs.size() == 1);
  CHECK(diffs[0].gamma == 1);
  CHECK(diffs[0].modified == std::vector<std::size_t>{0});
  CHECK(conventional_units(l, e) == 1000);

  // The same insertion at the end policy shifts every later chunk.
  const ChunkLayout end = make_zp_end_layout(file, 500, 8);
  const ChunkLayout end2 = apply_edits(end, {Edit::insert(10, random_units(5, rng))});
  CHECK(group_gammas(diff_groups(end, end2)) == std::vector<std::size_t>{8});
}

TEST_CASE("insertions at a chunk boundary and at the end of file") {
  const ChunkGeometry g{6, 2, 2};
  const ChunkLayout l = layout_from_lengths(g, PadPolicy::Intermediate, Units{1, 2, 3, 4, 5, 6, 7}, std::vector<std::size_t>{4, 3});
  const ChunkLayout at_boundary = apply_edits(l, {Edit::insert(4, {9})});
  CHECK(at_boundary.content(0) == Units{1, 2, 3, 4});
  CHECK(at_boundary.content(1) == Units{9, 5, 6, 7});
  const ChunkLayout at_end = apply_edits(l, {Edit::insert(7, {9})});
  CHECK(at_end.content(1) == Units{5, 6, 7, 9});
}

TEST_CASE("growth beyond a chunk cascades into the next one") {
  const ChunkGeometry g{6, 2, 2};
  const ChunkLayout l = layout_from_lengths(g, PadPolicy::Intermediate, Units{1, 2, 3, 4, 5, 6, 7}, std::vector<std::size_t>{4, 3});
  const ChunkLayout e = apply_edits(l, {Edit::insert(0, {9, 9, 9})});
  CHECK(e.content(0) == Units{9, 9, 9, 1, 2, 3});
  CHECK(e.content(1) == Units{4, 5, 6, 7});
  CHECK(e.overflow().empty());
  const ChunkLayout o = apply_edits(l, {Edit::insert(0, Units(6, 9))});
  CHECK(o.overflow().size() == 1);
  CHECK(o.required_chunks() == 3);
  CHECK(check_reset(l, o.required_chunks(), {}) == ResetDecision::Criterion1);
  CHECK_THROWS_AS(apply_edits(o, {Edit::insert(0, {1})}), Error);
}

TEST_CASE("deletions shrink chunks in place") {
  const ChunkGeometry g{6, 2, 2};
  const ChunkLayout l = layout_from_lengths(g, PadPolicy::Intermediate, Units{1, 2, 3, 4, 5, 6, 7}, std::vector<std::size_t>{4, 3});
  const ChunkLayout e = apply_edits(l, {Edit::erase(2, 3)});
  CHECK(e.content(0) == Units{1, 2});
  CHECK(e.content(1) == Units{6, 7});
  const ChunkLayout a = apply_edits(l, {Edit::alter(3, {8, 8})});
  CHECK(a.content(0) == Units{1, 2, 3, 8});
  CHECK(a.content(1) == Units{8, 6, 7});
}

TEST_CASE("property: layouts stay consistent with the edited content") {
  Rng rng(3);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t delta = 8 + rng.uniform_int(0, 40);
    const std::size_t pad = rng.uniform_int(0, delta / 2);
    const std::size_t k = 2 + rng.uniform_int(0, 4);
    const Units file = random_units(1 + rng.uniform_int(0, 400), rng);
    const PadPolicy policy = rng.bernoulli(0.5) ? PadPolicy::Intermediate : PadPolicy::End;
    const ChunkLayout l = policy == PadPolicy::End ? make_zp_end_layout(file, delta, k) : init_layout(file, delta, pad, k);
    CHECK(l.chunk_count() % k == 0);
    CHECK(l.file_content() == file);
    const EditScript script = random_script(file.size(), rng, 6, 3 * delta);
    CAPTURE(trial);
    const ChunkLayout e = apply_edits(l, script);
    CHECK(e.file_content() == apply_edits_to_content(file, script));
    CHECK(e.chunk_count() == l.chunk_count());
    for (std::size_t i = 0; i < e.chunk_count(); ++i) CHECK(e.content_len(i) <= delta);
    if (e.overflow().empty()) {
      const auto diffs = diff_groups(l, e);
      CHECK(diffs.size() == l.groups());
      for (const GroupDiff& d : diffs) {
        CHECK(d.gamma == d.modified.size());
        CHECK(d.gamma <= k);
      }
      if (script.empty()) CHECK(group_gammas(diffs) == std::vector<std::size_t>(l.groups(), 0));
    } else {
      CHECK(e.required_chunks() > e.chunk_count());
    }
  }
}

TEST_CASE("reset decisions") {
  Rng rng(4);
  const ChunkLayout l = init_layout(random_units(3871, rng), 500, 20, 8);
  const std::vector<std::size_t> sparse{1, 0};
  const std::vector<std::size_t> dense{4, 5};
  const std::vector<std::size_t> mixed{4, 3};
  CHECK(check_reset(l, 9, sparse) == ResetDecision::None);
  CHECK(check_reset(l, 16, dense) == ResetDecision::Criterion2);
  CHECK(check_reset(l, 10, mixed) == ResetDecision::None);
  CHECK(check_reset(l, 17, sparse) == ResetDecision::Criterion1);
  CHECK(reset_name(ResetDecision::Criterion2) == "criterion2");
  CHECK(compressed_units(mixed, 8, 500) == 7000);
  CHECK(compressed_units(dense, 8, 500) == 8000);
}

TEST_CASE("diffing requires matching geometry") {
  Rng rng(5);
  const Units file = random_units(1000, rng);
  CHECK_THROWS_AS(diff_groups(init_layout(file, 500, 20, 8), init_layout(file, 500, 20, 4)), Error);
  CHECK_THROWS_AS(diff_groups(init_layout(file, 500, 20, 2), init_layout(random_units(3000, rng), 500, 20, 2)), Error);
}

TEST_CASE("bit conversion") {
  const Units bytes{0x80, 0x01, 0xA5};
  const Units bits = bytes_to_bits(bytes);
  CHECK(bits.size() == 24);
  CHECK(bits[0] == 1);
  CHECK(bits[1] == 0);
  CHECK(bits[15] == 1);
  CHECK(bits_to_bytes(bits) == bytes);
  CHECK_THROWS_AS(bits_to_bytes(Units{1, 0, 1}), Error);
  const EditScript e = edits_to_bits({Edit::insert(2, {0xFF}), Edit::erase(5, 2)});
  CHECK(e[0].pos == 16);
  CHECK(e[0].payload == Units(8, 1));
  CHECK(e[1].pos == 40);
  CHECK(e[1].len == 16);
}

TEST_CASE("striping is a bijection on content") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + 2 * rng.uniform_int(0, 2);
    const std::size_t delta = k * (4 + rng.uniform_int(0, 10));
    const std::size_t pad = k * rng.uniform_int(0, 2);
    const Units file = random_units(1 + rng.uniform_int(0, 300), rng, 0, 1);
    const ChunkLayout l = init_layout(file, delta, pad, k);
    const StripedLayout s = stripe(l);
    CHECK(s.partitions.geometry() == ChunkGeometry{delta / k, pad / k, k * k});
    CHECK(unstripe(s) == l);
    for (std::size_t gi = 0; gi < l.groups(); ++gi) {
      const auto chunks = striped_chunks(s, gi);
      CHECK(chunks.size() == k);
      for (const Units& c : chunks) CHECK(c.size() == delta);
    }
    const EditScript script = random_script(file.size(), rng, 4, 3);
    const StripedLayout e = apply_edits(s, script);
    CHECK(unstripe(e).file_content() == apply_edits_to_content(file, script));
  }
  CHECK_THROWS_AS(stripe(init_layout(Units(100, 1), 500, 20, 8)), Error);
}

TEST_CASE("striping turns spaced insertions into one modified chunk") {
  Rng rng(7);
  const Units file = random_units(3871, rng);
  const EditScript bytes_script{Edit::insert(1, {0x5A}), Edit::insert(481, {0x5A}), Edit::insert(961, {0x5A})};

  const ChunkLayout l = init_layout(file, 500, 20, 8);
  const ChunkLayout e = apply_edits(l, bytes_script);
  CHECK(group_gammas(diff_groups(l, e)) == std::vector<std::size_t>{3, 0});
  CHECK(conventional_units(l, e) == 3000);

  const Units bits = bytes_to_bits(file);
  const StripedLayout s = stripe(init_layout(bits, 4000, 160, 8));
  const StripedLayout se = apply_edits(s, edits_to_bits(bytes_script));
  const auto gammas = group_gammas(diff_striped(s, se));
  CHECK(gammas == std::vector<std::size_t>{1, 0});
  CHECK(compressed_units(gammas, 8, 4000) / 8 == 1000);
  CHECK(bits_to_bytes(unstripe(se).file_content()) == apply_edits_to_content(file, bytes_script));
}

TEST_CASE("rsync baseline counts changed fixed-size chunks") {
  Rng rng(8);
  const Units a = random_units(2000, rng);
  Units b = a;
  b[10] ^= 1;
  b[1500] ^= 1;
  const RsyncResult r = rsync_baseline_store(a, b, 500);
  CHECK(r.modified_chunks == 2);
  CHECK(r.units == 1000);
  CHECK(r.units_with_index == 1008);
  Units c = a;
  c.insert(c.begin(), 7);  // shifts every chunk and adds one
  CHECK(rsync_baseline_store(a, c, 500).modified_chunks == 5);
  CHECK(rsync_baseline_store(a, a, 500).modified_chunks == 0);
  CHECK_THROWS_AS(rsync_baseline_store(a, b, 0), Error);
}
