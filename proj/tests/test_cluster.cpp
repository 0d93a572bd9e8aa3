#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "decstore/cluster.hpp"
#include "decstore/error.hpp"
#include "decstore/rng.hpp"

using namespace decstore;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("decstore_cluster_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Blocks data(std::size_t k, std::size_t len, std::uint64_t seed) {
  Rng rng(seed);
  Blocks x(k, Block(len));
  for (auto& b : x) {
    for (auto& e : b) e = static_cast<Element>(rng.uniform_int(0, 255));
  }
  return x;
}

std::vector<NodeId> range(NodeId lo, NodeId hi) {
  std::vector<NodeId> v;
  for (NodeId i = lo; i < hi; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("store and read back with metering") {
  Cluster c(9);
  const MdsCode base(6, 4, gf256());
  const MdsCode delta(3, 2, gf256());
  const Blocks x = data(4, 5, 1);
  c.store_shards("obj", 1, base, base.encode(x), range(0, 6));
  c.store_shards("obj", 2, delta, delta.encode(data(2, 5, 2)), range(0, 3));
  CHECK(c.placement("obj", 2) == range(0, 3));

  const ShardSet s = c.read_shards("obj", 1, 4);
  CHECK(c.reads() == 4);
  CHECK(base.decode(s) == x);
  for (std::size_t i = 0; i < 4; ++i) CHECK(s.shards[i].index == i);  // systematic first
  c.read_shards("obj", 2, 2);
  CHECK(c.reads() == 6);
  CHECK(c.node_reads(0) == 2);
  CHECK(c.node_reads(5) == 0);
  c.reset_meter();
  CHECK(c.reads() == 0);
  CHECK(c.stored_units() == 9);
  CHECK(c.stored_units("obj", 2) == 3);
}

TEST_CASE("distributed placement on disjoint nodes") {
  Cluster c(9);
  const MdsCode delta(3, 2, gf256());
  c.store_shards("obj", 2, delta, delta.encode(data(2, 3, 3)), range(6, 9));
  CHECK(c.placement("obj", 2) == range(6, 9));
}

TEST_CASE("placement and liveness errors") {
  Cluster c(6);
  const MdsCode code(6, 4, gf256());
  const ShardSet s = code.encode(data(4, 2, 4));
  CHECK_THROWS_AS(c.store_shards("o", 1, code, s, range(0, 5)), Error);
  c.fail_nodes(std::vector<NodeId>{2});
  try {
    c.store_shards("o", 1, code, s, range(0, 6));
    FAIL("expected NodeFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NodeFailed);
  }
  c.heal_all();
  c.store_shards("o", 1, code, s, range(0, 6));
  CHECK_THROWS_AS(c.store_shards("o", 1, code, s, range(0, 6)), Error);
  CHECK_THROWS_AS(c.store_shards("bad/id", 1, code, s, range(0, 6)), Error);
}

TEST_CASE("failures within tolerance keep the object readable") {
  Cluster c(6);
  const MdsCode code(6, 4, gf256());
  const Blocks x = data(4, 3, 5);
  c.store_shards("o", 1, code, code.encode(x), range(0, 6));
  for (NodeId a = 0; a < 6; ++a) {
    for (NodeId b = a + 1; b < 6; ++b) {
      c.fail_nodes(std::vector<NodeId>{a, b});
      const ShardSet s = c.read_shards("o", 1, 4);
      for (const Shard& sh : s.shards) CHECK((sh.index != a && sh.index != b));
      CHECK(code.decode(s) == x);
      c.heal_all();
    }
  }
  c.fail_nodes(std::vector<NodeId>{0, 1, 5});
  try {
    c.read_shards("o", 1, 4);
    FAIL("expected InsufficientLiveShards");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientLiveShards);
  }
  c.heal_nodes(std::vector<NodeId>{5});
  CHECK_NOTHROW(c.read_shards("o", 1, 4));
  const std::vector<std::size_t> want{0};
  CHECK_THROWS_AS(c.read_shards("o", 1, want), Error);
}

TEST_CASE("failed nodes never serve reads") {
  Cluster c(8);
  const MdsCode code(8, 4, gf256());
  c.store_shards("o", 1, code, code.encode(data(4, 2, 6)), range(0, 8));
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    c.heal_all();
    c.reset_meter();
    std::vector<NodeId> down;
    for (NodeId n = 0; n < 8; ++n) {
      if (rng.bernoulli(0.3)) down.push_back(n);
    }
    c.fail_nodes(down);
    try {
      c.read_shards("o", 1, 4);
    } catch (const Error&) {
      CHECK(down.size() > 4);
    }
    for (NodeId n : down) CHECK(c.node_reads(n) == 0);
  }
}

TEST_CASE("persist and load round-trip bit-exactly") {
  TempDir dir;
  {
    Cluster empty(3);
    empty.persist(dir.path);
    const auto back = Cluster::load(dir.path);
    CHECK(back->node_count() == 3);
    CHECK(back->snapshot().empty());
  }
  Cluster c(6);
  const MdsCode code(6, 4, gf256());
  const MdsCode small(3, 2, gf256());
  c.store_shards("alpha", 1, code, code.encode(data(4, 11, 8)), range(0, 6));
  c.store_shards("alpha", 2, small, small.encode(data(2, 11, 9)), range(0, 3));
  c.store_shards("b-2", 1, code, code.encode(data(4, 1, 10)), range(0, 6));
  c.fail_nodes(std::vector<NodeId>{4});
  c.persist(dir.path);
  CHECK(fs::exists(dir.path / "node_000" / "alpha" / "v1_s0.shard"));
  CHECK(fs::exists(dir.path / "cluster.tsv"));

  auto back = Cluster::load(dir.path);
  CHECK(back->snapshot() == c.snapshot());
  CHECK(back->failed_nodes() == std::vector<NodeId>{4});

  c.remove("alpha", 2);
  c.persist(dir.path);
  CHECK_FALSE(fs::exists(dir.path / "node_000" / "alpha" / "v2_s0.shard"));
  back = Cluster::load(dir.path);
  CHECK(back->snapshot() == c.snapshot());
}

TEST_CASE("truncated shard file is reported as corrupt") {
  TempDir dir;
  Cluster c(3);
  const MdsCode code(3, 2, gf256());
  c.store_shards("o", 1, code, code.encode(data(2, 40, 11)), range(0, 3));
  c.persist(dir.path);
  const fs::path victim = dir.path / Cluster::shard_path(1, ShardKey{"o", 1, 1});
  fs::resize_file(victim, fs::file_size(victim) - 3);
  try {
    Cluster::load(dir.path);
    FAIL("expected CorruptManifest");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CorruptManifest);
  }
  std::ofstream(dir.path / "cluster.tsv") << "garbage\n";
  CHECK_THROWS_AS(Cluster::load(dir.path), Error);
}
