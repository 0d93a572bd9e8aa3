#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decstore/dec.hpp"
#include "decstore/workload.hpp"

namespace decstore {

struct SimulationConfig {
  PmfSpec pmf;                  // pmf.k is the data length
  ArchiveConfig archive;        // scheme, n, T, ...; archive.k must equal pmf.k
  std::size_t versions = 2;     // L
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  // Sparsity of versions 2..L, used verbatim instead of sampling.
  std::optional<std::vector<std::size_t>> profile;

  void validate() const;
};

struct SimulationRow {
  std::size_t trial = 0;
  std::size_t version = 0;
  std::size_t gamma = 0;
  RecordMode mode = RecordMode::FullObject;  // record after the last commit
  std::size_t object_reads = 0;              // reads to fetch this record alone
  std::size_t retrieve_reads = 0;            // measured reads to rebuild this version
  std::size_t predicted_reads = 0;
  std::size_t storage_units = 0;  // measured total right after this commit
  std::size_t predicted_storage = 0;
};

// Commits sampled (or injected) sparsity chains over GF(256), one symbol per
// block, and measures every version after the last commit.
std::vector<SimulationRow> run_simulation(const SimulationConfig& cfg);

std::string simulation_csv_header();
std::string simulation_csv_row(const SimulationRow& r);

}  // namespace decstore
