#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decstore/layout.hpp"
#include "decstore/rng.hpp"

namespace decstore {

enum class WorkloadFamily { BurstyInsert, SingleInserts, BurstyDelete, SingleDeletes, IntraDistance };

// ZpIntermediate and Conventional are the same computation; the names follow
// the experiment they appear in. Dec is the k/2-level scheme against Rsync.
enum class Strategy { ZpIntermediate, ZpEnd, Conventional, Striped, Dec, TwoLevel, Rsync, RsyncIndexed };

std::string family_name(WorkloadFamily f);
WorkloadFamily parse_family(const std::string& s);
std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& s);

struct ExperimentConfig {
  WorkloadFamily family = WorkloadFamily::BurstyInsert;
  std::size_t param = 5;
  Strategy strategy = Strategy::ZpIntermediate;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t delta_cap = 500;
  std::size_t pad = 20;
  std::size_t k = 8;
  std::size_t file_size = 0;  // 0 picks 3781 for zero-pad runs, 3871 otherwise
  std::size_t threads = 0;    // 0 uses the hardware concurrency
  bool edits_enabled = true;

  void validate() const;
  std::size_t effective_file_size() const;
};

// key=value lines; '#' starts a comment.
ExperimentConfig parse_experiment_config(const std::string& text);
std::string format_experiment_config(const ExperimentConfig& cfg);

struct ExperimentResult {
  ExperimentConfig config;
  double mean_storage_units = 0;
  double std_error = 0;
  std::vector<double> per_trial;
  std::optional<std::size_t> threshold;  // empirical T for the two-level strategy
};

// Random edits of the given family against a file of file_size units.
EditScript generate_edits(WorkloadFamily family, std::size_t param, std::size_t file_size, std::size_t delta_cap,
                          std::size_t pad, Rng& rng);

// Per-trial group gammas for the strategy; a reset-triggering trial reports
// every group at gamma = k.
std::vector<std::size_t> trial_gammas(const ExperimentConfig& cfg, std::span<const std::uint8_t> file,
                                      const EditScript& edits);

ExperimentResult run_workload_experiment(const ExperimentConfig& cfg);

std::string experiment_csv_header();
std::string experiment_csv_row(const ExperimentResult& r);

}  // namespace decstore
