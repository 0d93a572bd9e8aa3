#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decstore/gf.hpp"
#include "decstore/matrix.hpp"
#include "decstore/rng.hpp"

namespace decstore {

enum class PmfKind { BinomialType, TruncExp, TruncPoisson, Uniform };

// Sparsity distribution on {1..k}.
struct PmfSpec {
  PmfKind kind = PmfKind::Uniform;
  double param = 0;  // p, alpha or lambda
  std::size_t k = 1;

  void validate() const;
  std::string describe() const;
};

PmfKind parse_pmf_kind(const std::string& s);
std::string pmf_kind_name(PmfKind kind);

double pmf_eval(const PmfSpec& spec, std::size_t gamma);
// Masses for gamma = 1..k (index gamma-1).
std::vector<double> pmf_table(const PmfSpec& spec);

std::size_t sample_gamma(const PmfSpec& spec, Rng& rng);
// gamma-sparse vector with a uniform support and uniform nonzero values.
Column sparse_vector(std::size_t k, std::size_t gamma, const Field& field, Rng& rng);
Column sample_delta(const PmfSpec& spec, const Field& field, std::uint64_t seed);

struct TwoVersionMetrics {
  double expected_reads = 0;
  double expected_storage = 0;
  double read_reduction_pct = 0;     // against 2k reads without differencing
  double storage_reduction_pct = 0;  // against 2n storage
  double second_version_increase_basic_pct = 0;
  double second_version_increase_optimized_pct = 0;
};

TwoVersionMetrics expected_two_version_metrics(const PmfSpec& spec, double kappa);

struct ThresholdPoint {
  std::size_t threshold = 0;
  double expected_reads = 0;
  double expected_storage = 0;
};

struct ThresholdResult {
  std::size_t threshold = 0;
  double expected_reads = 0;
  double expected_storage = 0;
  double weight = 0;
  bool cauchy = false;
};

// Two-version expectations of the two-level scheme at threshold T.
ThresholdPoint two_level_expectations(const PmfSpec& spec, double kappa, std::size_t threshold, bool cauchy);

// Exhaustive over T = 1..floor(k/2). The Cauchy objective is
// w * E[reads] + (1 - w) * E[storage]; ties go to the smaller T.
ThresholdResult optimize_threshold(const PmfSpec& spec, double kappa, double w, bool cauchy);

std::vector<ThresholdPoint> pareto_curve(const PmfSpec& spec, double kappa);

struct MultiVersionMetrics {
  std::size_t versions = 0;
  double expected_reads = 0;
  double read_reduction_pct = 0;
};

MultiVersionMetrics multi_version_expectations(const PmfSpec& spec, std::size_t versions);

}  // namespace decstore
