#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace decstore {

struct PlacedObject {
  std::vector<std::size_t> nodes;  // one shard per node
  std::size_t k = 0;               // shards needed to survive
};

enum class PlacementMode { Collocated, Distributed, Mixed };

struct PlacementPlan {
  std::size_t node_universe = 0;
  std::vector<PlacedObject> objects;

  PlacementMode mode() const;
  void validate() const;
};

enum class ResilienceMethod { ClosedForm, Enumeration, MonteCarlo };

struct ResilienceReport {
  double p = 0;
  double prob_all_versions_survive = 0;
  ResilienceMethod method = ResilienceMethod::ClosedForm;
  std::uint64_t trials = 0;
};

// The (6,4) base object with a (3,2) delta.
double prob_loss_base(double p);   // at least 3 of 6 nodes fail
double prob_loss_delta(double p);  // at least 2 of 3 nodes fail
double prob_both_distributed(double p);
double prob_both_collocated(double p);

PlacementPlan example_collocated_plan();
PlacementPlan example_distributed_plan();

inline constexpr std::size_t kMaxEnumerationNodes = 24;

ResilienceReport enumerate_resilience(const PlacementPlan& plan, double p);
ResilienceReport monte_carlo_resilience(const PlacementPlan& plan, double p, std::uint64_t trials, std::uint64_t seed);

// CSV with columns p,prob_distributed,prob_collocated.
std::string resilience_csv(const std::vector<double>& ps);

}  // namespace decstore
