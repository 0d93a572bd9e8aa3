#include "decstore/resilience.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "decstore/error.hpp"
#include "decstore/rng.hpp"

namespace decstore {

void PlacementPlan::validate() const {
  for (const PlacedObject& o : objects) {
    std::set<std::size_t> distinct(o.nodes.begin(), o.nodes.end());
    if (distinct.size() != o.nodes.size()) throw Error(Errc::BadParameter, "object places two shards on one node");
    if (o.k < 1 || o.k > o.nodes.size()) throw Error(Errc::BadParameter, "object needs 1 <= k <= n");
    for (std::size_t n : o.nodes) {
      if (n >= node_universe) throw Error(Errc::IndexOutOfRange, "node " + std::to_string(n) + " outside the universe");
    }
  }
}

PlacementMode PlacementPlan::mode() const {
  if (objects.empty()) return PlacementMode::Distributed;
  const std::set<std::size_t> base(objects[0].nodes.begin(), objects[0].nodes.end());
  bool subset = true;
  bool disjoint = true;
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (std::size_t n : objects[i].nodes) {
      if (i > 0 && !base.count(n)) subset = false;
      if (!used.insert(n).second) disjoint = false;
    }
  }
  if (disjoint) return PlacementMode::Distributed;
  return subset ? PlacementMode::Collocated : PlacementMode::Mixed;
}

double prob_loss_base(double p) {
  const double q = 1 - p;
  return std::pow(p, 6) + 6 * std::pow(p, 5) * q + 15 * std::pow(p, 4) * q * q + 20 * std::pow(p, 3) * std::pow(q, 3);
}

double prob_loss_delta(double p) { return std::pow(p, 3) + 3 * p * p * (1 - p); }

double prob_both_distributed(double p) { return (1 - prob_loss_base(p)) * (1 - prob_loss_delta(p)); }

double prob_both_collocated(double p) {
  // Beyond losing the base, exactly two failures that both hit the delta's
  // three nodes lose the delta.
  return 1 - (prob_loss_base(p) + 3 * p * p * std::pow(1 - p, 4));
}

PlacementPlan example_collocated_plan() {
  return PlacementPlan{6, {PlacedObject{{0, 1, 2, 3, 4, 5}, 4}, PlacedObject{{0, 1, 2}, 2}}};
}

PlacementPlan example_distributed_plan() {
  return PlacementPlan{9, {PlacedObject{{0, 1, 2, 3, 4, 5}, 4}, PlacedObject{{6, 7, 8}, 2}}};
}

namespace {

bool survives(const PlacementPlan& plan, std::uint32_t failed_mask) {
  for (const PlacedObject& o : plan.objects) {
    std::size_t alive = 0;
    for (std::size_t n : o.nodes) alive += (failed_mask >> n) & 1u ? 0 : 1;
    if (alive < o.k) return false;
  }
  return true;
}

void check_probability(double p) {
  if (!(p >= 0 && p <= 1)) throw Error(Errc::BadParameter, "failure probability must lie in [0,1]");
}

}  // namespace

ResilienceReport enumerate_resilience(const PlacementPlan& plan, double p) {
  plan.validate();
  check_probability(p);
  if (plan.node_universe > kMaxEnumerationNodes) {
    throw Error(Errc::UniverseTooLarge, std::to_string(plan.node_universe) + " nodes exceed the enumeration limit of " +
                                            std::to_string(kMaxEnumerationNodes));
  }
  const std::size_t n = plan.node_universe;
  // Probability of a mask depends only on its popcount.
  std::vector<double> weight(n + 1);
  for (std::size_t f = 0; f <= n; ++f) {
    weight[f] = std::pow(p, static_cast<double>(f)) * std::pow(1 - p, static_cast<double>(n - f));
  }
  std::vector<std::uint64_t> surviving(n + 1, 0);
  const std::uint32_t masks = 1u << n;
  for (std::uint32_t m = 0; m < masks; ++m) {
    if (survives(plan, m)) ++surviving[static_cast<std::size_t>(__builtin_popcount(m))];
  }
  long double total = 0;
  for (std::size_t f = 0; f <= n; ++f) total += static_cast<long double>(surviving[f]) * weight[f];
  return ResilienceReport{p, static_cast<double>(total), ResilienceMethod::Enumeration, masks};
}

ResilienceReport monte_carlo_resilience(const PlacementPlan& plan, double p, std::uint64_t trials, std::uint64_t seed) {
  plan.validate();
  check_probability(p);
  if (trials < 1) throw Error(Errc::BadParameter, "trials must be >= 1");
  if (plan.node_universe > 64) throw Error(Errc::UniverseTooLarge, "Monte Carlo supports up to 64 nodes");
  Rng rng(seed);
  std::uint64_t ok = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint64_t mask = 0;
    for (std::size_t n = 0; n < plan.node_universe; ++n) {
      if (rng.bernoulli(p)) mask |= 1ULL << n;
    }
    bool alive_all = true;
    for (const PlacedObject& o : plan.objects) {
      std::size_t alive = 0;
      for (std::size_t n : o.nodes) alive += (mask >> n) & 1u ? 0 : 1;
      if (alive < o.k) {
        alive_all = false;
        break;
      }
    }
    ok += alive_all ? 1 : 0;
  }
  return ResilienceReport{p, static_cast<double>(ok) / static_cast<double>(trials), ResilienceMethod::MonteCarlo, trials};
}

std::string resilience_csv(const std::vector<double>& ps) {
  std::ostringstream out;
  out << "p,prob_distributed,prob_collocated\n";
  char buf[128];
  for (double p : ps) {
    std::snprintf(buf, sizeof buf, "%.6g,%.15f,%.15f\n", p, prob_both_distributed(p), prob_both_collocated(p));
    out << buf;
  }
  return out.str();
}

}  // namespace decstore
