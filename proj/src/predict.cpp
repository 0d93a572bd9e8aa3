#include <algorithm>
#include <string>

#include "decstore/dec.hpp"
#include "decstore/error.hpp"

namespace decstore {

PredictConfig PredictConfig::from(const ArchiveConfig& c) {
  return PredictConfig{c.scheme, c.optimized, c.n, c.k, c.threshold, c.cauchy_reads, c.iota};
}

std::size_t delta_read_cost(std::size_t gamma, const PredictConfig& cfg) {
  if (gamma == 0) return 0;
  if (cfg.scheme == Scheme::TwoLevel) {
    if (gamma > cfg.threshold) return cfg.k;
    return cfg.cauchy_reads ? 2 * gamma : 2 * cfg.threshold;
  }
  return std::min(2 * gamma, cfg.k);
}

std::size_t delta_storage_cost(std::size_t gamma, const PredictConfig& cfg) {
  if (gamma == 0) return 0;
  if (cfg.scheme == Scheme::TwoLevel) return gamma > cfg.threshold ? cfg.n : 2 * cfg.threshold * cfg.n / cfg.k;
  return 2 * gamma >= cfg.k ? cfg.n : 2 * gamma * cfg.n / cfg.k;
}

std::vector<bool> predicted_full_versions(const std::vector<std::size_t>& profile, const PredictConfig& cfg) {
  const std::size_t L = profile.size() + 1;
  std::vector<bool> full(L, false);
  auto gamma_of = [&](std::size_t j) { return profile[j - 2]; };
  if (cfg.scheme == Scheme::Reverse) {
    std::size_t run = 0;
    for (std::size_t j = 1; j < L; ++j) {
      const bool keep = cfg.optimized && (2 * gamma_of(j + 1) >= cfg.k || run >= cfg.iota);
      full[j - 1] = keep;
      run = keep ? 0 : run + 1;
    }
    full[L - 1] = true;
    return full;
  }
  full[0] = true;
  if (cfg.scheme == Scheme::Forward && cfg.optimized) {
    std::size_t run = 0;
    for (std::size_t j = 2; j <= L; ++j) {
      const bool reset = 2 * gamma_of(j) >= cfg.k || run >= cfg.iota;
      full[j - 1] = reset;
      run = reset ? 0 : run + 1;
    }
  }
  return full;
}

std::vector<std::size_t> predict_object_reads(const std::vector<std::size_t>& profile, const PredictConfig& cfg) {
  const std::vector<bool> full = predicted_full_versions(profile, cfg);
  const std::size_t L = full.size();
  std::vector<std::size_t> out(L);
  for (std::size_t j = 1; j <= L; ++j) {
    if (full[j - 1]) {
      out[j - 1] = cfg.k;
    } else if (cfg.scheme == Scheme::Reverse) {
      out[j - 1] = delta_read_cost(profile[j - 1], cfg);
    } else {
      out[j - 1] = delta_read_cost(profile[j - 2], cfg);
    }
  }
  return out;
}

std::size_t predict_reads(const std::vector<std::size_t>& profile, const PredictConfig& cfg, std::size_t l) {
  const std::vector<bool> full = predicted_full_versions(profile, cfg);
  const std::size_t L = full.size();
  if (l < 1 || l > L) throw Error(Errc::VersionUnavailable, "version " + std::to_string(l) + " outside 1.." + std::to_string(L));
  const std::vector<std::size_t> cost = predict_object_reads(profile, cfg);
  std::size_t reads = 0;
  if (cfg.scheme == Scheme::Reverse) {
    std::size_t m = l;
    while (!full[m - 1]) ++m;
    reads = cfg.k;
    for (std::size_t j = l; j < m; ++j) reads += cost[j - 1];
  } else {
    std::size_t a = l;
    while (!full[a - 1]) --a;
    reads = cfg.k;
    for (std::size_t j = a + 1; j <= l; ++j) reads += cost[j - 1];
  }
  return reads;
}

std::size_t predict_storage(const std::vector<std::size_t>& profile, const PredictConfig& cfg, std::size_t l) {
  if (l < 1 || l > profile.size() + 1) throw Error(Errc::VersionUnavailable, "version " + std::to_string(l) + " out of range");
  const std::vector<std::size_t> prefix(profile.begin(), profile.begin() + static_cast<std::ptrdiff_t>(l - 1));
  const std::vector<bool> full = predicted_full_versions(prefix, cfg);
  std::size_t total = 0;
  for (std::size_t j = 1; j <= l; ++j) {
    if (full[j - 1]) {
      total += cfg.n;
    } else {
      const std::size_t gamma = cfg.scheme == Scheme::Reverse ? prefix[j - 1] : prefix[j - 2];
      total += delta_storage_cost(gamma, cfg);
    }
  }
  return total;
}

}  // namespace decstore
