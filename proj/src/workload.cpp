#include "decstore/workload.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "decstore/error.hpp"

namespace decstore {

namespace {
constexpr double kTieTolerance = 1e-12;
}

void PmfSpec::validate() const {
  if (k < 1) throw Error(Errc::BadParameter, "PMF support needs k >= 1");
  switch (kind) {
    case PmfKind::BinomialType:
      if (!(param > 0 && param < 1)) throw Error(Errc::BadParameter, "binomial p must lie in (0,1)");
      break;
    case PmfKind::TruncExp:
      if (!(param > 0)) throw Error(Errc::BadParameter, "exponential alpha must be > 0");
      break;
    case PmfKind::TruncPoisson:
      if (!(param > 0)) throw Error(Errc::BadParameter, "Poisson lambda must be > 0");
      break;
    case PmfKind::Uniform:
      break;
  }
}

std::string pmf_kind_name(PmfKind kind) {
  switch (kind) {
    case PmfKind::BinomialType: return "binomial";
    case PmfKind::TruncExp: return "exponential";
    case PmfKind::TruncPoisson: return "poisson";
    case PmfKind::Uniform: return "uniform";
  }
  return "?";
}

PmfKind parse_pmf_kind(const std::string& s) {
  if (s == "binomial") return PmfKind::BinomialType;
  if (s == "exponential" || s == "exp") return PmfKind::TruncExp;
  if (s == "poisson") return PmfKind::TruncPoisson;
  if (s == "uniform") return PmfKind::Uniform;
  throw Error(Errc::BadConfig, "unknown PMF '" + s + "' (binomial, exponential, poisson, uniform)");
}

std::string PmfSpec::describe() const {
  std::ostringstream out;
  out << pmf_kind_name(kind);
  if (kind != PmfKind::Uniform) out << '(' << param << ')';
  out << " k=" << k;
  return out.str();
}

std::vector<double> pmf_table(const PmfSpec& spec) {
  spec.validate();
  const std::size_t k = spec.k;
  std::vector<double> w(k);
  switch (spec.kind) {
    case PmfKind::BinomialType: {
      const double p = spec.param;
      const double c = 1.0 / (1.0 - std::pow(1.0 - p, static_cast<double>(k)));
      for (std::size_t g = 1; g <= k; ++g) {
        const double logc = std::lgamma(k + 1.0) - std::lgamma(g + 1.0) - std::lgamma(static_cast<double>(k - g) + 1.0);
        w[g - 1] = c * std::exp(logc + g * std::log(p) + static_cast<double>(k - g) * std::log1p(-p));
      }
      return w;
    }
    case PmfKind::TruncExp:
      for (std::size_t g = 1; g <= k; ++g) w[g - 1] = std::exp(-spec.param * static_cast<double>(g));
      break;
    case PmfKind::TruncPoisson:
      for (std::size_t g = 1; g <= k; ++g) {
        w[g - 1] = std::exp(g * std::log(spec.param) - spec.param - std::lgamma(g + 1.0));
      }
      break;
    case PmfKind::Uniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
  }
  double sum = 0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

double pmf_eval(const PmfSpec& spec, std::size_t gamma) {
  if (gamma < 1 || gamma > spec.k) throw Error(Errc::BadParameter, "gamma outside 1..k");
  return pmf_table(spec)[gamma - 1];
}

std::size_t sample_gamma(const PmfSpec& spec, Rng& rng) {
  const std::vector<double> w = pmf_table(spec);
  const double u = rng.uniform();
  double acc = 0;
  for (std::size_t g = 1; g <= w.size(); ++g) {
    acc += w[g - 1];
    if (u < acc) return g;
  }
  return w.size();
}

Column sparse_vector(std::size_t k, std::size_t gamma, const Field& field, Rng& rng) {
  if (gamma > k) throw Error(Errc::BadParameter, "sparsity exceeds length");
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (std::size_t i = 0; i < gamma; ++i) std::swap(idx[i], idx[i + rng.uniform_int(0, k - 1 - i)]);
  Column z(k, 0);
  for (std::size_t i = 0; i < gamma; ++i) z[idx[i]] = static_cast<Element>(rng.uniform_int(1, field.order()));
  return z;
}

Column sample_delta(const PmfSpec& spec, const Field& field, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t gamma = sample_gamma(spec, rng);
  return sparse_vector(spec.k, gamma, field, rng);
}

TwoVersionMetrics expected_two_version_metrics(const PmfSpec& spec, double kappa) {
  const std::vector<double> w = pmf_table(spec);
  const double k = static_cast<double>(spec.k);
  double second = 0;
  double second_opt = 0;
  for (std::size_t g = 1; g <= spec.k; ++g) {
    const double gd = static_cast<double>(g);
    second += w[g - 1] * std::min(2 * gd, k);
    second_opt += w[g - 1] * (2 * g < spec.k ? k + 2 * gd : k);
  }
  TwoVersionMetrics m;
  m.expected_reads = k + second;
  m.expected_storage = kappa * m.expected_reads;
  m.read_reduction_pct = (2 * k - m.expected_reads) / (2 * k) * 100;
  m.storage_reduction_pct = (2 * kappa * k - m.expected_storage) / (2 * kappa * k) * 100;
  m.second_version_increase_basic_pct = (k + second - k) / k * 100;
  m.second_version_increase_optimized_pct = (second_opt - k) / k * 100;
  return m;
}

ThresholdPoint two_level_expectations(const PmfSpec& spec, double kappa, std::size_t threshold, bool cauchy) {
  if (threshold < 1 || 2 * threshold > spec.k) throw Error(Errc::BadParameter, "threshold outside 1..floor(k/2)");
  const std::vector<double> w = pmf_table(spec);
  const double k = static_cast<double>(spec.k);
  const double t = static_cast<double>(threshold);
  double p_low = 0;
  double low_reads = 0;
  for (std::size_t g = 1; g <= threshold; ++g) {
    p_low += w[g - 1];
    low_reads += w[g - 1] * 2 * static_cast<double>(g);
  }
  const double p_high = 1 - p_low;
  ThresholdPoint out;
  out.threshold = threshold;
  if (cauchy) {
    out.expected_reads = k + low_reads + p_high * k;
  } else {
    out.expected_reads = k + p_low * 2 * t + p_high * k;
  }
  out.expected_storage = kappa * k + p_low * 2 * t * kappa + p_high * k * kappa;
  return out;
}

ThresholdResult optimize_threshold(const PmfSpec& spec, double kappa, double w, bool cauchy) {
  if (!(w >= 0 && w <= 1)) throw Error(Errc::BadParameter, "weight must lie in [0,1]");
  if (spec.k < 2) throw Error(Errc::BadParameter, "threshold search needs k >= 2");
  ThresholdResult best;
  best.weight = w;
  best.cauchy = cauchy;
  double best_obj = 0;
  for (std::size_t t = 1; 2 * t <= spec.k; ++t) {
    const ThresholdPoint pt = two_level_expectations(spec, kappa, t, cauchy);
    // Without row subsets E[storage] = kappa * E[reads], so w cannot move the optimum.
    const double obj = cauchy ? w * pt.expected_reads + (1 - w) * pt.expected_storage : pt.expected_reads;
    if (t == 1 || obj < best_obj - kTieTolerance * std::max(1.0, std::abs(best_obj))) {
      best_obj = obj;
      best.threshold = t;
      best.expected_reads = pt.expected_reads;
      best.expected_storage = pt.expected_storage;
    }
  }
  return best;
}

std::vector<ThresholdPoint> pareto_curve(const PmfSpec& spec, double kappa) {
  std::vector<ThresholdPoint> out;
  for (std::size_t t = 1; 2 * t <= spec.k; ++t) out.push_back(two_level_expectations(spec, kappa, t, true));
  return out;
}

MultiVersionMetrics multi_version_expectations(const PmfSpec& spec, std::size_t versions) {
  if (versions < 2) throw Error(Errc::BadParameter, "need at least two versions");
  const std::vector<double> w = pmf_table(spec);
  const double k = static_cast<double>(spec.k);
  double per_delta = 0;
  for (std::size_t g = 1; g <= spec.k; ++g) per_delta += w[g - 1] * std::min(2 * static_cast<double>(g), k);
  MultiVersionMetrics m;
  m.versions = versions;
  const double L = static_cast<double>(versions);
  m.expected_reads = k + (L - 1) * per_delta;
  m.read_reduction_pct = (L * k - m.expected_reads) / (L * k) * 100;
  return m;
}

}  // namespace decstore
