#include "decstore/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "decstore/error.hpp"

namespace decstore {

namespace {

struct NamedFamily {
  WorkloadFamily family;
  const char* name;
};
constexpr NamedFamily kFamilies[] = {
    {WorkloadFamily::BurstyInsert, "bursty-insert"},   {WorkloadFamily::SingleInserts, "single-inserts"},
    {WorkloadFamily::BurstyDelete, "bursty-delete"},   {WorkloadFamily::SingleDeletes, "single-deletes"},
    {WorkloadFamily::IntraDistance, "intra-distance"},
};

struct NamedStrategy {
  Strategy strategy;
  const char* name;
};
constexpr NamedStrategy kStrategies[] = {
    {Strategy::ZpIntermediate, "zp-intermediate"}, {Strategy::ZpEnd, "zp-end"},
    {Strategy::Conventional, "conventional"},      {Strategy::Striped, "striped"},
    {Strategy::Dec, "dec"},                        {Strategy::TwoLevel, "two-level"},
    {Strategy::Rsync, "rsync"},                    {Strategy::RsyncIndexed, "rsync-indexed"},
};

std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw Error(Errc::BadConfig, "key '" + key + "' needs a non-negative integer, got '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint8_t nonzero_byte(Rng& rng) { return static_cast<std::uint8_t>(rng.uniform_int(1, 255)); }

Units random_file(std::size_t size, Rng& rng) {
  Units out(size);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return out;
}

std::vector<std::size_t> reset_gammas(std::size_t required_chunks, std::size_t k) {
  return std::vector<std::size_t>((required_chunks + k - 1) / k, k);
}

std::vector<std::size_t> layout_gammas(const ChunkLayout& before, const EditScript& edits) {
  const ChunkLayout after = apply_edits(before, edits);
  const std::size_t k = before.geometry().group_size;
  if (!after.overflow().empty()) return reset_gammas(after.required_chunks(), k);
  return group_gammas(diff_groups(before, after));
}

}  // namespace

std::string family_name(WorkloadFamily f) {
  for (const auto& e : kFamilies) {
    if (e.family == f) return e.name;
  }
  return "?";
}

WorkloadFamily parse_family(const std::string& s) {
  for (const auto& e : kFamilies) {
    if (s == e.name) return e.family;
  }
  throw Error(Errc::BadConfig, "unknown workload family '" + s + "'");
}

std::string strategy_name(Strategy s) {
  for (const auto& e : kStrategies) {
    if (e.strategy == s) return e.name;
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  for (const auto& e : kStrategies) {
    if (s == e.name) return e.strategy;
  }
  throw Error(Errc::BadConfig, "unknown strategy '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw Error(Errc::BadConfig, "trials must be >= 1");
  if (k < 2) throw Error(Errc::BadConfig, "k must be >= 2");
  if (delta_cap == 0 || pad >= delta_cap) throw Error(Errc::BadConfig, "need 0 <= pad < delta_cap");
  if (param == 0) throw Error(Errc::BadConfig, "workload parameter must be >= 1");
  if (strategy == Strategy::Striped && ((8 * delta_cap) % k != 0 || (8 * pad) % k != 0)) {
    throw Error(Errc::BadConfig, "striping needs k to divide the chunk and pad sizes in bits");
  }
  const std::size_t v = effective_file_size();
  if (v == 0) throw Error(Errc::BadConfig, "file size must be >= 1");
  if ((family == WorkloadFamily::BurstyDelete || family == WorkloadFamily::SingleDeletes) && param > v) {
    throw Error(Errc::BadConfig, "deletion parameter exceeds the file size");
  }
  if (family == WorkloadFamily::IntraDistance) {
    if (param > delta_cap - pad) throw Error(Errc::BadConfig, "intra-distance R must not exceed delta_cap - pad");
    if (2 * (delta_cap - pad + param) > v) throw Error(Errc::BadConfig, "file too small for three spaced insertions");
  }
}

std::size_t ExperimentConfig::effective_file_size() const {
  if (file_size != 0) return file_size;
  return (strategy == Strategy::ZpIntermediate || strategy == Strategy::ZpEnd) ? 3781 : 3871;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::BadConfig, "line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw Error(Errc::BadConfig, "line " + std::to_string(lineno) + ": empty value for " + key);
    if (key == "family") {
      cfg.family = parse_family(value);
    } else if (key == "param") {
      cfg.param = parse_size(key, value);
    } else if (key == "strategy") {
      cfg.strategy = parse_strategy(value);
    } else if (key == "trials") {
      cfg.trials = parse_size(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_size(key, value);
    } else if (key == "delta_cap") {
      cfg.delta_cap = parse_size(key, value);
    } else if (key == "pad") {
      cfg.pad = parse_size(key, value);
    } else if (key == "k") {
      cfg.k = parse_size(key, value);
    } else if (key == "file_size") {
      cfg.file_size = parse_size(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_size(key, value);
    } else if (key == "edits") {
      if (value != "on" && value != "off") throw Error(Errc::BadConfig, "edits must be on or off");
      cfg.edits_enabled = value == "on";
    } else {
      throw Error(Errc::BadConfig, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string format_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "family=" << family_name(cfg.family) << "\nparam=" << cfg.param << "\nstrategy=" << strategy_name(cfg.strategy)
      << "\ntrials=" << cfg.trials << "\nseed=" << cfg.seed << "\ndelta_cap=" << cfg.delta_cap << "\npad=" << cfg.pad
      << "\nk=" << cfg.k << "\nfile_size=" << cfg.effective_file_size() << "\nedits=" << (cfg.edits_enabled ? "on" : "off")
      << "\n";
  return out.str();
}

EditScript generate_edits(WorkloadFamily family, std::size_t param, std::size_t v, std::size_t delta_cap,
                          std::size_t pad, Rng& rng) {
  EditScript edits;
  switch (family) {
    case WorkloadFamily::BurstyInsert: {
      const std::size_t size = rng.uniform_int(1, param);
      const std::size_t pos = rng.uniform_int(0, v);
      Units payload(size);
      for (auto& b : payload) b = nonzero_byte(rng);
      edits.push_back(Edit::insert(pos, std::move(payload)));
      break;
    }
    case WorkloadFamily::SingleInserts: {
      const std::size_t count = rng.uniform_int(1, param);
      std::vector<std::size_t> pos(count);
      for (auto& p : pos) p = rng.uniform_int(0, v);
      std::sort(pos.begin(), pos.end());
      for (std::size_t p : pos) edits.push_back(Edit::insert(p, Units{nonzero_byte(rng)}));
      break;
    }
    case WorkloadFamily::BurstyDelete: {
      const std::size_t size = rng.uniform_int(1, std::min(param, v));
      edits.push_back(Edit::erase(rng.uniform_int(0, v - size), size));
      break;
    }
    case WorkloadFamily::SingleDeletes: {
      const std::size_t count = rng.uniform_int(1, std::min(param, v));
      // Floyd's sampling of distinct positions.
      std::vector<std::size_t> chosen;
      for (std::size_t j = v - count; j < v; ++j) {
        const std::size_t t = rng.uniform_int(0, j);
        if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
          chosen.push_back(t);
        } else {
          chosen.push_back(j);
        }
      }
      std::sort(chosen.begin(), chosen.end());
      for (std::size_t p : chosen) edits.push_back(Edit::erase(p, 1));
      break;
    }
    case WorkloadFamily::IntraDistance: {
      const std::size_t span = delta_cap - pad;
      std::size_t p = rng.uniform_int(0, v - 2 * (span + param));
      for (int i = 0; i < 3; ++i) {
        if (i > 0) p += rng.uniform_int(span - param, span + param);
        edits.push_back(Edit::insert(p, Units{nonzero_byte(rng)}));
      }
      break;
    }
  }
  return edits;
}

std::vector<std::size_t> trial_gammas(const ExperimentConfig& cfg, std::span<const std::uint8_t> file,
                                      const EditScript& edits) {
  switch (cfg.strategy) {
    case Strategy::ZpIntermediate:
    case Strategy::Conventional:
    case Strategy::Dec:
    case Strategy::TwoLevel:
      return layout_gammas(init_layout(file, cfg.delta_cap, cfg.pad, cfg.k), edits);
    case Strategy::ZpEnd:
      return layout_gammas(make_zp_end_layout(file, cfg.delta_cap, cfg.k), edits);
    case Strategy::Striped: {
      // Striping works on bits so that k divides both the chunk and the pad.
      const Units bits = bytes_to_bits(file);
      const StripedLayout before = stripe(init_layout(bits, 8 * cfg.delta_cap, 8 * cfg.pad, cfg.k));
      const StripedLayout after = apply_edits(before, edits_to_bits(edits));
      if (!after.partitions.overflow().empty()) {
        const std::size_t parts = after.partitions.required_chunks();
        return reset_gammas((parts + cfg.k - 1) / cfg.k, cfg.k);
      }
      return group_gammas(diff_striped(before, after));
    }
    case Strategy::Rsync:
    case Strategy::RsyncIndexed: {
      const Units next = apply_edits_to_content(file, edits);
      return {rsync_baseline_store(file, next, cfg.delta_cap).modified_chunks};
    }
  }
  return {};
}

namespace {

double two_level_cost(std::span<const std::size_t> gammas, std::size_t t, std::size_t k, std::size_t delta_cap) {
  double units = 0;
  for (std::size_t g : gammas) {
    if (g == 0) continue;
    units += static_cast<double>((g <= t ? 2 * t : k) * delta_cap);
  }
  return units;
}

}  // namespace

ExperimentResult run_workload_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t v = cfg.effective_file_size();
  std::vector<std::vector<std::size_t>> gammas(cfg.trials);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < cfg.trials; t = next++) {
      Rng rng(derive_seed(cfg.seed, t));
      const Units file = random_file(v, rng);
      const EditScript edits =
          cfg.edits_enabled ? generate_edits(cfg.family, cfg.param, v, cfg.delta_cap, cfg.pad, rng) : EditScript{};
      gammas[t] = trial_gammas(cfg, file, edits);
    }
  };
  const std::size_t threads =
      std::min(cfg.trials, cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  ExperimentResult r;
  r.config = cfg;
  r.per_trial.resize(cfg.trials);
  if (cfg.strategy == Strategy::TwoLevel) {
    std::size_t best_t = 1;
    double best = 0;
    for (std::size_t t = 1; 2 * t <= cfg.k; ++t) {
      double total = 0;
      for (const auto& g : gammas) total += two_level_cost(g, t, cfg.k, cfg.delta_cap);
      if (t == 1 || total < best) {
        best = total;
        best_t = t;
      }
    }
    r.threshold = best_t;
    for (std::size_t i = 0; i < cfg.trials; ++i) r.per_trial[i] = two_level_cost(gammas[i], best_t, cfg.k, cfg.delta_cap);
  } else {
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      if (cfg.strategy == Strategy::Rsync || cfg.strategy == Strategy::RsyncIndexed) {
        const std::size_t m = gammas[i].front();
        r.per_trial[i] = static_cast<double>(m * cfg.delta_cap + (cfg.strategy == Strategy::RsyncIndexed ? 4 * m : 0));
      } else {
        r.per_trial[i] = static_cast<double>(compressed_units(gammas[i], cfg.k, cfg.delta_cap));
      }
    }
  }

  double sum = 0;
  for (double x : r.per_trial) sum += x;
  r.mean_storage_units = sum / static_cast<double>(cfg.trials);
  if (cfg.trials > 1) {
    double ss = 0;
    for (double x : r.per_trial) ss += (x - r.mean_storage_units) * (x - r.mean_storage_units);
    r.std_error = std::sqrt(ss / static_cast<double>(cfg.trials - 1) / static_cast<double>(cfg.trials));
  }
  return r;
}

std::string experiment_csv_header() { return "workload_param,strategy,mean_storage_units"; }

std::string experiment_csv_row(const ExperimentResult& r) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << r.config.param << ',' << strategy_name(r.config.strategy) << ',' << r.mean_storage_units;
  return out.str();
}

}  // namespace decstore
