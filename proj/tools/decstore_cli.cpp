// decstore command-line front end.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "decstore/error.hpp"
#include "decstore/experiment.hpp"
#include "decstore/repository.hpp"
#include "decstore/resilience.hpp"
#include "decstore/simulate.hpp"
#include "decstore/workload.hpp"

namespace {

using namespace decstore;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIntegrity = 3;

constexpr const char* kSchemas = R"(CSV schemas:
  simulate            trial,version,gamma,mode,object_reads,retrieve_reads,predicted_reads,storage_units,predicted_storage
  optimize-threshold  pmf,param,k,kappa,w,cauchy,T_opt,two_level_E_reads,two_level_E_storage,kl2_E_reads,kl2_E_storage
  resilience          p,prob_distributed,prob_collocated
  bench-zeropads, bench-striping, compare-rsync, experiment
                      workload_param,strategy,mean_storage_units
  log                 version,batch,reset,size,groups,gamma,full_groups,storage_units,predicted_reads

Randomness: every command derives its streams from --seed through splitmix64
into std::mt19937_64, so output is identical across platforms.
Exit codes: 0 success, 1 usage, 2 data or configuration, 3 integrity.
Set DECSTORE_LOG to trace, debug, info, warn (default), error or off.)";

struct Options {
  std::string repo = ".";
  std::string file;
  std::string out;
  std::string config_file;
  std::size_t version = 0;

  std::size_t n = 0;
  std::size_t k = 8;
  std::size_t threshold = 0;
  double kappa = 2;
  std::size_t iota = 0;
  std::size_t delta_cap = 500;
  std::size_t pad = 20;
  std::string placement = "collocated";

  std::string pmf = "uniform";
  std::vector<double> pmf_params{0};
  double weight = 0.5;
  bool cauchy = false;
  bool optimized = false;
  std::size_t versions = 2;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string scheme = "forward";
  std::vector<std::size_t> profile;

  std::string method = "closed";
  std::vector<double> ps{0.001, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05};

  std::string family;
  std::vector<std::size_t> params;
  std::size_t file_size = 0;
  std::size_t threads = 0;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(Errc::IoError, "cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw Error(Errc::IoError, "write failed");
  }

 private:
  std::ofstream file_;
};

std::size_t code_length(const Options& o) {
  if (o.n != 0) return o.n;
  const double n = o.kappa * static_cast<double>(o.k);
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 || rounded <= static_cast<double>(o.k)) {
    throw Error(Errc::BadConfig, "kappa * k must be an integer above k");
  }
  return static_cast<std::size_t>(rounded);
}

Units read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path);
  return Units(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int cmd_init(const Options& o) {
  RepoConfig cfg;
  cfg.delta_cap = o.delta_cap;
  cfg.pad = o.pad;
  cfg.k = o.k;
  cfg.n = code_length(o);
  cfg.placement = parse_placement(o.placement);
  Repository::init(o.repo, cfg);
  spdlog::info("initialized repository at {} (n={} k={} delta_cap={} pad={})", o.repo, cfg.n, cfg.k, cfg.delta_cap,
               cfg.pad);
  return 0;
}

int cmd_commit(const Options& o) {
  auto repo = Repository::open(o.repo);
  const Units bytes = read_file(o.file);
  const CommitSummary s = repo->commit(bytes);
  repo->persist();
  std::size_t gamma = 0;
  for (std::size_t g : s.gammas) gamma += g;
  std::cout << "version " << s.version << " batch " << s.batch << " reset " << reset_name(s.reset) << " gamma " << gamma
            << " delta_units " << s.delta_units << "\n";
  return 0;
}

int cmd_checkout(const Options& o) {
  auto repo = Repository::open(o.repo);
  if (o.version < 1 || o.version > repo->versions()) {
    throw Error(Errc::BadParameter, "version must be in 1.." + std::to_string(repo->versions()));
  }
  std::size_t reads = 0;
  const Units bytes = repo->checkout(o.version, &reads);
  const std::size_t predicted = repo->predicted_reads(o.version);
  spdlog::info("version {}: {} shard reads (predicted {})", o.version, reads, predicted);
  if (reads != predicted) {
    throw Error(Errc::InconsistentShards, "metered reads " + std::to_string(reads) + " differ from predicted " +
                                              std::to_string(predicted));
  }
  Output out(o.out);
  out.stream().write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  return 0;
}

int cmd_log(const Options& o) {
  auto repo = Repository::open(o.repo);
  Output out(o.out);
  auto& s = out.stream();
  s << "version,batch,reset,size,groups,gamma,full_groups,storage_units,predicted_reads\n";
  for (const LogEntry& e : repo->log()) {
    s << e.version << ',' << e.batch << ',' << reset_name(e.reset) << ',' << e.file_size << ',' << e.groups << ','
      << e.gamma << ',' << e.full_groups << ',' << e.storage_units << ',' << e.predicted_reads << '\n';
  }
  out.close();
  return 0;
}

int cmd_simulate(const Options& o) {
  SimulationConfig cfg;
  cfg.pmf = PmfSpec{parse_pmf_kind(o.pmf), o.pmf_params.front(), o.k};
  cfg.archive.scheme = parse_scheme(o.scheme);
  cfg.archive.optimized = o.optimized;
  cfg.archive.n = code_length(o);
  cfg.archive.k = o.k;
  cfg.archive.threshold = o.threshold;
  cfg.archive.cauchy_reads = o.cauchy;
  cfg.archive.iota = o.iota == 0 ? kNoIterationLimit : o.iota;
  cfg.archive.placement = parse_placement(o.placement);
  cfg.versions = o.versions;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  if (!o.profile.empty()) cfg.profile = o.profile;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(Errc::BadConfig, e.what());
  }
  Output out(o.out);
  out.stream() << simulation_csv_header() << '\n';
  for (const SimulationRow& r : run_simulation(cfg)) out.stream() << simulation_csv_row(r) << '\n';
  out.close();
  return 0;
}

int cmd_optimize_threshold(const Options& o) {
  Output out(o.out);
  auto& s = out.stream();
  s << "pmf,param,k,kappa,w,cauchy,T_opt,two_level_E_reads,two_level_E_storage,kl2_E_reads,kl2_E_storage\n";
  s.setf(std::ios::fixed);
  for (double param : o.pmf_params) {
    const PmfSpec spec{parse_pmf_kind(o.pmf), param, o.k};
    try {
      spec.validate();
    } catch (const Error& e) {
      throw Error(Errc::BadConfig, e.what());
    }
    const ThresholdResult r = optimize_threshold(spec, o.kappa, o.weight, o.cauchy);
    const TwoVersionMetrics m = expected_two_version_metrics(spec, o.kappa);
    s.precision(4);
    s << pmf_kind_name(spec.kind) << ',' << param << ',' << o.k << ',' << o.kappa << ',' << o.weight << ','
      << (o.cauchy ? 1 : 0) << ',' << r.threshold << ',';
    s.precision(2);
    s << r.expected_reads << ',' << r.expected_storage << ',' << m.expected_reads << ',' << m.expected_storage << '\n';
  }
  out.close();
  return 0;
}

int cmd_resilience(const Options& o) {
  for (double p : o.ps) {
    if (!(p >= 0 && p <= 1)) throw Error(Errc::BadConfig, "failure probabilities must lie in [0,1]");
  }
  Output out(o.out);
  auto& s = out.stream();
  if (o.method == "closed") {
    s << resilience_csv(o.ps);
  } else if (o.method == "enumerate" || o.method == "monte-carlo") {
    s << "p,prob_distributed,prob_collocated\n";
    s.precision(12);
    for (std::size_t i = 0; i < o.ps.size(); ++i) {
      const double p = o.ps[i];
      ResilienceReport d, c;
      if (o.method == "enumerate") {
        d = enumerate_resilience(example_distributed_plan(), p);
        c = enumerate_resilience(example_collocated_plan(), p);
      } else {
        d = monte_carlo_resilience(example_distributed_plan(), p, o.trials, derive_seed(o.seed, 2 * i));
        c = monte_carlo_resilience(example_collocated_plan(), p, o.trials, derive_seed(o.seed, 2 * i + 1));
      }
      s << p << ',' << d.prob_all_versions_survive << ',' << c.prob_all_versions_survive << '\n';
    }
  } else {
    throw Error(Errc::BadConfig, "method must be closed, enumerate or monte-carlo");
  }
  out.close();
  return 0;
}

ExperimentConfig base_experiment(const Options& o) {
  ExperimentConfig c;
  c.trials = o.trials;
  c.seed = o.seed;
  c.delta_cap = o.delta_cap;
  c.pad = o.pad;
  c.k = o.k;
  c.file_size = o.file_size;
  c.threads = o.threads;
  return c;
}

int run_bench(const Options& o, const std::string& default_family, std::vector<std::size_t> default_params,
              const std::vector<Strategy>& strategies) {
  ExperimentConfig base = base_experiment(o);
  base.family = parse_family(o.family.empty() ? default_family : o.family);
  const std::vector<std::size_t> params = o.params.empty() ? default_params : o.params;
  Output out(o.out);
  out.stream() << experiment_csv_header() << '\n';
  for (std::size_t param : params) {
    for (Strategy st : strategies) {
      ExperimentConfig c = base;
      c.param = param;
      c.strategy = st;
      const ExperimentResult r = run_workload_experiment(c);
      out.stream() << experiment_csv_row(r) << '\n';
      if (r.threshold) spdlog::info("{} param {}: empirical T = {}", family_name(c.family), param, *r.threshold);
    }
  }
  out.close();
  return 0;
}

int cmd_experiment(const Options& o) {
  std::ifstream in(o.config_file);
  if (!in) throw Error(Errc::IoError, "cannot read " + o.config_file);
  std::stringstream text;
  text << in.rdbuf();
  const ExperimentConfig c = parse_experiment_config(text.str());
  Output out(o.out);
  out.stream() << experiment_csv_header() << '\n' << experiment_csv_row(run_workload_experiment(c)) << '\n';
  out.close();
  return 0;
}

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::CorruptManifest:
    case Errc::InconsistentShards:
    case Errc::NoSparseSolution:
    case Errc::VersionUnavailable:
      return kExitIntegrity;
    default:
      return kExitData;
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("decstore");
  logger->set_pattern("decstore: %l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DECSTORE_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("ignoring unknown DECSTORE_LOG level '{}'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  Options o;
  CLI::App app{"decstore: versioned archival with differential erasure coding"};
  app.footer(kSchemas);
  app.require_subcommand(1);

  auto add_code = [&](CLI::App* c) {
    c->add_option("--n", o.n, "Code length for k data blocks (default kappa*k)");
    c->add_option("--k", o.k, "Data blocks per code (chunks per group)")->capture_default_str();
    c->add_option("--kappa", o.kappa, "Storage overhead n/k")->capture_default_str();
  };
  auto add_layout = [&](CLI::App* c) {
    c->add_option("--delta-cap", o.delta_cap, "Chunk size Delta")->capture_default_str();
    c->add_option("--pad", o.pad, "Zero pads delta per chunk")->capture_default_str();
  };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Output file (default standard output)"); };
  auto add_trials = [&](CLI::App* c) {
    c->add_option("--trials", o.trials, "Trials")->capture_default_str();
    c->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  };

  auto* init = app.add_subcommand("init", "Create a repository");
  init->add_option("--repo", o.repo, "Repository root")->required();
  add_code(init);
  add_layout(init);
  init->add_option("--placement", o.placement, "collocated or distributed")->capture_default_str();

  auto* commit = app.add_subcommand("commit", "Add a file as the next version");
  commit->add_option("--repo", o.repo, "Repository root")->required();
  commit->add_option("file", o.file, "File to commit")->required();

  auto* checkout = app.add_subcommand("checkout", "Write the bytes of one version");
  checkout->add_option("--repo", o.repo, "Repository root")->required();
  checkout->add_option("--version,-v", o.version, "Version number, from 1")->required();
  add_out(checkout);

  auto* log = app.add_subcommand("log", "Print the version manifest as CSV");
  log->add_option("--repo", o.repo, "Repository root")->required();
  add_out(log);

  auto* simulate = app.add_subcommand("simulate", "Run sparsity chains through a DEC engine");
  add_code(simulate);
  simulate->add_option("--scheme", o.scheme, "forward, reverse or two-level")->capture_default_str();
  simulate->add_flag("--optimized", o.optimized, "Use the optimized step");
  simulate->add_option("--T", o.threshold, "Two-level threshold");
  simulate->add_flag("--cauchy", o.cauchy, "Two-level reads of 2*gamma Cauchy rows");
  simulate->add_option("--iota", o.iota, "Force a full version after this many deltas (0 = never)");
  simulate->add_option("--pmf", o.pmf, "binomial, exponential, poisson or uniform")->capture_default_str();
  simulate->add_option("--pmf-param", o.pmf_params, "PMF parameter")->expected(1);
  simulate->add_option("--L", o.versions, "Versions per chain")->capture_default_str();
  simulate->add_option("--profile", o.profile, "Sparsity of versions 2..L, comma separated")->delimiter(',');
  simulate->add_option("--placement", o.placement, "collocated or distributed")->capture_default_str();
  add_trials(simulate);
  add_out(simulate);

  auto* opt = app.add_subcommand("optimize-threshold", "Exhaustive two-level threshold search");
  add_code(opt);
  opt->add_option("--pmf", o.pmf, "binomial, exponential, poisson or uniform")->capture_default_str();
  opt->add_option("--pmf-param", o.pmf_params, "PMF parameters, comma separated")->delimiter(',');
  opt->add_option("--w", o.weight, "Weight of reads against storage (Cauchy objective)")->capture_default_str();
  opt->add_flag("--cauchy", o.cauchy, "Cauchy row-subset reads");
  add_out(opt);

  auto* res = app.add_subcommand("resilience", "Probability that both versions survive node failures");
  res->add_option("--p", o.ps, "Failure probabilities, comma separated")->delimiter(',');
  res->add_option("--method", o.method, "closed, enumerate or monte-carlo")->capture_default_str();
  add_trials(res);
  add_out(res);

  auto add_bench = [&](CLI::App* c) {
    add_trials(c);
    add_layout(c);
    c->add_option("--k", o.k, "Chunks per group")->capture_default_str();
    c->add_option("--family", o.family, "bursty-insert, single-inserts, bursty-delete, single-deletes, intra-distance");
    c->add_option("--params", o.params, "Workload parameters, comma separated")->delimiter(',');
    c->add_option("--file-size", o.file_size, "File size V (default per experiment)");
    c->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    add_out(c);
  };
  auto* zp = app.add_subcommand("bench-zeropads", "ZP Intermediate against ZP End");
  add_bench(zp);
  auto* st = app.add_subcommand("bench-striping", "Bit striping against conventional chunking");
  add_bench(st);
  auto* rs = app.add_subcommand("compare-rsync", "DEC (k/2-level and two-level) against the Rsync baseline");
  add_bench(rs);
  auto* ex = app.add_subcommand("experiment", "Run one key=value experiment config");
  ex->add_option("config", o.config_file, "Config file")->required();
  add_out(ex);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*init) return cmd_init(o);
    if (*commit) return cmd_commit(o);
    if (*checkout) return cmd_checkout(o);
    if (*log) return cmd_log(o);
    if (*simulate) return cmd_simulate(o);
    if (*opt) return cmd_optimize_threshold(o);
    if (*res) return cmd_resilience(o);
    if (*zp) {
      return run_bench(o, "bursty-insert", {5, 10, 30, 60}, {Strategy::ZpIntermediate, Strategy::ZpEnd});
    }
    if (*st) return run_bench(o, "intra-distance", {40, 80, 120}, {Strategy::Conventional, Strategy::Striped});
    if (*rs) {
      return run_bench(o, "bursty-insert", {5, 10, 30, 60},
                       {Strategy::Dec, Strategy::TwoLevel, Strategy::Rsync, Strategy::RsyncIndexed});
    }
    if (*ex) return cmd_experiment(o);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return kExitUsage;
}
