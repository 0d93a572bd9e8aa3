#include "decstore/simulate.hpp"

#include <sstream>

#include "decstore/error.hpp"

namespace decstore {

void SimulationConfig::validate() const {
  pmf.validate();
  archive.validate();
  if (archive.k != pmf.k) throw Error(Errc::BadConfig, "archive k and PMF k differ");
  if (trials == 0) throw Error(Errc::BadConfig, "trials must be >= 1");
  if (profile) {
    for (std::size_t g : *profile) {
      if (g > pmf.k) throw Error(Errc::BadConfig, "profile entry " + std::to_string(g) + " exceeds k");
    }
  } else if (versions < 1) {
    throw Error(Errc::BadConfig, "need at least one version");
  }
}

std::vector<SimulationRow> run_simulation(const SimulationConfig& cfg) {
  cfg.validate();
  const FieldPtr field = gf256();
  const std::size_t k = cfg.pmf.k;
  const std::size_t versions = cfg.profile ? cfg.profile->size() + 1 : cfg.versions;
  auto codebook = std::make_shared<const Codebook>(field, cfg.archive.n, k);
  const PredictConfig pc = PredictConfig::from(cfg.archive);

  std::vector<SimulationRow> rows;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng rng(derive_seed(cfg.seed, t));
    Cluster cluster(cfg.archive.n);
    Archive archive(cluster, "sim", cfg.archive, codebook);

    Blocks x(k, Block(1));
    for (Block& b : x) b[0] = static_cast<Element>(rng.uniform_int(0, field->order()));
    std::vector<std::size_t> storage;
    archive.commit(x);
    storage.push_back(archive.storage_units());
    for (std::size_t j = 2; j <= versions; ++j) {
      const std::size_t gamma = cfg.profile ? (*cfg.profile)[j - 2] : sample_gamma(cfg.pmf, rng);
      const Column z = sparse_vector(k, gamma, *field, rng);
      for (std::size_t i = 0; i < k; ++i) x[i][0] = Field::add(x[i][0], z[i]);
      archive.commit(x);
      storage.push_back(archive.storage_units());
    }

    const std::vector<std::size_t> profile = archive.profile();
    const std::vector<std::size_t> object_reads = predict_object_reads(profile, pc);
    for (std::size_t l = 1; l <= versions; ++l) {
      SimulationRow r;
      r.trial = t;
      r.version = l;
      r.gamma = l == 1 ? 0 : profile[l - 2];
      r.mode = archive.records()[l - 1].mode;
      r.object_reads = object_reads[l - 1];
      r.retrieve_reads = archive.retrieve(l).reads;
      r.predicted_reads = predict_reads(profile, pc, l);
      r.storage_units = storage[l - 1];
      r.predicted_storage = predict_storage(profile, pc, l);
      rows.push_back(r);
    }
  }
  return rows;
}

std::string simulation_csv_header() {
  return "trial,version,gamma,mode,object_reads,retrieve_reads,predicted_reads,storage_units,predicted_storage";
}

std::string simulation_csv_row(const SimulationRow& r) {
  std::ostringstream out;
  out << r.trial << ',' << r.version << ',' << r.gamma << ',' << mode_name(r.mode) << ',' << r.object_reads << ','
      << r.retrieve_reads << ',' << r.predicted_reads << ',' << r.storage_units << ',' << r.predicted_storage;
  return out.str();
}

}  // namespace decstore
