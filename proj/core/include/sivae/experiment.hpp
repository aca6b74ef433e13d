#pragma once

#include "sivae/ivae.hpp"
#include "sivae/mixing.hpp"
#include "sivae/pipeline.hpp"
#include "sivae/random_fields.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sivae {

struct ExperimentConfig {
  int setting = 1;
  Eigen::Index n = 5000;
  int layers = 1;
  double mixing_condition_quantile = 0.25;  // 0: no conditioning screen
  GridSpec grid{};
  TrainConfig train{};
  int replications = 10;
  Seed seed = 0;
  std::string out_dir = ".";
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

std::string experiment_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const std::string& text);

/// Latents for `setting`, mixed by a freshly drawn f_L whose layers pass the
/// condition-number screen at `condition_quantile` (0 disables it).
struct SimulatedData {
  SpatialDataset data;
  MixingSpec mixing;
};
SimulatedData simulate(int setting, Eigen::Index n, int layers, Seed seed, double condition_quantile = 0.25);

struct ReplicationResult {
  int setting = 0;
  int layers = 0;
  Seed seed = 0;
  std::string method = "iVAE";
  double mcc = 0.0;
};

/// Generate, mix, segment, train, extract and score a single replication.
ReplicationResult run_replication(const ExperimentConfig& cfg, Seed replication_seed);

struct StudyResult {
  std::vector<ReplicationResult> rows;  // sorted by seed
  std::vector<std::string> failures;
};

/// Replications run on a worker pool; replication r uses derive_seed(cfg.seed, r).
StudyResult run_simulation_study(const ExperimentConfig& cfg,
                                 const std::function<void(const std::string&)>& log = {});

/// `setting,layers,seed,method,mcc` rows.
std::string study_csv(const StudyResult& result);

}  // namespace sivae
