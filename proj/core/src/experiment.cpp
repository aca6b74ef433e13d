#include "sivae/experiment.hpp"

#include "sivae/csv.hpp"
#include "sivae/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

namespace sivae {

void ExperimentConfig::validate() const {
  if (setting < 1 || setting > 6) throw std::invalid_argument("experiment: setting must be 1..6");
  if (n < 2) throw std::invalid_argument("experiment: n must be >= 2");
  if (layers < 1) throw std::invalid_argument("experiment: layers must be >= 1");
  if (replications < 1) throw std::invalid_argument("experiment: replications must be >= 1");
  if (!(mixing_condition_quantile >= 0.0 && mixing_condition_quantile <= 1.0)) {
    throw std::invalid_argument("experiment: mixing_condition_quantile must be in [0, 1]");
  }
  if (threads < 0) throw std::invalid_argument("experiment: threads must be >= 0");
  train.validate();
}

std::string experiment_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["setting"] = cfg.setting;
  j["n"] = cfg.n;
  j["layers"] = cfg.layers;
  j["mixing_condition_quantile"] = cfg.mixing_condition_quantile;
  if (cfg.grid.cell_size > 0.0) {
    j["grid"] = {{"cell_size", cfg.grid.cell_size}};
  } else {
    j["grid"] = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}};
  }
  const auto& t = cfg.train;
  j["train"] = {{"epochs", t.epochs},         {"batch_size", t.batch_size},   {"lr_start", t.lr_start},
                {"lr_end", t.lr_end},         {"decay_steps", t.decay_steps}, {"decay_power", t.decay_power},
                {"adam_beta1", t.adam_beta1}, {"adam_beta2", t.adam_beta2},   {"adam_eps", t.adam_eps},
                {"seed", t.seed},             {"hidden", t.hidden},           {"leaky_slope", t.leaky_slope},
                {"beta", t.beta},             {"standardize", t.standardize}};
  j["replications"] = cfg.replications;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  return j.dump(2);
}

ExperimentConfig experiment_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  cfg.setting = j.value("setting", cfg.setting);
  cfg.n = j.value("n", cfg.n);
  cfg.layers = j.value("layers", cfg.layers);
  cfg.mixing_condition_quantile = j.value("mixing_condition_quantile", cfg.mixing_condition_quantile);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.is_string()) {
      cfg.grid = GridSpec::parse(g.get<std::string>());
    } else {
      cfg.grid.nx = g.value("nx", cfg.grid.nx);
      cfg.grid.ny = g.value("ny", cfg.grid.ny);
      cfg.grid.cell_size = g.value("cell_size", 0.0);
    }
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    auto& c = cfg.train;
    c.epochs = t.value("epochs", c.epochs);
    c.batch_size = t.value("batch_size", c.batch_size);
    c.lr_start = t.value("lr_start", c.lr_start);
    c.lr_end = t.value("lr_end", c.lr_end);
    c.decay_steps = t.value("decay_steps", c.decay_steps);
    c.decay_power = t.value("decay_power", c.decay_power);
    c.adam_beta1 = t.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = t.value("adam_beta2", c.adam_beta2);
    c.adam_eps = t.value("adam_eps", c.adam_eps);
    c.seed = t.value("seed", c.seed);
    c.hidden = t.value("hidden", c.hidden);
    c.leaky_slope = t.value("leaky_slope", c.leaky_slope);
    c.beta = t.value("beta", c.beta);
    c.standardize = t.value("standardize", c.standardize);
  }
  cfg.replications = j.value("replications", cfg.replications);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.validate();
  return cfg;
}

SimulatedData simulate(int setting, Eigen::Index n, int layers, Seed seed, double condition_quantile) {
  SimulatedData out;
  out.data = generate_setting(setting, n, derive_seed(seed, 1));
  out.mixing = generate_mixing(layers, out.data.z.cols(), derive_seed(seed, 2), MixingOptions{condition_quantile});
  out.data.x = apply_mixing(out.mixing, out.data.z);
  return out;
}

ReplicationResult run_replication(const ExperimentConfig& cfg, Seed replication_seed) {
  const SimulatedData sim = simulate(cfg.setting, cfg.n, cfg.layers, replication_seed, cfg.mixing_condition_quantile);
  const SegmentGrid grid = cfg.grid.resolve(Domain2D{});
  const SegmentEncoding seg = encode_segments(sim.data.locations, grid);
  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(replication_seed, 3);
  const TrainResult trained = train(sim.data.x, seg, tc);
  const Matrix latents = extract_latents(trained.model, sim.data.x, seg);
  ReplicationResult r;
  r.setting = cfg.setting;
  r.layers = cfg.layers;
  r.seed = replication_seed;
  r.mcc = mcc(correlation_matrix(latents, sim.data.z));
  return r;
}

StudyResult run_simulation_study(const ExperimentConfig& cfg, const std::function<void(const std::string&)>& log) {
  cfg.validate();
  const auto total = static_cast<std::size_t>(cfg.replications);
  std::vector<std::optional<ReplicationResult>> slots(total);
  std::vector<std::string> errors(total);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t r = next++; r < total; r = next++) {
      const Seed seed = derive_seed(cfg.seed, static_cast<Seed>(r));
      try {
        slots[r] = run_replication(cfg, seed);
        if (log) {
          std::lock_guard lock(log_mutex);
          log("replication " + std::to_string(r + 1) + "/" + std::to_string(total) +
              ": mcc " + csv::format(slots[r]->mcc));
        }
      } catch (const std::exception& e) {
        errors[r] = "replication " + std::to_string(r + 1) + " (seed " + std::to_string(seed) + "): " + e.what();
        if (log) {
          std::lock_guard lock(log_mutex);
          log(errors[r]);
        }
      }
    }
  };
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(total));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  StudyResult result;
  for (std::size_t r = 0; r < total; ++r) {
    if (slots[r]) result.rows.push_back(*slots[r]);
    if (!errors[r].empty()) result.failures.push_back(errors[r]);
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const ReplicationResult& a, const ReplicationResult& b) { return a.seed < b.seed; });
  return result;
}

std::string study_csv(const StudyResult& result) {
  std::ostringstream out;
  out << "setting,layers,seed,method,mcc\n";
  for (const auto& r : result.rows) {
    out << r.setting << ',' << r.layers << ',' << r.seed << ',' << r.method << ',' << csv::format(r.mcc) << '\n';
  }
  return out.str();
}

}  // namespace sivae
