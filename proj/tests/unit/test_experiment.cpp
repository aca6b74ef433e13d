#include "sivae/experiment.hpp"
#include "sivae/mixing.hpp"

#include <doctest.h>

using namespace sivae;

TEST_SUITE("experiment") {
  TEST_CASE("experiment JSON round trip is the identity") {
    ExperimentConfig cfg;
    cfg.setting = 5;
    cfg.n = 1234;
    cfg.layers = 3;
    cfg.mixing_condition_quantile = 0.5;
    cfg.grid = GridSpec::parse("7x9");
    cfg.train.epochs = 17;
    cfg.train.hidden = {4, 5};
    cfg.train.lr_start = 0.003;
    cfg.train.standardize = true;
    cfg.replications = 3;
    cfg.seed = 0xffffffffffffULL;
    cfg.out_dir = "/tmp/out dir";
    const std::string text = experiment_to_json(cfg);
    const auto back = experiment_from_json(text);
    CHECK(experiment_to_json(back) == text);
    CHECK(back.train.hidden == cfg.train.hidden);
    CHECK(back.grid.nx == 7);
    CHECK(back.grid.ny == 9);
    CHECK(back.seed == cfg.seed);

    cfg.grid = GridSpec::parse("12.5");
    const auto cs = experiment_from_json(experiment_to_json(cfg));
    CHECK(cs.grid.cell_size == 12.5);
  }

  TEST_CASE("partial JSON falls back to defaults and invalid values are rejected") {
    const auto cfg = experiment_from_json(R"({"setting": 4, "grid": "10x10"})");
    CHECK(cfg.setting == 4);
    CHECK(cfg.grid.nx == 10);
    CHECK(cfg.n == 5000);
    CHECK(cfg.train.epochs == TrainConfig{}.epochs);
    CHECK_THROWS_AS(experiment_from_json(R"({"setting": 9})"), std::invalid_argument);
    CHECK_THROWS_AS(experiment_from_json(R"({"replications": 0})"), std::invalid_argument);
  }

  TEST_CASE("simulate mixes the latents with the returned spec") {
    const auto sim = simulate(2, 300, 2, 8);
    CHECK(sim.data.x == apply_mixing(sim.mixing, sim.data.z));
    CHECK(simulate(2, 300, 2, 8).data.x == sim.data.x);
    const double thr = condition_threshold(3, 0.25);
    for (const auto& b : sim.mixing.layers) CHECK(condition_number(b) <= thr * (1.0 + 1e-9));
  }

  TEST_CASE("small studies are deterministic and independent of the thread count") {
    ExperimentConfig cfg;
    cfg.n = 400;
    cfg.grid = GridSpec::parse("4x4");
    cfg.train.epochs = 2;
    cfg.train.hidden = {8};
    cfg.replications = 3;
    cfg.seed = 7;
    cfg.threads = 1;
    const auto a = run_simulation_study(cfg);
    cfg.threads = 3;
    const auto b = run_simulation_study(cfg);
    CHECK(a.failures.empty());
    CHECK(study_csv(a) == study_csv(b));
    REQUIRE(a.rows.size() == 3);
    for (const auto& r : a.rows) {
      CHECK(r.mcc >= 0.0);
      CHECK(r.mcc <= 1.0);
    }
    CHECK(study_csv(a).rfind("setting,layers,seed,method,mcc\n", 0) == 0);
  }
}
