// Command-line front end: simulate, train, evaluate, explain, krige, study.

#include "sivae/compositional.hpp"
#include "sivae/csv.hpp"
#include "sivae/dataset_io.hpp"
#include "sivae/evaluation.hpp"
#include "sivae/experiment.hpp"
#include "sivae/shap.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sivae;

namespace {

struct Options {
  Seed seed = 0;
  std::string out = ".";
  std::string config;
  std::string data;
  std::string model;
  std::string grid = "20x20";
  double cell_size = 0.0;
  int layers = 1;
  double condition_quantile = 0.25;
  int setting = 1;
  long n = 5000;
  std::uint64_t budget = 2048;
  int epochs = 0;
  int replications = 10;
  int threads = 0;
  bool compositional = false;
  std::string x_col = "sx";
  std::string y_col = "sy";
  std::vector<std::string> elements;
  std::string direction = "mixing";
  long background = 200;
  long max_rows = 0;
  std::string kind = "ordinary";
  int folds = 10;
  bool baseline = false;
  bool quiet = false;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

class Command {
 public:
  Command(CLI::App* app, Options& opt) : app_(app), opt_(opt) {}

  bool given(const std::string& flag) const {
    const auto* o = app_->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  }

  /// Config file first, explicit flags on top.
  ExperimentConfig experiment() const {
    ExperimentConfig cfg;
    if (!opt_.config.empty()) cfg = experiment_from_json(read_text(opt_.config));
    if (given("--seed") || opt_.config.empty()) cfg.seed = opt_.seed;
    if (given("--setting")) cfg.setting = opt_.setting;
    if (given("--n")) cfg.n = opt_.n;
    if (given("--layers")) cfg.layers = opt_.layers;
    if (given("--condition-quantile")) cfg.mixing_condition_quantile = opt_.condition_quantile;
    if (given("--grid")) cfg.grid = GridSpec::parse(opt_.grid);
    if (given("--cell-size")) {
      cfg.grid = GridSpec{};
      cfg.grid.cell_size = opt_.cell_size;
    }
    if (given("--epochs")) cfg.train.epochs = opt_.epochs;
    if (given("--replications")) cfg.replications = opt_.replications;
    if (given("--threads")) cfg.threads = opt_.threads;
    cfg.out_dir = opt_.out;
    cfg.validate();
    return cfg;
  }

  fs::path out_dir() const {
    fs::create_directories(opt_.out);
    return fs::path(opt_.out);
  }

  /// Every effective option of the subcommand plus the experiment config.
  void echo(const fs::path& artifact, const ExperimentConfig& cfg, json extra = json::object()) const {
    json j;
    j["command"] = app_->get_name();
    j["experiment"] = json::parse(experiment_to_json(cfg));
    for (auto& [key, value] : extra.items()) j[key] = value;
    fs::path p = artifact;
    p += ".config.json";
    write_text(p, j.dump(2) + "\n");
  }

  void log(const std::string& msg) const {
    if (!opt_.quiet) std::cerr << msg << '\n';
  }

 private:
  CLI::App* app_;
  Options& opt_;
};

struct Observations {
  Matrix locations;
  Matrix x;                     // ilr coordinates for compositional data
  Matrix z;                     // ground truth when available
  std::vector<std::string> output_names;  // x names, or element names (clr)
};

Observations load_observations(const Options& opt) {
  if (opt.data.empty()) throw std::invalid_argument("--data is required");
  Observations obs;
  if (opt.compositional) {
    const auto table = read_concentrations(opt.data, opt.x_col, opt.y_col, opt.elements);
    obs.locations = table.locations;
    obs.x = ilr_rows(table.parts);
    obs.output_names = table.elements;
    return obs;
  }
  const auto ds = read_dataset_csv(opt.data);
  if (!ds.has_x()) throw std::invalid_argument(opt.data + ": no x columns");
  obs.locations = ds.locations;
  obs.x = ds.x;
  obs.z = ds.z;
  for (Eigen::Index j = 0; j < ds.x.cols(); ++j) obs.output_names.push_back("x" + std::to_string(j + 1));
  return obs;
}

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < count; ++j) names.push_back(prefix + std::to_string(j + 1));
  return names;
}

int run_simulate(const Command& cmd, const Options&) {
  const auto cfg = cmd.experiment();
  const auto sim = simulate(cfg.setting, cfg.n, cfg.layers, cfg.seed, cfg.mixing_condition_quantile);
  const auto dir = cmd.out_dir();
  write_dataset_csv((dir / "data.csv").string(), sim.data);
  write_text(dir / "mixing.json", mixing_to_json(sim.mixing) + "\n");
  cmd.echo(dir / "data.csv", cfg);
  cmd.log("wrote " + (dir / "data.csv").string());
  return 0;
}

int run_train(const Command& cmd, const Options& opt) {
  auto cfg = cmd.experiment();
  const auto obs = load_observations(opt);
  const SegmentGrid grid = cfg.grid.resolve(bounding_domain(obs.locations));
  const SegmentEncoding seg = encode_segments(obs.locations, grid);
  cfg.train.seed = derive_seed(cfg.seed, 3);
  cmd.log("training on " + std::to_string(obs.x.rows()) + " rows, " + std::to_string(seg.m()) + " segments");
  const auto result = train(obs.x, seg, cfg.train, [&](int epoch, double value) {
    if ((epoch + 1) % 20 == 0) cmd.log("epoch " + std::to_string(epoch + 1) + ": elbo " + csv::format(value));
  });
  const auto dir = cmd.out_dir();
  save_model((dir / "model.json").string(), result.model, &cfg.train);
  write_elbo_trace((dir / "elbo_trace.csv").string(), result.elbo_trace);
  const json extra = {{"data", opt.data}, {"compositional", opt.compositional}};
  cmd.echo(dir / "model.json", cfg, extra);
  cmd.echo(dir / "elbo_trace.csv", cfg, extra);
  return 0;
}

int run_evaluate(const Command& cmd, const Options& opt) {
  const auto cfg = cmd.experiment();
  if (opt.model.empty()) throw std::invalid_argument("--model is required");
  const IvaeModel model = load_model(opt.model);
  const auto obs = load_observations(opt);
  const SegmentEncoding seg = encode_with_layout(obs.locations, model.grid, model.kept_cells);
  const Matrix latents = extract_latents(model, obs.x, seg);
  const auto dir = cmd.out_dir();
  write_matrix_csv((dir / "latents.csv").string(), latents, numbered("z", latents.cols()));
  const json extra = {{"data", opt.data}, {"model", opt.model}};
  cmd.echo(dir / "latents.csv", cfg, extra);
  if (obs.z.size() > 0) {
    ReplicationResult r;
    r.setting = cfg.setting;
    r.layers = cfg.layers;
    r.seed = cfg.seed;
    r.mcc = mcc(correlation_matrix(latents, obs.z));
    StudyResult s;
    s.rows.push_back(r);
    write_text(dir / "mcc.csv", study_csv(s));
    cmd.echo(dir / "mcc.csv", cfg, extra);
    std::cout << "mcc " << csv::format(r.mcc) << '\n';
  }
  return 0;
}

int run_explain(const Command& cmd, const Options& opt) {
  const auto cfg = cmd.experiment();
  if (opt.model.empty()) throw std::invalid_argument("--model is required");
  if (opt.direction != "mixing" && opt.direction != "unmixing") {
    throw std::invalid_argument("--direction must be mixing or unmixing");
  }
  const IvaeModel model = load_model(opt.model);
  const auto obs = load_observations(opt);
  const SegmentEncoding seg = encode_with_layout(obs.locations, model.grid, model.kept_cells);
  const Matrix latents = extract_latents(model, obs.x, seg);
  const Eigen::Index n = opt.max_rows > 0 ? std::min<Eigen::Index>(opt.max_rows, obs.x.rows()) : obs.x.rows();
  const Eigen::Index bg = std::min<Eigen::Index>(opt.background, obs.x.rows());
  const auto d = latents.cols();

  ExplainTarget target;
  Matrix inputs;
  std::vector<std::string> output_names, input_names;
  if (opt.direction == "mixing") {
    const bool clr_out = opt.compositional;
    target.fn = [&model, clr_out](const Matrix& z) {
      const Matrix x = decode(model, z);
      return clr_out ? ilr_to_clr_rows(x) : x;
    };
    target.background = select_background(obs.locations, latents, bg);
    inputs = latents.topRows(n);
    output_names = obs.output_names;
    input_names = numbered("IC", d);
  } else {
    // The one-hot block enters as a single grouped player holding the segment column.
    Matrix xu(obs.x.rows(), obs.x.cols() + 1);
    xu.leftCols(obs.x.cols()) = obs.x;
    for (Eigen::Index i = 0; i < xu.rows(); ++i) xu(i, obs.x.cols()) = seg.segment[static_cast<std::size_t>(i)];
    const auto dx = obs.x.cols();
    target.fn = [&model, dx](const Matrix& rows) {
      std::vector<int> segments(static_cast<std::size_t>(rows.rows()));
      for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        segments[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(rows(i, dx)));
      }
      return extract_latents(model, rows.leftCols(dx), segments);
    };
    target.background = select_background(obs.locations, xu, bg);
    inputs = xu.topRows(n);
    output_names = numbered("IC", d);
    input_names = opt.compositional ? numbered("ilr", dx) : obs.output_names;
    input_names.push_back("u");
  }
  const std::uint64_t k = static_cast<std::uint64_t>(inputs.cols());
  if (opt.budget < k + 2 && opt.budget < full_coalition_budget(static_cast<int>(k))) {
    throw std::invalid_argument("--budget must be at least " + std::to_string(k + 2));
  }
  cmd.log("explaining " + std::to_string(n) + " rows against " + std::to_string(bg) + " background rows");
  const ShapReport report = scaled_mashap(target, inputs, opt.budget, cfg.seed);
  for (int z : report.zero_rows) cmd.log("output " + output_names[static_cast<std::size_t>(z)] + " has zero MASHAP");

  std::vector<int> order;
  if (opt.direction == "mixing") order = order_by_average(report);
  const auto dir = cmd.out_dir();
  const fs::path path = dir / ("shap_" + opt.direction + ".csv");
  write_text(path, shap_report_csv(report, output_names, input_names, order));
  cmd.echo(path, cfg,
           {{"data", opt.data},
            {"model", opt.model},
            {"direction", opt.direction},
            {"budget", opt.budget},
            {"background", bg},
            {"rows", n},
            {"compositional", opt.compositional}});
  return 0;
}

int run_krige(const Command& cmd, const Options& opt) {
  const auto cfg = cmd.experiment();
  if (opt.data.empty()) throw std::invalid_argument("--data is required");
  const auto table = read_concentrations(opt.data, opt.x_col, opt.y_col, opt.elements);
  CrossValidationConfig cv;
  cv.folds = opt.folds;
  cv.seed = cfg.seed;
  cv.train = cfg.train;
  cv.grid = cfg.grid;
  std::vector<KrigingKind> kinds;
  if (opt.kind == "both") {
    kinds = {KrigingKind::ordinary, KrigingKind::universal};
  } else {
    kinds = {kriging_kind_from_string(opt.kind)};
  }
  std::vector<PredictionReport> reports;
  for (auto kind : kinds) {
    cv.kind = kind;
    reports.push_back(bss_krige_crossvalidate(table.locations, table.parts, cv,
                                              [&](const std::string& m) { cmd.log(to_string(kind) + " " + m); }));
  }
  if (opt.baseline) reports.push_back(mean_baseline_crossvalidate(table.locations, table.parts, cv));
  const auto dir = cmd.out_dir();
  write_text(dir / "prediction_report.csv", prediction_reports_csv(reports));
  cmd.echo(dir / "prediction_report.csv", cfg,
           {{"data", opt.data}, {"kind", opt.kind}, {"folds", opt.folds}, {"baseline", opt.baseline}});
  std::cout << prediction_reports_csv(reports);
  return 0;
}

int run_study(const Command& cmd, const Options&) {
  const auto cfg = cmd.experiment();
  const StudyResult result = run_simulation_study(cfg, [&](const std::string& m) { cmd.log(m); });
  const auto dir = cmd.out_dir();
  write_text(dir / "study.csv", study_csv(result));
  cmd.echo(dir / "study.csv", cfg);
  if (!result.failures.empty()) {
    std::cerr << result.failures.size() << " of " << cfg.replications << " replications failed\n";
    for (const auto& f : result.failures) std::cerr << "  " << f << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial iVAE blind source separation"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "Master seed");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--config", opt.config, "Experiment config JSON")->check(CLI::ExistingFile);
    sub->add_flag("--quiet", opt.quiet, "Suppress progress output");
  };
  auto grid = [&](CLI::App* sub) {
    auto* g = sub->add_option("--grid", opt.grid, "Segmentation grid, e.g. 20x20");
    auto* c = sub->add_option("--cell-size", opt.cell_size, "Square segmentation cell side")
                  ->check(CLI::PositiveNumber);
    g->excludes(c);
  };
  auto data = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--data", opt.data, "Input CSV")->check(CLI::ExistingFile);
    if (required) o->required();
    sub->add_flag("--compositional", opt.compositional, "Data are concentrations; model works in ilr");
    sub->add_option("--x-col", opt.x_col, "Easting column of a concentration table");
    sub->add_option("--y-col", opt.y_col, "Northing column of a concentration table");
    sub->add_option("--elements", opt.elements, "Restrict to these element columns")->delimiter(',');
  };
  auto model = [&](CLI::App* sub) {
    sub->add_option("--model", opt.model, "Model checkpoint JSON")->required()->check(CLI::ExistingFile);
  };
  auto sim = [&](CLI::App* sub) {
    sub->add_option("--setting", opt.setting, "Simulation setting")->check(CLI::Range(1, 6));
    sub->add_option("--n", opt.n, "Number of locations")->check(CLI::PositiveNumber);
    sub->add_option("--layers", opt.layers, "Mixing layers")->check(CLI::PositiveNumber);
    sub->add_option("--condition-quantile", opt.condition_quantile,
                    "Keep mixing layers whose condition number is within this quantile (0 = off)")
        ->check(CLI::Range(0.0, 1.0));
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate latent fields and their mixture");
  common(simulate_cmd);
  sim(simulate_cmd);

  auto* train_cmd = app.add_subcommand("train", "Train an iVAE on observed data");
  common(train_cmd);
  data(train_cmd, true);
  grid(train_cmd);
  train_cmd->add_option("--epochs", opt.epochs, "Training epochs")->check(CLI::PositiveNumber);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Extract latents and score them against ground truth");
  common(evaluate_cmd);
  data(evaluate_cmd, true);
  model(evaluate_cmd);
  evaluate_cmd->add_option("--setting", opt.setting, "Setting id written to the MCC row");
  evaluate_cmd->add_option("--layers", opt.layers, "Layer count written to the MCC row");

  auto* explain_cmd = app.add_subcommand("explain", "Scaled MASHAP of the mixing or unmixing estimate");
  common(explain_cmd);
  data(explain_cmd, true);
  model(explain_cmd);
  explain_cmd->add_option("--direction", opt.direction, "mixing or unmixing")
      ->check(CLI::IsMember({"mixing", "unmixing"}));
  explain_cmd->add_option("--budget", opt.budget, "Kernel SHAP coalition budget");
  explain_cmd->add_option("--background", opt.background, "Background rows")->check(CLI::PositiveNumber);
  explain_cmd->add_option("--max-rows", opt.max_rows, "Explain only the first N rows");

  auto* krige_cmd = app.add_subcommand("krige", "Cross-validated iVAE + kriging prediction of compositions");
  common(krige_cmd);
  krige_cmd->add_option("--data", opt.data, "Concentration CSV")->required()->check(CLI::ExistingFile);
  krige_cmd->add_option("--x-col", opt.x_col, "Easting column");
  krige_cmd->add_option("--y-col", opt.y_col, "Northing column");
  krige_cmd->add_option("--elements", opt.elements, "Restrict to these element columns")->delimiter(',');
  grid(krige_cmd);
  krige_cmd->add_option("--kind", opt.kind, "ordinary, universal or both")
      ->check(CLI::IsMember({"ordinary", "universal", "both"}));
  krige_cmd->add_option("--folds", opt.folds, "Cross-validation folds")->check(CLI::PositiveNumber);
  krige_cmd->add_option("--epochs", opt.epochs, "Training epochs")->check(CLI::PositiveNumber);
  krige_cmd->add_flag("--baseline", opt.baseline, "Add the training-mean baseline row");

  auto* study_cmd = app.add_subcommand("study", "Repeated simulate/train/evaluate runs");
  common(study_cmd);
  sim(study_cmd);
  grid(study_cmd);
  study_cmd->add_option("--epochs", opt.epochs, "Training epochs")->check(CLI::PositiveNumber);
  study_cmd->add_option("--replications", opt.replications, "Replications")->check(CLI::PositiveNumber);
  study_cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto* sub : app.get_subcommands()) {
      Command cmd(sub, opt);
      const std::string name = sub->get_name();
      if (name == "simulate") return run_simulate(cmd, opt);
      if (name == "train") return run_train(cmd, opt);
      if (name == "evaluate") return run_evaluate(cmd, opt);
      if (name == "explain") return run_explain(cmd, opt);
      if (name == "krige") return run_krige(cmd, opt);
      if (name == "study") return run_study(cmd, opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
