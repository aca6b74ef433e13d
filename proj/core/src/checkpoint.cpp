#include "sivae/ivae.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace sivae {
namespace {

using nlohmann::json;

json net_to_json(const nn::DenseNet& net) {
  json j;
  j["dense_inputs"] = net.dense_inputs();
  j["onehot_inputs"] = net.onehot_inputs();
  j["hidden"] = net.hidden();
  j["outputs"] = net.outputs();
  j["leaky_slope"] = net.slope();
  auto& layers = j["layers"] = json::array();
  for (const auto& layer : net.layers()) {
    json l;
    l["shape"] = {layer.weight.rows(), layer.weight.cols()};
    // Column-major weight storage.
    l["weight"] = std::vector<double>(layer.weight.data(), layer.weight.data() + layer.weight.size());
    l["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    layers.push_back(std::move(l));
  }
  return j;
}

nn::DenseNet net_from_json(const json& j) {
  nn::DenseNet net(j.at("dense_inputs").get<int>(), j.at("onehot_inputs").get<int>(),
                   j.at("hidden").get<std::vector<int>>(), j.at("outputs").get<int>(),
                   j.at("leaky_slope").get<double>());
  const auto& layers = j.at("layers");
  if (layers.size() != net.layers().size()) throw std::invalid_argument("checkpoint: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = net.layers()[l];
    const auto shape = layers[l].at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 2 || shape[0] != layer.weight.rows() || shape[1] != layer.weight.cols()) {
      throw std::invalid_argument("checkpoint: layer " + std::to_string(l) + " has unexpected shape");
    }
    const auto w = layers[l].at("weight").get<std::vector<double>>();
    const auto b = layers[l].at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != layer.weight.size() ||
        static_cast<Eigen::Index>(b.size()) != layer.bias.size()) {
      throw std::invalid_argument("checkpoint: layer " + std::to_string(l) + " parameter count mismatch");
    }
    layer.weight = Eigen::Map<const Matrix>(w.data(), layer.weight.rows(), layer.weight.cols());
    layer.bias = Eigen::Map<const Vector>(b.data(), layer.bias.size());
  }
  return net;
}

json config_to_json(const TrainConfig& cfg) {
  return {{"epochs", cfg.epochs},         {"batch_size", cfg.batch_size},
          {"lr_start", cfg.lr_start},     {"lr_end", cfg.lr_end},
          {"decay_steps", cfg.decay_steps}, {"decay_power", cfg.decay_power},
          {"adam_beta1", cfg.adam_beta1}, {"adam_beta2", cfg.adam_beta2},
          {"adam_eps", cfg.adam_eps},     {"seed", cfg.seed},
          {"hidden", cfg.hidden},         {"leaky_slope", cfg.leaky_slope},
          {"beta", cfg.beta},             {"standardize", cfg.standardize}};
}

}  // namespace

std::string model_to_json(const IvaeModel& model, const TrainConfig* cfg) {
  model.validate();
  json j;
  j["format"] = "sivae-model";
  j["version"] = 1;
  j["d"] = model.d;
  j["m"] = model.m;
  j["beta"] = model.beta;
  j["encoder"] = net_to_json(model.encoder);
  j["decoder"] = net_to_json(model.decoder);
  j["aux"] = net_to_json(model.aux);
  const auto& g = model.grid;
  j["segmentation"] = {{"domain", {g.domain.x_min, g.domain.x_max, g.domain.y_min, g.domain.y_max}},
                       {"nx", g.nx},
                       {"ny", g.ny},
                       {"kept_cells", model.kept_cells}};
  if (model.x_mean.size() > 0) {
    j["x_mean"] = std::vector<double>(model.x_mean.data(), model.x_mean.data() + model.x_mean.size());
    j["x_scale"] = std::vector<double>(model.x_scale.data(), model.x_scale.data() + model.x_scale.size());
  }
  if (cfg) j["config"] = config_to_json(*cfg);
  return j.dump(1);
}

IvaeModel model_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "sivae-model") throw std::invalid_argument("not a sivae model checkpoint");
  IvaeModel model;
  model.d = j.at("d").get<int>();
  model.m = j.at("m").get<int>();
  model.beta = j.at("beta").get<double>();
  model.encoder = net_from_json(j.at("encoder"));
  model.decoder = net_from_json(j.at("decoder"));
  model.aux = net_from_json(j.at("aux"));
  const auto& seg = j.at("segmentation");
  const auto dom = seg.at("domain").get<std::vector<double>>();
  if (dom.size() != 4) throw std::invalid_argument("checkpoint: bad segmentation domain");
  model.grid = SegmentGrid::cells({dom[0], dom[1], dom[2], dom[3]}, seg.at("nx").get<int>(), seg.at("ny").get<int>());
  model.kept_cells = seg.at("kept_cells").get<std::vector<int>>();
  if (static_cast<int>(model.kept_cells.size()) != model.m) {
    throw std::invalid_argument("checkpoint: kept cell count differs from m");
  }
  if (j.contains("x_mean")) {
    const auto mean = j["x_mean"].get<std::vector<double>>();
    const auto scale = j["x_scale"].get<std::vector<double>>();
    model.x_mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    model.x_scale = Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  }
  model.validate();
  return model;
}

void save_model(const std::string& path, const IvaeModel& model, const TrainConfig* cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << model_to_json(model, cfg) << '\n';
}

IvaeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace sivae
