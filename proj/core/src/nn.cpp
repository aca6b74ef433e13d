#include "sivae/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace sivae::nn {

void DenseGrad::set_zero() {
  for (auto& w : weight) w.setZero();
  for (auto& b : bias) b.setZero();
}

void DenseGrad::scale(double s) {
  for (auto& w : weight) w *= s;
  for (auto& b : bias) b *= s;
}

DenseNet::DenseNet(int dense_inputs, int onehot_inputs, std::vector<int> hidden, int outputs, double slope)
    : dense_inputs_(dense_inputs),
      onehot_inputs_(onehot_inputs),
      outputs_(outputs),
      slope_(slope),
      hidden_(std::move(hidden)) {
  if (dense_inputs < 0 || onehot_inputs < 0 || dense_inputs + onehot_inputs < 1) {
    throw std::invalid_argument("DenseNet: need at least one input");
  }
  if (outputs < 1) throw std::invalid_argument("DenseNet: need at least one output");
  int fan_in = dense_inputs + onehot_inputs;
  for (int h : hidden_) {
    if (h < 1) throw std::invalid_argument("DenseNet: hidden width must be positive");
    layers_.push_back({Matrix::Zero(h, fan_in), Vector::Zero(h)});
    fan_in = h;
  }
  layers_.push_back({Matrix::Zero(outputs, fan_in), Vector::Zero(outputs)});
}

void DenseNet::initialize(Rng& rng) {
  for (auto& layer : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = dist(rng);
    }
    layer.bias.setZero();
  }
}

Matrix DenseNet::forward(const Matrix& input, std::span<const int> segments, ForwardCache* cache) const {
  const Eigen::Index batch = dense_inputs_ > 0 ? input.cols() : static_cast<Eigen::Index>(segments.size());
  if (dense_inputs_ > 0 && input.rows() != dense_inputs_) {
    throw std::invalid_argument("DenseNet::forward: dense input has wrong row count");
  }
  if (onehot_inputs_ > 0 && static_cast<Eigen::Index>(segments.size()) != batch) {
    throw std::invalid_argument("DenseNet::forward: segment count does not match batch");
  }
  const auto& first = layers_.front();
  Matrix z(first.weight.rows(), batch);
  if (dense_inputs_ > 0) {
    z.noalias() = first.weight.leftCols(dense_inputs_) * input;
  } else {
    z.setZero();
  }
  z.colwise() += first.bias;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(segments.size()) && onehot_inputs_ > 0; ++j) {
    const int s = segments[static_cast<std::size_t>(j)];
    if (s < 0 || s >= onehot_inputs_) throw std::out_of_range("DenseNet::forward: segment index out of range");
    z.col(j) += first.weight.col(dense_inputs_ + s);
  }
  if (cache) {
    cache->input = input;
    cache->segments.assign(segments.begin(), segments.end());
    cache->pre.clear();
    cache->post.clear();
  }
  const double slope = slope_;
  auto leaky = [slope](double v) { return v > 0.0 ? v : slope * v; };
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    Matrix a = z.unaryExpr(leaky);
    Matrix next(layers_[l].weight.rows(), batch);
    next.noalias() = layers_[l].weight * a;
    next.colwise() += layers_[l].bias;
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->post.push_back(std::move(a));
    }
    z = std::move(next);
  }
  return z;
}

void DenseNet::backward(const ForwardCache& cache, const Matrix& output_grad, DenseGrad& grad,
                        Matrix* input_grad) const {
  const double slope = slope_;
  Matrix delta = output_grad;
  for (std::size_t l = layers_.size() - 1; l >= 1; --l) {
    const Matrix& a = cache.post[l - 1];
    grad.weight[l].noalias() += delta * a.transpose();
    grad.bias[l] += delta.rowwise().sum();
    Matrix back(layers_[l].weight.cols(), delta.cols());
    back.noalias() = layers_[l].weight.transpose() * delta;
    const Matrix& pre = cache.pre[l - 1];
    delta = back.binaryExpr(pre, [slope](double g, double p) { return p > 0.0 ? g : slope * g; });
  }
  const auto& first = layers_.front();
  if (dense_inputs_ > 0) {
    grad.weight[0].leftCols(dense_inputs_).noalias() += delta * cache.input.transpose();
  }
  grad.bias[0] += delta.rowwise().sum();
  if (onehot_inputs_ > 0) {
    for (std::size_t j = 0; j < cache.segments.size(); ++j) {
      grad.weight[0].col(dense_inputs_ + cache.segments[j]) += delta.col(static_cast<Eigen::Index>(j));
    }
  }
  if (input_grad) {
    if (dense_inputs_ > 0) {
      input_grad->noalias() = first.weight.leftCols(dense_inputs_).transpose() * delta;
    } else {
      input_grad->resize(0, delta.cols());
    }
  }
}

DenseGrad DenseNet::make_grad() const {
  DenseGrad g;
  for (const auto& layer : layers_) {
    g.weight.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
    g.bias.push_back(Vector::Zero(layer.bias.size()));
  }
  return g;
}

Eigen::Index DenseNet::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

Vector DenseNet::flat_parameters() const {
  Vector flat(parameter_count());
  Eigen::Index pos = 0;
  for (const auto& layer : layers_) {
    flat.segment(pos, layer.weight.size()) = layer.weight.reshaped();
    pos += layer.weight.size();
    flat.segment(pos, layer.bias.size()) = layer.bias;
    pos += layer.bias.size();
  }
  return flat;
}

void DenseNet::set_flat_parameters(const Vector& flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("set_flat_parameters: size mismatch");
  Eigen::Index pos = 0;
  for (auto& layer : layers_) {
    layer.weight.reshaped() = flat.segment(pos, layer.weight.size());
    pos += layer.weight.size();
    layer.bias = flat.segment(pos, layer.bias.size());
    pos += layer.bias.size();
  }
}

bool DenseNet::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

Vector flatten(const DenseGrad& g) {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < g.weight.size(); ++l) n += g.weight[l].size() + g.bias[l].size();
  Vector flat(n);
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < g.weight.size(); ++l) {
    flat.segment(pos, g.weight[l].size()) = g.weight[l].reshaped();
    pos += g.weight[l].size();
    flat.segment(pos, g.bias[l].size()) = g.bias[l];
    pos += g.bias[l].size();
  }
  return flat;
}

namespace {

template <typename Param, typename Grad>
void adam_step(Param& p, const Grad& g, Grad& m, Grad& v, const AdamHyper& h, double lr,
               double bias1, double bias2) {
  m = h.beta1 * m + (1.0 - h.beta1) * g;
  v = h.beta2 * v + (1.0 - h.beta2) * g.cwiseProduct(g);
  p.array() -= lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + h.eps);
}

}  // namespace

void adam_update(DenseNet& net, const DenseGrad& grad, AdamState& state, const AdamHyper& hyper,
                 double lr, long step) {
  if (state.m.weight.empty()) {
    state.m = net.make_grad();
    state.v = net.make_grad();
  }
  const double bias1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double bias2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    adam_step(layers[l].weight, grad.weight[l], state.m.weight[l], state.v.weight[l], hyper, lr, bias1, bias2);
    adam_step(layers[l].bias, grad.bias[l], state.m.bias[l], state.v.bias[l], hyper, lr, bias1, bias2);
  }
}

}  // namespace sivae::nn
