#pragma once

#include "sivae/rng.hpp"
#include "sivae/types.hpp"

#include <span>
#include <vector>

namespace sivae::nn {

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

/// Gradient buffer with the same shapes as a DenseNet's parameters.
struct DenseGrad {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;

  void set_zero();
  void scale(double s);
};

/// Intermediate values kept by forward() for backward().
struct ForwardCache {
  Matrix input;                    // dense part, in_dense x B
  std::vector<int> segments;       // one-hot part as column indices, size B (or empty)
  std::vector<Matrix> pre;         // pre-activations per layer
  std::vector<Matrix> post;        // activations per hidden layer
};

/// Multilayer perceptron with leaky-ReLU hidden layers and a linear output.
/// The input is a dense block of `dense_inputs` features optionally followed by
/// a one-hot block of `onehot_inputs` features, passed as column indices; the
/// first layer multiplies the one-hot block by a column lookup. All batch
/// matrices are feature-major (one column per example).
class DenseNet {
 public:
  DenseNet() = default;
  DenseNet(int dense_inputs, int onehot_inputs, std::vector<int> hidden, int outputs, double slope);

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  void initialize(Rng& rng);

  Matrix forward(const Matrix& input, std::span<const int> segments, ForwardCache* cache) const;

  /// Accumulates parameter gradients for dLoss/dOutput into `grad`; returns
  /// dLoss/dInput for the dense block when `input_grad` is non-null.
  void backward(const ForwardCache& cache, const Matrix& output_grad, DenseGrad& grad,
                Matrix* input_grad) const;

  DenseGrad make_grad() const;

  int dense_inputs() const { return dense_inputs_; }
  int onehot_inputs() const { return onehot_inputs_; }
  int outputs() const { return outputs_; }
  double slope() const { return slope_; }
  const std::vector<int>& hidden() const { return hidden_; }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  Eigen::Index parameter_count() const;
  Vector flat_parameters() const;
  void set_flat_parameters(const Vector& flat);
  bool all_finite() const;

 private:
  int dense_inputs_ = 0;
  int onehot_inputs_ = 0;
  int outputs_ = 0;
  double slope_ = 0.2;
  std::vector<int> hidden_;
  std::vector<DenseLayer> layers_;
};

Vector flatten(const DenseGrad& g);

/// Adam moments for one DenseNet.
struct AdamState {
  DenseGrad m;
  DenseGrad v;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One descent step on `net` using gradient `grad` of the loss; `step` is the
/// 1-based update count used for bias correction.
void adam_update(DenseNet& net, const DenseGrad& grad, AdamState& state, const AdamHyper& hyper,
                 double lr, long step);

}  // namespace sivae::nn
