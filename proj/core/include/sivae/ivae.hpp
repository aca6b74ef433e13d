#pragma once

#include "sivae/nn.hpp"
#include "sivae/segmentation.hpp"

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sivae {

struct TrainConfig {
  int epochs = 200;
  int batch_size = 64;
  double lr_start = 0.01;
  double lr_end = 0.0001;
  long decay_steps = 10000;
  double decay_power = 2.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  Seed seed = 0;
  std::vector<int> hidden{128, 128, 128};
  double leaky_slope = 0.2;
  double beta = 0.01;        // decoder observation variance
  bool standardize = false;  // feed standardized x to the encoder

  void validate() const;
};

/// lr(t) = lr_end + (lr_start - lr_end) * (1 - min(t, T) / T)^power.
double learning_rate(const TrainConfig& cfg, long step);

/// Encoder g: [x, u] -> (mu, log var) of q(z | x, u); decoder h: z -> x;
/// auxiliary network w: u -> (mu, log var) of p(z | u).
struct IvaeModel {
  nn::DenseNet encoder;
  nn::DenseNet decoder;
  nn::DenseNet aux;
  double beta = 0.01;
  int d = 0;
  int m = 0;
  SegmentGrid grid;
  std::vector<int> kept_cells;
  Vector x_mean;   // standardization applied before the encoder (empty = none)
  Vector x_scale;

  static IvaeModel create(int d, int m, const TrainConfig& cfg);
  void validate() const;
  bool all_finite() const;

  Eigen::Index parameter_count() const;
  Vector flat_parameters() const;
  void set_flat_parameters(const Vector& flat);
};

/// Gradients for all three networks.
struct IvaeGrad {
  nn::DenseGrad encoder;
  nn::DenseGrad decoder;
  nn::DenseGrad aux;

  static IvaeGrad like(const IvaeModel& model);
  void set_zero();
  Vector flatten() const;
};

/// Sum over coordinates of -0.5 log(2 pi var_i) - 0.5 (x_i - mu_i)^2 / var_i.
double gaussian_log_density(const Vector& x, const Vector& mu, const Vector& var);

/// mu + sigma (elementwise) eps.
Vector reparameterize(const Vector& mu, const Vector& sigma, const Vector& eps);

class NonFiniteLoss : public std::runtime_error {
 public:
  NonFiniteLoss(const std::string& what, long batch) : std::runtime_error(what), batch_(batch) {}
  long batch() const { return batch_; }

 private:
  long batch_;
};

/// A mini-batch: observations (B x d) and their segment columns.
struct Batch {
  Matrix x;
  std::vector<int> segments;
};

/// Per-batch mean of log p(x | z') + log p(z' | u) - log q(z' | x, u) with
/// z' = mu + sigma * eps and eps given (B x d). When `grad` is non-null the
/// gradient of that mean with respect to every parameter is written to it.
double elbo(const IvaeModel& model, const Batch& batch, const Matrix& eps, IvaeGrad* grad);

struct TrainResult {
  IvaeModel model;
  std::vector<double> elbo_trace;  // mean ELBO per epoch
};

using EpochCallback = std::function<void(int epoch, double elbo)>;

TrainResult train(const Matrix& x, const SegmentEncoding& segments, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Encoder mean head per observation (no sampling).
Matrix extract_latents(const IvaeModel& model, const Matrix& x, const SegmentEncoding& segments);
Matrix extract_latents(const IvaeModel& model, const Matrix& x, std::span<const int> segments);

/// Decoder forward pass, n x d latents to n x d observations.
Matrix decode(const IvaeModel& model, const Matrix& z);

/// Model checkpoint as JSON: layer shapes, parameters, config echo and the
/// segmentation layout.
std::string model_to_json(const IvaeModel& model, const TrainConfig* cfg = nullptr);
IvaeModel model_from_json(const std::string& text);
void save_model(const std::string& path, const IvaeModel& model, const TrainConfig* cfg = nullptr);
IvaeModel load_model(const std::string& path);

void write_elbo_trace(const std::string& path, const std::vector<double>& trace);

}  // namespace sivae
