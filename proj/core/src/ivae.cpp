#include "sivae/ivae.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "sivae/csv.hpp"

namespace sivae {

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1) throw std::invalid_argument("TrainConfig: epochs and batch_size must be positive");
  if (!(lr_start > 0.0) || !(lr_end > 0.0) || lr_end > lr_start) {
    throw std::invalid_argument("TrainConfig: need 0 < lr_end <= lr_start");
  }
  if (decay_steps < 1 || !(decay_power > 0.0)) throw std::invalid_argument("TrainConfig: decay must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("TrainConfig: beta must be positive");
  if (!(leaky_slope >= 0.0)) throw std::invalid_argument("TrainConfig: leaky slope must be >= 0");
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("TrainConfig: hidden widths must be positive");
  }
}

double learning_rate(const TrainConfig& cfg, long step) {
  const double t = static_cast<double>(std::clamp(step, 0L, cfg.decay_steps));
  const double frac = 1.0 - t / static_cast<double>(cfg.decay_steps);
  return cfg.lr_end + (cfg.lr_start - cfg.lr_end) * std::pow(frac, cfg.decay_power);
}

IvaeModel IvaeModel::create(int d, int m, const TrainConfig& cfg) {
  if (d < 1 || m < 1) throw std::invalid_argument("IvaeModel: d and m must be >= 1");
  IvaeModel model;
  model.d = d;
  model.m = m;
  model.beta = cfg.beta;
  model.encoder = nn::DenseNet(d, m, cfg.hidden, 2 * d, cfg.leaky_slope);
  model.decoder = nn::DenseNet(d, 0, cfg.hidden, d, cfg.leaky_slope);
  model.aux = nn::DenseNet(0, m, cfg.hidden, 2 * d, cfg.leaky_slope);
  Rng rng = make_rng(cfg.seed, 0);
  model.encoder.initialize(rng);
  model.decoder.initialize(rng);
  model.aux.initialize(rng);
  return model;
}

void IvaeModel::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("IvaeModel: beta must be positive");
  if (encoder.outputs() != 2 * d || aux.outputs() != 2 * d || decoder.outputs() != d) {
    throw std::invalid_argument("IvaeModel: head dimensions do not match d");
  }
  if (encoder.dense_inputs() != d || encoder.onehot_inputs() != m || aux.onehot_inputs() != m ||
      decoder.dense_inputs() != d) {
    throw std::invalid_argument("IvaeModel: input dimensions do not match (d, m)");
  }
}

bool IvaeModel::all_finite() const { return encoder.all_finite() && decoder.all_finite() && aux.all_finite(); }

Eigen::Index IvaeModel::parameter_count() const {
  return encoder.parameter_count() + decoder.parameter_count() + aux.parameter_count();
}

Vector IvaeModel::flat_parameters() const {
  Vector flat(parameter_count());
  flat << encoder.flat_parameters(), decoder.flat_parameters(), aux.flat_parameters();
  return flat;
}

void IvaeModel::set_flat_parameters(const Vector& flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("set_flat_parameters: size mismatch");
  Eigen::Index pos = 0;
  for (nn::DenseNet* net : {&encoder, &decoder, &aux}) {
    const auto n = net->parameter_count();
    net->set_flat_parameters(flat.segment(pos, n));
    pos += n;
  }
}

IvaeGrad IvaeGrad::like(const IvaeModel& model) {
  return {model.encoder.make_grad(), model.decoder.make_grad(), model.aux.make_grad()};
}

void IvaeGrad::set_zero() {
  encoder.set_zero();
  decoder.set_zero();
  aux.set_zero();
}

Vector IvaeGrad::flatten() const {
  const Vector e = nn::flatten(encoder);
  const Vector de = nn::flatten(decoder);
  const Vector a = nn::flatten(aux);
  Vector flat(e.size() + de.size() + a.size());
  flat << e, de, a;
  return flat;
}

double gaussian_log_density(const Vector& x, const Vector& mu, const Vector& var) {
  if (x.size() != mu.size() || x.size() != var.size()) {
    throw std::invalid_argument("gaussian_log_density: size mismatch");
  }
  if ((var.array() <= 0.0).any()) throw std::invalid_argument("gaussian_log_density: variance must be positive");
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = x[i] - mu[i];
    total += -0.5 * (log2pi + std::log(var[i])) - 0.5 * r * r / var[i];
  }
  return total;
}

Vector reparameterize(const Vector& mu, const Vector& sigma, const Vector& eps) {
  if (mu.size() != sigma.size() || mu.size() != eps.size()) {
    throw std::invalid_argument("reparameterize: size mismatch");
  }
  return mu + sigma.cwiseProduct(eps);
}

namespace {

Matrix encoder_input(const IvaeModel& model, const Matrix& x_rows) {
  Matrix xin = x_rows.transpose();
  if (model.x_mean.size() == model.d) {
    xin.colwise() -= model.x_mean;
    xin = model.x_scale.cwiseInverse().asDiagonal() * xin;
  }
  return xin;
}

void check_segments(const IvaeModel& model, std::span<const int> segments) {
  for (int s : segments) {
    if (s < 0 || s >= model.m) throw std::invalid_argument("segment index outside the model's m columns");
  }
}

}  // namespace

double elbo(const IvaeModel& model, const Batch& batch, const Matrix& eps, IvaeGrad* grad) {
  const int d = model.d;
  const auto b = batch.x.rows();
  if (batch.x.cols() != d || eps.rows() != b || eps.cols() != d ||
      static_cast<Eigen::Index>(batch.segments.size()) != b) {
    throw std::invalid_argument("elbo: batch shapes are inconsistent");
  }
  check_segments(model, batch.segments);
  const Matrix x = encoder_input(model, batch.x);  // d x B, reconstruction target
  const Matrix e = eps.transpose();

  nn::ForwardCache enc_cache, dec_cache, aux_cache;
  const bool want_grad = grad != nullptr;
  const Matrix enc = model.encoder.forward(x, batch.segments, want_grad ? &enc_cache : nullptr);
  const Matrix aux = model.aux.forward(Matrix(0, b), batch.segments, want_grad ? &aux_cache : nullptr);

  const auto mu_q = enc.topRows(d);
  const auto lv_q = enc.bottomRows(d);
  const auto mu_p = aux.topRows(d);
  const auto lv_p = aux.bottomRows(d);
  const Matrix sigma_q = (0.5 * lv_q.array()).exp().matrix();
  const Matrix z = mu_q + sigma_q.cwiseProduct(e);
  const Matrix x_hat = model.decoder.forward(z, {}, want_grad ? &dec_cache : nullptr);

  const double log2pi = std::log(2.0 * std::numbers::pi);
  const double beta = model.beta;
  const Matrix resid_x = x - x_hat;
  const Matrix inv_var_p = (-lv_p.array()).exp().matrix();
  const Matrix resid_z = z - mu_p;

  const double log_px = -0.5 * static_cast<double>(d * b) * (log2pi + std::log(beta)) -
                        0.5 * resid_x.squaredNorm() / beta;
  const double log_pz = -0.5 * static_cast<double>(d * b) * log2pi - 0.5 * lv_p.sum() -
                        0.5 * resid_z.cwiseProduct(resid_z).cwiseProduct(inv_var_p).sum();
  const double log_q = -0.5 * static_cast<double>(d * b) * log2pi - 0.5 * lv_q.sum() - 0.5 * e.squaredNorm();
  const double value = (log_px + log_pz - log_q) / static_cast<double>(b);

  if (want_grad) {
    const double scale = 1.0 / static_cast<double>(b);
    grad->set_zero();
    Matrix dz;
    model.decoder.backward(dec_cache, resid_x * (scale / beta), grad->decoder, &dz);
    const Matrix pull = resid_z.cwiseProduct(inv_var_p) * scale;
    dz -= pull;

    Matrix d_aux(2 * d, b);
    d_aux.topRows(d) = pull;
    d_aux.bottomRows(d) =
        (0.5 * resid_z.cwiseProduct(resid_z).cwiseProduct(inv_var_p).array() - 0.5).matrix() * scale;
    model.aux.backward(aux_cache, d_aux, grad->aux, nullptr);

    Matrix d_enc(2 * d, b);
    d_enc.topRows(d) = dz;
    d_enc.bottomRows(d) = (0.5 * dz.cwiseProduct(sigma_q).cwiseProduct(e).array() + 0.5 * scale).matrix();
    model.encoder.backward(enc_cache, d_enc, grad->encoder, nullptr);
  }
  return value;
}

TrainResult train(const Matrix& x, const SegmentEncoding& segments, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  const auto n = x.rows();
  if (n < 1 || x.cols() < 1) throw std::invalid_argument("train: data is empty");
  if (segments.size() != n) throw std::invalid_argument("train: segment encoding does not match data rows");
  if (segments.m() < 1) throw std::invalid_argument("train: need at least one segment column");

  TrainResult result;
  IvaeModel& model = result.model;
  model = IvaeModel::create(static_cast<int>(x.cols()), segments.m(), cfg);
  model.grid = segments.grid;
  model.kept_cells = segments.kept_cells;
  if (cfg.standardize) {
    model.x_mean = x.colwise().mean().transpose();
    model.x_scale = ((x.rowwise() - model.x_mean.transpose()).colwise().squaredNorm() /
                     static_cast<double>(std::max<Eigen::Index>(n - 1, 1)))
                        .cwiseSqrt()
                        .transpose();
    for (Eigen::Index j = 0; j < model.x_scale.size(); ++j) {
      if (!(model.x_scale[j] > 0.0)) model.x_scale[j] = 1.0;
    }
  }

  const int d = model.d;
  Rng shuffle_rng = make_rng(cfg.seed, 1);
  Rng noise_rng = make_rng(cfg.seed, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  const nn::AdamHyper hyper{cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  nn::AdamState st_enc, st_dec, st_aux;
  IvaeGrad grad = IvaeGrad::like(model);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  long step = 0;
  long batch_index = 0;
  Batch batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index b = std::min<Eigen::Index>(cfg.batch_size, n - start);
      batch.x.resize(b, d);
      batch.segments.resize(static_cast<std::size_t>(b));
      for (Eigen::Index i = 0; i < b; ++i) {
        const auto row = order[static_cast<std::size_t>(start + i)];
        batch.x.row(i) = x.row(row);
        batch.segments[static_cast<std::size_t>(i)] = segments.segment[static_cast<std::size_t>(row)];
      }
      Matrix eps(b, d);
      for (Eigen::Index i = 0; i < b; ++i) {
        for (int j = 0; j < d; ++j) eps(i, j) = normal(noise_rng);
      }
      const double value = elbo(model, batch, eps, &grad);
      if (!std::isfinite(value)) {
        throw NonFiniteLoss("non-finite ELBO at epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(batch_index),
                            batch_index);
      }
      epoch_sum += value * static_cast<double>(b);
      // Adam minimizes -ELBO.
      grad.encoder.scale(-1.0);
      grad.decoder.scale(-1.0);
      grad.aux.scale(-1.0);
      const double lr = learning_rate(cfg, step);
      ++step;
      nn::adam_update(model.encoder, grad.encoder, st_enc, hyper, lr, step);
      nn::adam_update(model.decoder, grad.decoder, st_dec, hyper, lr, step);
      nn::adam_update(model.aux, grad.aux, st_aux, hyper, lr, step);
      ++batch_index;
    }
    const double mean_elbo = epoch_sum / static_cast<double>(n);
    result.elbo_trace.push_back(mean_elbo);
    if (on_epoch) on_epoch(epoch, mean_elbo);
  }
  return result;
}

Matrix extract_latents(const IvaeModel& model, const Matrix& x, std::span<const int> segments) {
  if (x.cols() != model.d) throw std::invalid_argument("extract_latents: column count does not match d");
  if (static_cast<Eigen::Index>(segments.size()) != x.rows()) {
    throw std::invalid_argument("extract_latents: segment count does not match rows");
  }
  check_segments(model, segments);
  const Matrix enc = model.encoder.forward(encoder_input(model, x), segments, nullptr);
  return enc.topRows(model.d).transpose();
}

Matrix extract_latents(const IvaeModel& model, const Matrix& x, const SegmentEncoding& segments) {
  if (segments.m() != model.m) {
    throw std::invalid_argument("extract_latents: segmentation has " + std::to_string(segments.m()) +
                                " columns, model expects " + std::to_string(model.m));
  }
  return extract_latents(model, x, segments.segment);
}

Matrix decode(const IvaeModel& model, const Matrix& z) {
  if (z.cols() != model.d) throw std::invalid_argument("decode: column count does not match d");
  Matrix out = model.decoder.forward(z.transpose(), {}, nullptr);
  if (model.x_mean.size() == model.d) {
    out = model.x_scale.asDiagonal() * out;
    out.colwise() += model.x_mean;
  }
  return out.transpose();
}

void write_elbo_trace(const std::string& path, const std::vector<double>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "epoch,elbo\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i + 1 << ',' << csv::format(trace[i]) << '\n';
}

}  // namespace sivae
