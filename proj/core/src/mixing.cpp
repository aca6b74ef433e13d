#include "sivae/mixing.hpp"

#include "sivae/rng.hpp"

#include <Eigen/SVD>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace sivae {

double elu(double x) { return x >= 0.0 ? x : std::expm1(x); }

double elu_derivative(double x) { return x >= 0.0 ? 1.0 : std::exp(x); }

double row_col_norm_deviation(const Matrix& b) {
  const double rows = (b.rowwise().norm().array() - 1.0).abs().maxCoeff();
  const double cols = (b.colwise().norm().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

NormalizeResult normalize_rows_cols(const Matrix& b, double tol, int max_sweeps) {
  if (b.rows() != b.cols() || b.rows() == 0) {
    throw std::invalid_argument("normalize_rows_cols: need a nonempty square matrix");
  }
  Matrix m = b;
  for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
    if (row_col_norm_deviation(m) < tol) return {m, sweep};
    if (sweep == max_sweeps) break;
    const Vector rn = m.rowwise().norm();
    if ((rn.array() == 0.0).any()) throw std::runtime_error("normalize_rows_cols: zero row");
    m = rn.cwiseInverse().asDiagonal() * m;
    const RowVector cn = m.colwise().norm();
    if ((cn.array() == 0.0).any()) throw std::runtime_error("normalize_rows_cols: zero column");
    m = m * cn.cwiseInverse().asDiagonal();
  }
  throw std::runtime_error("normalize_rows_cols: no convergence after " + std::to_string(max_sweeps) +
                           " sweeps");
}

void MixingSpec::validate() const {
  if (layers.empty()) throw std::invalid_argument("mixing spec has no layers");
  if (layers.size() != activations.size()) {
    throw std::invalid_argument("mixing spec: one activation per layer required");
  }
  const auto d = dim();
  for (const auto& b : layers) {
    if (b.rows() != d || b.cols() != d) throw std::invalid_argument("mixing spec: layers must be d x d");
  }
  if (activations.back() != Activation::linear) {
    throw std::invalid_argument("mixing spec: last activation must be linear");
  }
}

namespace {

Matrix draw_gaussian(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix b(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) b(i, j) = normal(rng);
  }
  return b;
}

/// Normalized draw, or nullopt when it is singular or normalization fails.
std::optional<NormalizeResult> normalized_draw(Eigen::Index dim, Rng& rng) {
  const Matrix b = draw_gaussian(dim, rng);
  if (std::abs(b.determinant()) < 1e-12) return std::nullopt;
  try {
    NormalizeResult norm = normalize_rows_cols(b);
    if (std::abs(norm.matrix.determinant()) < 1e-12) return std::nullopt;
    return norm;
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

}  // namespace

double condition_number(const Matrix& b) {
  Eigen::JacobiSVD<Matrix> svd(b);
  const Vector s = svd.singularValues();
  if (s.size() == 0 || s[s.size() - 1] <= 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[s.size() - 1];
}

double condition_threshold(Eigen::Index dim, double quantile, int draws) {
  if (!(quantile > 0.0 && quantile <= 1.0)) throw std::invalid_argument("condition_threshold: quantile must be in (0, 1]");
  if (draws < 1) throw std::invalid_argument("condition_threshold: need at least one draw");
  Rng rng = make_rng(0x6d6978636f6e64ULL, static_cast<Seed>(dim));
  std::vector<double> conds;
  conds.reserve(static_cast<std::size_t>(draws));
  while (static_cast<int>(conds.size()) < draws) {
    if (auto norm = normalized_draw(dim, rng)) conds.push_back(condition_number(norm->matrix));
  }
  const auto k = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(draws))) - 1;
  std::nth_element(conds.begin(), conds.begin() + static_cast<std::ptrdiff_t>(k), conds.end());
  return conds[k];
}

MixingSpec generate_mixing(int layers, Eigen::Index dim, Seed seed, const MixingOptions& opts) {
  if (layers < 1) throw std::invalid_argument("generate_mixing: need at least one layer");
  if (dim < 1) throw std::invalid_argument("generate_mixing: dimension must be >= 1");
  const double max_cond = opts.condition_quantile > 0.0
                              ? condition_threshold(dim, opts.condition_quantile, opts.calibration_draws)
                              : std::numeric_limits<double>::infinity();
  const int attempts = opts.condition_quantile > 0.0 ? 100000 : 100;
  MixingSpec spec;
  for (int l = 0; l < layers; ++l) {
    Rng rng = make_rng(seed, static_cast<Seed>(l));
    bool accepted = false;
    for (int attempt = 0; attempt < attempts && !accepted; ++attempt) {
      auto norm = normalized_draw(dim, rng);
      if (!norm || condition_number(norm->matrix) > max_cond * (1.0 + 1e-9)) continue;
      spec.layers.push_back(std::move(norm->matrix));
      spec.sweeps.push_back(norm->sweeps);
      accepted = true;
    }
    if (!accepted) {
      throw std::runtime_error("generate_mixing: no acceptable draw in " + std::to_string(attempts) + " attempts");
    }
    spec.activations.push_back(l + 1 == layers ? Activation::linear : Activation::elu);
  }
  return spec;
}

namespace {

void activate(Activation a, Eigen::Ref<Matrix> m) {
  if (a == Activation::elu) m = m.unaryExpr([](double v) { return elu(v); });
}

}  // namespace

Matrix apply_mixing(const MixingSpec& spec, const Matrix& z) {
  spec.validate();
  if (z.cols() != spec.dim()) throw std::invalid_argument("apply_mixing: column count does not match d");
  // Work feature-major: each column is one observation.
  Matrix h = z.transpose();
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    h = spec.layers[l] * h;
    activate(spec.activations[l], h);
  }
  return h.transpose();
}

Vector apply_mixing(const MixingSpec& spec, const Vector& z) {
  return apply_mixing(spec, Matrix(z.transpose())).row(0).transpose();
}

Matrix mixing_jacobian(const MixingSpec& spec, const Vector& z, double step) {
  const auto d = spec.dim();
  Matrix jac(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector hi = z;
    Vector lo = z;
    hi[j] += step;
    lo[j] -= step;
    jac.col(j) = (apply_mixing(spec, hi) - apply_mixing(spec, lo)) / (2.0 * step);
  }
  return jac;
}

std::string mixing_to_json(const MixingSpec& spec) {
  nlohmann::json j;
  j["dim"] = spec.dim();
  auto& layers = j["layers"] = nlohmann::json::array();
  for (const auto& b : spec.layers) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(b.cols()));
      for (Eigen::Index c = 0; c < b.cols(); ++c) row[static_cast<std::size_t>(c)] = b(r, c);
      rows.push_back(row);
    }
    layers.push_back(rows);
  }
  auto& acts = j["activations"] = nlohmann::json::array();
  for (auto a : spec.activations) acts.push_back(a == Activation::elu ? "elu" : "linear");
  j["normalization_sweeps"] = spec.sweeps;
  return j.dump(2);
}

MixingSpec mixing_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  MixingSpec spec;
  for (const auto& rows : j.at("layers")) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    Matrix b(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != r) throw std::invalid_argument("mixing JSON: layer not square");
      for (Eigen::Index c = 0; c < r; ++c) b(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    spec.layers.push_back(std::move(b));
  }
  for (const auto& a : j.at("activations")) {
    const auto name = a.get<std::string>();
    if (name == "elu") {
      spec.activations.push_back(Activation::elu);
    } else if (name == "linear") {
      spec.activations.push_back(Activation::linear);
    } else {
      throw std::invalid_argument("mixing JSON: unknown activation '" + name + "'");
    }
  }
  if (j.contains("normalization_sweeps")) spec.sweeps = j["normalization_sweeps"].get<std::vector<int>>();
  spec.validate();
  return spec;
}

}  // namespace sivae
