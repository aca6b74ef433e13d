#pragma once

#include "sivae/types.hpp"

#include <string>
#include <vector>

namespace sivae {

enum class Activation { elu, linear };

/// f_L(z) = w_L(B_L f_{L-1}(z)), f_0(z) = z. Each B_i has unit-norm rows and
/// columns; the last activation is linear.
struct MixingSpec {
  std::vector<Matrix> layers;
  std::vector<Activation> activations;
  std::vector<int> sweeps;  // normalization sweeps used per layer (informational)

  Eigen::Index dim() const { return layers.empty() ? 0 : layers.front().rows(); }
  void validate() const;
};

double elu(double x);
double elu_derivative(double x);

struct NormalizeResult {
  Matrix matrix;
  int sweeps = 0;
};

/// Alternating row/column rescaling to unit Euclidean norm. Throws
/// std::runtime_error when the deviation does not drop below `tol` within
/// `max_sweeps`.
NormalizeResult normalize_rows_cols(const Matrix& b, double tol = 1e-8, int max_sweeps = 500);

/// Largest |norm - 1| over all rows and columns.
double row_col_norm_deviation(const Matrix& b);

/// Optional rejection of ill-conditioned layers: a normalized draw is kept
/// only if its condition number is at most the `condition_quantile` quantile of
/// the condition numbers of `calibration_draws` normalized reference draws
/// (0 disables screening).
struct MixingOptions {
  double condition_quantile = 0.0;
  int calibration_draws = 10000;
};

/// Ratio of the largest to the smallest singular value.
double condition_number(const Matrix& b);

/// Quantile of the condition number of normalized d x d Gaussian draws, from a
/// fixed calibration stream.
double condition_threshold(Eigen::Index dim, double quantile, int draws = 10000);

/// Each B_i has iid standard normal entries before normalization; singular
/// draws are redrawn.
MixingSpec generate_mixing(int layers, Eigen::Index dim, Seed seed, const MixingOptions& opts = {});

/// Applies f_L to every row of z (n x d).
Matrix apply_mixing(const MixingSpec& spec, const Matrix& z);
Vector apply_mixing(const MixingSpec& spec, const Vector& z);

/// Central-difference Jacobian of f_L at z.
Matrix mixing_jacobian(const MixingSpec& spec, const Vector& z, double step = 1e-6);

std::string mixing_to_json(const MixingSpec& spec);
MixingSpec mixing_from_json(const std::string& text);

}  // namespace sivae
