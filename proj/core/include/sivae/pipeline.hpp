#pragma once

#include "sivae/ivae.hpp"
#include "sivae/kriging.hpp"
#include "sivae/segmentation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sivae {

/// Grid given either as cell counts or as a square cell side length.
struct GridSpec {
  int nx = 20;
  int ny = 20;
  double cell_size = 0.0;  // > 0 selects cell-size mode

  SegmentGrid resolve(const Domain2D& domain) const;
  std::string describe() const;
  /// "20x20" or a plain number for the cell size.
  static GridSpec parse(const std::string& text);
};

struct ErrorMetrics {
  double mse = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

/// Errors over every entry of `truth - prediction`; rmse = sqrt(mse).
ErrorMetrics score_predictions(const Matrix& truth, const Matrix& prediction);

struct PredictionReport {
  std::string method;
  double mse = 0.0;            // mean of fold MSEs
  double mae = 0.0;            // mean of fold MAEs
  double rmse = 0.0;           // sqrt(mse)
  double fold_rmse_mean = 0.0; // mean of fold RMSEs
  Vector mse_per_variable;     // averaged over folds
  Vector mae_per_variable;
  std::vector<ErrorMetrics> folds;
  std::vector<int> fold_of;    // fold id per observation
};

/// Random partition of n rows into `folds` sets whose sizes differ by at most one.
std::vector<int> assign_folds(Eigen::Index n, int folds, Seed seed);

struct CrossValidationConfig {
  int folds = 10;
  Seed seed = 0;
  TrainConfig train{};
  GridSpec grid{};
  KrigingKind kind = KrigingKind::ordinary;
  int neighbours = 50;
  int variogram_bins = 15;
  double max_dist = 0.0;  // <= 0: half the domain diagonal
};

using ProgressFn = std::function<void(const std::string&)>;

/// Per fold: ilr-transform, train the iVAE on the training split, krige every
/// latent to the test sites with the OLS-selected variogram, decode, map to
/// clr and score against the test clr values.
PredictionReport bss_krige_crossvalidate(const Matrix& locations, const Matrix& parts,
                                         const CrossValidationConfig& cfg, const ProgressFn& progress = {});

/// Same folds; predicts the fold-training clr mean everywhere.
PredictionReport mean_baseline_crossvalidate(const Matrix& locations, const Matrix& parts,
                                             const CrossValidationConfig& cfg);

/// Table-style CSV `Method,MSE,MAE,RMSE`.
std::string prediction_reports_csv(const std::vector<PredictionReport>& reports);

}  // namespace sivae
