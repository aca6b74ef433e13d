#include "sivae/pipeline.hpp"

#include "sivae/compositional.hpp"
#include "sivae/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sivae {

SegmentGrid GridSpec::resolve(const Domain2D& domain) const {
  if (cell_size > 0.0) return SegmentGrid::cell_size(domain, cell_size);
  return SegmentGrid::cells(domain, nx, ny);
}

std::string GridSpec::describe() const {
  if (cell_size > 0.0) return "cell-size " + csv::format(cell_size);
  return std::to_string(nx) + "x" + std::to_string(ny);
}

GridSpec GridSpec::parse(const std::string& text) {
  GridSpec g;
  const auto pos = text.find_first_of("xX");
  if (pos == std::string::npos) {
    g.cell_size = csv::parse_double(text);
    if (!(g.cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
    return g;
  }
  g.nx = static_cast<int>(csv::parse_double(text.substr(0, pos)));
  g.ny = static_cast<int>(csv::parse_double(text.substr(pos + 1)));
  if (g.nx < 1 || g.ny < 1) throw std::invalid_argument("grid cell counts must be positive");
  return g;
}

ErrorMetrics score_predictions(const Matrix& truth, const Matrix& prediction) {
  if (truth.rows() != prediction.rows() || truth.cols() != prediction.cols() || truth.size() == 0) {
    throw std::invalid_argument("score_predictions: shape mismatch");
  }
  const Matrix diff = truth - prediction;
  ErrorMetrics m;
  m.mse = diff.squaredNorm() / static_cast<double>(diff.size());
  m.mae = diff.cwiseAbs().sum() / static_cast<double>(diff.size());
  m.rmse = std::sqrt(m.mse);
  return m;
}

std::vector<int> assign_folds(Eigen::Index n, int folds, Seed seed) {
  if (folds < 1 || n < folds) throw std::invalid_argument("assign_folds: need 1 <= folds <= n");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng = make_rng(seed, 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i) fold[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % folds);
  return fold;
}

namespace {

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

Split split_fold(const std::vector<int>& fold_of, int fold) {
  Split s;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    (fold_of[i] == fold ? s.test : s.train).push_back(static_cast<Eigen::Index>(i));
  }
  return s;
}

Matrix rows_of(const Matrix& m, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

void check_inputs(const Matrix& locations, const Matrix& parts, const CrossValidationConfig& cfg) {
  if (locations.rows() != parts.rows() || locations.cols() != 2) {
    throw std::invalid_argument("crossvalidate: locations and parts must have matching rows");
  }
  if (parts.cols() < 2) throw std::invalid_argument("crossvalidate: need at least two parts");
  if (locations.rows() < cfg.folds) throw std::invalid_argument("crossvalidate: need n >= folds");
}

PredictionReport aggregate(std::string method, std::vector<ErrorMetrics> folds, Matrix per_var_sq,
                           Matrix per_var_abs, std::vector<int> fold_of) {
  PredictionReport r;
  r.method = std::move(method);
  const double k = static_cast<double>(folds.size());
  for (const auto& f : folds) {
    r.mse += f.mse / k;
    r.mae += f.mae / k;
    r.fold_rmse_mean += f.rmse / k;
  }
  r.rmse = std::sqrt(r.mse);
  r.mse_per_variable = per_var_sq.colwise().mean().transpose();
  r.mae_per_variable = per_var_abs.colwise().mean().transpose();
  r.folds = std::move(folds);
  r.fold_of = std::move(fold_of);
  return r;
}

}  // namespace

PredictionReport bss_krige_crossvalidate(const Matrix& locations, const Matrix& parts,
                                         const CrossValidationConfig& cfg, const ProgressFn& progress) {
  check_inputs(locations, parts, cfg);
  const Domain2D domain = bounding_domain(locations);
  const SegmentGrid grid = cfg.grid.resolve(domain);
  const double max_dist = cfg.max_dist > 0.0 ? cfg.max_dist : 0.5 * domain.diagonal();
  const Matrix ilr_all = ilr_rows(parts);
  const Matrix clr_all = clr_rows(parts);
  const auto fold_of = assign_folds(locations.rows(), cfg.folds, cfg.seed);
  const auto dims = parts.cols();

  std::vector<ErrorMetrics> scores;
  Matrix per_var_sq(cfg.folds, dims), per_var_abs(cfg.folds, dims);
  for (int f = 0; f < cfg.folds; ++f) {
    const Split split = split_fold(fold_of, f);
    const Matrix train_loc = rows_of(locations, split.train);
    const Matrix test_loc = rows_of(locations, split.test);
    const Matrix train_ilr = rows_of(ilr_all, split.train);

    const SegmentEncoding seg = encode_segments(train_loc, grid);
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, 1000 + static_cast<Seed>(f));
    const TrainResult trained = train(train_ilr, seg, tc);
    const Matrix latents = extract_latents(trained.model, train_ilr, seg);

    const int neighbours = static_cast<int>(std::min<Eigen::Index>(cfg.neighbours, train_loc.rows()));
    Matrix predicted_latents(test_loc.rows(), latents.cols());
    for (Eigen::Index j = 0; j < latents.cols(); ++j) {
      const Vector values = latents.col(j);
      const auto bins = empirical_variogram(train_loc, values, cfg.variogram_bins, max_dist);
      const VariogramFit fit = select_variogram(bins);
      predicted_latents.col(j) = krige(train_loc, values, test_loc, fit.model, cfg.kind, neighbours);
    }
    const Matrix predicted_clr = ilr_to_clr_rows(decode(trained.model, predicted_latents));
    const Matrix truth_clr = rows_of(clr_all, split.test);
    scores.push_back(score_predictions(truth_clr, predicted_clr));
    const Matrix diff = truth_clr - predicted_clr;
    per_var_sq.row(f) = diff.cwiseAbs2().colwise().mean();
    per_var_abs.row(f) = diff.cwiseAbs().colwise().mean();
    if (progress) {
      std::ostringstream msg;
      msg << "fold " << f + 1 << "/" << cfg.folds << ": MSE " << scores.back().mse;
      progress(msg.str());
    }
  }
  return aggregate("iVAE + " + std::string(cfg.kind == KrigingKind::ordinary ? "Ordinary" : "Universal") + " kriging",
                   std::move(scores), per_var_sq, per_var_abs, fold_of);
}

PredictionReport mean_baseline_crossvalidate(const Matrix& locations, const Matrix& parts,
                                             const CrossValidationConfig& cfg) {
  check_inputs(locations, parts, cfg);
  const Matrix clr_all = clr_rows(parts);
  const auto fold_of = assign_folds(locations.rows(), cfg.folds, cfg.seed);
  std::vector<ErrorMetrics> scores;
  Matrix per_var_sq(cfg.folds, parts.cols()), per_var_abs(cfg.folds, parts.cols());
  for (int f = 0; f < cfg.folds; ++f) {
    const Split split = split_fold(fold_of, f);
    const RowVector mean = rows_of(clr_all, split.train).colwise().mean();
    const Matrix truth = rows_of(clr_all, split.test);
    const Matrix pred = mean.replicate(truth.rows(), 1);
    scores.push_back(score_predictions(truth, pred));
    const Matrix diff = truth - pred;
    per_var_sq.row(f) = diff.cwiseAbs2().colwise().mean();
    per_var_abs.row(f) = diff.cwiseAbs().colwise().mean();
  }
  return aggregate("Training clr mean", std::move(scores), per_var_sq, per_var_abs, fold_of);
}

std::string prediction_reports_csv(const std::vector<PredictionReport>& reports) {
  std::ostringstream out;
  out << "Method,MSE,MAE,RMSE\n";
  for (const auto& r : reports) {
    out << r.method << ',' << csv::format(r.mse) << ',' << csv::format(r.mae) << ',' << csv::format(r.rmse) << '\n';
  }
  return out.str();
}

}  // namespace sivae
