#pragma once

#include "sivae/rng.hpp"
#include "sivae/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sivae {

/// Vector-valued black box evaluated on a batch: rows (B x K) -> outputs (B x H).
/// Must be safe for concurrent read-only calls.
using BatchFn = std::function<Matrix(const Matrix& rows)>;

struct ExplainTarget {
  BatchFn fn;
  Matrix background;  // B x K representative inputs

  Eigen::Index inputs() const { return background.cols(); }
  void validate() const;
};

/// Shapley values for all outputs of one observation. `values` is H x K and
/// `base` holds the background-mean prediction per output, so
/// base + values.rowwise().sum() equals fn(x).
struct ShapValues {
  Matrix values;
  Vector base;
  Vector prediction;
};

/// Interventional coalition value: mean over background rows of fn with the
/// features in `mask` taken from x and the rest from the background row.
Vector coalition_value(const ExplainTarget& target, const Vector& x, std::uint64_t mask);

constexpr int kExactShapleyMaxInputs = 20;

/// Exact enumeration over all 2^K coalitions (K <= 20).
ShapValues exact_shap(const ExplainTarget& target, const Vector& x);
/// Single-output convenience: the K SHAP values of output 0.
Vector exact_shapley(const ExplainTarget& target, const Vector& x);

/// Shapley kernel (K - 1) / (C(K, a) a (K - a)) for 1 <= a <= K - 1.
double shapley_kernel_weight(int k, int a);

/// Number of non-trivial coalitions, 2^K - 2.
std::uint64_t full_coalition_budget(int k);

struct Coalition {
  std::uint64_t mask;
  double weight;
};

/// Coalitions for kernel SHAP. Whole coalition-size classes are enumerated
/// from the smallest/largest sizes inward while the budget allows; the rest of
/// the budget is filled by sampling sizes in proportion to their kernel mass,
/// with complements paired. budget >= 2^K - 2 enumerates everything.
std::vector<Coalition> kernel_coalitions(int k, std::uint64_t budget, Rng& rng);

/// Kernel SHAP: weighted least squares over the coalitions with the efficiency
/// constraint sum(values) = fn(x) - base imposed exactly.
ShapValues kernel_shap_values(const ExplainTarget& target, const Vector& x, std::uint64_t budget, Seed seed);
Vector kernel_shap(const ExplainTarget& target, const Vector& x, std::uint64_t budget, Seed seed = 0);

struct ShapReport {
  std::vector<Matrix> shap;  // H entries, each n x K
  Vector base;               // H
  Matrix mashap;             // H x K, mean |SHAP|
  Matrix scaled;             // V: H x K, rows scaled to unit sum
  Vector average;            // v*: column means of V over included rows
  std::vector<int> zero_rows;  // outputs whose MASHAP row is all zero (excluded from v*)
};

/// Scaled and average-scaled MASHAP for every output of `target` over the rows of X.
/// Uses exact enumeration when the budget covers all coalitions, kernel SHAP otherwise.
ShapReport scaled_mashap(const ExplainTarget& target, const Matrix& x, std::uint64_t budget, Seed seed = 0);

/// Input columns sorted by decreasing v*; ties keep input order.
std::vector<int> order_by_average(const ShapReport& report);

/// Scaled MASHAP table: one row per output, one column per input in `column_order`
/// (all inputs in order when empty), and a final `Average` row holding v*.
std::string shap_report_csv(const ShapReport& report, const std::vector<std::string>& output_names,
                            const std::vector<std::string>& input_names,
                            const std::vector<int>& column_order = {});

/// Greedy farthest-point selection of `count` locations, starting from the
/// location nearest the centre of their bounding box. Returns row indices in
/// selection order; ties go to the lowest index.
std::vector<Eigen::Index> select_background_indices(const Matrix& locations, Eigen::Index count);
Matrix select_background(const Matrix& locations, const Matrix& x, Eigen::Index count);

}  // namespace sivae
