#include "sivae/shap.hpp"

#include "sivae/csv.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sivae {

void ExplainTarget::validate() const {
  if (!fn) throw std::invalid_argument("ExplainTarget: function is empty");
  if (background.rows() < 1) throw std::invalid_argument("ExplainTarget: need at least one background row");
  if (background.cols() < 1) throw std::invalid_argument("ExplainTarget: need at least one input");
}

namespace {

bool in_mask(std::uint64_t mask, Eigen::Index i) { return ((mask >> i) & 1ULL) != 0; }

Matrix evaluate(const ExplainTarget& target, const Matrix& rows) {
  Matrix out = target.fn(rows);
  if (out.rows() != rows.rows()) throw std::runtime_error("explained function returned wrong row count");
  return out;
}

Vector predict_one(const ExplainTarget& target, const Vector& x) {
  return evaluate(target, Matrix(x.transpose())).row(0).transpose();
}

Vector background_mean(const ExplainTarget& target) {
  return evaluate(target, target.background).colwise().mean().transpose();
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Vector coalition_value(const ExplainTarget& target, const Vector& x, std::uint64_t mask) {
  Matrix rows = target.background;
  for (Eigen::Index i = 0; i < rows.cols(); ++i) {
    if (in_mask(mask, i)) rows.col(i).setConstant(x[i]);
  }
  return evaluate(target, rows).colwise().mean().transpose();
}

ShapValues exact_shap(const ExplainTarget& target, const Vector& x) {
  target.validate();
  const auto k = static_cast<int>(target.inputs());
  if (x.size() != k) throw std::invalid_argument("exact_shap: observation length differs from background");
  if (k > kExactShapleyMaxInputs) {
    throw std::invalid_argument("exact_shap: K = " + std::to_string(k) + " exceeds the enumeration bound of " +
                                std::to_string(kExactShapleyMaxInputs) + "; use kernel_shap");
  }
  const std::uint64_t count = 1ULL << k;
  std::vector<Vector> value(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) value[mask] = coalition_value(target, x, mask);
  const auto h = value[0].size();

  // |S|! (K - |S| - 1)! / K!
  std::vector<double> weight(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) weight[static_cast<std::size_t>(s)] = 1.0 / (k * binomial(k - 1, s));

  ShapValues out;
  out.values = Matrix::Zero(h, k);
  for (int i = 0; i < k; ++i) {
    const std::uint64_t bit = 1ULL << i;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      const double w = weight[static_cast<std::size_t>(std::popcount(mask))];
      out.values.col(i) += w * (value[mask | bit] - value[mask]);
    }
  }
  out.base = value[0];
  out.prediction = predict_one(target, x);
  return out;
}

Vector exact_shapley(const ExplainTarget& target, const Vector& x) {
  return exact_shap(target, x).values.row(0).transpose();
}

double shapley_kernel_weight(int k, int a) {
  if (k < 2 || a < 1 || a > k - 1) {
    throw std::invalid_argument("shapley_kernel_weight: coalition size must be in [1, K-1]");
  }
  return (k - 1.0) / (binomial(k, a) * a * (k - a));
}

std::uint64_t full_coalition_budget(int k) {
  if (k >= 63) return std::numeric_limits<std::uint64_t>::max();
  return (1ULL << k) - 2;
}

namespace {

// All masks with exactly `size` bits among the lowest k.
std::vector<std::uint64_t> masks_of_size(int k, int size) {
  std::vector<std::uint64_t> out;
  if (size == 0) return {0};
  std::uint64_t v = (1ULL << size) - 1;
  const std::uint64_t limit = 1ULL << k;
  while (v < limit) {
    out.push_back(v);
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

std::uint64_t random_mask(int k, int size, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  std::uint64_t mask = 0;
  for (int i = 0; i < size; ++i) {
    std::uniform_int_distribution<int> pick(i, k - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    mask |= 1ULL << idx[static_cast<std::size_t>(i)];
  }
  return mask;
}

}  // namespace

std::vector<Coalition> kernel_coalitions(int k, std::uint64_t budget, Rng& rng) {
  if (k < 2) return {};
  if (k > 62) throw std::invalid_argument("kernel_coalitions: at most 62 inputs supported");
  const std::uint64_t full = full_coalition_budget(k);
  std::vector<Coalition> out;
  if (budget >= full) {
    for (std::uint64_t mask = 1; mask + 1 < (1ULL << k); ++mask) {
      out.push_back({mask, shapley_kernel_weight(k, std::popcount(mask))});
    }
    return out;
  }
  if (budget < static_cast<std::uint64_t>(k) + 2) {
    throw std::invalid_argument("kernel_coalitions: budget must be at least K + 2 (" + std::to_string(k + 2) + ")");
  }

  std::set<std::uint64_t> used;
  std::vector<bool> size_done(static_cast<std::size_t>(k), false);  // index = coalition size
  auto add_class = [&](int s) {
    for (auto mask : masks_of_size(k, s)) {
      out.push_back({mask, shapley_kernel_weight(k, s)});
      used.insert(mask);
    }
    size_done[static_cast<std::size_t>(s)] = true;
  };

  std::uint64_t remaining = budget;
  for (int s = 1; s <= k / 2; ++s) {
    const int partner = k - s;
    const auto cls = static_cast<std::uint64_t>(std::llround(binomial(k, s))) * (partner == s ? 1 : 2);
    if (cls > remaining) break;
    add_class(s);
    if (partner != s) add_class(partner);
    remaining -= cls;
  }
  if (out.empty()) {
    // Budget below one paired class: singletons keep the regression full rank.
    add_class(1);
    remaining -= static_cast<std::uint64_t>(k);
  }

  double open_mass = 0.0;
  std::vector<double> size_mass(static_cast<std::size_t>(k), 0.0);
  for (int s = 1; s < k; ++s) {
    if (size_done[static_cast<std::size_t>(s)]) continue;
    size_mass[static_cast<std::size_t>(s)] = (k - 1.0) / (s * (k - s));
    open_mass += size_mass[static_cast<std::size_t>(s)];
  }
  if (remaining == 0 || open_mass <= 0.0) return out;

  std::discrete_distribution<int> size_dist(size_mass.begin(), size_mass.end());
  std::vector<std::uint64_t> sampled;
  const std::uint64_t all = (1ULL << k) - 1;
  const std::uint64_t max_attempts = 50 * budget + 1000;
  for (std::uint64_t attempt = 0; attempt < max_attempts && remaining > 0; ++attempt) {
    const int s = size_dist(rng);
    const std::uint64_t mask = random_mask(k, s, rng);
    for (std::uint64_t m : {mask, all & ~mask}) {
      if (remaining == 0) break;
      if (size_done[static_cast<std::size_t>(std::popcount(m))]) continue;
      if (!used.insert(m).second) continue;
      sampled.push_back(m);
      --remaining;
    }
  }
  const double w = open_mass / static_cast<double>(std::max<std::size_t>(sampled.size(), 1));
  for (auto m : sampled) out.push_back({m, w});
  return out;
}

ShapValues kernel_shap_values(const ExplainTarget& target, const Vector& x, std::uint64_t budget, Seed seed) {
  target.validate();
  const auto k = static_cast<int>(target.inputs());
  if (x.size() != k) throw std::invalid_argument("kernel_shap: observation length differs from background");
  ShapValues out;
  out.base = background_mean(target);
  out.prediction = predict_one(target, x);
  const auto h = out.base.size();
  const Vector gap = out.prediction - out.base;
  if (k == 1) {
    out.values = gap;
    return out;
  }
  Rng rng = make_rng(seed, 0);
  const auto coalitions = kernel_coalitions(k, budget, rng);
  const auto c = static_cast<Eigen::Index>(coalitions.size());

  // Eliminate the last input: value_K = gap - sum of the others.
  Matrix design(c, k - 1);
  Matrix rhs(c, h);
  Vector sqrt_w(c);
  for (Eigen::Index r = 0; r < c; ++r) {
    const auto mask = coalitions[static_cast<std::size_t>(r)].mask;
    const double last = in_mask(mask, k - 1) ? 1.0 : 0.0;
    for (int i = 0; i < k - 1; ++i) design(r, i) = (in_mask(mask, i) ? 1.0 : 0.0) - last;
    rhs.row(r) = (coalition_value(target, x, mask) - out.base - last * gap).transpose();
    sqrt_w[r] = std::sqrt(coalitions[static_cast<std::size_t>(r)].weight);
  }
  const Matrix wa = sqrt_w.asDiagonal() * design;
  const Matrix wb = sqrt_w.asDiagonal() * rhs;
  Eigen::ColPivHouseholderQR<Matrix> qr(wa);
  qr.setThreshold(1e-10);
  if (qr.rank() < k - 1) {
    std::ostringstream msg;
    msg << "kernel_shap: singular regression (rank " << qr.rank() << " of " << k - 1 << " with "
        << c << " coalitions); increase the budget";
    throw std::runtime_error(msg.str());
  }
  const Matrix sol = qr.solve(wb);  // (K-1) x H
  out.values.resize(h, k);
  out.values.leftCols(k - 1) = sol.transpose();
  out.values.col(k - 1) = gap - sol.transpose().rowwise().sum();
  return out;
}

Vector kernel_shap(const ExplainTarget& target, const Vector& x, std::uint64_t budget, Seed seed) {
  return kernel_shap_values(target, x, budget, seed).values.row(0).transpose();
}

ShapReport scaled_mashap(const ExplainTarget& target, const Matrix& x, std::uint64_t budget, Seed seed) {
  target.validate();
  const auto n = x.rows();
  const auto k = static_cast<int>(target.inputs());
  if (n < 1) throw std::invalid_argument("scaled_mashap: need at least one observation");
  if (x.cols() != k) throw std::invalid_argument("scaled_mashap: observation width differs from background");
  const bool exact = k <= kExactShapleyMaxInputs && budget >= full_coalition_budget(k);

  ShapReport report;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector row = x.row(j).transpose();
    const ShapValues sv = exact ? exact_shap(target, row)
                                : kernel_shap_values(target, row, budget, derive_seed(seed, static_cast<Seed>(j)));
    if (j == 0) {
      report.base = sv.base;
      report.shap.assign(static_cast<std::size_t>(sv.values.rows()), Matrix(n, k));
    }
    for (Eigen::Index o = 0; o < sv.values.rows(); ++o) report.shap[static_cast<std::size_t>(o)].row(j) = sv.values.row(o);
  }
  const auto h = static_cast<Eigen::Index>(report.shap.size());
  report.mashap.resize(h, k);
  for (Eigen::Index o = 0; o < h; ++o) {
    report.mashap.row(o) = report.shap[static_cast<std::size_t>(o)].cwiseAbs().colwise().mean();
  }
  report.scaled = Matrix::Zero(h, k);
  report.average = Vector::Zero(k);
  Eigen::Index included = 0;
  for (Eigen::Index o = 0; o < h; ++o) {
    const double total = report.mashap.row(o).sum();
    if (!(total > 0.0)) {
      report.zero_rows.push_back(static_cast<int>(o));
      continue;
    }
    report.scaled.row(o) = report.mashap.row(o) / total;
    report.average += report.scaled.row(o).transpose();
    ++included;
  }
  if (included > 0) report.average /= static_cast<double>(included);
  return report;
}

std::vector<int> order_by_average(const ShapReport& report) {
  std::vector<int> order(static_cast<std::size_t>(report.average.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return report.average(a) > report.average(b); });
  return order;
}

std::string shap_report_csv(const ShapReport& report, const std::vector<std::string>& output_names,
                            const std::vector<std::string>& input_names, const std::vector<int>& column_order) {
  const auto h = report.scaled.rows();
  const auto k = report.scaled.cols();
  if (static_cast<Eigen::Index>(output_names.size()) != h || static_cast<Eigen::Index>(input_names.size()) != k) {
    throw std::invalid_argument("shap_report_csv: names do not match the report shape");
  }
  std::vector<int> order = column_order;
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
  }
  std::ostringstream out;
  out << "output";
  for (int c : order) out << ',' << input_names[static_cast<std::size_t>(c)];
  out << '\n';
  for (Eigen::Index o = 0; o < h; ++o) {
    out << output_names[static_cast<std::size_t>(o)];
    for (int c : order) out << ',' << csv::format(report.scaled(o, c));
    out << '\n';
  }
  out << "Average";
  for (int c : order) out << ',' << csv::format(report.average(c));
  out << '\n';
  return out.str();
}

std::vector<Eigen::Index> select_background_indices(const Matrix& locations, Eigen::Index count) {
  const auto n = locations.rows();
  if (locations.cols() != 2) throw std::invalid_argument("select_background: locations must be n x 2");
  if (count < 0 || count > n) throw std::invalid_argument("select_background: count must be in [0, n]");
  std::vector<Eigen::Index> chosen;
  if (count == 0) return chosen;
  const Eigen::RowVector2d lo = locations.colwise().minCoeff();
  const Eigen::RowVector2d hi = locations.colwise().maxCoeff();
  const Eigen::RowVector2d centre = 0.5 * (lo + hi);
  Eigen::Index first = 0;
  (locations.rowwise() - centre).rowwise().squaredNorm().minCoeff(&first);
  chosen.push_back(first);

  std::vector<double> min_dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  taken[static_cast<std::size_t>(first)] = 1;
  Eigen::Index last = first;
  while (static_cast<Eigen::Index>(chosen.size()) < count) {
    Eigen::Index best = -1;
    double best_d = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      auto& md = min_dist[static_cast<std::size_t>(i)];
      md = std::min(md, (locations.row(i) - locations.row(last)).squaredNorm());
      if (md > best_d) {
        best_d = md;
        best = i;
      }
    }
    chosen.push_back(best);
    taken[static_cast<std::size_t>(best)] = 1;
    last = best;
  }
  return chosen;
}

Matrix select_background(const Matrix& locations, const Matrix& x, Eigen::Index count) {
  if (x.rows() != locations.rows()) throw std::invalid_argument("select_background: row counts differ");
  const auto idx = select_background_indices(locations, count);
  Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  return out;
}

}  // namespace sivae
