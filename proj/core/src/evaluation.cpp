#include "sivae/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sivae {

Matrix correlation_matrix(const Matrix& z_hat, const Matrix& z) {
  if (z_hat.rows() != z.rows()) throw std::invalid_argument("correlation_matrix: row counts differ");
  if (z_hat.rows() < 2) throw std::invalid_argument("correlation_matrix: need n >= 2");
  // Plain sequential loops per column: every entry is computed the same way
  // wherever its columns sit, so reordering or negating columns permutes or
  // negates K exactly.
  const auto n = z_hat.rows();
  auto standardize = [n](const Matrix& m, const char* name) {
    Matrix c(n, m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) sum += m(i, j);
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        c(i, j) = m(i, j) - mean;
        ss += c(i, j) * c(i, j);
      }
      const double norm = std::sqrt(ss);
      if (!(norm > 0.0)) {
        throw std::invalid_argument(std::string("correlation_matrix: column ") + std::to_string(j) + " of " +
                                    name + " has zero variance");
      }
      for (Eigen::Index i = 0; i < n; ++i) c(i, j) /= norm;
    }
    return c;
  };
  const Matrix a = standardize(z_hat, "z_hat");
  const Matrix b = standardize(z, "z");
  Matrix k(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double dot = 0.0;
      for (Eigen::Index r = 0; r < n; ++r) dot += a(r, i) * b(r, j);
      k(i, j) = std::clamp(dot, -1.0, 1.0);
    }
  }
  return k;
}

std::vector<int> hungarian_assignment(const Matrix& cost) {
  const auto n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("hungarian_assignment: need a square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; p[j] is the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return row_to_col;
}

namespace {

// Sum of the matched entries in ascending order, so the result depends only on
// the multiset of entries and not on row or column order.
double matched_sum(const Matrix& a, const std::vector<int>& cols, std::vector<double>& scratch) {
  scratch.resize(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) scratch[i] = a(static_cast<Eigen::Index>(i), cols[i]);
  std::sort(scratch.begin(), scratch.end());
  double s = 0.0;
  for (double v : scratch) s += v;
  return s;
}

}  // namespace

double mcc_bruteforce(const Matrix& k) {
  const auto d = static_cast<int>(k.rows());
  if (k.cols() != d || d == 0) throw std::invalid_argument("mcc: need a nonempty square matrix");
  const Matrix a = k.cwiseAbs();
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> scratch;
  double best = -1.0;
  do {
    best = std::max(best, matched_sum(a, perm, scratch));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / d;
}

double mcc_assignment(const Matrix& k) {
  const auto d = static_cast<int>(k.rows());
  if (k.cols() != d || d == 0) throw std::invalid_argument("mcc: need a nonempty square matrix");
  const Matrix a = k.cwiseAbs();
  const auto match = hungarian_assignment((1.0 - a.array()).matrix());
  std::vector<double> scratch;
  return matched_sum(a, match, scratch) / d;
}

double mcc(const Matrix& k) { return k.rows() <= 8 ? mcc_bruteforce(k) : mcc_assignment(k); }

}  // namespace sivae
