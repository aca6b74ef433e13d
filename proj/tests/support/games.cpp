#include "games.hpp"

#include <memory>

namespace sivae::testing {

Matrix random_normal(Eigen::Index rows, Eigen::Index cols, Seed seed) {
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

BatchFn random_mlp_game(int k, int h, Seed seed, int hidden) {
  auto w1 = std::make_shared<Matrix>(random_normal(hidden, k, derive_seed(seed, 1)));
  auto b1 = std::make_shared<Vector>(random_normal(hidden, 1, derive_seed(seed, 2)));
  auto w2 = std::make_shared<Matrix>(random_normal(h, hidden, derive_seed(seed, 3)));
  return [w1, b1, w2](const Matrix& rows) -> Matrix {
    Matrix a = (*w1) * rows.transpose();
    a.colwise() += *b1;
    a = a.array().tanh().matrix();
    return (*w2 * a).transpose();
  };
}

BatchFn linear_game(const Matrix& b) {
  return [b](const Matrix& rows) -> Matrix { return rows * b.transpose(); };
}

}  // namespace sivae::testing
