#include "games.hpp"
#include "oracles.hpp"

#include "sivae/evaluation.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace sivae;

namespace {

Matrix random_uniform_matrix(Eigen::Index d, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix k(d, d);
  for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] = u(rng);
  return k;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("correlation matrix agrees with the textbook formula") {
    const Matrix a = testing::random_normal(500, 4, 1);
    Matrix b = testing::random_normal(500, 4, 2);
    b.col(1) += 2.0 * a.col(3);
    const Matrix k = correlation_matrix(a, b);
    CHECK((k - testing::pearson_textbook(a, b)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(k.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(correlation_matrix(a, a).diagonal().isApprox(Vector::Ones(4), 1e-14));
  }

  TEST_CASE("zero-variance columns are named") {
    Matrix a = testing::random_normal(10, 2, 3);
    a.col(1).setConstant(4.0);
    CHECK_THROWS_WITH_AS(correlation_matrix(a, a), doctest::Contains("column 1"), std::invalid_argument);
    CHECK_THROWS_AS(correlation_matrix(a, Matrix(9, 2)), std::invalid_argument);
  }

  TEST_CASE("assignment matches brute force and the permutation oracle") {
    Rng rng = make_rng(11, 0);
    for (int t = 0; t < 300; ++t) {
      const Eigen::Index d = 1 + t % 6;
      const Matrix k = random_uniform_matrix(d, rng);
      const double expected = testing::mcc_all_permutations(k);
      CHECK(mcc_bruteforce(k) == doctest::Approx(expected).epsilon(1e-14));
      CHECK(mcc_assignment(k) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("Hungarian assignment is a permutation of minimal cost") {
    Matrix cost(3, 3);
    cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    const auto p = hungarian_assignment(cost);
    CHECK(p == std::vector<int>{1, 0, 2});
    Rng rng = make_rng(3, 3);
    const Matrix big = random_uniform_matrix(12, rng).cwiseAbs();
    auto q = hungarian_assignment(big);
    std::sort(q.begin(), q.end());
    std::vector<int> ids(12);
    std::iota(ids.begin(), ids.end(), 0);
    CHECK(q == ids);
  }

  TEST_CASE("MCC is invariant to permutation and sign of the estimate") {
    const Matrix z = testing::random_normal(400, 5, 4);
    Matrix z_hat = z + 0.7 * testing::random_normal(400, 5, 5);
    const double base = mcc(z_hat, z);
    Matrix shuffled(400, 5);
    const int perm[5] = {3, 0, 4, 1, 2};
    for (int j = 0; j < 5; ++j) shuffled.col(j) = (j % 2 ? -1.0 : 1.0) * z_hat.col(perm[j]);
    CHECK(mcc(shuffled, z) == base);
    CHECK(mcc(z, z) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("MCC of independent noise is small and estimates are scale free") {
    const Matrix z = testing::random_normal(20000, 3, 6);
    const Matrix noise = testing::random_normal(20000, 3, 7);
    CHECK(mcc(noise, z) < 0.05);
    CHECK(mcc(3.0 * z + Matrix::Constant(20000, 3, 1.5), z) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("larger problems use the assignment solver") {
    Rng rng = make_rng(12, 0);
    const Matrix k = random_uniform_matrix(10, rng);
    CHECK(mcc(k) == mcc_assignment(k));
    CHECK(mcc(k) >= k.diagonal().cwiseAbs().mean() - 1e-15);
  }
}
