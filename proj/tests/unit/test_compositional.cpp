#include "oracles.hpp"

#include "sivae/compositional.hpp"
#include "sivae/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace sivae;

namespace {

Vector random_composition(Eigen::Index d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.01, 100.0);
  Vector p(d);
  for (Eigen::Index i = 0; i < d; ++i) p[i] = u(rng);
  return p;
}

}  // namespace

TEST_SUITE("compositional") {
  TEST_CASE("clr agrees with the definition and sums to zero") {
    Rng rng = make_rng(1, 0);
    for (int t = 0; t < 50; ++t) {
      const Vector p = random_composition(2 + t % 8, rng);
      const Vector c = clr(p);
      CHECK((c - testing::clr_reference(p)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(c.sum()) < 1e-12);
      CHECK((clr(7.5 * p) - c).cwiseAbs().maxCoeff() < 1e-12);  // scale invariance
    }
  }

  TEST_CASE("ilr basis is orthonormal and orthogonal to the ones vector") {
    for (Eigen::Index d = 2; d <= 10; ++d) {
      const Matrix v = ilr_basis(d);
      CHECK(v.rows() == d);
      CHECK(v.cols() == d - 1);
      CHECK((v.transpose() * v - Matrix::Identity(d - 1, d - 1)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((Vector::Ones(d).transpose() * v).cwiseAbs().maxCoeff() < 1e-12);
    }
    const Matrix v3 = ilr_basis(3);
    CHECK(v3(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(v3(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(v3(2, 0) == doctest::Approx(0.0));
  }

  TEST_CASE("ilr is an isometry and ilr_inverse undoes it") {
    Rng rng = make_rng(2, 0);
    for (int t = 0; t < 50; ++t) {
      const Eigen::Index d = 3 + t % 6;
      const Vector a = random_composition(d, rng);
      const Vector b = random_composition(d, rng);
      CHECK(std::abs((ilr(a) - ilr(b)).norm() - (clr(a) - clr(b)).norm()) < 1e-12);
      CHECK((ilr_inverse(ilr(a)) - closure(a)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(ilr_inverse(ilr(a)).sum() - 1.0) < 1e-14);
      CHECK((ilr_to_clr(ilr(a)) - clr(a)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("row-wise transforms match the vector forms") {
    Rng rng = make_rng(3, 0);
    Matrix parts(20, 5);
    for (Eigen::Index i = 0; i < 20; ++i) parts.row(i) = random_composition(5, rng).transpose();
    const Matrix coords = ilr_rows(parts);
    const Matrix clrs = clr_rows(parts);
    const Matrix back = ilr_inverse_rows(coords);
    for (Eigen::Index i = 0; i < 20; ++i) {
      const Vector p = parts.row(i).transpose();
      CHECK((coords.row(i).transpose() - ilr(p)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((clrs.row(i).transpose() - clr(p)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((back.row(i).transpose() - closure(p)).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK((ilr_to_clr_rows(coords) - clrs).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("nonpositive parts are rejected") {
    Vector p(3);
    p << 1.0, 0.0, 2.0;
    CHECK_THROWS_AS(clr(p), std::invalid_argument);
    p[1] = -1.0;
    CHECK_THROWS_AS(ilr(p), std::invalid_argument);
    p[1] = std::nan("");
    CHECK_THROWS_AS(clr(p), std::invalid_argument);
  }

  TEST_CASE("concentration tables are read with element selection and errors") {
    const auto dir = std::filesystem::temp_directory_path() / "sivae_comp_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "gemas.csv").string();
    {
      std::ofstream out(path);
      out << "id,sx,sy,Al,Ca,Fe\n1,0.5,1.5,10,20,30\n2,2,3,1.5,2.5,3.5\n";
    }
    auto table = read_concentrations(path, "sx", "sy");
    CHECK(table.elements == std::vector<std::string>{"id", "Al", "Ca", "Fe"});
    table = read_concentrations(path, "sx", "sy", {"Fe", "Al"});
    CHECK(table.elements == std::vector<std::string>{"Fe", "Al"});
    CHECK(table.parts(1, 0) == 3.5);
    CHECK(table.locations(0, 1) == 1.5);
    {
      std::ofstream out(path);
      out << "sx,sy,Al,Ca\n0,0,1,2\n1,1,0,2\n";
    }
    CHECK_THROWS_WITH_AS(read_concentrations(path), doctest::Contains("Al"), std::invalid_argument);
    CHECK_THROWS_AS(read_concentrations(path, "x", "y"), std::invalid_argument);
    std::filesystem::remove_all(dir);
  }
}
