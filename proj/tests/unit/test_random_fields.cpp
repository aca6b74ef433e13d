#include "oracles.hpp"

#include "sivae/random_fields.hpp"

#include <doctest.h>

#include <cmath>

using namespace sivae;

namespace {

NonstatMaternFns constant_fns(double phi0) {
  using K = NonstatParamFn::Kind;
  // d = 0 makes every function constant: sigma = log(1.1), nu = 0.1, phi = c.
  return {{K::sigma, {0, 0}, 1.0, 0.0}, {K::nu, {0, 0}, 1.0, 0.0}, {K::phi, {0, 0}, 1.0, phi0}};
}

}  // namespace

TEST_SUITE("random_fields") {
  TEST_CASE("uniform locations stay inside the domain and are reproducible") {
    const Matrix one = sample_uniform_locations(1, {0, 1, 0, 1}, 5);
    CHECK(one.rows() == 1);
    CHECK(one(0, 0) >= 0.0);
    CHECK(one(0, 0) <= 1.0);
    CHECK(one(0, 1) >= 0.0);
    CHECK(one(0, 1) <= 1.0);

    const Matrix a = sample_uniform_locations(5000, {}, 11);
    const Matrix b = sample_uniform_locations(5000, {}, 11);
    CHECK(a == b);
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 100.0);
  }

  TEST_CASE("coordinate means of many uniform locations approach the centre") {
    const Matrix a = sample_uniform_locations(100000, {}, 3);
    CHECK(std::abs(a.col(0).mean() - 50.0) < 0.5);
    CHECK(std::abs(a.col(1).mean() - 50.0) < 0.5);
  }

  TEST_CASE("invalid domains are rejected with an explanation") {
    CHECK_THROWS_WITH_AS(sample_uniform_locations(3, {1, 0, 0, 1}, 0), doctest::Contains("x_min < x_max"),
                         std::invalid_argument);
  }

  TEST_CASE("Voronoi labels match an exhaustive scan") {
    const Matrix loc = sample_uniform_locations(100, {}, 21);
    const Matrix centers = sample_uniform_locations(10, {}, 22);
    CHECK(assign_voronoi_clusters(loc, centers) == testing::nearest_center_scan(loc, centers));

    Matrix single(1, 2);
    single << 40, 40;
    for (int l : assign_voronoi_clusters(loc, single)) CHECK(l == 1);

    Matrix on_center = centers.row(6);
    CHECK(assign_voronoi_clusters(on_center, centers)[0] == 7);
  }

  TEST_CASE("Voronoi ties go to the lowest center index") {
    Matrix centers(2, 2);
    centers << 0, 0, 2, 0;
    Matrix mid(1, 2);
    mid << 1, 5;
    CHECK(assign_voronoi_clusters(mid, centers)[0] == 1);
  }

  TEST_CASE("Matern correlation values") {
    CHECK(matern_correlation(0.0, {2.3, 4.0}) == 1.0);
    CHECK(matern_correlation(2.0, {0.5, 2.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(std::abs(matern_correlation(1.0, {1.5, 1.0}) - testing::matern_reference(1.0, 1.5, 1.0)) < 1e-10);
    for (double nu : {0.1, 0.2, 0.7, 2.0, 4.9, 6.0}) {
      for (double h : {0.01, 0.5, 3.0, 17.0, 60.0}) {
        INFO("nu=" << nu << " h=" << h);
        CHECK(std::abs(matern_correlation(h, {nu, 5.0}) - testing::matern_reference(h, nu, 5.0)) < 1e-10);
      }
    }
  }

  TEST_CASE("Matern correlation with nu = 1/2 is exponential") {
    for (int i = 0; i <= 500; ++i) {
      const double h = 0.2 * i;
      CHECK(std::abs(matern_correlation(h, {0.5, 10.0}) - std::exp(-h / 10.0)) < 1e-10);
    }
  }

  TEST_CASE("Matern correlation is nonincreasing in distance") {
    for (const MaternParams p : {MaternParams{0.1, 0.5}, MaternParams{0.5, 15}, MaternParams{2, 20},
                                 MaternParams{6, 2}, MaternParams{4.9, 8}}) {
      double prev = 1.0;
      for (int i = 1; i <= 1000; ++i) {
        const double v = matern_correlation(0.1 * i, p);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        prev = v;
      }
    }
  }

  TEST_CASE("Matern correlation rejects nonpositive parameters") {
    CHECK_THROWS_AS(matern_correlation(1.0, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(matern_correlation(1.0, {1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(matern_correlation(-1.0, {1.0, 1.0}), std::invalid_argument);
  }

  TEST_CASE("nonstationary covariance: diagonal, symmetry, constant reduction") {
    const auto fns = setting6_param_fns();
    const Matrix pts = sample_uniform_locations(100, {}, 8);
    for (const auto& f : fns) {
      for (Eigen::Index i = 0; i < 20; ++i) {
        const Point s = pts.row(i).transpose();
        const double var = f.sigma(s) * f.sigma(s);
        CHECK(nonstat_matern_covariance(s, s, f) == doctest::Approx(var).epsilon(1e-12));
        const Point t = pts.row(i + 50).transpose();
        const double cst = nonstat_matern_covariance(s, t, f);
        CHECK(cst == nonstat_matern_covariance(t, s, f));
        CHECK(std::abs(cst) <= f.sigma(s) * f.sigma(t) * (1.0 + 1e-12));
      }
    }
    // With constant functions the construction is stationary Matern with range phi0 / (2 sqrt(nu0)).
    const double phi0 = 7.0;
    const auto c = constant_fns(phi0);
    const double sigma0 = std::log(1.1), nu0 = 0.1;
    for (Eigen::Index i = 0; i < 100; ++i) {
      const Point s = pts.row(i).transpose();
      const Point t = pts.row((i * 37 + 11) % 100).transpose();
      const double h = (s - t).norm();
      const double expected = sigma0 * sigma0 * matern_correlation(h, {nu0, phi0 / (2.0 * std::sqrt(nu0))});
      CHECK(nonstat_matern_covariance(s, t, c) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("nonstationary covariance rejects nonpositive parameters") {
    using K = NonstatParamFn::Kind;
    NonstatMaternFns bad{{K::sigma, {0, 0}, 1.0, 0.0}, {K::nu, {0, 0}, 1.0, 0.0}, {K::phi, {0, 0}, 1.0, -1.0}};
    CHECK_THROWS_AS(nonstat_matern_covariance({1, 1}, {2, 2}, bad), std::invalid_argument);
    CHECK_THROWS_AS(bad.phi.check_positive({}), std::invalid_argument);
  }

  TEST_CASE("Setting 6 parameter functions are positive on the domain") {
    for (const auto& f : setting6_param_fns()) {
      CHECK_NOTHROW(f.sigma.check_positive({}));
      CHECK_NOTHROW(f.nu.check_positive({}));
      CHECK_NOTHROW(f.phi.check_positive({}));
    }
  }

  TEST_CASE("covariance matrices are exactly symmetric") {
    const Matrix loc = sample_uniform_locations(200, {}, 4);
    const auto f = setting6_param_fns()[1];
    const Matrix c = covariance_matrix(loc, [&](const Point& a, const Point& b) { return nonstat_matern_covariance(a, b, f); });
    CHECK((c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("GRF sampling: scalar case, identity covariance and determinism") {
    Matrix one(1, 2);
    one << 3, 4;
    const Vector v = sample_grf(one, [](const Point&, const Point&) { return 1.0; }, 9);
    CHECK(v.size() == 1);
    CHECK(std::isfinite(v[0]));

    const Matrix loc = sample_uniform_locations(10000, {}, 1);
    const Matrix eye_lower = Matrix::Identity(10000, 10000);
    Rng rng = make_rng(2, 0);
    const Vector draw = sample_grf_from_factor(eye_lower, 1, rng).col(0);
    const double var = (draw.array() - draw.mean()).square().sum() / (draw.size() - 1);
    CHECK(std::abs(var - 1.0) < 0.05);

    const Matrix small = sample_uniform_locations(50, {}, 2);
    auto cov = [](const Point& a, const Point& b) { return matern_correlation((a - b).norm(), {0.5, 10}); };
    CHECK(sample_grf(small, cov, 17) == sample_grf(small, cov, 17));
    CHECK(sample_grf(small, cov, 17) != sample_grf(small, cov, 18));
  }

  TEST_CASE("jitter ladder escalates and reports failure") {
    Matrix singular = Matrix::Ones(4, 4);  // rank one
    const auto res = jittered_cholesky(singular);
    CHECK(res.jitter > 0.0);
    const Matrix rebuilt = res.lower * res.lower.transpose();
    CHECK((rebuilt - singular - res.jitter * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    Matrix indefinite = Matrix::Identity(3, 3);
    indefinite(2, 2) = -1.0;
    CHECK_THROWS_AS(jittered_cholesky(indefinite), CholeskyError);
    try {
      jittered_cholesky(indefinite);
    } catch (const CholeskyError& e) {
      CHECK(e.jitter() == doctest::Approx(1e-4 / 3.0));
    }
  }

  TEST_CASE("generate_setting is reproducible and validates its id") {
    const auto a = generate_setting(1, 500, 4);
    const auto b = generate_setting(1, 500, 4);
    CHECK(a.z == b.z);
    CHECK(a.locations == b.locations);
    CHECK(a.cluster_labels == b.cluster_labels);
    CHECK_FALSE(a.has_x());
    CHECK_THROWS_AS(generate_setting(7, 10, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_setting(0, 10, 0), std::invalid_argument);
  }

  TEST_CASE("Setting 1 clusters have zero means and variances in [0.1, 5]") {
    const auto ds = generate_setting(1, 20000, 12);
    REQUIRE(ds.cluster_labels.size() == 20000);
    for (int k = 1; k <= 10; ++k) {
      for (int j = 0; j < 3; ++j) {
        double s = 0, ss = 0;
        int cnt = 0;
        for (Eigen::Index i = 0; i < ds.size(); ++i) {
          if (ds.cluster_labels[static_cast<std::size_t>(i)] != k) continue;
          s += ds.z(i, j);
          ss += ds.z(i, j) * ds.z(i, j);
          ++cnt;
        }
        REQUIRE(cnt > 30);
        const double mean = s / cnt;
        const double var = ss / cnt - mean * mean;
        const double se_mean = std::sqrt(var / cnt);
        const double se_var = var * std::sqrt(2.0 / cnt);
        INFO("cluster " << k << " component " << j << " mean " << mean << " var " << var);
        CHECK(std::abs(mean) <= 4.0 * se_mean);
        CHECK(var >= 0.1 - 4.0 * se_var);
        CHECK(var <= 5.0 + 4.0 * se_var);
      }
    }
  }

  TEST_CASE("Setting 2 clusters have means in [-5, 5]") {
    const auto ds = generate_setting(2, 20000, 13);
    bool any_far = false;
    for (int k = 1; k <= 10; ++k) {
      double s = 0;
      int cnt = 0;
      for (Eigen::Index i = 0; i < ds.size(); ++i) {
        if (ds.cluster_labels[static_cast<std::size_t>(i)] == k) {
          s += ds.z(i, 0);
          ++cnt;
        }
      }
      const double mean = s / cnt;
      CHECK(std::abs(mean) <= 5.0 + 4.0 * std::sqrt(5.0 / cnt));
      any_far = any_far || std::abs(mean) > 1.0;
    }
    CHECK(any_far);
  }

  TEST_CASE("Setting 4 first component follows Matern(0.5, 15)") {
    // Binned empirical correlogram over several independent realizations.
    const int reps = 30;
    const double width = 2.0;
    const int bins = 10;
    std::vector<double> num(bins, 0.0), cnt(bins, 0.0);
    for (int r = 0; r < reps; ++r) {
      const auto ds = generate_setting(4, 400, 100 + static_cast<Seed>(r));
      const Vector z = ds.z.col(0);
      for (Eigen::Index i = 0; i < ds.size(); ++i) {
        for (Eigen::Index j = i + 1; j < ds.size(); ++j) {
          const double h = (ds.locations.row(i) - ds.locations.row(j)).norm();
          const int b = static_cast<int>(h / width);
          if (b >= bins) continue;
          num[static_cast<std::size_t>(b)] += z[i] * z[j];
          cnt[static_cast<std::size_t>(b)] += 1.0;
        }
      }
    }
    for (int b = 0; b < bins; ++b) {
      const double h = (b + 0.5) * width;
      const double emp = num[static_cast<std::size_t>(b)] / cnt[static_cast<std::size_t>(b)];
      INFO("lag " << h << " empirical " << emp);
      CHECK(std::abs(emp - matern_correlation(h, {0.5, 15.0})) < 0.12);
    }
  }

  TEST_CASE("Setting 3 and 6 fields are finite and reproducible") {
    for (int id : {3, 5, 6}) {
      const auto a = generate_setting(id, 300, 2);
      CHECK(a.z.allFinite());
      CHECK(a.z == generate_setting(id, 300, 2).z);
    }
  }

  TEST_CASE("Setting 6 covariance factorizes with small jitter") {
    const Matrix loc = sample_uniform_locations(1500, {}, 5);
    for (const auto& f : setting6_param_fns()) {
      const Matrix c = covariance_matrix(loc, [&](const Point& a, const Point& b) { return nonstat_matern_covariance(a, b, f); });
      const auto res = jittered_cholesky(c);
      CHECK(res.jitter <= 1e-6 * c.trace() / static_cast<double>(c.rows()) + 1e-300);
    }
  }
}

TEST_SUITE("slow") {
  TEST_CASE("Setting 6 covariance factorizes with small jitter at n = 5000") {
    const Matrix loc = sample_uniform_locations(5000, {}, 6);
    for (const auto& f : setting6_param_fns()) {
      const Matrix c = covariance_matrix(loc, [&](const Point& a, const Point& b) { return nonstat_matern_covariance(a, b, f); });
      const auto res = jittered_cholesky(c);
      CHECK(res.jitter <= 1e-6 * c.trace() / static_cast<double>(c.rows()));
    }
  }
}
