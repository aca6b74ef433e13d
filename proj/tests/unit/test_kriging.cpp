#include "games.hpp"
#include "oracles.hpp"

#include "sivae/kriging.hpp"
#include "sivae/random_fields.hpp"

#include <doctest.h>

#include <cmath>

using namespace sivae;

namespace {

std::vector<VariogramBin> model_bins(const VariogramModel& m, int count, double max_lag) {
  std::vector<VariogramBin> bins;
  for (int k = 1; k <= count; ++k) {
    const double h = max_lag * k / count;
    bins.push_back({h, m.gamma(h), 100});
  }
  return bins;
}

}  // namespace

TEST_SUITE("kriging") {
  TEST_CASE("variogram families at the origin and far away") {
    for (auto fam : {VariogramFamily::exponential, VariogramFamily::spherical, VariogramFamily::matern}) {
      const VariogramModel m{fam, 2.0, 10.0, 0.3, 1.5};
      CHECK(m.gamma(0.0) == 0.0);
      CHECK(m.covariance(0.0) == doctest::Approx(2.3));
      CHECK(m.gamma(1e-9) >= 0.3);
      CHECK(m.gamma(1e4) == doctest::Approx(2.3).epsilon(1e-9));
      CHECK(variogram_family_from_string(to_string(fam)) == fam);
    }
    const VariogramModel sph{VariogramFamily::spherical, 1.0, 10.0, 0.0};
    CHECK(sph.gamma(5.0) == doctest::Approx(1.5 * 0.5 - 0.5 * 0.125));
    CHECK(sph.gamma(10.0) == 1.0);
    CHECK_THROWS_AS((VariogramModel{VariogramFamily::exponential, 0.0, 1.0, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(variogram_family_from_string("gaussian"), std::invalid_argument);
  }

  TEST_CASE("Matheron estimator on a tiny configuration") {
    Matrix loc(3, 2);
    loc << 0, 0, 1, 0, 0, 3;
    Vector v(3);
    v << 1.0, 3.0, 0.0;
    const auto bins = empirical_variogram(loc, v, 2, 4.0);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].lag == 1.0);
    CHECK(bins[0].gamma == 2.0);
    CHECK(bins[0].count == 1);
    CHECK(bins[1].lag == doctest::Approx((3.0 + std::sqrt(10.0)) / 2.0));
    CHECK(bins[1].gamma == doctest::Approx((1.0 + 9.0) / 4.0));
    CHECK_THROWS_AS(empirical_variogram(loc, v, 2, 0.5), std::invalid_argument);
  }

  TEST_CASE("fitting noise-free bins recovers the model") {
    const VariogramModel exp_model{VariogramFamily::exponential, 1.7, 12.0, 0.2};
    auto fit = fit_variogram(model_bins(exp_model, 15, 50.0), VariogramFamily::exponential);
    CHECK(fit.model.range == doctest::Approx(12.0).epsilon(1e-6));
    CHECK(fit.model.sill == doctest::Approx(1.7).epsilon(1e-6));
    CHECK(fit.model.nugget == doctest::Approx(0.2).epsilon(1e-5));
    CHECK(fit.converged);

    const VariogramModel sph{VariogramFamily::spherical, 0.9, 30.0, 0.0};
    fit = select_variogram(model_bins(sph, 15, 50.0));
    CHECK(fit.model.family == VariogramFamily::spherical);
    CHECK(fit.model.range == doctest::Approx(30.0).epsilon(1e-5));

    const VariogramModel mat{VariogramFamily::matern, 1.0, 8.0, 0.0, 1.5};
    fit = fit_variogram(model_bins(mat, 15, 50.0), VariogramFamily::matern);
    CHECK(fit.model.nu == 1.5);
    CHECK(fit.model.range == doctest::Approx(8.0).epsilon(1e-5));
    CHECK(fit.sse < 1e-12);
  }

  TEST_CASE("empirical variogram of a simulated field is near its model") {
    const Matrix loc = sample_uniform_locations(800, {}, 31);
    Vector mean_gamma;
    const int reps = 5;
    std::vector<VariogramBin> first;
    for (int r = 0; r < reps; ++r) {
      const Vector z = sample_grf(loc, [](const Point& a, const Point& b) {
        return 2.0 * matern_correlation((a - b).norm(), {0.5, 10.0});
      }, 40 + static_cast<Seed>(r));
      const auto bins = empirical_variogram(loc, z, 10, 30.0);
      if (r == 0) {
        first = bins;
        mean_gamma = Vector::Zero(static_cast<Eigen::Index>(bins.size()));
      }
      for (std::size_t k = 0; k < bins.size(); ++k) mean_gamma[static_cast<Eigen::Index>(k)] += bins[k].gamma / reps;
    }
    const VariogramModel truth{VariogramFamily::exponential, 2.0, 10.0, 0.0};
    for (std::size_t k = 0; k < first.size(); ++k) {
      INFO("lag " << first[k].lag);
      CHECK(std::abs(mean_gamma[static_cast<Eigen::Index>(k)] - truth.gamma(first[k].lag)) < 0.35);
    }
  }

  TEST_CASE("ordinary kriging weights sum to one; universal kriging reproduces the drift") {
    const Matrix loc = sample_uniform_locations(120, {}, 5);
    const VariogramModel m{VariogramFamily::exponential, 1.0, 15.0, 0.1};
    const Matrix targets = sample_uniform_locations(20, {}, 6);
    for (Eigen::Index t = 0; t < targets.rows(); ++t) {
      const Point p = targets.row(t).transpose();
      const auto ok = kriging_weights(loc, p, m, KrigingKind::ordinary, 30);
      CHECK(std::abs(ok.weights.sum() - 1.0) < 1e-10);
      CHECK(ok.multipliers.size() == 1);
      const auto uk = kriging_weights(loc, p, m, KrigingKind::universal, 30);
      CHECK(std::abs(uk.weights.sum() - 1.0) < 1e-10);
      double wx = 0.0, wy = 0.0;
      for (std::size_t i = 0; i < uk.neighbours.size(); ++i) {
        wx += uk.weights[static_cast<Eigen::Index>(i)] * loc(uk.neighbours[i], 0);
        wy += uk.weights[static_cast<Eigen::Index>(i)] * loc(uk.neighbours[i], 1);
      }
      CHECK(std::abs(wx - p.x()) < 1e-8);
      CHECK(std::abs(wy - p.y()) < 1e-8);
    }
  }

  TEST_CASE("kriging with zero nugget interpolates the training values") {
    const Matrix loc = sample_uniform_locations(200, {}, 7);
    const Vector z = testing::random_normal(200, 1, 8).col(0);
    for (auto fam : {VariogramFamily::exponential, VariogramFamily::spherical, VariogramFamily::matern}) {
      const VariogramModel m{fam, 1.3, 20.0, 0.0, 1.0};
      for (auto kind : {KrigingKind::ordinary, KrigingKind::universal}) {
        const Vector pred = krige(loc, z, loc, m, kind, 25);
        CHECK((pred - z).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }

  TEST_CASE("global kriging matches the dense reference solver") {
    const Matrix loc = sample_uniform_locations(15, {}, 9);
    const Vector z = testing::random_normal(15, 1, 10).col(0);
    const Matrix targets = sample_uniform_locations(10, {}, 11);
    for (const VariogramModel& m : {VariogramModel{VariogramFamily::exponential, 1.0, 25.0, 0.05},
                                    VariogramModel{VariogramFamily::spherical, 2.0, 60.0, 0.0},
                                    VariogramModel{VariogramFamily::matern, 0.7, 10.0, 0.1, 1.5}}) {
      for (auto kind : {KrigingKind::ordinary, KrigingKind::universal}) {
        const Vector pred = krige(loc, z, targets, m, kind, 15);
        for (Eigen::Index t = 0; t < targets.rows(); ++t) {
          const double ref = testing::kriging_reference(loc, z, targets.row(t).transpose(), m, kind == KrigingKind::universal);
          CHECK(std::abs(pred[t] - ref) < 1e-10);
        }
      }
    }
  }

  TEST_CASE("duplicate sites fall back to jitter, impossible requests are rejected") {
    Matrix loc(4, 2);
    loc << 0, 0, 0, 0, 5, 5, 10, 0;
    Vector z(4);
    z << 1, 1, 2, 3;
    const VariogramModel m{VariogramFamily::exponential, 1.0, 5.0, 0.0};
    Matrix target(1, 2);
    target << 2, 2;
    CHECK(std::isfinite(krige(loc, z, target, m, KrigingKind::ordinary, 4)[0]));
    CHECK_THROWS_AS(krige(loc, z, target, m, KrigingKind::ordinary, 5), std::invalid_argument);
    CHECK_THROWS_AS(krige(loc, z, target, m, KrigingKind::universal, 2), std::invalid_argument);
    CHECK_THROWS_AS(kriging_kind_from_string("simple"), std::invalid_argument);
  }
}
