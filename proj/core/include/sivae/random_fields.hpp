#pragma once

#include "sivae/rng.hpp"
#include "sivae/types.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sivae {

struct Domain2D {
  double x_min = 0.0;
  double x_max = 100.0;
  double y_min = 0.0;
  double y_max = 100.0;

  void validate() const;
  bool contains(const Point& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  Point center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  double diagonal() const;
};

/// Stationary Matern shape (nu) and range (phi).
struct MaternParams {
  double nu = 0.5;
  double phi = 1.0;
};

/// Location-dependent parameter functions of the nonstationary Matern model:
///   sigma(s) = log(1.1 + s.d / alpha)
///   nu(s)    = (s.d)^(1/5) / alpha + 0.1
///   phi(s)   = s.d / alpha + c
struct NonstatParamFn {
  enum class Kind { sigma, nu, phi };

  Kind kind = Kind::sigma;
  Point d{1.0, 1.0};
  double alpha = 1.0;
  double c = 0.0;  // only used by phi

  double operator()(const Point& s) const;
  /// Throws if the function is not strictly positive on a dense grid over the domain.
  void check_positive(const Domain2D& domain, int grid = 101) const;
};

struct NonstatMaternFns {
  NonstatParamFn sigma;
  NonstatParamFn nu;
  NonstatParamFn phi;
};

struct ClusterModel {
  std::vector<Point> centers;
  Matrix means;      // k x d
  Matrix variances;  // k x d (diagonal of Sigma_k)
};

/// Locations (n x 2), observations x (n x d, may be empty), ground-truth
/// latents z (n x d, may be empty) and optional 1-based cluster labels.
struct SpatialDataset {
  Matrix locations;
  Matrix x;
  Matrix z;
  std::vector<int> cluster_labels;

  Eigen::Index size() const { return locations.rows(); }
  bool has_x() const { return x.size() > 0; }
  bool has_z() const { return z.size() > 0; }
  void validate() const;
};

Matrix sample_uniform_locations(Eigen::Index n, const Domain2D& domain, Seed seed);

/// 1-based index of the nearest center for every row; ties go to the lowest index.
std::vector<int> assign_voronoi_clusters(const Matrix& locations, const Matrix& centers);

/// Matern correlation 2^(1-nu)/Gamma(nu) (h/phi)^nu K_nu(h/phi); 1 at h = 0.
double matern_correlation(double h, const MaternParams& p);

/// Nonstationary Matern covariance between two locations; C(s, s) = sigma(s)^2.
double nonstat_matern_covariance(const Point& s, const Point& s_prime, const NonstatMaternFns& fns);

using CovarianceFn = std::function<double(const Point&, const Point&)>;

/// Dense covariance matrix over the rows of `locations`; exactly symmetric.
Matrix covariance_matrix(const Matrix& locations, const CovarianceFn& cov);

class CholeskyError : public std::runtime_error {
 public:
  CholeskyError(const std::string& what, double jitter)
      : std::runtime_error(what), jitter_(jitter) {}
  double jitter() const { return jitter_; }

 private:
  double jitter_;
};

struct JitterLadder {
  double start = 1e-10;   // relative to tr(C)/n
  double stop = 1e-4;
  double factor = 10.0;
};

/// Lower Cholesky factor of C + jitter*I, escalating jitter along the ladder.
struct CholeskyResult {
  Matrix lower;
  double jitter = 0.0;  // absolute jitter that succeeded
};
CholeskyResult jittered_cholesky(const Matrix& cov, const JitterLadder& ladder = {});

/// One realization z = L eps of a zero-mean Gaussian field with covariance `cov`.
Vector sample_grf(const Matrix& locations, const CovarianceFn& cov, Seed seed,
                  const JitterLadder& ladder = {});

/// Draws from a precomputed factor; `replications` columns.
Matrix sample_grf_from_factor(const Matrix& lower, Eigen::Index replications, Rng& rng);

/// Settings 1-6 parameter tables.
std::vector<MaternParams> setting_matern_params(int setting);
std::vector<NonstatMaternFns> setting6_param_fns();

struct SettingOptions {
  Domain2D domain{};
  int clusters = 10;
  int dim = 3;
};

/// Latent fields for simulation settings 1..6 (x left empty).
SpatialDataset generate_setting(int id, Eigen::Index n, Seed seed, const SettingOptions& opts = {});

/// Setting-3 style latents for an arbitrary dimension: independent per-cluster
/// Matern fields with nu ~ U(0.1, 5), phi ~ U(0.5, 8).
Matrix per_cluster_matern_latents(const Matrix& locations, const std::vector<int>& labels,
                                  int clusters, int dim, Seed seed);

}  // namespace sivae
