#include "sivae/random_fields.hpp"

#include "sivae/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sivae {

void Domain2D::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    std::ostringstream msg;
    msg << "invalid domain [" << x_min << ", " << x_max << "] x [" << y_min << ", " << y_max
        << "]: need x_min < x_max and y_min < y_max";
    throw std::invalid_argument(msg.str());
  }
}

double Domain2D::diagonal() const { return std::hypot(x_max - x_min, y_max - y_min); }

double NonstatParamFn::operator()(const Point& s) const {
  const double proj = s.dot(d);
  switch (kind) {
    case Kind::sigma:
      return std::log(1.1 + proj / alpha);
    case Kind::nu:
      return std::pow(std::max(proj, 0.0), 0.2) / alpha + 0.1;
    case Kind::phi:
      return proj / alpha + c;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void NonstatParamFn::check_positive(const Domain2D& domain, int grid) const {
  domain.validate();
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Point s{domain.x_min + (domain.x_max - domain.x_min) * i / (grid - 1),
                    domain.y_min + (domain.y_max - domain.y_min) * j / (grid - 1)};
      const double v = (*this)(s);
      if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "nonstationary parameter function is not positive at (" << s.x() << ", " << s.y()
            << "): " << v;
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

void SpatialDataset::validate() const {
  const auto n = locations.rows();
  if (n < 1) throw std::invalid_argument("dataset has no rows");
  if (locations.cols() != 2) throw std::invalid_argument("locations must have two columns");
  if (has_x() && x.rows() != n) throw std::invalid_argument("x row count differs from locations");
  if (has_z() && z.rows() != n) throw std::invalid_argument("z row count differs from locations");
  if (!cluster_labels.empty() && static_cast<Eigen::Index>(cluster_labels.size()) != n) {
    throw std::invalid_argument("cluster label count differs from locations");
  }
}

Matrix sample_uniform_locations(Eigen::Index n, const Domain2D& domain, Seed seed) {
  domain.validate();
  if (n < 1) throw std::invalid_argument("sample_uniform_locations: n must be >= 1");
  Rng rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> ux(domain.x_min, domain.x_max);
  std::uniform_real_distribution<double> uy(domain.y_min, domain.y_max);
  Matrix out(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, 0) = ux(rng);
    out(i, 1) = uy(rng);
  }
  return out;
}

std::vector<int> assign_voronoi_clusters(const Matrix& locations, const Matrix& centers) {
  if (centers.rows() < 1) throw std::invalid_argument("assign_voronoi_clusters: need k >= 1");
  if (locations.cols() != 2 || centers.cols() != 2) {
    throw std::invalid_argument("assign_voronoi_clusters: points must have two columns");
  }
  std::vector<int> labels(static_cast<std::size_t>(locations.rows()));
  for (Eigen::Index i = 0; i < locations.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (Eigen::Index k = 0; k < centers.rows(); ++k) {
      const double dist = (locations.row(i) - centers.row(k)).squaredNorm();
      if (dist < best) {
        best = dist;
        best_k = static_cast<int>(k);
      }
    }
    labels[static_cast<std::size_t>(i)] = best_k + 1;
  }
  return labels;
}

double matern_correlation(double h, const MaternParams& p) {
  if (!(p.nu > 0.0) || !(p.phi > 0.0)) {
    throw std::invalid_argument("matern_correlation: nu and phi must be positive");
  }
  if (!(h >= 0.0)) throw std::invalid_argument("matern_correlation: distance must be >= 0");
  if (h == 0.0) return 1.0;
  const double norm = std::exp2(p.nu - 1.0) * std::tgamma(p.nu);
  return std::min(1.0, matern_kernel_term(p.nu, h / p.phi) / norm);
}

double nonstat_matern_covariance(const Point& s, const Point& s_prime, const NonstatMaternFns& fns) {
  const double sig_a = fns.sigma(s);
  const double sig_b = fns.sigma(s_prime);
  const double nu_a = fns.nu(s);
  const double nu_b = fns.nu(s_prime);
  const double phi_a = fns.phi(s);
  const double phi_b = fns.phi(s_prime);
  if (!(sig_a > 0 && sig_b > 0 && nu_a > 0 && nu_b > 0 && phi_a > 0 && phi_b > 0)) {
    throw std::invalid_argument("nonstat_matern_covariance: parameter function not positive");
  }
  // r1(s)^2 = (phi^2 / (4 nu)) / (Gamma(nu) 2^(nu-1))
  auto r1_sq = [](double phi, double nu) {
    return (phi * phi / (4.0 * nu)) / (std::tgamma(nu) * std::exp2(nu - 1.0));
  };
  const double r2 = phi_a * phi_a / (8.0 * nu_a) + phi_b * phi_b / (8.0 * nu_b);
  const double nu_ab = 0.5 * (nu_a + nu_b);
  const double h = (s - s_prime).norm();
  const double scaled = h / std::sqrt(r2);
  return sig_a * sig_b * std::sqrt(r1_sq(phi_a, nu_a) * r1_sq(phi_b, nu_b)) / r2 *
         matern_kernel_term(nu_ab, scaled);
}

Matrix covariance_matrix(const Matrix& locations, const CovarianceFn& cov) {
  const auto n = locations.rows();
  Matrix c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Point pj = locations.row(j).transpose();
    for (Eigen::Index i = j; i < n; ++i) {
      const double v = cov(locations.row(i).transpose(), pj);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

CholeskyResult jittered_cholesky(const Matrix& cov, const JitterLadder& ladder) {
  const auto n = cov.rows();
  if (cov.cols() != n || n == 0) throw std::invalid_argument("jittered_cholesky: need square matrix");
  const double scale = cov.trace() / static_cast<double>(n);
  double last_rel = ladder.start;
  for (double rel = ladder.start; rel <= ladder.stop * (1.0 + 1e-9); rel *= ladder.factor) {
    last_rel = rel;
    Matrix work = cov;
    const double jitter = rel * scale;
    work.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(work);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed up to relative jitter " << last_rel
      << " (absolute " << last_rel * scale << ")";
  throw CholeskyError(msg.str(), last_rel * scale);
}

Matrix sample_grf_from_factor(const Matrix& lower, Eigen::Index replications, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix eps(lower.rows(), replications);
  for (Eigen::Index j = 0; j < replications; ++j) {
    for (Eigen::Index i = 0; i < lower.rows(); ++i) eps(i, j) = dist(rng);
  }
  return lower.triangularView<Eigen::Lower>() * eps;
}

Vector sample_grf(const Matrix& locations, const CovarianceFn& cov, Seed seed,
                  const JitterLadder& ladder) {
  const Matrix c = covariance_matrix(locations, cov);
  const CholeskyResult chol = jittered_cholesky(c, ladder);
  Rng rng(derive_seed(seed, 0));
  return sample_grf_from_factor(chol.lower, 1, rng).col(0);
}

std::vector<MaternParams> setting_matern_params(int setting) {
  switch (setting) {
    case 4:
      return {{0.5, 15.0}, {2.0, 20.0}, {0.2, 10.0}};
    case 5:
      return {{1.0, 5.0}, {2.0, 3.0}, {6.0, 2.0}};
    default:
      throw std::invalid_argument("setting_matern_params: only settings 4 and 5 have fixed Matern parameters");
  }
}

std::vector<NonstatMaternFns> setting6_param_fns() {
  using K = NonstatParamFn::Kind;
  auto make = [](Point ds, double as, Point dn, double an, Point dp, double ap, double cp) {
    return NonstatMaternFns{{K::sigma, ds, as, 0.0}, {K::nu, dn, an, 0.0}, {K::phi, dp, ap, cp}};
  };
  return {
      make({1, 1}, 2.0, {0, 1}, 5.0, {1, 1}, 5.0, 10.0),
      make({0, 1}, 1.5, {1, 0}, 4.0, {1, 1}, -8.0, 40.0),
      make({1, 0}, 2.0, {1, 1}, 3.0, {0, 1}, 4.0, 10.0),
  };
}

namespace {

// Stream layout under the master seed.
enum Stream : Seed {
  kLocations = 1,
  kCenters = 2,
  kClusterParams = 3,
  kComponentBase = 100,
};

Matrix sample_centers(int k, const Domain2D& domain, Seed seed) {
  return sample_uniform_locations(k, domain, derive_seed(seed, kCenters));
}

Matrix subset_rows(const Matrix& m, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

std::vector<std::vector<Eigen::Index>> members_by_cluster(const std::vector<int>& labels, int k) {
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[static_cast<std::size_t>(labels[i] - 1)].push_back(static_cast<Eigen::Index>(i));
  }
  return members;
}

Matrix iid_cluster_latents(const std::vector<int>& labels, int k, int dim, bool random_means,
                           Seed seed) {
  Rng param_rng(derive_seed(seed, kClusterParams));
  std::uniform_real_distribution<double> var_dist(0.1, 5.0);
  std::uniform_real_distribution<double> mean_dist(-5.0, 5.0);
  Matrix means = Matrix::Zero(k, dim);
  Matrix vars(k, dim);
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < dim; ++j) {
      vars(c, j) = var_dist(param_rng);
      if (random_means) means(c, j) = mean_dist(param_rng);
    }
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix z(n, dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < dim; ++j) {
    Rng rng(derive_seed(seed, kComponentBase + static_cast<Seed>(j)));
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = labels[static_cast<std::size_t>(i)] - 1;
      z(i, j) = means(c, j) + std::sqrt(vars(c, j)) * normal(rng);
    }
  }
  return z;
}

}  // namespace

Matrix per_cluster_matern_latents(const Matrix& locations, const std::vector<int>& labels,
                                  int clusters, int dim, Seed seed) {
  Rng param_rng(derive_seed(seed, kClusterParams));
  std::uniform_real_distribution<double> nu_dist(0.1, 5.0);
  std::uniform_real_distribution<double> phi_dist(0.5, 8.0);
  const auto members = members_by_cluster(labels, clusters);
  Matrix z = Matrix::Zero(locations.rows(), dim);
  for (int c = 0; c < clusters; ++c) {
    const auto& rows = members[static_cast<std::size_t>(c)];
    std::vector<MaternParams> params(static_cast<std::size_t>(dim));
    for (auto& p : params) {
      p.nu = nu_dist(param_rng);
      p.phi = phi_dist(param_rng);
    }
    if (rows.empty()) continue;
    const Matrix sub = subset_rows(locations, rows);
    for (int j = 0; j < dim; ++j) {
      const MaternParams p = params[static_cast<std::size_t>(j)];
      const Seed stream = derive_seed(seed, kComponentBase + static_cast<Seed>(j));
      const Vector field = sample_grf(
          sub, [p](const Point& a, const Point& b) { return matern_correlation((a - b).norm(), p); },
          derive_seed(stream, static_cast<Seed>(c)));
      for (std::size_t i = 0; i < rows.size(); ++i) z(rows[i], j) = field[static_cast<Eigen::Index>(i)];
    }
  }
  return z;
}

SpatialDataset generate_setting(int id, Eigen::Index n, Seed seed, const SettingOptions& opts) {
  if (id < 1 || id > 6) throw std::invalid_argument("generate_setting: unknown setting id " + std::to_string(id));
  if (opts.dim < 1) throw std::invalid_argument("generate_setting: dim must be >= 1");
  SpatialDataset ds;
  ds.locations = sample_uniform_locations(n, opts.domain, derive_seed(seed, kLocations));
  const int dim = opts.dim;

  if (id <= 3) {
    const Matrix centers = sample_centers(opts.clusters, opts.domain, seed);
    ds.cluster_labels = assign_voronoi_clusters(ds.locations, centers);
    if (id == 3) {
      ds.z = per_cluster_matern_latents(ds.locations, ds.cluster_labels, opts.clusters, dim, seed);
    } else {
      ds.z = iid_cluster_latents(ds.cluster_labels, opts.clusters, dim, id == 2, seed);
    }
    return ds;
  }

  if (dim != 3) throw std::invalid_argument("generate_setting: settings 4-6 are three-variate");
  ds.z.resize(n, dim);
  for (int j = 0; j < dim; ++j) {
    const Seed stream = derive_seed(seed, kComponentBase + static_cast<Seed>(j));
    CovarianceFn cov;
    if (id == 6) {
      const NonstatMaternFns fns = setting6_param_fns()[static_cast<std::size_t>(j)];
      cov = [fns](const Point& a, const Point& b) { return nonstat_matern_covariance(a, b, fns); };
    } else {
      const MaternParams p = setting_matern_params(id)[static_cast<std::size_t>(j)];
      cov = [p](const Point& a, const Point& b) { return matern_correlation((a - b).norm(), p); };
    }
    ds.z.col(j) = sample_grf(ds.locations, cov, stream);
  }
  return ds;
}

}  // namespace sivae
