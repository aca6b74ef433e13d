#pragma once

#include "sivae/types.hpp"

#include <string>
#include <vector>

namespace sivae {

struct VariogramBin {
  double lag = 0.0;    // mean pair distance in the bin
  double gamma = 0.0;  // (1 / 2N) sum (v_i - v_j)^2
  long count = 0;
};

/// Matheron estimator on `bins` equal-width lag bins over (0, max_dist].
/// Empty bins are omitted; throws if no pair lies within max_dist.
std::vector<VariogramBin> empirical_variogram(const Matrix& locations, const Vector& values, int bins,
                                              double max_dist);

enum class VariogramFamily { matern, exponential, spherical };

std::string to_string(VariogramFamily f);
VariogramFamily variogram_family_from_string(const std::string& name);

/// gamma(h) = nugget + sill * shape(h / range) for h > 0, gamma(0) = 0.
/// `sill` is the partial sill; the total sill is sill + nugget.
struct VariogramModel {
  VariogramFamily family = VariogramFamily::exponential;
  double sill = 1.0;
  double range = 1.0;
  double nugget = 0.0;
  double nu = 0.5;  // Matern shape

  double gamma(double h) const;
  /// C(h) = sill + nugget - gamma(h).
  double covariance(double h) const;
  void validate() const;
};

struct VariogramFit {
  VariogramModel model;
  double sse = 0.0;              // unweighted OLS objective
  bool converged = true;         // false when the best range sits on the search boundary
};

/// OLS fit of one family; Matern shape searched over {0.3, 0.5, 1, 1.5, 2, 3}.
VariogramFit fit_variogram(const std::vector<VariogramBin>& bins, VariogramFamily family);

/// Best of the Matern, exponential and spherical fits by OLS objective.
VariogramFit select_variogram(const std::vector<VariogramBin>& bins);

enum class KrigingKind { ordinary, universal };

std::string to_string(KrigingKind k);
KrigingKind kriging_kind_from_string(const std::string& name);

struct KrigingSystem {
  std::vector<Eigen::Index> neighbours;  // training rows used
  Vector weights;                        // one per neighbour
  Vector multipliers;                    // Lagrange multipliers (1 for OK, 3 for UK)
};

/// Kriging weights for one target from its `neighbours` nearest training sites.
/// Universal kriging uses the drift {1, s_x, s_y}. A singular system is retried
/// with diagonal jitter before failing.
KrigingSystem kriging_weights(const Matrix& train_locations, const Point& target, const VariogramModel& vgm,
                              KrigingKind kind, int neighbours = 50);

Vector krige(const Matrix& train_locations, const Vector& train_values, const Matrix& targets,
             const VariogramModel& vgm, KrigingKind kind, int neighbours = 50);

inline Vector ordinary_kriging(const Matrix& train_locations, const Vector& train_values, const Matrix& targets,
                               const VariogramModel& vgm, int neighbours = 50) {
  return krige(train_locations, train_values, targets, vgm, KrigingKind::ordinary, neighbours);
}

inline Vector universal_kriging(const Matrix& train_locations, const Vector& train_values, const Matrix& targets,
                                const VariogramModel& vgm, int neighbours = 50) {
  return krige(train_locations, train_values, targets, vgm, KrigingKind::universal, neighbours);
}

}  // namespace sivae
