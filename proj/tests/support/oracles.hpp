#pragma once

// Reference implementations used only by tests. Each is written from the
// textbook definition and shares no code with the library.

#include "sivae/kriging.hpp"
#include "sivae/types.hpp"

#include <vector>

namespace sivae::testing {

/// K_nu(x) evaluated in 50-digit arithmetic by Boost.Math.
double bessel_k_reference(double nu, double x);

/// Matern correlation in 50-digit arithmetic.
double matern_reference(double h, double nu, double phi);

/// Nearest center (1-based) by exhaustive scan, lowest index on ties.
std::vector<int> nearest_center_scan(const Matrix& locations, const Matrix& centers);

/// Pearson correlations from sums of products.
Matrix pearson_textbook(const Matrix& a, const Matrix& b);

/// (1/d) max over all permutations of sum |K(i, p(i))| via std::next_permutation.
double mcc_all_permutations(const Matrix& k);

/// Shapley values of the linear game b.x against a background: b_i (x_i - mean_i).
Vector linear_game_shapley(const Vector& b, const Vector& x, const Matrix& background);

/// Ordinary or universal kriging over all training sites, built from the
/// covariance C(h) = sill + nugget - gamma(h) and solved by a dense LU in
/// long double. Universal drift is {1, x, y} in raw coordinates.
double kriging_reference(const Matrix& train_locations, const Vector& values, const Point& target,
                         const VariogramModel& vgm, bool universal);

/// Centered log-ratio from the definition.
Vector clr_reference(const Vector& parts);

}  // namespace sivae::testing
