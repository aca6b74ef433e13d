#pragma once

#include "sivae/types.hpp"

#include <string>
#include <vector>

namespace sivae {

/// Centered log-ratio: log(x_i) - mean_j log(x_j). Parts must be positive.
Vector clr(const Vector& parts);

/// D x (D-1) Helmert-type orthonormal basis of the clr hyperplane. Column i
/// contrasts the first i + 1 parts with part i + 2.
Matrix ilr_basis(Eigen::Index parts);

Vector ilr(const Vector& parts);
/// Composition closed to unit sum.
Vector ilr_inverse(const Vector& coords);
Vector ilr_to_clr(const Vector& coords);
Vector closure(const Vector& parts);

/// Row-wise versions on n x D (or n x (D-1)) matrices.
Matrix clr_rows(const Matrix& parts);
Matrix ilr_rows(const Matrix& parts);
Matrix ilr_inverse_rows(const Matrix& coords);
Matrix ilr_to_clr_rows(const Matrix& coords);

/// Raw concentration table with coordinates.
struct ConcentrationTable {
  std::vector<std::string> elements;
  Matrix locations;  // n x 2
  Matrix parts;      // n x D, all > 0
};

/// Reads a CSV whose header names the coordinate columns and the elements. Every
/// non-coordinate column is an element unless `elements` restricts the list.
/// Zero or negative entries are rejected with their row and column.
ConcentrationTable read_concentrations(const std::string& path, const std::string& x_col = "sx",
                                       const std::string& y_col = "sy",
                                       const std::vector<std::string>& elements = {});

}  // namespace sivae
