#pragma once

#include "sivae/types.hpp"

#include <vector>

namespace sivae {

/// K(i, j) = Pearson correlation of column i of z_hat with column j of z.
/// Throws std::invalid_argument naming any zero-variance column.
Matrix correlation_matrix(const Matrix& z_hat, const Matrix& z);

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// potentials, O(d^3)). Returns the column assigned to each row.
std::vector<int> hungarian_assignment(const Matrix& cost);

/// (1/d) max_P tr(P |K|) by exhaustive permutation search.
double mcc_bruteforce(const Matrix& k);

/// (1/d) max_P tr(P |K|) via the Hungarian method on 1 - |K|.
double mcc_assignment(const Matrix& k);

/// Mean correlation coefficient: brute force for d <= 8, assignment otherwise.
double mcc(const Matrix& k);

inline double mcc(const Matrix& z_hat, const Matrix& z) { return mcc(correlation_matrix(z_hat, z)); }

}  // namespace sivae
