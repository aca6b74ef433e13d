#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace sivae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Point = Eigen::Vector2d;

// Seeds are plain 64-bit integers; streams derived with derive_seed() are
// independent of each other and of scheduling order.
using Seed = std::uint64_t;

}  // namespace sivae
