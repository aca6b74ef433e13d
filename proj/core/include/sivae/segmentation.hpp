#pragma once

#include "sivae/random_fields.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sivae {

/// Rectangular grid over a domain. Cells are half-open [a, b) except the
/// last row and column, which are closed so the domain edge is covered.
struct SegmentGrid {
  Domain2D domain;
  int nx = 1;
  int ny = 1;

  /// nx x ny cells over `domain`.
  static SegmentGrid cells(const Domain2D& domain, int nx, int ny);
  /// Square cells of side `size` anchored at (x_min, y_min); the domain is
  /// grown to a whole number of cells.
  static SegmentGrid cell_size(const Domain2D& domain, double size);
  /// Parses "20x20" or a cell side length given separately.
  static SegmentGrid parse(const Domain2D& domain, const std::string& grid_spec);

  int cell_count() const { return nx * ny; }
  /// Zero-based cell id (ix + nx * iy), or nullopt outside the domain.
  std::optional<int> cell_of(double x, double y) const;
};

struct SegmentEncoding {
  SegmentGrid grid;
  std::vector<int> kept_cells;  // ascending cell ids with >= 1 observation
  std::vector<int> segment;     // per observation, column index into kept_cells

  int m() const { return static_cast<int>(kept_cells.size()); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(segment.size()); }
  /// Dense n x m one-hot matrix u.
  Matrix one_hot() const;
};

/// Maps every location to its cell and drops empty cells. Throws
/// std::invalid_argument naming the first row outside the domain.
SegmentEncoding encode_segments(const Matrix& locations, const SegmentGrid& grid);

/// Encodes new locations against an existing set of kept cells; locations in
/// cells that were not kept are rejected.
SegmentEncoding encode_with_layout(const Matrix& locations, const SegmentGrid& grid,
                                   const std::vector<int>& kept_cells);

/// Smallest axis-aligned domain containing all locations.
Domain2D bounding_domain(const Matrix& locations);

}  // namespace sivae
