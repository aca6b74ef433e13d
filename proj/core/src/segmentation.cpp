#include "sivae/segmentation.hpp"

#include "sivae/csv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sivae {

SegmentGrid SegmentGrid::cells(const Domain2D& domain, int nx, int ny) {
  domain.validate();
  if (nx < 1 || ny < 1) throw std::invalid_argument("segment grid needs positive cell counts");
  return {domain, nx, ny};
}

SegmentGrid SegmentGrid::cell_size(const Domain2D& domain, double size) {
  domain.validate();
  if (!(size > 0.0)) throw std::invalid_argument("segment cell size must be positive");
  const int nx = std::max(1, static_cast<int>(std::ceil((domain.x_max - domain.x_min) / size - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil((domain.y_max - domain.y_min) / size - 1e-9)));
  Domain2D grown = domain;
  grown.x_max = domain.x_min + nx * size;
  grown.y_max = domain.y_min + ny * size;
  return {grown, nx, ny};
}

SegmentGrid SegmentGrid::parse(const Domain2D& domain, const std::string& grid_spec) {
  const auto pos = grid_spec.find_first_of("xX");
  if (pos == std::string::npos) throw std::invalid_argument("grid spec must look like 20x20");
  const double nx = csv::parse_double(grid_spec.substr(0, pos));
  const double ny = csv::parse_double(grid_spec.substr(pos + 1));
  if (nx != std::floor(nx) || ny != std::floor(ny)) throw std::invalid_argument("grid spec needs integers");
  return cells(domain, static_cast<int>(nx), static_cast<int>(ny));
}

std::optional<int> SegmentGrid::cell_of(double x, double y) const {
  if (!(x >= domain.x_min && x <= domain.x_max && y >= domain.y_min && y <= domain.y_max)) {
    return std::nullopt;
  }
  const double wx = (domain.x_max - domain.x_min) / nx;
  const double wy = (domain.y_max - domain.y_min) / ny;
  const int ix = std::min(nx - 1, static_cast<int>(std::floor((x - domain.x_min) / wx)));
  const int iy = std::min(ny - 1, static_cast<int>(std::floor((y - domain.y_min) / wy)));
  return ix + nx * iy;
}

Matrix SegmentEncoding::one_hot() const {
  Matrix u = Matrix::Zero(size(), m());
  for (std::size_t i = 0; i < segment.size(); ++i) u(static_cast<Eigen::Index>(i), segment[i]) = 1.0;
  return u;
}

namespace {

std::vector<int> cell_ids(const Matrix& locations, const SegmentGrid& grid) {
  if (locations.cols() != 2) throw std::invalid_argument("locations must have two columns");
  std::vector<int> cells(static_cast<std::size_t>(locations.rows()));
  for (Eigen::Index i = 0; i < locations.rows(); ++i) {
    const auto cell = grid.cell_of(locations(i, 0), locations(i, 1));
    if (!cell) {
      std::ostringstream msg;
      msg << "location row " << i << " (" << locations(i, 0) << ", " << locations(i, 1)
          << ") lies outside the segmentation domain";
      throw std::invalid_argument(msg.str());
    }
    cells[static_cast<std::size_t>(i)] = *cell;
  }
  return cells;
}

}  // namespace

SegmentEncoding encode_segments(const Matrix& locations, const SegmentGrid& grid) {
  const auto cells = cell_ids(locations, grid);
  std::vector<int> column(static_cast<std::size_t>(grid.cell_count()), -1);
  for (int c : cells) column[static_cast<std::size_t>(c)] = 0;
  SegmentEncoding enc;
  enc.grid = grid;
  for (int c = 0; c < grid.cell_count(); ++c) {
    if (column[static_cast<std::size_t>(c)] == 0) {
      column[static_cast<std::size_t>(c)] = static_cast<int>(enc.kept_cells.size());
      enc.kept_cells.push_back(c);
    }
  }
  enc.segment.reserve(cells.size());
  for (int c : cells) enc.segment.push_back(column[static_cast<std::size_t>(c)]);
  return enc;
}

SegmentEncoding encode_with_layout(const Matrix& locations, const SegmentGrid& grid,
                                   const std::vector<int>& kept_cells) {
  const auto cells = cell_ids(locations, grid);
  std::vector<int> column(static_cast<std::size_t>(grid.cell_count()), -1);
  for (std::size_t k = 0; k < kept_cells.size(); ++k) {
    const int c = kept_cells[k];
    if (c < 0 || c >= grid.cell_count()) throw std::invalid_argument("kept cell id outside grid");
    column[static_cast<std::size_t>(c)] = static_cast<int>(k);
  }
  SegmentEncoding enc;
  enc.grid = grid;
  enc.kept_cells = kept_cells;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int col = column[static_cast<std::size_t>(cells[i])];
    if (col < 0) {
      throw std::invalid_argument("location row " + std::to_string(i) + " falls in segment " +
                                  std::to_string(cells[i]) + " which has no training observations");
    }
    enc.segment.push_back(col);
  }
  return enc;
}

Domain2D bounding_domain(const Matrix& locations) {
  if (locations.rows() == 0 || locations.cols() != 2) throw std::invalid_argument("need n x 2 locations");
  Domain2D d{locations.col(0).minCoeff(), locations.col(0).maxCoeff(), locations.col(1).minCoeff(),
             locations.col(1).maxCoeff()};
  if (d.x_max == d.x_min) d.x_max = d.x_min + 1.0;
  if (d.y_max == d.y_min) d.y_max = d.y_min + 1.0;
  return d;
}

}  // namespace sivae
