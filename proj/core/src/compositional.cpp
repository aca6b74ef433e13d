#include "sivae/compositional.hpp"

#include "sivae/csv.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sivae {
namespace {

void check_positive(const Vector& parts) {
  for (Eigen::Index i = 0; i < parts.size(); ++i) {
    if (!(parts[i] > 0.0)) {
      std::ostringstream msg;
      msg << "composition part " << i << " is not positive (" << parts[i] << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

Vector clr(const Vector& parts) {
  if (parts.size() < 1) throw std::invalid_argument("clr: empty composition");
  check_positive(parts);
  const Vector logs = parts.array().log().matrix();
  return (logs.array() - logs.mean()).matrix();
}

Matrix ilr_basis(Eigen::Index parts) {
  if (parts < 2) throw std::invalid_argument("ilr_basis: need at least two parts");
  Matrix v = Matrix::Zero(parts, parts - 1);
  for (Eigen::Index i = 0; i < parts - 1; ++i) {
    const double k = static_cast<double>(i + 1);
    const double norm = std::sqrt(k * (k + 1.0));
    v.col(i).head(i + 1).setConstant(1.0 / norm);
    v(i + 1, i) = -k / norm;
  }
  return v;
}

Vector closure(const Vector& parts) {
  check_positive(parts);
  return parts / parts.sum();
}

Vector ilr(const Vector& parts) { return ilr_basis(parts.size()).transpose() * clr(parts); }

Vector ilr_to_clr(const Vector& coords) { return ilr_basis(coords.size() + 1) * coords; }

Vector ilr_inverse(const Vector& coords) {
  const Vector c = ilr_to_clr(coords);
  const Vector e = (c.array() - c.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Matrix clr_rows(const Matrix& parts) {
  Matrix out(parts.rows(), parts.cols());
  for (Eigen::Index i = 0; i < parts.rows(); ++i) {
    try {
      out.row(i) = clr(parts.row(i).transpose()).transpose();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

Matrix ilr_rows(const Matrix& parts) { return clr_rows(parts) * ilr_basis(parts.cols()); }

Matrix ilr_to_clr_rows(const Matrix& coords) { return coords * ilr_basis(coords.cols() + 1).transpose(); }

Matrix ilr_inverse_rows(const Matrix& coords) {
  Matrix out(coords.rows(), coords.cols() + 1);
  for (Eigen::Index i = 0; i < coords.rows(); ++i) out.row(i) = ilr_inverse(coords.row(i).transpose()).transpose();
  return out;
}

ConcentrationTable read_concentrations(const std::string& path, const std::string& x_col, const std::string& y_col,
                                       const std::vector<std::string>& elements) {
  const csv::Table t = csv::read_file(path);
  const int xi = t.column(x_col);
  const int yi = t.column(y_col);
  if (xi < 0 || yi < 0) {
    throw std::invalid_argument("concentration table needs coordinate columns '" + x_col + "' and '" + y_col + "'");
  }
  ConcentrationTable out;
  std::vector<int> cols;
  if (elements.empty()) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      if (static_cast<int>(i) == xi || static_cast<int>(i) == yi) continue;
      cols.push_back(static_cast<int>(i));
      out.elements.push_back(t.header[i]);
    }
  } else {
    for (const auto& name : elements) {
      const int c = t.column(name);
      if (c < 0) throw std::invalid_argument("concentration table has no column '" + name + "'");
      cols.push_back(c);
      out.elements.push_back(name);
    }
  }
  if (cols.size() < 2) throw std::invalid_argument("concentration table needs at least two element columns");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  out.locations.resize(n, 2);
  out.parts.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    out.locations(i, 0) = row[static_cast<std::size_t>(xi)];
    out.locations(i, 1) = row[static_cast<std::size_t>(yi)];
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double v = row[static_cast<std::size_t>(cols[j])];
      if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "concentration table row " << i + 1 << ", column '" << out.elements[j]
            << "': value " << v << " is not positive";
        throw std::invalid_argument(msg.str());
      }
      out.parts(i, static_cast<Eigen::Index>(j)) = v;
    }
  }
  return out;
}

}  // namespace sivae
