#include "sivae/dataset_io.hpp"

#include "sivae/csv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sivae {
namespace csv {

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    std::string_view field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '"')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '"' || field.back() == '\r')) field.remove_suffix(1);
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    if (field == "NA" || field == "nan" || field == "NaN") return std::nan("");
    throw std::invalid_argument("not a number: '" + std::string(field) + "'");
  }
  return v;
}

std::string format(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("failed to format double");
  return std::string(buf.data(), ptr);
}

Table read(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
  t.header = split(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != t.header.size()) {
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        row[i] = parse_double(fields[i]);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("CSV line " + std::to_string(line_no) + ", column '" +
                                    t.header[i] + "': " + e.what());
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read(in);
}

}  // namespace csv

std::string dataset_to_csv(const SpatialDataset& ds) {
  ds.validate();
  std::ostringstream out;
  out << "sx,sy";
  for (Eigen::Index j = 0; j < ds.z.cols(); ++j) out << ",z" << j + 1;
  for (Eigen::Index j = 0; j < ds.x.cols(); ++j) out << ",x" << j + 1;
  if (!ds.cluster_labels.empty()) out << ",cluster";
  out << '\n';
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    out << csv::format(ds.locations(i, 0)) << ',' << csv::format(ds.locations(i, 1));
    for (Eigen::Index j = 0; j < ds.z.cols(); ++j) out << ',' << csv::format(ds.z(i, j));
    for (Eigen::Index j = 0; j < ds.x.cols(); ++j) out << ',' << csv::format(ds.x(i, j));
    if (!ds.cluster_labels.empty()) out << ',' << ds.cluster_labels[static_cast<std::size_t>(i)];
    out << '\n';
  }
  return out.str();
}

void write_dataset_csv(const std::string& path, const SpatialDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << dataset_to_csv(ds);
}

namespace {

// Columns named <prefix><k>, ordered by k.
std::vector<int> numbered_columns(const csv::Table& t, char prefix) {
  std::map<int, int> found;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    const auto& h = t.header[i];
    if (h.size() < 2 || h[0] != prefix) continue;
    int k = 0;
    auto [ptr, ec] = std::from_chars(h.data() + 1, h.data() + h.size(), k);
    if (ec == std::errc() && ptr == h.data() + h.size() && k >= 1) found[k] = static_cast<int>(i);
  }
  std::vector<int> cols;
  int expect = 1;
  for (const auto& [k, col] : found) {
    if (k != expect++) throw std::invalid_argument(std::string("non-contiguous '") + prefix + "' columns");
    cols.push_back(col);
  }
  return cols;
}

SpatialDataset from_table(const csv::Table& t) {
  const int sx = t.column("sx");
  const int sy = t.column("sy");
  if (sx < 0 || sy < 0) throw std::invalid_argument("dataset CSV needs 'sx' and 'sy' columns");
  const auto zc = numbered_columns(t, 'z');
  const auto xc = numbered_columns(t, 'x');
  const int cl = t.column("cluster");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  SpatialDataset ds;
  ds.locations.resize(n, 2);
  ds.z.resize(zc.empty() ? 0 : n, static_cast<Eigen::Index>(zc.size()));
  ds.x.resize(xc.empty() ? 0 : n, static_cast<Eigen::Index>(xc.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    ds.locations(i, 0) = row[static_cast<std::size_t>(sx)];
    ds.locations(i, 1) = row[static_cast<std::size_t>(sy)];
    for (std::size_t j = 0; j < zc.size(); ++j) ds.z(i, static_cast<Eigen::Index>(j)) = row[static_cast<std::size_t>(zc[j])];
    for (std::size_t j = 0; j < xc.size(); ++j) ds.x(i, static_cast<Eigen::Index>(j)) = row[static_cast<std::size_t>(xc[j])];
    if (cl >= 0) ds.cluster_labels.push_back(static_cast<int>(std::lround(row[static_cast<std::size_t>(cl)])));
  }
  ds.validate();
  return ds;
}

}  // namespace

SpatialDataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  return from_table(csv::read(in));
}

SpatialDataset read_dataset_csv(const std::string& path) { return from_table(csv::read_file(path)); }

void write_matrix_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& names) {
  if (static_cast<Eigen::Index>(names.size()) != m.cols()) {
    throw std::invalid_argument("write_matrix_csv: column name count mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << csv::format(m(i, j));
    out << '\n';
  }
}

}  // namespace sivae
