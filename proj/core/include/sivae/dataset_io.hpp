#pragma once

#include "sivae/random_fields.hpp"

#include <string>

namespace sivae {

/// Writes `sx,sy,z1..zd[,x1..xd][,cluster]`; z columns are skipped when the
/// dataset has no latents.
void write_dataset_csv(const std::string& path, const SpatialDataset& ds);
std::string dataset_to_csv(const SpatialDataset& ds);

/// Reads the layout above; column order within the file is free, the
/// prefixes `z`, `x` and the `cluster` column are recognised by name.
SpatialDataset read_dataset_csv(const std::string& path);
SpatialDataset dataset_from_csv(const std::string& text);

/// Writes a plain numeric matrix with the given column names.
void write_matrix_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& names);

}  // namespace sivae
