#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "swid/model.hpp"

namespace swid {

/// Dataset CSV: header `t,u1..u_nu,y1..y_ny[,mode][,x1..x_nx]`, LF line endings,
/// 1-based mode labels, numbers at 17 significant digits.
std::string dataset_to_csv(const Dataset& data);
/// Throws FormatError naming the offending line. Output columns may be absent
/// (prediction inputs), in which case `y` has zero columns.
Dataset dataset_from_csv(const std::string& text);

void write_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// Column-oriented numeric table written as CSV (plot data, predictions).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  /// Columns listed here are written as integers.
  std::vector<bool> integral;

  void add(std::string name, std::vector<double> values, bool as_int = false);
  std::string to_text() const;
};

}  // namespace swid
