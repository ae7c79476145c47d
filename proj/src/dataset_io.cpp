#include "swid/dataset_io.hpp"

#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "swid/serialization.hpp"

namespace swid {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Parses `name` as prefix + 1-based index.
bool indexed(const std::string& name, char prefix, int expected) {
  if (name.size() < 2 || name[0] != prefix) return false;
  int idx = 0;
  auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
  return ec == std::errc() && p == name.data() + name.size() && idx == expected;
}

double parse_number(const std::string& s, std::size_t line, const std::string& column) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size() || !std::isfinite(v))
    throw FormatError("dataset line " + std::to_string(line) + ", column " + column +
                      ": invalid number '" + s + "'");
  return v;
}

}  // namespace

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream os;
  os << "t";
  for (Index j = 0; j < data.n_u(); ++j) os << ",u" << j + 1;
  for (Index j = 0; j < data.n_y(); ++j) os << ",y" << j + 1;
  if (data.true_modes) os << ",mode";
  if (data.true_states)
    for (Index j = 0; j < data.true_states->cols(); ++j) os << ",x" << j + 1;
  os << '\n';
  for (Index t = 0; t < data.T(); ++t) {
    os << t + 1;
    for (Index j = 0; j < data.n_u(); ++j) os << ',' << format_double(data.u(t, j));
    for (Index j = 0; j < data.n_y(); ++j) os << ',' << format_double(data.y(t, j));
    if (data.true_modes) os << ',' << (*data.true_modes)[static_cast<std::size_t>(t)] + 1;
    if (data.true_states)
      for (Index j = 0; j < data.true_states->cols(); ++j)
        os << ',' << format_double((*data.true_states)(t, j));
    os << '\n';
  }
  return os.str();
}

Dataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("dataset: empty file");
  const auto header = split(line);
  if (header.empty() || header[0] != "t")
    throw FormatError("dataset line 1: header must start with 't'");

  std::size_t col = 1;
  int nu = 0, ny = 0, nx = 0;
  bool has_mode = false;
  while (col < header.size() && indexed(header[col], 'u', nu + 1)) ++nu, ++col;
  while (col < header.size() && indexed(header[col], 'y', ny + 1)) ++ny, ++col;
  if (col < header.size() && header[col] == "mode") has_mode = true, ++col;
  while (col < header.size() && indexed(header[col], 'x', nx + 1)) ++nx, ++col;
  if (col != header.size())
    throw FormatError("dataset line 1: unexpected column '" + header[col] + "'");
  if (nu == 0) throw FormatError("dataset line 1: at least one input column u1 is required");

  std::vector<std::vector<double>> rows;
  ModeSequence modes;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw FormatError("dataset line " + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(cells.size()));
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (has_mode && c == static_cast<std::size_t>(1 + nu + ny)) {
        int label = 0;
        const auto& s = cells[c];
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), label);
        if (ec != std::errc() || p != s.data() + s.size() || label < 1)
          throw FormatError("dataset line " + std::to_string(lineno) +
                            ", column mode: invalid label '" + s + "'");
        modes.push_back(label - 1);
        continue;
      }
      row.push_back(parse_number(cells[c], lineno, header[c]));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("dataset: no data rows");

  const Index T = static_cast<Index>(rows.size());
  Dataset d;
  d.u.resize(T, nu);
  d.y.resize(T, ny);
  if (nx > 0) d.true_states = MatrixXd(T, nx);
  for (Index t = 0; t < T; ++t) {
    const auto& r = rows[static_cast<std::size_t>(t)];
    for (int j = 0; j < nu; ++j) d.u(t, j) = r[static_cast<std::size_t>(j)];
    for (int j = 0; j < ny; ++j) d.y(t, j) = r[static_cast<std::size_t>(nu + j)];
    for (int j = 0; j < nx; ++j) (*d.true_states)(t, j) = r[static_cast<std::size_t>(nu + ny + j)];
  }
  if (has_mode) d.true_modes = std::move(modes);
  return d;
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_csv(data));
}

Dataset read_dataset(const std::filesystem::path& path) {
  return dataset_from_csv(read_file(path));
}

void CsvTable::add(std::string name, std::vector<double> values, bool as_int) {
  if (!columns.empty() && values.size() != columns.front().size())
    throw StructuralError("CSV column '" + name + "' has a different length");
  header.push_back(std::move(name));
  columns.push_back(std::move(values));
  integral.push_back(as_int);
}

std::string CsvTable::to_text() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) os << ',';
      if (integral[c]) os << static_cast<long long>(columns[c][r]);
      else os << format_double(columns[c][r]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace swid
