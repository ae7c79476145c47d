#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "swid/model.hpp"

namespace swid {

inline constexpr int kModelFormatVersion = 1;

/// Model document (JSON). Matrices are arrays of rows; transition.pi[i][j] is
/// P[s_t = i+1 | s_{t-1} = j+1]. Numbers are written with 17 significant digits.
std::string model_to_text(const SwitchingModel& model);
/// Throws FormatError naming the offending field (or byte offset for syntax errors).
SwitchingModel model_from_text(const std::string& text);

void save_model(const SwitchingModel& model, const std::filesystem::path& path);
SwitchingModel load_model(const std::filesystem::path& path);

/// JSON text with every floating-point number printed at 17 significant digits.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// %.17g formatting, the textual form used by every writer in the library.
std::string format_double(double v);

}  // namespace swid
