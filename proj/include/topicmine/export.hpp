#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "topicmine/types.hpp"

namespace topicmine {

/// 12 significant digits, "%.12g". Every numeric output goes through this
/// so reruns are byte-identical.
std::string format_number(double value);

/// `value` rounded to the same 12 significant digits, for JSON output.
double output_rounded(double value);

/// Writes `contents` to a sibling temp file, then renames it over `path`.
/// Parent directories are created as needed.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// CSV with a leading id column: header is `id_header,<col_prefix>0,...`.
std::string matrix_csv(const Matrix& m, std::span<const std::string> row_ids,
                       const std::string& id_header, const std::string& col_prefix);

/// Same, with explicit column names.
std::string matrix_csv(const Matrix& m, std::span<const std::string> row_ids,
                       const std::string& id_header, std::span<const std::string> col_names);

/// CSV quoting for a single field (only when needed).
std::string csv_field(const std::string& s);

}  // namespace topicmine
