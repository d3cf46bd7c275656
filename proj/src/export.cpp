#include <cstdio>
#include <fstream>
#include <string>
#include <sstream>
#include <system_error>
#include <vector>

#include "topicmine/error.hpp"
#include "topicmine/export.hpp"

namespace topicmine {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 into 0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

double output_rounded(double value) { return std::stod(format_number(value)); }

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string matrix_csv(const Matrix& m, std::span<const std::string> row_ids,
                       const std::string& id_header, std::span<const std::string> col_names) {
  if (static_cast<Eigen::Index>(row_ids.size()) != m.rows() ||
      static_cast<Eigen::Index>(col_names.size()) != m.cols()) {
    throw DimensionError("matrix_csv: labels do not match a " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " matrix");
  }
  std::ostringstream out;
  out << csv_field(id_header);
  for (const auto& name : col_names) out << ',' << csv_field(name);
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << csv_field(row_ids[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_number(m(r, c));
    out << '\n';
  }
  return out.str();
}

std::string matrix_csv(const Matrix& m, std::span<const std::string> row_ids,
                       const std::string& id_header, const std::string& col_prefix) {
  std::vector<std::string> names;
  for (Eigen::Index c = 0; c < m.cols(); ++c) names.push_back(col_prefix + std::to_string(c));
  return matrix_csv(m, row_ids, id_header, names);
}

}  // namespace topicmine
