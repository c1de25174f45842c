#include "fluctana/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fluctana {

namespace {

[[noreturn]] void io_fail(const std::filesystem::path& path, const std::string& what) {
  throw std::ios_base::failure("'" + path.string() + "': " + what);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_value(const std::string& token, const std::filesystem::path& path, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    io_fail(path, "cannot parse number '" + token + "' on line " + std::to_string(line));
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(trim(field));
  for (auto& f : fields) {
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"') {
      f = f.substr(1, f.size() - 2);
    }
  }
  return fields;
}

bool parses_as_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    (void)std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path dir =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_fail(tmp, "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) io_fail(tmp, "write failed");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) io_fail(path, "rename failed: " + ec.message());
}

Series read_series_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) io_fail(path, "cannot open");
  Series series;
  series.label = path.stem().string();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    series.values.push_back(parse_value(t, path, line_no));
  }
  if (series.values.empty()) io_fail(path, "no data values");
  validate_series(series);
  return series;
}

void write_series_text(const std::filesystem::path& path, const Series& series) {
  std::string content;
  content.reserve(series.values.size() * 20);
  for (double v : series.values) {
    content += format_double(v);
    content += '\n';
  }
  atomic_write_text(path, content);
}

Series read_series_csv(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) io_fail(path, "cannot open");
  std::string line;
  int line_no = 0;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    rows.push_back(split_csv_line(t));
  }
  if (rows.empty()) io_fail(path, "no data rows");

  int col = -1;
  std::size_t first_data_row = 0;
  const bool has_header = !rows.front().empty() && !parses_as_double(rows.front().front());
  if (!column.empty()) {
    try {
      std::size_t pos = 0;
      const int idx = std::stoi(column, &pos);
      if (pos == column.size()) col = idx;
    } catch (const std::exception&) {
    }
    if (col < 0) {
      if (!has_header) io_fail(path, "no header row to resolve column '" + column + "'");
      for (std::size_t c = 0; c < rows.front().size(); ++c) {
        if (rows.front()[c] == column) {
          col = static_cast<int>(c);
          break;
        }
      }
      if (col < 0) io_fail(path, "column '" + column + "' not found in header");
    }
  } else {
    if (rows.front().size() != 1 && !(has_header && rows.size() > 1 && rows[1].size() == 1)) {
      io_fail(path, "multi-column CSV requires an explicit column selection");
    }
    col = 0;
  }
  if (has_header) first_data_row = 1;

  Series series;
  series.label = path.stem().string();
  for (std::size_t r = first_data_row; r < rows.size(); ++r) {
    if (col >= static_cast<int>(rows[r].size())) {
      io_fail(path, "row " + std::to_string(r + 1) + " has no column " + std::to_string(col));
    }
    series.values.push_back(parse_value(rows[r][static_cast<std::size_t>(col)], path,
                                        static_cast<int>(r + 1)));
  }
  if (series.values.empty()) io_fail(path, "no data values");
  validate_series(series);
  return series;
}

void write_curve_csv(const std::filesystem::path& path, const FluctuationCurve& curve) {
  std::string content = "s,F\n";
  for (std::size_t j = 0; j < curve.grid.scales.size(); ++j) {
    content += std::to_string(curve.grid.scales[j]);
    content += ',';
    content += format_double(curve.f[j]);
    content += '\n';
  }
  atomic_write_text(path, content);
}

FluctuationCurve read_curve_csv(const std::filesystem::path& path, const Method& method) {
  std::ifstream in(path);
  if (!in) io_fail(path, "cannot open");
  FluctuationCurve curve;
  curve.method = method;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_csv_line(t);
    if (!header_seen && !fields.empty() && !parses_as_double(fields.front())) {
      header_seen = true;
      continue;
    }
    header_seen = true;
    if (fields.size() < 2) io_fail(path, "expected 's,F' row on line " + std::to_string(line_no));
    const double s = parse_value(fields[0], path, line_no);
    curve.grid.scales.push_back(static_cast<int>(std::llround(s)));
    curve.f.push_back(parse_value(fields[1], path, line_no));
  }
  if (curve.grid.scales.empty()) io_fail(path, "no curve rows");
  curve.series_length = 2 * curve.grid.scales.back();  // best available estimate
  return curve;
}

}  // namespace fluctana
