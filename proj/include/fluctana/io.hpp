#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fluctana/methods.hpp"
#include "fluctana/series.hpp"

namespace fluctana {

// Lossless decimal formatting for doubles (17 significant digits).
std::string format_double(double v);

// Writes content to a temporary file in the target directory and renames it
// into place.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

// Plain-text series: one value per line, '#'-prefixed comment lines ignored.
Series read_series_text(const std::filesystem::path& path);
void write_series_text(const std::filesystem::path& path, const Series& series);

// CSV series reader; column selects by header name, or by 0-based index when
// it parses as an integer. An empty column string means the single-column
// case (with or without a header line).
Series read_series_csv(const std::filesystem::path& path, const std::string& column);

// Fluctuation curves as CSV with header "s,F".
void write_curve_csv(const std::filesystem::path& path, const FluctuationCurve& curve);
FluctuationCurve read_curve_csv(const std::filesystem::path& path, const Method& method);

}  // namespace fluctana
