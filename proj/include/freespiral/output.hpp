#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace freespiral {

inline constexpr const char* kVersion = "1.0.0";

/// Creates the directory (and parents) if needed; throws ConfigError on failure.
void ensure_directory(const std::filesystem::path& dir);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Comma-separated table with a header row; values at 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Two-column whitespace-separated file with `#` comment header, readable by gnuplot.
void write_plot(const std::filesystem::path& path, const std::string& x_label, const std::string& y_label,
                const std::vector<double>& x, const std::vector<double>& y);

/// Whole-file comparison.
bool files_identical(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace freespiral
