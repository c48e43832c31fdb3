#pragma once

// Numeric column input and number formatting shared by the CLI and reports.

#include "xformtest/empirical.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace xformtest {

/// Reads one numeric column from a CSV file.
///
/// The first non-blank line is a header unless every field in it parses as
/// a number, in which case the file is treated as headerless (typically one
/// value per line). `column` names a header field or gives a 0-based index;
/// empty selects the first column. Throws ParseError on unreadable files,
/// unknown columns, non-numeric cells and files without values.
std::vector<double> read_column(const std::filesystem::path& path, const std::string& column = {});

/// Same rules applied to text already in memory; `source` names it in errors.
std::vector<double> parse_column(std::string_view text, const std::string& column, const std::string& source);

/// A two-column table (p, q) read with the same rules; the first two
/// columns are used.
KnownCdf read_quantile_table(const std::filesystem::path& path);

/// Parses a whole field as a finite double.
bool parse_double(std::string_view field, double& out);

/// Shortest decimal representation that reads back to the same double.
std::string format_number(double v);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace xformtest
