#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lmce/grid.hpp"

namespace lmce {

/// Field interchange format:
///
///     # lmce-field L=<half width> n=<nodes per axis>
///     i,j,value
///     0,0,<value>
///     ...
///
/// one row per node, values printed with 17 significant digits.
void write_field_csv(const ScalarField2& f, const std::filesystem::path& path);
std::string field_to_csv(const ScalarField2& f);
/// Throws std::invalid_argument on a malformed header, duplicate or missing
/// nodes, or non-finite values; std::runtime_error when the file cannot be read.
ScalarField2 read_field_csv(const std::filesystem::path& path);
ScalarField2 field_from_csv(const std::string& text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC 4180: fields containing a comma, quote, CR or LF are quoted, quotes doubled.
std::string csv_escape(const std::string& field);
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Shortest text that round-trips the double ("nan"/"inf" for non-finite).
std::string format_number(double v);

struct HeatmapRange {
    double min;
    double max;
};

/// Binary 8-bit portable graymap (P5), row 0 at x2 = +L, min -> 0, max -> 255.
HeatmapRange write_pgm(const ScalarField2& f, const std::filesystem::path& path);

}  // namespace lmce
