#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace radfed::io {

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view bytes);

/// Shortest decimal text that round-trips to the same double.
std::string format_real(double value);

/// Header line embedded in every emitted CSV.
std::string provenance_line(std::string_view manifest_hash, std::uint64_t seed);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based source line of each row, for error messages.
    std::vector<std::size_t> lines;

    std::size_t column(std::string_view name) const;
};

/// Parses RFC 4180 text. Lines starting with '#' before the header are skipped.
CsvTable parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace radfed::io
