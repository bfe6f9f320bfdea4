#include "radfed/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "radfed/error.hpp"

namespace radfed::io {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError(fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigError(fmt::format("cannot write '{}'", tmp.string()));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw ConfigError(fmt::format("short write to '{}'", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigError(fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
    }
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::string format_real(double value) {
    return fmt::format("{}", value);
}

std::string provenance_line(std::string_view manifest_hash, std::uint64_t seed) {
    return fmt::format("# manifest={} seed={}\n", manifest_hash, seed);
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw IngestionError(fmt::format("missing column '{}'", name));
}

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool header_done = false;
    std::size_t line = 1;
    std::size_t record_line = 1;
    std::size_t i = 0;

    auto finish_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        const bool blank = record.size() == 1 && record.front().empty();
        if (!blank) {
            if (!header_done) {
                table.header = std::move(record);
                header_done = true;
            } else {
                if (record.size() != table.header.size()) {
                    throw IngestionError(fmt::format("line {}: expected {} fields, found {}",
                                                     record_line, table.header.size(),
                                                     record.size()));
                }
                table.rows.push_back(std::move(record));
                table.lines.push_back(record_line);
            }
        }
        record.clear();
    };

    while (i < text.size()) {
        const char c = text[i];
        if (!header_done && !field_started && record.empty() && c == '#') {
            while (i < text.size() && text[i] != '\n') {
                ++i;
            }
            ++i;
            ++line;
            record_line = line;
            continue;
        }
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                in_quotes = false;
            } else {
                if (c == '\n') {
                    ++line;
                }
                field += c;
            }
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\r':
                break;
            case '\n':
                finish_record();
                ++line;
                record_line = line;
                break;
            default:
                field += c;
                field_started = true;
        }
        ++i;
    }
    if (in_quotes) {
        throw IngestionError(fmt::format("line {}: unterminated quoted field", record_line));
    }
    if (field_started || !record.empty()) {
        finish_record();
    }
    if (!header_done) {
        throw IngestionError("empty CSV: no header");
    }
    return table;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += csv_escape(fields[i]);
    }
    out += '\n';
    return out;
}

}  // namespace radfed::io
