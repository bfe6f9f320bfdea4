#include <bit>
#include <cstring>

#include <fmt/format.h>
#include <json.hpp>

#include "radfed/error.hpp"
#include "radfed/io.hpp"
#include "radfed/model.hpp"

namespace radfed::model {

namespace {

constexpr const char* kFormat = "radfed-checkpoint";

}  // namespace

std::string encode_checkpoint(const Checkpoint& checkpoint) {
    const ModelState& m = checkpoint.model;
    m.validate();
    nlohmann::json header;
    header["format"] = kFormat;
    header["version"] = 1;
    header["family"] = {{"kind", to_string(m.family.kind)},
                        {"inputs", m.family.inputs},
                        {"classes", m.family.classes},
                        {"hidden", m.family.hidden}};
    header["l2"] = m.l2;
    header["count"] = m.params.size();
    header["meta"] = nlohmann::json::parse(checkpoint.meta_json);
    std::string out = header.dump();
    out.push_back('\n');
    const std::size_t start = out.size();
    out.resize(start + 8 * m.params.size());
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        auto bits = std::bit_cast<std::uint64_t>(m.params[i]);
        for (std::size_t b = 0; b < 8; ++b) {
            out[start + 8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
        }
    }
    return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    const auto newline = bytes.find('\n');
    if (newline == std::string_view::npos) {
        throw IngestionError("checkpoint has no header line");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.substr(0, newline));
    } catch (const nlohmann::json::exception& e) {
        throw IngestionError(fmt::format("checkpoint header: {}", e.what()));
    }
    if (header.value("format", "") != kFormat) {
        throw IngestionError("not a checkpoint file");
    }
    Checkpoint cp;
    try {
        const auto& fam = header.at("family");
        cp.model.family.kind = model_kind_from_string(fam.at("kind").get<std::string>());
        cp.model.family.inputs = fam.at("inputs").get<std::size_t>();
        cp.model.family.classes = fam.at("classes").get<std::size_t>();
        cp.model.family.hidden = fam.at("hidden").get<std::vector<std::size_t>>();
        cp.model.l2 = header.at("l2").get<double>();
        cp.meta_json = header.value("meta", nlohmann::json::object()).dump();
        const auto count = header.at("count").get<std::size_t>();
        const auto payload = bytes.substr(newline + 1);
        if (payload.size() != 8 * count) {
            throw IngestionError(fmt::format("checkpoint payload has {} bytes, expected {}",
                                             payload.size(), 8 * count));
        }
        cp.model.params.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t bits = 0;
            for (std::size_t b = 0; b < 8; ++b) {
                bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(payload[8 * i + b]))
                        << (8 * b);
            }
            cp.model.params[i] = std::bit_cast<double>(bits);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IngestionError(fmt::format("checkpoint header: {}", e.what()));
    }
    cp.model.validate();
    return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    io::atomic_write(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    try {
        return decode_checkpoint(io::read_file(path));
    } catch (const IngestionError& e) {
        throw IngestionError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

}  // namespace radfed::model
