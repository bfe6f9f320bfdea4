#include <filesystem>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cli/cli.hpp"
#include "radfed/error.hpp"
#include "radfed/io.hpp"
#include "radfed/metrics.hpp"
#include "radfed/model.hpp"

namespace radfed::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    if (text.empty()) {
        return out;
    }
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    return out;
}

std::string ckpt(const char* prefix, std::size_t t) {
    return fmt::format("{}_t{:04d}.ckpt", prefix, t);
}

}  // namespace

int cmd_metrics(const MetricsOptions& options, std::ostream& out) {
    const fs::path root = options.run_dir;
    json result;
    try {
        result = json::parse(io::read_file(root / "result.json"));
    } catch (const IngestionError& e) {
        throw ConfigError(fmt::format("not a run directory: {}", e.what()));
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", (root / "result.json").string(), e.what()));
    }
    const std::string hash = result.value("manifest_hash", "");

    struct CellSeries {
        json cell;
        std::vector<std::vector<std::string>> rows;
    };
    std::vector<CellSeries> series;
    std::vector<std::string> missing;

    for (const auto& cell : result.at("cells")) {
        if (cell.value("status", "") != "ok") {
            continue;
        }
        const fs::path dir = root / cell.at("dir").get<std::string>();
        const bool twin = cell.value("centralized_twin", false);
        const io::CsvTable table = io::parse_csv(io::read_file(dir / "rounds.csv"));
        const std::size_t t_col = table.column("t");
        const std::size_t dl_col = table.column("dl");

        std::vector<std::size_t> absent;
        for (const auto& row : table.rows) {
            const auto t = static_cast<std::size_t>(std::stoul(row[t_col]));
            if (!fs::exists(dir / "checkpoints" / ckpt("global", t)) ||
                (twin && !fs::exists(dir / "checkpoints" / ckpt("central", t)))) {
                absent.push_back(t);
            }
        }
        if (!absent.empty()) {
            std::string list;
            for (std::size_t i = 0; i < absent.size(); ++i) {
                list += (i ? ", " : "") + std::to_string(absent[i]);
            }
            missing.push_back(fmt::format("{}: rounds {}", cell.at("dir").get<std::string>(), list));
            continue;
        }

        CellSeries cs{cell, {}};
        for (const auto& row : table.rows) {
            const auto t = static_cast<std::size_t>(std::stoul(row[t_col]));
            std::string dc;
            std::string dist;
            if (twin) {
                const auto fl = model::load_checkpoint(dir / "checkpoints" / ckpt("global", t));
                const auto c = model::load_checkpoint(dir / "checkpoints" / ckpt("central", t));
                try {
                    dc = io::format_real(metrics::dc_divergence(fl.model, c.model));
                    dist = io::format_real(metrics::dc_distance(fl.model, c.model));
                } catch (const UndefinedValueError&) {
                }
            }
            const auto dl = split(row[dl_col], ';');
            if (dl.empty()) {
                cs.rows.push_back({std::to_string(t), "", "", dc, dist});
            }
            for (std::size_t s = 0; s < dl.size(); ++s) {
                cs.rows.push_back({std::to_string(t), std::to_string(s + 1), dl[s], dc, dist});
            }
        }
        series.push_back(std::move(cs));
    }
    if (!missing.empty()) {
        std::string msg = "missing checkpoints:";
        for (const auto& m : missing) {
            msg += "\n  " + m;
        }
        throw ConfigError(msg);
    }

    const std::vector<std::string> header{"t", "s", "DL", "DC", "dc_distance"};
    std::string combined;
    std::vector<std::string> seeds;
    for (const auto& s : result.value("seeds", json::array())) {
        seeds.push_back(std::to_string(s.get<std::uint64_t>()));
    }
    combined += fmt::format("# manifest={} seed={}\n", hash, fmt::join(seeds, ";"));
    std::vector<std::string> combined_header{"algorithm", "seed", "test_fold", "validation_fold"};
    combined_header.insert(combined_header.end(), header.begin(), header.end());
    combined += io::csv_line(combined_header);
    for (const auto& cs : series) {
        const auto seed = cs.cell.at("seed").get<std::uint64_t>();
        std::string per_cell = io::provenance_line(hash, seed) + io::csv_line(header);
        for (const auto& row : cs.rows) {
            per_cell += io::csv_line(row);
            std::vector<std::string> full{cs.cell.at("algorithm").get<std::string>(),
                                          std::to_string(seed),
                                          std::to_string(cs.cell.at("test_fold").get<std::size_t>()),
                                          std::to_string(cs.cell.at("validation_fold").get<std::size_t>())};
            full.insert(full.end(), row.begin(), row.end());
            combined += io::csv_line(full);
        }
        io::atomic_write(root / cs.cell.at("dir").get<std::string>() / "divergence.csv", per_cell);
    }
    const fs::path target = options.out ? fs::path(*options.out) : root / "divergence.csv";
    io::atomic_write(target, combined);
    out << fmt::format("wrote divergence series for {} cells to {}\n", series.size(), target.string());
    return kOk;
}

}  // namespace radfed::cli
