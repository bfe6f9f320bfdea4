#include <chrono>
#include <cmath>
#include <filesystem>

#include <fmt/format.h>
#include <json.hpp>

#include "cli/cli.hpp"
#include "cli/manifest.hpp"
#include "radfed/data.hpp"
#include "radfed/error.hpp"
#include "radfed/experiment.hpp"
#include "radfed/io.hpp"
#include "radfed/log.hpp"
#include "radfed/model.hpp"

namespace radfed::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct LoadedPartition {
    std::string sha256;
    std::string manifest_hash;
    std::vector<data::ClientDataset> clients;
};

fs::path resolve_dataset(const std::string& path, const fs::path& partition_file) {
    const fs::path p = path;
    if (p.is_absolute() || fs::exists(p)) {
        return p;
    }
    const fs::path beside = partition_file.parent_path() / p;
    return fs::exists(beside) ? beside : p;
}

LoadedPartition load_partition(const fs::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const IngestionError& e) {
        throw ConfigError(e.what());
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    if (doc.value("format", "") != "radfed-partition") {
        throw ConfigError(fmt::format("{} is not a partition file", path.string()));
    }
    LoadedPartition out;
    out.sha256 = io::sha256_hex(text);
    try {
        out.manifest_hash = doc.at("manifest_hash").get<std::string>();
        const auto& d = doc.at("dataset");
        const fs::path data_path = resolve_dataset(d.at("path").get<std::string>(), path);
        const std::string data_text = io::read_file(data_path);
        if (io::sha256_hex(data_text) != d.at("sha256").get<std::string>()) {
            throw ConfigError(fmt::format("{} changed since it was partitioned", data_path.string()));
        }
        const data::Schema schema = data::parse_schema(d.at("schema").dump());
        const data::Dataset ds = data::parse_csv_dataset(data_text, schema);
        for (const auto& c : doc.at("clients")) {
            const auto rows = c.at("sample_indices").get<std::vector<std::size_t>>();
            for (std::size_t r : rows) {
                if (r >= ds.size()) {
                    throw ConfigError(fmt::format("client sample index {} out of range", r));
                }
            }
            out.clients.push_back(data::make_client(ds, c.at("id").get<int>(), rows));
        }
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return out;
}

std::string optional_real(const std::optional<double>& v) {
    return v ? io::format_real(*v) : std::string{};
}

std::string joined_reals(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? ";" : "") + io::format_real(values[i]);
    }
    return out;
}

std::string selected_field(const std::vector<std::vector<int>>& selected) {
    std::string out;
    for (std::size_t s = 0; s < selected.size(); ++s) {
        if (s) {
            out += '|';
        }
        for (std::size_t i = 0; i < selected[s].size(); ++i) {
            out += (i ? ";" : "") + std::to_string(selected[s][i]);
        }
    }
    return out;
}

std::string checkpoint_name(const char* prefix, std::size_t round) {
    return fmt::format("{}_t{:04d}.ckpt", prefix, round);
}

std::string meta(const std::string& hash, fed::Algorithm alg, std::uint64_t seed,
                 std::size_t round) {
    return json{{"manifest_hash", hash},
                {"algorithm", fed::to_string(alg)},
                {"seed", seed},
                {"round", round}}
        .dump();
}

double finite_or_nan(double v) { return std::isfinite(v) ? v : std::nan(""); }

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out) {
    const Manifest manifest = load_manifest(options.config);
    const std::string out_dir = options.out_dir ? *options.out_dir
                                : manifest.output_dir ? *manifest.output_dir
                                                      : std::string{};
    if (out_dir.empty()) {
        throw ConfigError("no output directory (--out-dir or output_dir in the manifest)");
    }
    std::vector<fed::Algorithm> algorithms = manifest.algorithms;
    if (!options.algorithms.empty()) {
        algorithms.clear();
        for (const auto& name : options.algorithms) {
            algorithms.push_back(fed::algorithm_from_string(name));
        }
    }
    const std::vector<std::uint64_t> seeds =
        options.seed ? std::vector<std::uint64_t>{*options.seed} : manifest.seeds;
    const std::size_t workers = workers_from_env();
    for (auto alg : algorithms) {
        manifest.config_for(alg).validate();
    }

    const LoadedPartition part = load_partition(options.partition);
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < part.clients.size(); ++i) {
        if (part.clients[i].empty()) {
            logger().warn("skipping empty client {}", part.clients[i].id);
        } else {
            usable.push_back(i);
        }
    }
    std::vector<fed::FoldSplit> splits;
    try {
        splits = fed::make_folds(usable, manifest.folds.count, manifest.folds.seed,
                                 manifest.folds.nested);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }

    const fs::path root = out_dir;
    json cells = json::array();
    json timings = json::array();
    json summary = json::object();
    bool any_failed = false;

    for (auto alg : algorithms) {
        fed::FederatedConfig cfg = manifest.config_for(alg);
        cfg.workers = workers;
        std::vector<double> scores;
        for (std::uint64_t seed : seeds) {
            cfg.seed = seed;
            for (const auto& split : splits) {
                const std::string fold_name =
                    manifest.folds.nested
                        ? fmt::format("fold{}-val{}", split.test_fold, split.validation_fold)
                        : fmt::format("fold{}", split.test_fold);
                const fs::path rel = fs::path("cells") / fed::to_string(alg) /
                                     fmt::format("seed{}", seed) / fold_name;
                const fs::path final_dir = root / rel;
                fs::path staging = final_dir;
                staging += ".partial";
                fs::remove_all(staging);

                json cell = {{"algorithm", fed::to_string(alg)},
                             {"seed", seed},
                             {"test_fold", split.test_fold},
                             {"validation_fold", split.validation_fold},
                             {"dir", rel.generic_string()},
                             {"partition_sha256", part.sha256},
                             {"centralized_twin", cfg.centralized_twin}};
                std::vector<double> durations;
                const auto start = std::chrono::steady_clock::now();
                try {
                    std::string rounds_csv = io::provenance_line(manifest.hash, seed);
                    rounds_csv += io::csv_line({"t", "algorithm", "selected", "mean_train_loss",
                                                "validation_metric", "dl", "dc", "dc_distance"});
                    auto observer = [&](const fed::RoundRecord& r, const model::ModelState& global,
                                        const model::ModelState* twin) {
                        rounds_csv += io::csv_line(
                            {std::to_string(r.round), fed::to_string(r.algorithm),
                             selected_field(r.selected), io::format_real(r.mean_train_loss),
                             optional_real(r.validation_metric), joined_reals(r.local_divergence),
                             optional_real(r.dc), optional_real(r.dc_distance)});
                        durations.push_back(r.duration_ms);
                        const auto m = meta(manifest.hash, alg, seed, r.round);
                        model::save_checkpoint(staging / "checkpoints" / checkpoint_name("global", r.round),
                                               {global, m});
                        if (twin != nullptr) {
                            model::save_checkpoint(
                                staging / "checkpoints" / checkpoint_name("central", r.round),
                                {*twin, m});
                        }
                    };
                    const auto result = fed::run_experiment(cfg, part.clients, split, observer);
                    io::atomic_write(staging / "rounds.csv", rounds_csv);
                    model::save_checkpoint(staging / "best.ckpt",
                                           {result.best_model, meta(manifest.hash, alg, seed, result.best_round)});
                    model::save_checkpoint(staging / "final.ckpt",
                                           {result.final_model, meta(manifest.hash, alg, seed, cfg.rounds)});
                    fs::remove_all(final_dir);
                    fs::create_directories(final_dir.parent_path());
                    fs::rename(staging, final_dir);

                    cell["status"] = "ok";
                    cell["rounds"] = cfg.rounds;
                    cell["best_round"] = result.best_round;
                    cell["best_validation"] = result.best_validation
                                                  ? json(*result.best_validation)
                                                  : json(nullptr);
                    cell["test_metric"] = std::isfinite(result.test_metric)
                                              ? json(result.test_metric)
                                              : json(nullptr);
                    if (std::isfinite(result.test_metric)) {
                        scores.push_back(result.test_metric);
                    }
                } catch (const std::exception& e) {
                    fs::remove_all(staging);
                    any_failed = true;
                    cell["status"] = "failed";
                    cell["error"] = e.what();
                    logger().error("cell {} failed: {}", rel.generic_string(), e.what());
                }
                cells.push_back(cell);
                timings.push_back(
                    {{"dir", rel.generic_string()},
                     {"total_ms", std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - start)
                                      .count()},
                     {"round_ms", durations}});
            }
        }
        json stats = {{"metric", metrics::to_string(cfg.metric)}, {"count", scores.size()}};
        if (!scores.empty()) {
            double mean = 0.0;
            for (double s : scores) {
                mean += s;
            }
            mean /= static_cast<double>(scores.size());
            double var = 0.0;
            for (double s : scores) {
                var += (s - mean) * (s - mean);
            }
            const double stdev =
                scores.size() > 1 ? std::sqrt(var / static_cast<double>(scores.size() - 1)) : 0.0;
            stats["mean"] = finite_or_nan(mean);
            stats["stdev"] = stdev;
        } else {
            stats["mean"] = nullptr;
            stats["stdev"] = nullptr;
        }
        summary[fed::to_string(alg)] = stats;
    }

    json configs = json::object();
    for (auto alg : algorithms) {
        configs[fed::to_string(alg)] = federated_to_json(manifest.config_for(alg));
    }
    json result = {{"format", "radfed-result"},
                   {"version", 1},
                   {"manifest_hash", manifest.hash},
                   {"seeds", seeds},
                   {"partition", {{"path", options.partition}, {"sha256", part.sha256}}},
                   {"folds", {{"count", manifest.folds.count},
                              {"nested", manifest.folds.nested},
                              {"seed", manifest.folds.seed}}},
                   {"configs", configs},
                   {"cells", cells},
                   {"summary", summary}};
    io::atomic_write(root / "result.json", result.dump(1) + "\n");
    io::atomic_write(root / "timings.json", json{{"cells", timings}}.dump(1) + "\n");

    for (const auto& [name, stats] : summary.items()) {
        if (stats["mean"].is_null()) {
            out << fmt::format("{}: no scored cells\n", name);
        } else {
            out << fmt::format("{}: {} {:.4f} +/- {:.4f} over {} cells\n", name,
                               stats["metric"].get<std::string>(), stats["mean"].get<double>(),
                               stats["stdev"].get<double>(), stats["count"].get<std::size_t>());
        }
    }
    return any_failed ? kFailure : kOk;
}

}  // namespace radfed::cli
