#include <filesystem>

#include <fmt/format.h>
#include <json.hpp>

#include "cli/cli.hpp"
#include "radfed/data.hpp"
#include "radfed/error.hpp"
#include "radfed/io.hpp"

namespace radfed::cli {

int cmd_gen(const GenOptions& options, std::ostream& out) {
    if (options.classes < 2) {
        throw ConfigError("--classes must be at least 2");
    }
    if (options.features < 1) {
        throw ConfigError("--features must be at least 1");
    }
    if (!(options.separation > 0.0)) {
        throw ConfigError("--separation must be positive");
    }
    if (options.samples < 1) {
        throw ConfigError("--samples must be at least 1");
    }
    for (int a : options.categorical) {
        if (a < 1) {
            throw ConfigError("categorical arities must be at least 1");
        }
    }

    nlohmann::json params = {{"command", "gen"},
                             {"classes", options.classes},
                             {"features", options.features},
                             {"separation", options.separation},
                             {"samples", options.samples},
                             {"seed", options.seed},
                             {"categorical", options.categorical}};
    const std::string hash = io::sha256_hex(params.dump());

    data::SynthSpec spec;
    spec.classes = options.classes;
    spec.features = options.features;
    spec.separation = options.separation;
    spec.samples = options.samples;
    spec.seed = options.seed;
    spec.categorical_arities = options.categorical;
    const data::Dataset ds = data::synth_gaussian_mixture(spec);

    const std::filesystem::path csv_path = options.out;
    std::filesystem::path schema_path;
    if (options.schema_out) {
        schema_path = *options.schema_out;
    } else {
        schema_path = csv_path;
        schema_path.replace_extension(".schema.json");
    }
    io::atomic_write(csv_path, data::dataset_to_csv(ds, io::provenance_line(hash, options.seed)));
    auto schema = nlohmann::json::parse(data::schema_to_json(data::schema_of(ds)));
    schema["manifest_hash"] = hash;
    schema["seed"] = options.seed;
    io::atomic_write(schema_path, schema.dump(2) + "\n");
    out << fmt::format("wrote {} samples to {} (schema {})\n", ds.size(), csv_path.string(),
                       schema_path.string());
    return kOk;
}

}  // namespace radfed::cli
