#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radfed/fedcore.hpp"
#include "radfed/partition.hpp"

namespace radfed::cli {

/// Where a dataset lives and how its columns are typed.
struct DatasetSpec {
    std::string path;
    std::optional<std::string> schema_path;
    std::string label = "label";
    /// Categorical columns; everything else except the label is numeric.
    std::vector<std::string> categorical;
};

struct PartitionSpec {
    int clients = 100;
    double mu = 1.0;
    double lambda = 0.1;
    std::optional<double> theta;
    /// Categorical columns folded into the configuration objective. Empty selects the
    /// class/size objective.
    std::vector<std::string> features;
    partition::WalkOptions walk;
    std::uint64_t seed = 0;
};

struct FoldSpec {
    std::size_t count = 5;
    bool nested = false;
    std::uint64_t seed = 0;
};

/// An experiment file: the seeds x folds x algorithms grid plus shared settings.
struct Manifest {
    std::string hash;
    std::optional<DatasetSpec> dataset;
    PartitionSpec partition;
    FoldSpec folds;
    std::vector<std::uint64_t> seeds{0};
    std::vector<fed::Algorithm> algorithms{fed::Algorithm::radfed};
    fed::FederatedConfig federated;
    /// Per-algorithm overrides of `federated`, keyed by algorithm name.
    nlohmann::json per_algorithm = nlohmann::json::object();
    std::optional<std::string> output_dir;

    fed::FederatedConfig config_for(fed::Algorithm algorithm) const;
};

Manifest parse_manifest(std::string_view text);
Manifest load_manifest(const std::filesystem::path& path);

/// Applies the keys of `json` to `base`; unknown keys are configuration errors.
fed::FederatedConfig apply_federated(const nlohmann::json& json, fed::FederatedConfig base);
nlohmann::json federated_to_json(const fed::FederatedConfig& cfg);

/// Worker count from RADFED_WORKERS, or 1.
std::size_t workers_from_env();

}  // namespace radfed::cli
