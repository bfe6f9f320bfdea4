#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "radfed/matrix.hpp"

namespace radfed::data {

/// Column roles of a CSV dataset.
struct Schema {
    std::string label;
    std::vector<std::string> categorical;
    std::vector<std::string> numeric;
    /// Optional closed label vocabulary. When empty, classes are the sorted distinct values.
    std::vector<std::string> classes;
    /// Optional closed vocabularies for categorical columns.
    std::map<std::string, std::vector<std::string>> categories;
};

Schema load_schema(const std::filesystem::path& path);
Schema parse_schema(std::string_view json_text);
std::string schema_to_json(const Schema& schema);

/// A labeled dataset before partitioning. Categorical columns stay as raw codes.
struct Dataset {
    RealMatrix numeric;
    Matrix<int> categorical;
    std::vector<int> labels;

    std::vector<std::string> class_names;
    std::vector<std::string> numeric_names;
    std::vector<std::string> categorical_names;
    std::vector<std::vector<std::string>> category_names;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t num_classes() const noexcept { return class_names.size(); }
    std::vector<int> arities() const;
    std::vector<std::int64_t> class_counts() const;
    /// Width of the model input: numeric columns plus one-hot categorical columns.
    std::size_t encoded_width() const;
};

Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
Dataset parse_csv_dataset(std::string_view text, const Schema& schema);

/// Inverse of parse_csv_dataset; numbers are written in round-trip form.
std::string dataset_to_csv(const Dataset& dataset, std::string_view preamble = {});

/// Schema describing a dataset exactly as dataset_to_csv writes it.
Schema schema_of(const Dataset& dataset);

struct SynthSpec {
    int classes = 2;
    int features = 2;
    double separation = 3.0;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    /// Arity of each extra categorical column; category draws depend on the class.
    std::vector<int> categorical_arities;
};

/// Isotropic unit-variance Gaussian blobs. Class means are the rows of class_means(spec).
Dataset synth_gaussian_mixture(const SynthSpec& spec);
RealMatrix class_means(const SynthSpec& spec);

/// One client's local data in model-input form.
struct ClientDataset {
    int id = 0;
    RealMatrix features;
    std::vector<int> labels;
    /// Leading feature columns that are numeric; the remainder is one-hot.
    std::size_t num_numeric = 0;
    std::vector<std::int64_t> class_counts;
    std::vector<std::vector<std::int64_t>> feature_category_counts;
    /// Row indices into the source dataset.
    std::vector<std::size_t> source_rows;

    std::size_t size() const noexcept { return labels.size(); }
    bool empty() const noexcept { return labels.empty(); }
};

ClientDataset make_client(const Dataset& dataset, int id, std::span<const std::size_t> rows);

/// Concatenates clients in order into a single pooled dataset with id -1.
ClientDataset pool(std::span<const ClientDataset> clients);
ClientDataset pool(std::span<const ClientDataset* const> clients);

enum class Scope { global, local };

struct StandardizationStats {
    Scope scope = Scope::global;
    std::vector<double> mean;
    std::vector<double> stddev;
};

/// Per-feature mean and population stddev over the numeric columns of the pooled clients.
StandardizationStats compute_stats(std::span<const ClientDataset* const> clients, Scope scope);

void apply_stats(ClientDataset& client, const StandardizationStats& stats);

/// Global scope: statistics pooled over `reference` (all clients when empty) and applied to
/// every client. Local scope: each client uses its own statistics. Returns the statistics
/// used (one entry for global, one per client for local).
std::vector<StandardizationStats> standardize(std::vector<ClientDataset>& clients, Scope scope,
                                              std::span<const std::size_t> reference = {});

}  // namespace radfed::data
