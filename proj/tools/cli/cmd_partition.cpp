#include <algorithm>
#include <filesystem>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "cli/cli.hpp"
#include "cli/manifest.hpp"
#include "radfed/data.hpp"
#include "radfed/error.hpp"
#include "radfed/io.hpp"
#include "radfed/log.hpp"
#include "radfed/partition.hpp"

namespace radfed::cli {

using nlohmann::json;

namespace {

template <class T>
T pick(const std::optional<T>& flag, const T& fallback) {
    return flag ? *flag : fallback;
}

data::Schema schema_from_header(std::string_view text, const std::string& label,
                                const std::vector<std::string>& categorical) {
    const io::CsvTable table = io::parse_csv(text);
    data::Schema schema;
    schema.label = label;
    schema.categorical = categorical;
    const std::set<std::string> cat(categorical.begin(), categorical.end());
    bool has_label = false;
    for (const auto& name : table.header) {
        if (name == label) {
            has_label = true;
        } else if (!cat.count(name)) {
            schema.numeric.push_back(name);
        }
    }
    if (!has_label) {
        throw IngestionError(fmt::format("label column '{}' is not in the header", label));
    }
    return schema;
}

// Keeps only the categorical columns named in `features`, in that order.
data::Dataset select_features(const data::Dataset& ds, const std::vector<std::string>& features) {
    data::Dataset out = ds;
    out.categorical = Matrix<int>(ds.size(), features.size());
    out.categorical_names = features;
    out.category_names.clear();
    for (std::size_t f = 0; f < features.size(); ++f) {
        const auto it = std::find(ds.categorical_names.begin(), ds.categorical_names.end(), features[f]);
        if (it == ds.categorical_names.end()) {
            throw ConfigError(fmt::format("feature '{}' is not a categorical column", features[f]));
        }
        const auto j = static_cast<std::size_t>(it - ds.categorical_names.begin());
        out.category_names.push_back(ds.category_names[j]);
        for (std::size_t r = 0; r < ds.size(); ++r) {
            out.categorical(r, f) = ds.categorical(r, j);
        }
    }
    return out;
}

}  // namespace

int cmd_partition(const PartitionOptions& options, std::ostream& out) {
    std::optional<Manifest> manifest;
    if (options.config) {
        manifest = load_manifest(*options.config);
    }
    const DatasetSpec dspec = manifest && manifest->dataset ? *manifest->dataset : DatasetSpec{};
    const PartitionSpec pspec = manifest ? manifest->partition : PartitionSpec{};

    const std::string input = pick(options.input, dspec.path);
    if (input.empty()) {
        throw ConfigError("no input dataset (--input or dataset.path in --config)");
    }
    const auto schema_path = options.schema ? options.schema : dspec.schema_path;
    const std::string label = pick(options.label_col, dspec.label);
    const auto categorical = pick(options.categorical, dspec.categorical);

    PartitionSpec spec = pspec;
    spec.clients = pick(options.clients, spec.clients);
    spec.mu = pick(options.mu, spec.mu);
    spec.lambda = pick(options.lambda, spec.lambda);
    if (options.theta) {
        spec.theta = options.theta;
    }
    spec.features = pick(options.features, spec.features);
    spec.walk.burn_in = pick(options.burn_in, spec.walk.burn_in);
    spec.walk.steps = pick(options.steps, spec.walk.steps);
    spec.walk.xi = pick(options.xi, spec.walk.xi);
    spec.seed = pick(options.seed, spec.seed);
    if (!spec.features.empty() && !spec.theta) {
        spec.theta = 0.1;
    }

    std::string text;
    try {
        text = io::read_file(input);
    } catch (const IngestionError& e) {
        throw ConfigError(e.what());
    }
    data::Schema schema = schema_path ? data::load_schema(*schema_path)
                                      : schema_from_header(text, label, categorical);
    const data::Dataset full = [&] {
        try {
            return data::parse_csv_dataset(text, schema);
        } catch (const IngestionError& e) {
            throw IngestionError(fmt::format("{}: {}", input, e.what()));
        }
    }();
    const data::Dataset ds = select_features(full, spec.features);

    json resolved = {{"command", "partition"},
                     {"input", input},
                     {"schema", json::parse(data::schema_to_json(schema))},
                     {"clients", spec.clients},
                     {"mu", spec.mu},
                     {"lambda", spec.lambda},
                     {"theta", spec.theta ? json(*spec.theta) : json(nullptr)},
                     {"features", spec.features},
                     {"burn_in", spec.walk.burn_in},
                     {"steps", spec.walk.steps},
                     {"xi", spec.walk.xi},
                     {"seed", spec.seed}};
    const std::string hash = manifest ? manifest->hash : io::sha256_hex(resolved.dump());

    if (spec.clients < 1) {
        throw ConfigError("--clients must be at least 1");
    }
    if (static_cast<std::size_t>(spec.clients) > ds.size()) {
        throw InfeasibleError(fmt::format("{} clients cannot each receive a sample from {} samples",
                                          spec.clients, ds.size()));
    }

    partition::DirichletPriors priors;
    priors.mu = spec.mu;
    priors.lambda = spec.lambda;
    priors.theta = spec.theta;
    priors.clients = spec.clients;
    priors.classes = static_cast<int>(ds.num_classes());
    priors.feature_arities = ds.arities();
    try {
        priors.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }

    const bool configurations = !spec.features.empty();
    const partition::PartitionTarget target =
        configurations
            ? partition::build_target_full(priors, partition::count_configurations(ds), spec.seed)
            : partition::build_target_class_size(priors, ds.class_counts(), spec.seed);
    const auto columns = configurations ? partition::configuration_columns(ds, target)
                                        : partition::class_columns(ds);

    const partition::PartitionMatrix qp = partition::solve_qp(target);
    const double qp_loss = partition::partition_loss(target, qp.counts);
    partition::WalkResult walk{qp, qp_loss, qp_loss};
    if (target.cols() >= 2) {
        Rng walk_rng = make_rng(spec.seed, {tag("partition.walk")});
        walk = partition::random_qp_solution(qp, target, spec.walk, walk_rng);
    }
    const partition::IntegerPartition integer = partition::round_partition(walk.best);
    RealMatrix rounded(integer.counts.rows(), integer.counts.cols());
    for (std::size_t i = 0; i < rounded.size(); ++i) {
        rounded.values()[i] = static_cast<double>(integer.counts.values()[i]);
    }
    const double rounded_loss = partition::partition_loss(target, rounded);

    Rng assign_rng = make_rng(spec.seed, {tag("partition.assign")});
    const auto clients = partition::assign_samples(ds, columns, integer, assign_rng);
    const double score = partition::c_score(clients);

    json doc;
    doc["format"] = "radfed-partition";
    doc["version"] = 1;
    doc["manifest_hash"] = hash;
    doc["seed"] = spec.seed;
    doc["dataset"] = {{"path", input},
                      {"sha256", io::sha256_hex(text)},
                      {"schema", json::parse(data::schema_to_json(schema))},
                      {"samples", ds.size()}};
    doc["priors"] = {{"mu", spec.mu},
                     {"lambda", spec.lambda},
                     {"theta", spec.theta ? json(*spec.theta) : json(nullptr)},
                     {"clients", spec.clients}};
    doc["objective"] = configurations ? "configuration" : "class_size";
    doc["features"] = spec.features;
    if (configurations) {
        doc["columns"] = target.configurations;
    } else {
        doc["columns"] = ds.class_names;
    }
    doc["walk"] = {{"burn_in", spec.walk.burn_in}, {"steps", spec.walk.steps}, {"xi", spec.walk.xi}};
    doc["losses"] = {{"qp", qp_loss},
                     {"burn_in", walk.burn_in_loss},
                     {"best", walk.best_loss},
                     {"rounded", rounded_loss}};
    json matrix = json::array();
    for (std::size_t t = 0; t < integer.counts.rows(); ++t) {
        const auto row = integer.counts.row(t);
        matrix.push_back(std::vector<std::int64_t>(row.begin(), row.end()));
    }
    doc["matrix"] = matrix;
    json client_list = json::array();
    std::size_t empty = 0;
    for (const auto& c : clients) {
        empty += c.empty() ? 1 : 0;
        client_list.push_back({{"id", c.id}, {"size", c.size()}, {"sample_indices", c.source_rows}});
    }
    doc["clients"] = client_list;
    doc["c_score"] = score;

    std::string counts_csv = io::provenance_line(hash, spec.seed);
    std::vector<std::string> header{"client"};
    header.insert(header.end(), ds.class_names.begin(), ds.class_names.end());
    counts_csv += io::csv_line(header);
    for (const auto& c : clients) {
        std::vector<std::string> fields{std::to_string(c.id)};
        for (auto k : c.class_counts) {
            fields.push_back(std::to_string(k));
        }
        counts_csv += io::csv_line(fields);
    }

    const std::filesystem::path dir = options.out;
    io::atomic_write(dir / "partition.json", doc.dump(1) + "\n");
    io::atomic_write(dir / "counts.csv", counts_csv);
    if (empty > 0) {
        logger().warn("{} of {} clients received no samples", empty, clients.size());
    }
    out << fmt::format("partitioned {} samples over {} clients (c_score {:.4f}) into {}\n",
                       ds.size(), clients.size(), score, dir.string());
    return kOk;
}

}  // namespace radfed::cli
