#include "radfed/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "radfed/error.hpp"
#include "radfed/io.hpp"

namespace radfed::data {

using nlohmann::json;

Schema parse_schema(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("schema: {}", e.what()));
    }
    Schema schema;
    try {
        schema.label = doc.at("label").get<std::string>();
        schema.categorical = doc.value("categorical", std::vector<std::string>{});
        schema.numeric = doc.value("numeric", std::vector<std::string>{});
        schema.classes = doc.value("classes", std::vector<std::string>{});
        if (doc.contains("categories")) {
            schema.categories =
                doc.at("categories").get<std::map<std::string, std::vector<std::string>>>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("schema: {}", e.what()));
    }
    return schema;
}

Schema load_schema(const std::filesystem::path& path) {
    return parse_schema(io::read_file(path));
}

std::string schema_to_json(const Schema& schema) {
    json doc;
    doc["label"] = schema.label;
    doc["categorical"] = schema.categorical;
    doc["numeric"] = schema.numeric;
    if (!schema.classes.empty()) {
        doc["classes"] = schema.classes;
    }
    if (!schema.categories.empty()) {
        doc["categories"] = schema.categories;
    }
    return doc.dump(2) + "\n";
}

std::vector<int> Dataset::arities() const {
    std::vector<int> out;
    out.reserve(category_names.size());
    for (const auto& names : category_names) {
        out.push_back(static_cast<int>(names.size()));
    }
    return out;
}

std::vector<std::int64_t> Dataset::class_counts() const {
    std::vector<std::int64_t> counts(num_classes(), 0);
    for (int y : labels) {
        ++counts[static_cast<std::size_t>(y)];
    }
    return counts;
}

std::size_t Dataset::encoded_width() const {
    std::size_t width = numeric.cols();
    for (int a : arities()) {
        width += static_cast<std::size_t>(a);
    }
    return width;
}

namespace {

std::vector<std::string> vocabulary(const std::vector<std::string>& declared,
                                    const io::CsvTable& table, std::size_t column) {
    if (!declared.empty()) {
        return declared;
    }
    std::set<std::string> seen;
    for (const auto& row : table.rows) {
        seen.insert(row[column]);
    }
    return {seen.begin(), seen.end()};
}

int code_of(const std::vector<std::string>& vocab, const std::string& value,
            const std::string& column, std::size_t line) {
    const auto it = std::find(vocab.begin(), vocab.end(), value);
    if (it == vocab.end()) {
        throw IngestionError(
            fmt::format("line {}: unknown value '{}' in column '{}'", line, value, column));
    }
    return static_cast<int>(it - vocab.begin());
}

double parse_real(const std::string& text, const std::string& column, std::size_t line) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && *first == ' ') {
        ++first;
    }
    while (last > first && last[-1] == ' ') {
        --last;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(value)) {
        throw IngestionError(
            fmt::format("line {}: cannot parse '{}' in column '{}' as a number", line, text, column));
    }
    return value;
}

}  // namespace

Dataset parse_csv_dataset(std::string_view text, const Schema& schema) {
    const io::CsvTable table = io::parse_csv(text);
    if (table.rows.empty()) {
        throw IngestionError("dataset has no rows");
    }
    Dataset ds;
    const std::size_t label_col = table.column(schema.label);
    ds.class_names = vocabulary(schema.classes, table, label_col);

    std::vector<std::size_t> numeric_cols;
    for (const auto& name : schema.numeric) {
        numeric_cols.push_back(table.column(name));
        ds.numeric_names.push_back(name);
    }
    std::vector<std::size_t> categorical_cols;
    for (const auto& name : schema.categorical) {
        const std::size_t col = table.column(name);
        categorical_cols.push_back(col);
        ds.categorical_names.push_back(name);
        const auto declared = schema.categories.find(name);
        ds.category_names.push_back(vocabulary(
            declared == schema.categories.end() ? std::vector<std::string>{} : declared->second,
            table, col));
    }

    const std::size_t n = table.rows.size();
    ds.numeric = RealMatrix(n, numeric_cols.size());
    ds.categorical = Matrix<int>(n, categorical_cols.size());
    ds.labels.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.lines[r];
        ds.labels[r] = code_of(ds.class_names, row[label_col], schema.label, line);
        for (std::size_t j = 0; j < numeric_cols.size(); ++j) {
            ds.numeric(r, j) = parse_real(row[numeric_cols[j]], schema.numeric[j], line);
        }
        for (std::size_t j = 0; j < categorical_cols.size(); ++j) {
            ds.categorical(r, j) =
                code_of(ds.category_names[j], row[categorical_cols[j]], schema.categorical[j], line);
        }
    }
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
    try {
        return parse_csv_dataset(io::read_file(path), schema);
    } catch (const IngestionError& e) {
        throw IngestionError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

Schema schema_of(const Dataset& dataset) {
    Schema schema;
    schema.label = "label";
    schema.numeric = dataset.numeric_names;
    schema.categorical = dataset.categorical_names;
    schema.classes = dataset.class_names;
    for (std::size_t j = 0; j < dataset.categorical_names.size(); ++j) {
        schema.categories[dataset.categorical_names[j]] = dataset.category_names[j];
    }
    return schema;
}

std::string dataset_to_csv(const Dataset& dataset, std::string_view preamble) {
    std::string out(preamble);
    std::vector<std::string> header = dataset.numeric_names;
    header.insert(header.end(), dataset.categorical_names.begin(), dataset.categorical_names.end());
    header.emplace_back("label");
    out += io::csv_line(header);
    std::vector<std::string> fields;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        fields.clear();
        for (double v : dataset.numeric.row(r)) {
            fields.push_back(io::format_real(v));
        }
        for (std::size_t j = 0; j < dataset.categorical.cols(); ++j) {
            fields.push_back(dataset.category_names[j][static_cast<std::size_t>(dataset.categorical(r, j))]);
        }
        fields.push_back(dataset.class_names[static_cast<std::size_t>(dataset.labels[r])]);
        out += io::csv_line(fields);
    }
    return out;
}

ClientDataset make_client(const Dataset& dataset, int id, std::span<const std::size_t> rows) {
    ClientDataset client;
    client.id = id;
    client.num_numeric = dataset.numeric.cols();
    client.source_rows.assign(rows.begin(), rows.end());
    client.class_counts.assign(dataset.num_classes(), 0);
    const auto arities = dataset.arities();
    for (int a : arities) {
        client.feature_category_counts.emplace_back(static_cast<std::size_t>(a), 0);
    }
    const std::size_t width = dataset.encoded_width();
    client.features = RealMatrix(rows.size(), width);
    client.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        if (r >= dataset.size()) {
            throw ConsistencyError(fmt::format("row {} out of range", r));
        }
        auto out = client.features.row(i);
        const auto numeric = dataset.numeric.row(r);
        std::copy(numeric.begin(), numeric.end(), out.begin());
        std::size_t offset = numeric.size();
        for (std::size_t j = 0; j < arities.size(); ++j) {
            const int code = dataset.categorical(r, j);
            out[offset + static_cast<std::size_t>(code)] = 1.0;
            ++client.feature_category_counts[j][static_cast<std::size_t>(code)];
            offset += static_cast<std::size_t>(arities[j]);
        }
        client.labels.push_back(dataset.labels[r]);
        ++client.class_counts[static_cast<std::size_t>(dataset.labels[r])];
    }
    return client;
}

ClientDataset pool(std::span<const ClientDataset* const> clients) {
    ClientDataset pooled;
    pooled.id = -1;
    if (clients.empty()) {
        return pooled;
    }
    const ClientDataset& first = *clients.front();
    pooled.num_numeric = first.num_numeric;
    pooled.class_counts.assign(first.class_counts.size(), 0);
    pooled.feature_category_counts = first.feature_category_counts;
    for (auto& counts : pooled.feature_category_counts) {
        std::fill(counts.begin(), counts.end(), 0);
    }
    std::size_t total = 0;
    for (const auto* c : clients) {
        total += c->size();
    }
    pooled.features = RealMatrix(0, first.features.cols());
    pooled.labels.reserve(total);
    for (const auto* c : clients) {
        if (c->features.cols() != first.features.cols() ||
            c->class_counts.size() != first.class_counts.size()) {
            throw ConsistencyError("cannot pool clients with different feature layouts");
        }
        for (std::size_t r = 0; r < c->size(); ++r) {
            pooled.features.push_row(c->features.row(r));
        }
        pooled.labels.insert(pooled.labels.end(), c->labels.begin(), c->labels.end());
        pooled.source_rows.insert(pooled.source_rows.end(), c->source_rows.begin(),
                                  c->source_rows.end());
        for (std::size_t k = 0; k < c->class_counts.size(); ++k) {
            pooled.class_counts[k] += c->class_counts[k];
        }
        for (std::size_t j = 0; j < c->feature_category_counts.size(); ++j) {
            for (std::size_t i = 0; i < c->feature_category_counts[j].size(); ++i) {
                pooled.feature_category_counts[j][i] += c->feature_category_counts[j][i];
            }
        }
    }
    return pooled;
}

ClientDataset pool(std::span<const ClientDataset> clients) {
    std::vector<const ClientDataset*> ptrs;
    ptrs.reserve(clients.size());
    for (const auto& c : clients) {
        ptrs.push_back(&c);
    }
    return pool(std::span<const ClientDataset* const>(ptrs));
}

}  // namespace radfed::data
