#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/log.hpp"
#include "radfed/partition.hpp"

namespace radfed::partition {

std::vector<std::size_t> class_columns(const data::Dataset& dataset) {
    return {dataset.labels.begin(), dataset.labels.end()};
}

std::vector<std::size_t> configuration_columns(const data::Dataset& dataset,
                                               const PartitionTarget& target) {
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t g = 0; g < target.configurations.size(); ++g) {
        index.emplace(target.configurations[g], g);
    }
    std::vector<std::size_t> out(dataset.size());
    std::vector<int> u(1 + dataset.categorical.cols());
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        u[0] = dataset.labels[r];
        for (std::size_t j = 0; j < dataset.categorical.cols(); ++j) {
            u[j + 1] = dataset.categorical(r, j);
        }
        const auto it = index.find(u);
        if (it == index.end()) {
            throw ConsistencyError(fmt::format("sample {} has a configuration the target lacks", r));
        }
        out[r] = it->second;
    }
    return out;
}

std::vector<data::ClientDataset> assign_samples(const data::Dataset& dataset,
                                                std::span<const std::size_t> column_of_sample,
                                                const IntegerPartition& partition, Rng& rng) {
    if (column_of_sample.size() != dataset.size()) {
        throw ConsistencyError("column assignment does not cover the dataset");
    }
    const std::size_t t_count = partition.counts.rows();
    const std::size_t g_count = partition.counts.cols();
    std::vector<std::vector<std::size_t>> by_column(g_count);
    for (std::size_t r = 0; r < column_of_sample.size(); ++r) {
        if (column_of_sample[r] >= g_count) {
            throw ConsistencyError(fmt::format("sample {} maps to column {} of {}", r,
                                               column_of_sample[r], g_count));
        }
        by_column[column_of_sample[r]].push_back(r);
    }
    const auto col_sums = partition.counts.col_sums();
    for (std::size_t g = 0; g < g_count; ++g) {
        if (col_sums[g] != static_cast<std::int64_t>(by_column[g].size())) {
            throw ConsistencyError(fmt::format("column {} allots {} samples but {} exist", g,
                                               col_sums[g], by_column[g].size()));
        }
    }

    std::vector<std::vector<std::size_t>> rows(t_count);
    for (std::size_t g = 0; g < g_count; ++g) {
        auto& pool = by_column[g];
        shuffle(std::span<std::size_t>(pool), rng);
        std::size_t next = 0;
        for (std::size_t t = 0; t < t_count; ++t) {
            const auto take = static_cast<std::size_t>(partition.counts(t, g));
            rows[t].insert(rows[t].end(), pool.begin() + static_cast<std::ptrdiff_t>(next),
                           pool.begin() + static_cast<std::ptrdiff_t>(next + take));
            next += take;
        }
    }

    std::vector<data::ClientDataset> clients;
    clients.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        std::sort(rows[t].begin(), rows[t].end());
        if (rows[t].empty()) {
            logger().warn("client {} received no samples", t);
        }
        clients.push_back(data::make_client(dataset, static_cast<int>(t), rows[t]));
    }
    return clients;
}

double c_score(std::span<const data::ClientDataset> clients) {
    std::size_t classes = 0;
    for (const auto& c : clients) {
        classes = std::max(classes, c.class_counts.size());
    }
    std::vector<double> global(classes, 0.0);
    std::size_t nonempty = 0;
    double total = 0.0;
    for (const auto& c : clients) {
        if (c.empty()) {
            continue;
        }
        ++nonempty;
        for (std::size_t k = 0; k < c.class_counts.size(); ++k) {
            global[k] += static_cast<double>(c.class_counts[k]);
            total += static_cast<double>(c.class_counts[k]);
        }
    }
    if (nonempty == 0) {
        throw ParameterError("c-score needs at least one non-empty client");
    }
    if (nonempty < clients.size()) {
        logger().warn("c-score skips {} empty clients", clients.size() - nonempty);
    }
    for (double& g : global) {
        g /= total;
    }
    double sum = 0.0;
    for (const auto& c : clients) {
        if (c.empty()) {
            continue;
        }
        const double n = static_cast<double>(c.size());
        for (std::size_t k = 0; k < classes; ++k) {
            const double local =
                k < c.class_counts.size() ? static_cast<double>(c.class_counts[k]) / n : 0.0;
            sum += std::abs(local - global[k]);
        }
    }
    return sum / static_cast<double>(nonempty);
}

}  // namespace radfed::partition
