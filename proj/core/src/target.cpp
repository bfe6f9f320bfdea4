#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/log.hpp"
#include "radfed/partition.hpp"

namespace radfed::partition {

void DirichletPriors::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(mu) || !positive(lambda) || (theta && !positive(*theta))) {
        throw ParameterError("Dirichlet concentrations must be positive");
    }
    if (clients < 2) {
        throw ParameterError("at least 2 clients are required");
    }
    if (classes < 2) {
        throw ParameterError("at least 2 classes are required");
    }
    for (int d : feature_arities) {
        if (d < 1) {
            throw ParameterError("feature arity must be at least 1");
        }
    }
    if (!feature_arities.empty() && !theta) {
        throw ParameterError("feature partitioning needs a feature concentration (theta)");
    }
}

double PartitionTarget::total() const {
    return std::accumulate(col_sums.begin(), col_sums.end(), 0.0);
}

void PartitionTarget::validate() const {
    const double rows_total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
    const double cols_total = total();
    const double n = std::max(1.0, cols_total);
    for (double r : row_sums) {
        if (!(r >= 0.0)) {
            throw InfeasibleError("row marginals must be nonnegative");
        }
    }
    for (double c : col_sums) {
        if (!(c >= 0.0)) {
            throw InfeasibleError("column marginals must be nonnegative");
        }
    }
    if (std::abs(rows_total - cols_total) > 1e-9 * n) {
        throw InfeasibleError(fmt::format("marginals disagree: rows sum to {}, columns to {}",
                                          rows_total, cols_total));
    }
    if (groups.empty()) {
        throw ConsistencyError("partition target has no objective groups");
    }
    for (const auto& g : groups) {
        if (g.bucket_of_column.size() != cols() || g.targets.rows() != rows() ||
            g.targets.cols() != g.buckets) {
            throw ConsistencyError(fmt::format("objective group '{}' has the wrong shape", g.name));
        }
    }
}

namespace {

MarginalGroup identity_group(std::string name, RealMatrix targets) {
    MarginalGroup g;
    g.name = std::move(name);
    g.buckets = targets.cols();
    g.bucket_of_column.resize(g.buckets);
    std::iota(g.bucket_of_column.begin(), g.bucket_of_column.end(), std::size_t{0});
    g.targets = std::move(targets);
    return g;
}

std::vector<double> draw_sizes(const DirichletPriors& priors, std::uint64_t seed) {
    Rng rng = make_rng(seed, {tag("partition.sizes")});
    return sample_dirichlet(priors.mu, static_cast<std::size_t>(priors.clients), rng);
}

RealMatrix draw_class_distributions(const DirichletPriors& priors, std::uint64_t seed) {
    const auto t_count = static_cast<std::size_t>(priors.clients);
    const auto k_count = static_cast<std::size_t>(priors.classes);
    RealMatrix dist(t_count, k_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        Rng rng = make_rng(seed, {tag("partition.classes"), t});
        const auto c = sample_dirichlet(priors.lambda, k_count, rng);
        std::copy(c.begin(), c.end(), dist.row(t).begin());
    }
    return dist;
}

}  // namespace

PartitionTarget class_size_target(std::span<const double> sizes, const RealMatrix& class_dist,
                                  std::span<const std::int64_t> class_totals) {
    if (class_totals.empty()) {
        throw ParameterError("no classes");
    }
    const double n = static_cast<double>(
        std::accumulate(class_totals.begin(), class_totals.end(), std::int64_t{0}));
    if (!(n > 0.0)) {
        throw ParameterError("dataset is empty");
    }
    if (class_dist.rows() != sizes.size() || class_dist.cols() != class_totals.size()) {
        throw ConsistencyError("class distribution shape does not match sizes and classes");
    }
    PartitionTarget target;
    target.row_sums.resize(sizes.size());
    for (std::size_t t = 0; t < sizes.size(); ++t) {
        target.row_sums[t] = sizes[t] * n;
    }
    target.col_sums.assign(class_totals.begin(), class_totals.end());
    RealMatrix desired(sizes.size(), class_totals.size());
    for (std::size_t t = 0; t < sizes.size(); ++t) {
        for (std::size_t k = 0; k < class_totals.size(); ++k) {
            desired(t, k) = class_dist(t, k) * sizes[t] * n;
        }
    }
    target.groups.push_back(identity_group("class", std::move(desired)));
    return target;
}

PartitionTarget build_target_class_size(const DirichletPriors& priors,
                                        std::span<const std::int64_t> class_totals,
                                        std::uint64_t seed) {
    priors.validate();
    if (class_totals.size() != static_cast<std::size_t>(priors.classes)) {
        throw ConsistencyError(fmt::format("priors declare {} classes but the data has {}",
                                           priors.classes, class_totals.size()));
    }
    const auto sizes = draw_sizes(priors, seed);
    const auto dist = draw_class_distributions(priors, seed);
    return class_size_target(sizes, dist, class_totals);
}

ConfigTotals count_configurations(const data::Dataset& dataset) {
    ConfigTotals totals;
    std::vector<int> u(1 + dataset.categorical.cols());
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        u[0] = dataset.labels[r];
        for (std::size_t j = 0; j < dataset.categorical.cols(); ++j) {
            u[j + 1] = dataset.categorical(r, j);
        }
        ++totals[u];
    }
    return totals;
}

PartitionTarget build_target_full(const DirichletPriors& priors, const ConfigTotals& config_totals,
                                  std::uint64_t seed) {
    priors.validate();
    const std::size_t m = priors.feature_arities.size();
    const auto t_count = static_cast<std::size_t>(priors.clients);
    const auto k_count = static_cast<std::size_t>(priors.classes);

    PartitionTarget target;
    std::vector<std::int64_t> class_totals(k_count, 0);
    for (const auto& [u, count] : config_totals) {
        if (u.size() != m + 1) {
            throw ConsistencyError("configuration length does not match the feature count");
        }
        if (u[0] < 0 || static_cast<std::size_t>(u[0]) >= k_count) {
            throw ConsistencyError(fmt::format("configuration class {} out of range", u[0]));
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (u[j + 1] < 0 || u[j + 1] >= priors.feature_arities[j]) {
                throw ConsistencyError(fmt::format("feature {} category {} out of range", j, u[j + 1]));
            }
        }
        if (count <= 0) {
            logger().warn("dropping configuration with no samples");
            continue;
        }
        target.configurations.push_back(u);
        target.col_sums.push_back(static_cast<double>(count));
        class_totals[static_cast<std::size_t>(u[0])] += count;
    }
    const double n = target.total();
    if (!(n > 0.0)) {
        throw ParameterError("dataset is empty");
    }

    const auto sizes = draw_sizes(priors, seed);
    const auto class_dist = draw_class_distributions(priors, seed);
    target.row_sums.resize(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        target.row_sums[t] = sizes[t] * n;
    }

    const std::size_t g_count = target.configurations.size();
    MarginalGroup classes;
    classes.name = "class";
    classes.buckets = k_count;
    classes.targets = RealMatrix(t_count, k_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t k = 0; k < k_count; ++k) {
            classes.targets(t, k) = class_dist(t, k) * sizes[t] * n;
        }
    }
    for (std::size_t g = 0; g < g_count; ++g) {
        classes.bucket_of_column.push_back(static_cast<std::size_t>(target.configurations[g][0]));
    }
    target.groups.push_back(std::move(classes));

    for (std::size_t j = 0; j < m; ++j) {
        const auto arity = static_cast<std::size_t>(priors.feature_arities[j]);
        MarginalGroup feature;
        feature.name = fmt::format("feature{}", j);
        feature.buckets = arity;
        feature.targets = RealMatrix(t_count, arity);
        for (std::size_t t = 0; t < t_count; ++t) {
            Rng rng = make_rng(seed, {tag("partition.features"), j, t});
            const auto f = sample_dirichlet(*priors.theta, arity, rng);
            for (std::size_t i = 0; i < arity; ++i) {
                feature.targets(t, i) = f[i] * sizes[t] * n;
            }
        }
        for (std::size_t g = 0; g < g_count; ++g) {
            feature.bucket_of_column.push_back(
                static_cast<std::size_t>(target.configurations[g][j + 1]));
        }
        target.groups.push_back(std::move(feature));
    }
    return target;
}

double partition_loss(const PartitionTarget& target, const RealMatrix& alpha) {
    if (alpha.rows() != target.rows() || alpha.cols() != target.cols()) {
        throw ConsistencyError("matrix shape does not match the partition target");
    }
    double loss = 0.0;
    std::vector<double> sums;
    for (const auto& g : target.groups) {
        for (std::size_t t = 0; t < alpha.rows(); ++t) {
            sums.assign(g.buckets, 0.0);
            for (std::size_t c = 0; c < alpha.cols(); ++c) {
                sums[g.bucket_of_column[c]] += alpha(t, c);
            }
            for (std::size_t b = 0; b < g.buckets; ++b) {
                const double r = sums[b] - g.targets(t, b);
                loss += r * r;
            }
        }
    }
    return loss;
}

}  // namespace radfed::partition
