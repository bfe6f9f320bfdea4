#include <algorithm>
#include <cmath>

#include "radfed/data.hpp"
#include "radfed/error.hpp"
#include "radfed/log.hpp"

namespace radfed::data {

StandardizationStats compute_stats(std::span<const ClientDataset* const> clients, Scope scope) {
    StandardizationStats stats;
    stats.scope = scope;
    if (clients.empty()) {
        return stats;
    }
    const std::size_t d = clients.front()->num_numeric;
    stats.mean.assign(d, 0.0);
    stats.stddev.assign(d, 1.0);
    std::size_t n = 0;
    for (const auto* c : clients) {
        if (c->num_numeric != d) {
            throw ConsistencyError("clients disagree on the numeric feature count");
        }
        for (std::size_t r = 0; r < c->size(); ++r) {
            for (std::size_t j = 0; j < d; ++j) {
                stats.mean[j] += c->features(r, j);
            }
        }
        n += c->size();
    }
    if (n == 0) {
        return stats;
    }
    for (double& m : stats.mean) {
        m /= static_cast<double>(n);
    }
    std::vector<double> var(d, 0.0);
    for (const auto* c : clients) {
        for (std::size_t r = 0; r < c->size(); ++r) {
            for (std::size_t j = 0; j < d; ++j) {
                const double delta = c->features(r, j) - stats.mean[j];
                var[j] += delta * delta;
            }
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        // Zero-variance features collapse to 0 after centering.
        stats.stddev[j] = sd > 1e-12 ? sd : 1.0;
    }
    return stats;
}

void apply_stats(ClientDataset& client, const StandardizationStats& stats) {
    const std::size_t d = std::min(client.num_numeric, stats.mean.size());
    for (std::size_t r = 0; r < client.size(); ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            client.features(r, j) = (client.features(r, j) - stats.mean[j]) / stats.stddev[j];
        }
    }
}

std::vector<StandardizationStats> standardize(std::vector<ClientDataset>& clients, Scope scope,
                                              std::span<const std::size_t> reference) {
    std::vector<StandardizationStats> used;
    if (clients.empty() || clients.front().num_numeric == 0) {
        logger().warn("standardize: no numeric features, nothing to do");
        return used;
    }
    if (scope == Scope::global) {
        std::vector<const ClientDataset*> pool_from;
        if (reference.empty()) {
            for (const auto& c : clients) {
                pool_from.push_back(&c);
            }
        } else {
            for (std::size_t i : reference) {
                if (i >= clients.size()) {
                    throw ConsistencyError("standardization reference index out of range");
                }
                pool_from.push_back(&clients[i]);
            }
        }
        used.push_back(compute_stats(pool_from, Scope::global));
        for (auto& c : clients) {
            apply_stats(c, used.front());
        }
        return used;
    }
    for (auto& c : clients) {
        const ClientDataset* self[] = {&c};
        used.push_back(compute_stats(self, Scope::local));
        apply_stats(c, used.back());
    }
    return used;
}

}  // namespace radfed::data
