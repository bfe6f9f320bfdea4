#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/fedcore.hpp"
#include "radfed/log.hpp"

namespace radfed::fed {

std::vector<std::size_t> sample_uniform(std::size_t count, std::size_t m, Rng& rng) {
    if (m > count) {
        throw ParameterError(fmt::format("cannot sample {} of {} clients", m, count));
    }
    std::vector<std::size_t> pool(count);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + uniform_index(rng, count - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return pool;
}

std::vector<std::size_t> sample_uniform(std::span<const std::size_t> ids, std::size_t m, Rng& rng) {
    auto positions = sample_uniform(ids.size(), m, rng);
    for (auto& p : positions) {
        p = ids[p];
    }
    return positions;
}

ImportanceState ImportanceState::uniform(std::size_t clients, double initial) {
    if (!(initial >= 0.0) || !std::isfinite(initial)) {
        throw ParameterError("initial importance must be nonnegative");
    }
    return ImportanceState{std::vector<double>(clients, initial)};
}

std::vector<std::size_t> sample_importance(const ImportanceState& state, std::size_t m, Rng& rng) {
    const std::size_t n = state.scores.size();
    if (m > n) {
        throw ParameterError(fmt::format("cannot sample {} of {} clients", m, n));
    }
    for (double s : state.scores) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw NumericError("importance scores must be nonnegative and finite");
        }
    }
    std::vector<std::size_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    std::vector<std::size_t> out;
    out.reserve(m);
    bool warned = false;
    for (std::size_t draw = 0; draw < m; ++draw) {
        double total = 0.0;
        for (std::size_t k : remaining) {
            total += state.scores[k];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double u = uniform01(rng) * total;
            double acc = 0.0;
            pick = remaining.size();
            std::size_t last_positive = 0;
            for (std::size_t i = 0; i < remaining.size(); ++i) {
                const double s = state.scores[remaining[i]];
                if (s <= 0.0) {
                    continue;
                }
                last_positive = i;
                acc += s;
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            if (pick == remaining.size()) {
                pick = last_positive;
            }
        } else {
            if (!warned) {
                logger().warn("fewer than {} positive importance scores; sampling the rest uniformly", m);
                warned = true;
            }
            pick = uniform_index(rng, remaining.size());
        }
        out.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
}

void update_importance(ImportanceState& state, std::size_t k, double p_new, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("alpha must lie in (0, 1)");
    }
    if (!(p_new >= 0.0) || !std::isfinite(p_new)) {
        throw NumericError(fmt::format("importance score {} is not a nonnegative number", p_new));
    }
    if (k >= state.scores.size()) {
        throw ParameterError(fmt::format("client {} has no importance score", k));
    }
    state.scores[k] = (1.0 - alpha) * state.scores[k] + alpha * p_new;
}

}  // namespace radfed::fed
