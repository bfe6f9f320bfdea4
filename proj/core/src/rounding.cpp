#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/log.hpp"
#include "radfed/partition.hpp"

namespace radfed::partition {

std::vector<std::int64_t> largest_remainder(std::span<const double> values, std::int64_t total) {
    if (values.empty()) {
        if (total != 0) {
            throw ParameterError("cannot apportion a nonzero total over no values");
        }
        return {};
    }
    if (total < 0) {
        throw ParameterError("apportioned total must be nonnegative");
    }
    const std::size_t n = values.size();
    std::vector<std::int64_t> out(n);
    std::vector<double> frac(n);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::max(0.0, values[i]);
        const double f = std::floor(v);
        out[i] = static_cast<std::int64_t>(f);
        frac[i] = v - f;
        assigned += out[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::int64_t remaining = total - assigned;
    if (remaining >= 0) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
        for (std::size_t k = 0; remaining > 0; k = (k + 1) % n, --remaining) {
            ++out[order[k]];
        }
    } else {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return frac[a] < frac[b]; });
        for (std::size_t k = 0; remaining < 0; k = (k + 1) % n) {
            if (out[order[k]] > 0) {
                --out[order[k]];
                ++remaining;
            }
        }
    }
    return out;
}

namespace {

class MaxFlow {
public:
    explicit MaxFlow(std::size_t nodes) : adj_(nodes), level_(nodes), next_(nodes) {}

    std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t cap) {
        adj_[from].push_back(edges_.size());
        edges_.push_back({to, cap});
        adj_[to].push_back(edges_.size());
        edges_.push_back({from, 0});
        return edges_.size() - 2;
    }

    std::int64_t flow_on(std::size_t edge) const { return edges_[edge ^ 1].cap; }

    std::int64_t run(std::size_t source, std::size_t sink) {
        std::int64_t total = 0;
        while (bfs(source, sink)) {
            std::fill(next_.begin(), next_.end(), 0);
            while (const std::int64_t pushed =
                       dfs(source, sink, std::numeric_limits<std::int64_t>::max())) {
                total += pushed;
            }
        }
        return total;
    }

private:
    struct Edge {
        std::size_t to;
        std::int64_t cap;
    };

    bool bfs(std::size_t source, std::size_t sink) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<std::size_t> q;
        level_[source] = 0;
        q.push(source);
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t e : adj_[u]) {
                if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[u] + 1;
                    q.push(edges_[e].to);
                }
            }
        }
        return level_[sink] >= 0;
    }

    std::int64_t dfs(std::size_t u, std::size_t sink, std::int64_t limit) {
        if (u == sink) {
            return limit;
        }
        for (std::size_t& i = next_[u]; i < adj_[u].size(); ++i) {
            const std::size_t e = adj_[u][i];
            const std::size_t v = edges_[e].to;
            if (edges_[e].cap > 0 && level_[v] == level_[u] + 1) {
                const std::int64_t pushed = dfs(v, sink, std::min(limit, edges_[e].cap));
                if (pushed > 0) {
                    edges_[e].cap -= pushed;
                    edges_[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
        }
        return 0;
    }

    std::vector<std::vector<std::size_t>> adj_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<std::size_t> next_;
};

struct Bounds {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

// Chooses which fractional cells round up, subject to per-row and per-column bounds on the
// number of ups. Returns an empty matrix when infeasible.
Matrix<std::int64_t> choose_ups(const Matrix<char>& fractional, const std::vector<Bounds>& rows,
                                const std::vector<Bounds>& cols) {
    const std::size_t t_count = fractional.rows();
    const std::size_t g_count = fractional.cols();
    const std::size_t source = t_count + g_count;
    const std::size_t sink = source + 1;
    const std::size_t super_source = sink + 1;
    const std::size_t super_sink = super_source + 1;
    MaxFlow flow(super_sink + 1);
    std::vector<std::int64_t> excess(super_sink + 1, 0);
    auto bounded = [&](std::size_t from, std::size_t to, Bounds b) {
        if (b.lo > b.hi || b.hi < 0) {
            return false;
        }
        const std::int64_t lo = std::max<std::int64_t>(0, b.lo);
        flow.add_edge(from, to, b.hi - lo);
        excess[to] += lo;
        excess[from] -= lo;
        return true;
    };
    for (std::size_t t = 0; t < t_count; ++t) {
        if (!bounded(source, t, rows[t])) {
            return {};
        }
    }
    for (std::size_t g = 0; g < g_count; ++g) {
        if (!bounded(t_count + g, sink, cols[g])) {
            return {};
        }
    }
    Matrix<std::size_t> cell_edge(t_count, g_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t g = 0; g < g_count; ++g) {
            if (fractional(t, g)) {
                cell_edge(t, g) = flow.add_edge(t, t_count + g, 1);
            }
        }
    }
    flow.add_edge(sink, source, std::numeric_limits<std::int64_t>::max() / 4);
    std::int64_t required = 0;
    for (std::size_t v = 0; v < super_source; ++v) {
        if (excess[v] > 0) {
            flow.add_edge(super_source, v, excess[v]);
            required += excess[v];
        } else if (excess[v] < 0) {
            flow.add_edge(v, super_sink, -excess[v]);
        }
    }
    if (flow.run(super_source, super_sink) != required) {
        return {};
    }
    Matrix<std::int64_t> ups(t_count, g_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t g = 0; g < g_count; ++g) {
            if (fractional(t, g)) {
                ups(t, g) = flow.flow_on(cell_edge(t, g));
            }
        }
    }
    return ups;
}

}  // namespace

IntegerPartition round_partition(const PartitionMatrix& matrix) {
    const RealMatrix& a = matrix.counts;
    const std::size_t t_count = a.rows();
    const std::size_t g_count = a.cols();
    if (t_count == 0 || g_count == 0) {
        throw ParameterError("cannot round an empty matrix");
    }
    for (double v : a.values()) {
        if (!(v >= -1e-9) || !std::isfinite(v)) {
            throw InfeasibleError("cannot round a matrix with negative entries");
        }
    }

    CountMatrix base(t_count, g_count);
    Matrix<char> fractional(t_count, g_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t g = 0; g < g_count; ++g) {
            const double v = std::max(0.0, a(t, g));
            const double nearest = std::round(v);
            if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, v)) {
                base(t, g) = static_cast<std::int64_t>(nearest);
            } else {
                base(t, g) = static_cast<std::int64_t>(std::floor(v));
                fractional(t, g) = 1;
            }
        }
    }

    const auto real_rows = a.row_sums();
    const auto real_cols = a.col_sums();
    const double real_total = std::accumulate(real_cols.begin(), real_cols.end(), 0.0);
    const auto total = static_cast<std::int64_t>(std::llround(real_total));
    const auto row_target = largest_remainder(real_rows, total);
    const auto col_target = largest_remainder(real_cols, total);
    const auto base_rows = base.row_sums();
    const auto base_cols = base.col_sums();

    std::vector<Bounds> row_bounds(t_count);
    std::vector<Bounds> col_bounds(g_count);
    for (std::size_t g = 0; g < g_count; ++g) {
        const std::int64_t d = col_target[g] - base_cols[g];
        col_bounds[g] = {d, d};
    }
    for (std::size_t t = 0; t < t_count; ++t) {
        const std::int64_t d = row_target[t] - base_rows[t];
        row_bounds[t] = {d, d};
    }
    auto ups = choose_ups(fractional, row_bounds, col_bounds);
    if (ups.empty()) {
        logger().warn("rounded row marginals are not reachable; letting rows float within one");
        for (std::size_t t = 0; t < t_count; ++t) {
            const double r = std::max(0.0, real_rows[t]);
            row_bounds[t] = {static_cast<std::int64_t>(std::floor(r + 1e-9)) - base_rows[t],
                             static_cast<std::int64_t>(std::ceil(r - 1e-9)) - base_rows[t]};
        }
        ups = choose_ups(fractional, row_bounds, col_bounds);
        if (ups.empty()) {
            throw InfeasibleError("no controlled rounding exists for this matrix");
        }
    }

    IntegerPartition out;
    out.counts = base;
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t g = 0; g < g_count; ++g) {
            out.counts(t, g) += ups(t, g);
        }
    }
    out.row_sums = out.counts.row_sums();
    out.col_sums = out.counts.col_sums();
    return out;
}

}  // namespace radfed::partition
