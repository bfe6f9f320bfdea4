#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/log.hpp"
#include "radfed/partition.hpp"

namespace radfed::partition {

void PartitionMatrix::validate(double rel_tol) const {
    if (counts.rows() != row_sums.size() || counts.cols() != col_sums.size()) {
        throw ConsistencyError("partition matrix shape does not match its marginals");
    }
    const double n = std::max(1.0, std::accumulate(col_sums.begin(), col_sums.end(), 0.0));
    for (double v : counts.values()) {
        if (!(v >= 0.0)) {
            throw InfeasibleError("partition matrix has a negative entry");
        }
    }
    const auto rs = counts.row_sums();
    const auto cs = counts.col_sums();
    for (std::size_t t = 0; t < rs.size(); ++t) {
        if (std::abs(rs[t] - row_sums[t]) > rel_tol * n) {
            throw InfeasibleError(fmt::format("row {} sums to {} instead of {}", t, rs[t], row_sums[t]));
        }
    }
    for (std::size_t g = 0; g < cs.size(); ++g) {
        if (std::abs(cs[g] - col_sums[g]) > rel_tol * n) {
            throw InfeasibleError(fmt::format("column {} sums to {} instead of {}", g, cs[g], col_sums[g]));
        }
    }
}

namespace {

void check_marginals(std::span<const double> rows, std::span<const double> cols) {
    for (double r : rows) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw InfeasibleError("row marginals must be nonnegative");
        }
    }
    for (double c : cols) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw InfeasibleError("column marginals must be nonnegative");
        }
    }
    const double rt = std::accumulate(rows.begin(), rows.end(), 0.0);
    const double ct = std::accumulate(cols.begin(), cols.end(), 0.0);
    if (std::abs(rt - ct) > 1e-9 * std::max(1.0, ct)) {
        throw InfeasibleError(fmt::format("marginals disagree: rows sum to {}, columns to {}", rt, ct));
    }
}

// Closed-form projection onto {X 1 = rows, X^T 1 = cols}.
void project_affine(RealMatrix& x, std::span<const double> rows, std::span<const double> cols) {
    const std::size_t t_count = x.rows();
    const std::size_t g_count = x.cols();
    const auto rs = x.row_sums();
    const auto cs = x.col_sums();
    std::vector<double> rho(t_count);
    std::vector<double> gamma(g_count);
    double s_rows = 0.0;
    double s_cols = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
        rho[t] = rows[t] - rs[t];
        s_rows += rho[t];
    }
    for (std::size_t g = 0; g < g_count; ++g) {
        gamma[g] = cols[g] - cs[g];
        s_cols += gamma[g];
    }
    const double s = 0.5 * (s_rows + s_cols);
    const double tg = static_cast<double>(t_count) * static_cast<double>(g_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t g = 0; g < g_count; ++g) {
            x(t, g) += rho[t] / static_cast<double>(g_count) + gamma[g] / static_cast<double>(t_count) -
                       s / tg;
        }
    }
}

double marginal_residual(const RealMatrix& x, std::span<const double> rows,
                         std::span<const double> cols) {
    double worst = 0.0;
    const auto rs = x.row_sums();
    const auto cs = x.col_sums();
    for (std::size_t t = 0; t < rs.size(); ++t) {
        worst = std::max(worst, std::abs(rs[t] - rows[t]));
    }
    for (std::size_t g = 0; g < cs.size(); ++g) {
        worst = std::max(worst, std::abs(cs[g] - cols[g]));
    }
    return worst;
}

// Proportional fitting to absorb the residual Dykstra leaves behind.
void repair_marginals(RealMatrix& x, std::span<const double> rows, std::span<const double> cols,
                      double tol) {
    for (int sweep = 0; sweep < 100 && marginal_residual(x, rows, cols) > tol; ++sweep) {
        const auto rs = x.row_sums();
        for (std::size_t t = 0; t < x.rows(); ++t) {
            if (rs[t] > 0.0) {
                const double f = rows[t] / rs[t];
                for (double& v : x.row(t)) {
                    v *= f;
                }
            }
        }
        const auto cs = x.col_sums();
        for (std::size_t g = 0; g < x.cols(); ++g) {
            if (cs[g] > 0.0) {
                const double f = cols[g] / cs[g];
                for (std::size_t t = 0; t < x.rows(); ++t) {
                    x(t, g) *= f;
                }
            }
        }
    }
}

}  // namespace

RealMatrix project_transportation(const RealMatrix& point, std::span<const double> rows,
                                  std::span<const double> cols, const QpOptions& options) {
    if (point.rows() != rows.size() || point.cols() != cols.size()) {
        throw ConsistencyError("point shape does not match the marginals");
    }
    check_marginals(rows, cols);
    const double n = std::accumulate(cols.begin(), cols.end(), 0.0);
    const double scale = std::max(1.0, n);

    RealMatrix x = point;
    RealMatrix q(point.rows(), point.cols());
    RealMatrix y;
    for (std::size_t it = 0; it < options.max_projection_iterations; ++it) {
        y = x;
        project_affine(y, rows, cols);
        double change = 0.0;
        auto xv = x.values();
        auto yv = y.values();
        auto qv = q.values();
        for (std::size_t i = 0; i < xv.size(); ++i) {
            const double shifted = yv[i] + qv[i];
            const double next = std::max(0.0, shifted);
            qv[i] = shifted - next;
            change = std::max(change, std::abs(next - xv[i]));
            xv[i] = next;
        }
        if (change <= options.tolerance * scale &&
            marginal_residual(x, rows, cols) <= 1e-9 * scale) {
            break;
        }
    }
    repair_marginals(x, rows, cols, 1e-12 * scale);
    return x;
}

PartitionMatrix solve_qp(const PartitionTarget& target, const QpOptions& options) {
    target.validate();
    const std::size_t t_count = target.rows();
    const std::size_t g_count = target.cols();
    const double n = target.total();
    const double scale = std::max(1.0, n);

    double lipschitz = 0.0;
    for (const auto& g : target.groups) {
        std::vector<std::size_t> bucket_size(g.buckets, 0);
        for (std::size_t b : g.bucket_of_column) {
            ++bucket_size[b];
        }
        lipschitz += 2.0 * static_cast<double>(
                               *std::max_element(bucket_size.begin(), bucket_size.end()));
    }

    auto gradient = [&](const RealMatrix& x) {
        RealMatrix grad(t_count, g_count);
        std::vector<double> sums;
        for (const auto& g : target.groups) {
            for (std::size_t t = 0; t < t_count; ++t) {
                sums.assign(g.buckets, 0.0);
                for (std::size_t c = 0; c < g_count; ++c) {
                    sums[g.bucket_of_column[c]] += x(t, c);
                }
                for (std::size_t b = 0; b < g.buckets; ++b) {
                    sums[b] = 2.0 * (sums[b] - g.targets(t, b));
                }
                for (std::size_t c = 0; c < g_count; ++c) {
                    grad(t, c) += sums[g.bucket_of_column[c]];
                }
            }
        }
        return grad;
    };

    auto step_from = [&](const RealMatrix& y) {
        RealMatrix z = y;
        const RealMatrix grad = gradient(y);
        auto zv = z.values();
        auto gv = grad.values();
        for (std::size_t i = 0; i < zv.size(); ++i) {
            zv[i] -= gv[i] / lipschitz;
        }
        return project_transportation(z, target.row_sums, target.col_sums, options);
    };

    // Start at the independent coupling, which is feasible.
    RealMatrix x(t_count, g_count);
    if (n > 0.0) {
        for (std::size_t t = 0; t < t_count; ++t) {
            for (std::size_t g = 0; g < g_count; ++g) {
                x(t, g) = target.row_sums[t] * target.col_sums[g] / n;
            }
        }
    }
    double fx = partition_loss(target, x);
    RealMatrix y = x;
    double momentum = 1.0;
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
        RealMatrix next = step_from(y);
        const double fnext = partition_loss(target, next);
        double change = 0.0;
        double residual = 0.0;
        auto nv = next.values();
        auto xv = x.values();
        auto yv0 = y.values();
        for (std::size_t i = 0; i < nv.size(); ++i) {
            change = std::max(change, std::abs(nv[i] - xv[i]));
            residual = std::max(residual, std::abs(nv[i] - yv0[i]));
        }
        if (fnext > fx) {
            // Adaptive restart: drop the momentum and take a plain step from x.
            momentum = 1.0;
            y = x;
            if (change <= options.tolerance * scale) {
                break;
            }
            continue;
        }
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / next_momentum;
        y = next;
        auto yv = y.values();
        for (std::size_t i = 0; i < yv.size(); ++i) {
            yv[i] += beta * (nv[i] - xv[i]);
        }
        momentum = next_momentum;
        // Gradient-mapping residual at y: zero exactly at the optimum.
        const bool converged = residual <= 1e-10 * scale;
        x = std::move(next);
        fx = fnext;
        if (converged) {
            break;
        }
    }
    if (it == options.max_iterations) {
        logger().warn("QP solver stopped at the iteration limit ({})", options.max_iterations);
    }
    PartitionMatrix out{std::move(x), target.row_sums, target.col_sums};
    out.validate();
    return out;
}

}  // namespace radfed::partition
