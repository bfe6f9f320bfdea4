#include <algorithm>
#include <cmath>

#include "radfed/error.hpp"
#include "radfed/partition.hpp"

namespace radfed::partition {

RealMatrix snap_to_grid(const RealMatrix& values) {
    RealMatrix out = values;
    for (double& v : out.values()) {
        v = std::max(0.0, std::round(v / kGridQuantum) * kGridQuantum);
    }
    return out;
}

void apply_rectangle(RealMatrix& counts, const Rectangle& rect, double eps) {
    counts(rect.row, rect.col) -= eps;
    counts(rect.other_row, rect.other_col) -= eps;
    counts(rect.row, rect.other_col) += eps;
    counts(rect.other_row, rect.col) += eps;
}

namespace {

// Uniform pair of distinct indices from [0, n).
std::pair<std::size_t, std::size_t> distinct_pair(std::size_t n, Rng& rng) {
    const std::size_t a = uniform_index(rng, n);
    std::size_t b = uniform_index(rng, n - 1);
    if (b >= a) {
        ++b;
    }
    return {a, b};
}

}  // namespace

StepResult randomize_step_inplace(RealMatrix& counts, double xi, Rng& rng) {
    if (counts.rows() < 2 || counts.cols() < 2) {
        throw ParameterError("a randomizing move needs at least 2 rows and 2 columns");
    }
    if (!(xi > 0.0)) {
        throw ParameterError("step bound xi must be positive");
    }
    StepResult step;
    std::tie(step.rect.row, step.rect.other_row) = distinct_pair(counts.rows(), rng);
    std::tie(step.rect.col, step.rect.other_col) = distinct_pair(counts.cols(), rng);
    const double bound = std::min({counts(step.rect.row, step.rect.col),
                                   counts(step.rect.other_row, step.rect.other_col), xi});
    const double u = uniform01(rng);
    step.eps = std::floor(u * bound / kGridQuantum) * kGridQuantum;
    if (step.eps > 0.0) {
        apply_rectangle(counts, step.rect, step.eps);
    }
    return step;
}

PartitionMatrix randomize_step(PartitionMatrix matrix, double xi, Rng& rng) {
    randomize_step_inplace(matrix.counts, xi, rng);
    return matrix;
}

namespace {

class LossTracker {
public:
    LossTracker(const PartitionTarget& target, const RealMatrix& counts)
        : target_(target), counts_(counts) {
        recompute();
    }

    double recompute() {
        sums_.clear();
        loss_ = 0.0;
        for (const auto& g : target_.groups) {
            RealMatrix s(counts_.rows(), g.buckets);
            for (std::size_t t = 0; t < counts_.rows(); ++t) {
                for (std::size_t c = 0; c < counts_.cols(); ++c) {
                    s(t, g.bucket_of_column[c]) += counts_(t, c);
                }
                for (std::size_t b = 0; b < g.buckets; ++b) {
                    const double r = s(t, b) - g.targets(t, b);
                    loss_ += r * r;
                }
            }
            sums_.push_back(std::move(s));
        }
        return loss_;
    }

    void add(std::size_t t, std::size_t c, double delta) {
        for (std::size_t gi = 0; gi < target_.groups.size(); ++gi) {
            const auto& g = target_.groups[gi];
            const std::size_t b = g.bucket_of_column[c];
            double& s = sums_[gi](t, b);
            const double before = s - g.targets(t, b);
            s += delta;
            const double after = s - g.targets(t, b);
            loss_ += after * after - before * before;
        }
    }

    void apply(const StepResult& step) {
        if (step.eps <= 0.0) {
            return;
        }
        add(step.rect.row, step.rect.col, -step.eps);
        add(step.rect.other_row, step.rect.other_col, -step.eps);
        add(step.rect.row, step.rect.other_col, step.eps);
        add(step.rect.other_row, step.rect.col, step.eps);
    }

    double loss() const noexcept { return loss_; }

private:
    const PartitionTarget& target_;
    const RealMatrix& counts_;
    std::vector<RealMatrix> sums_;
    double loss_ = 0.0;
};

}  // namespace

WalkResult random_qp_solution(const PartitionMatrix& start, const PartitionTarget& target,
                              const WalkOptions& options, Rng& rng) {
    if (options.burn_in < 0 || options.steps < 0) {
        throw ParameterError("walk lengths must be nonnegative");
    }
    if (!(options.xi > 0.0)) {
        throw ParameterError("step bound xi must be positive");
    }
    if (start.counts.rows() != target.rows() || start.counts.cols() != target.cols()) {
        throw ConsistencyError("start matrix shape does not match the partition target");
    }
    const std::int64_t refresh = std::max<std::int64_t>(1, options.refresh_every);

    RealMatrix counts = snap_to_grid(start.counts);
    LossTracker tracker(target, counts);
    for (std::int64_t p = 1; p <= options.burn_in; ++p) {
        tracker.apply(randomize_step_inplace(counts, options.xi, rng));
        if (p % refresh == 0) {
            tracker.recompute();
        }
    }

    WalkResult result;
    result.burn_in_loss = tracker.recompute();
    const RealMatrix after_burn_in = counts;
    RealMatrix best = counts;
    double best_tracked = result.burn_in_loss;
    for (std::int64_t q = 1; q <= options.steps; ++q) {
        tracker.apply(randomize_step_inplace(counts, options.xi, rng));
        if (q % refresh == 0) {
            tracker.recompute();
        }
        if (tracker.loss() < best_tracked) {
            best_tracked = tracker.loss();
            best = counts;
        }
    }
    result.best_loss = partition_loss(target, best);
    if (result.best_loss > result.burn_in_loss) {
        // Only reachable through drift in the tracked loss.
        best = after_burn_in;
        result.best_loss = result.burn_in_loss;
    }
    result.best = PartitionMatrix{std::move(best), start.row_sums, start.col_sums};
    return result;
}

}  // namespace radfed::partition
