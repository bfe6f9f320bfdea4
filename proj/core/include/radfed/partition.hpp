#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radfed/data.hpp"
#include "radfed/matrix.hpp"
#include "radfed/rng.hpp"

namespace radfed::partition {

/// Dirichlet concentrations for client sizes, classes and categorical features.
struct DirichletPriors {
    double mu = 1.0;
    double lambda = 0.1;
    std::optional<double> theta;
    int clients = 2;
    int classes = 2;
    std::vector<int> feature_arities;

    void validate() const;
};

std::vector<double> sample_dirichlet(double concentration, std::size_t dim, Rng& rng);

/// Maps every column of the partition matrix to one bucket of a marginal, and stores the
/// per-client target for each bucket. The loss contribution is
/// sum_t sum_b (sum_{g: bucket(g) = b} alpha[t][g] - targets[t][b])^2.
struct MarginalGroup {
    std::string name;
    std::vector<std::size_t> bucket_of_column;
    std::size_t buckets = 0;
    RealMatrix targets;
};

struct PartitionTarget {
    std::vector<double> row_sums;
    std::vector<double> col_sums;
    /// The class/size objective has a single identity group whose targets are the desired
    /// matrix. The configuration objective has one class group and one group per feature.
    std::vector<MarginalGroup> groups;
    /// Column -> (class, category of feature 1, ..., category of feature M). Empty for the
    /// class/size objective.
    std::vector<std::vector<int>> configurations;

    std::size_t rows() const noexcept { return row_sums.size(); }
    std::size_t cols() const noexcept { return col_sums.size(); }
    double total() const;
    /// Targets of the first group; the desired matrix for the class/size objective.
    const RealMatrix& desired() const { return groups.front().targets; }

    void validate() const;
};

/// Class/size target from explicit draws: desired[t][k] = class_dist[t][k] * sizes[t] * N.
PartitionTarget class_size_target(std::span<const double> sizes, const RealMatrix& class_dist,
                                  std::span<const std::int64_t> class_totals);

/// Draws n ~ Dir(mu) and c_t ~ Dir(lambda) from streams derived from `seed`.
PartitionTarget build_target_class_size(const DirichletPriors& priors,
                                        std::span<const std::int64_t> class_totals,
                                        std::uint64_t seed);

/// Configuration tuple (class first) -> sample count.
using ConfigTotals = std::map<std::vector<int>, std::int64_t>;

ConfigTotals count_configurations(const data::Dataset& dataset);

/// Configuration target. Draws the same sizes and class distributions as
/// build_target_class_size for the same seed, plus f_t^j ~ Dir(theta).
PartitionTarget build_target_full(const DirichletPriors& priors, const ConfigTotals& config_totals,
                                  std::uint64_t seed);

double partition_loss(const PartitionTarget& target, const RealMatrix& alpha);

/// A point of the transportation polytope for the target's marginals.
struct PartitionMatrix {
    RealMatrix counts;
    std::vector<double> row_sums;
    std::vector<double> col_sums;

    /// Throws InfeasibleError unless entries are >= 0 and marginals hold within rel_tol * N.
    void validate(double rel_tol = 1e-6) const;
};

struct QpOptions {
    std::size_t max_iterations = 20000;
    std::size_t max_projection_iterations = 200000;
    double tolerance = 1e-12;
};

/// Euclidean projection of `point` onto {X >= 0, X 1 = rows, X^T 1 = cols} by Dykstra's
/// alternating projections followed by proportional marginal repair.
RealMatrix project_transportation(const RealMatrix& point, std::span<const double> rows,
                                  std::span<const double> cols, const QpOptions& options = {});

/// Minimizes partition_loss over the transportation polytope by projected gradient.
PartitionMatrix solve_qp(const PartitionTarget& target, const QpOptions& options = {});

/// Entries kept on this dyadic grid make every sum in a random walk exact.
inline constexpr double kGridQuantum = 0x1.0p-24;

/// Rounds every entry to a multiple of kGridQuantum (never below zero).
RealMatrix snap_to_grid(const RealMatrix& values);

struct Rectangle {
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t other_row = 0;
    std::size_t other_col = 0;
};

/// Moves eps around the rectangle: -eps at (row, col) and (other_row, other_col),
/// +eps at (row, other_col) and (other_row, col).
void apply_rectangle(RealMatrix& counts, const Rectangle& rect, double eps);

struct StepResult {
    Rectangle rect;
    double eps = 0.0;
};

/// One randomizing move in place. Rows and columns of the rectangle are distinct;
/// eps ~ U(0, min{A[row][col], A[other_row][other_col], xi}) rounded down to kGridQuantum.
StepResult randomize_step_inplace(RealMatrix& counts, double xi, Rng& rng);

PartitionMatrix randomize_step(PartitionMatrix matrix, double xi, Rng& rng);

struct WalkOptions {
    std::int64_t burn_in = 100000;
    std::int64_t steps = 500000;
    double xi = 0.002;
    /// Full loss recomputation period for the incrementally tracked loss.
    std::int64_t refresh_every = 10000;
};

struct WalkResult {
    PartitionMatrix best;
    double best_loss = 0.0;
    double burn_in_loss = 0.0;
};

/// Burn-in walk followed by a recorded walk; returns the lowest-loss matrix seen from the
/// end of burn-in onward. The start matrix is snapped to kGridQuantum first.
WalkResult random_qp_solution(const PartitionMatrix& start, const PartitionTarget& target,
                              const WalkOptions& options, Rng& rng);

struct IntegerPartition {
    CountMatrix counts;
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
};

/// Hamilton apportionment of `total` proportional to `values`; ties go to the lower index.
std::vector<std::int64_t> largest_remainder(std::span<const double> values, std::int64_t total);

/// Controlled rounding: exact integer marginals and |counts - A| < 1 entrywise.
IntegerPartition round_partition(const PartitionMatrix& matrix);

/// Column index of every sample: its class for class/size partitions.
std::vector<std::size_t> class_columns(const data::Dataset& dataset);

/// Column index of every sample under the target's configuration list.
std::vector<std::size_t> configuration_columns(const data::Dataset& dataset,
                                               const PartitionTarget& target);

/// Deals samples to clients: client t gets counts[t][g] samples of column g, chosen by a
/// seeded shuffle within each column. Clients may be empty.
std::vector<data::ClientDataset> assign_samples(const data::Dataset& dataset,
                                                std::span<const std::size_t> column_of_sample,
                                                const IntegerPartition& partition, Rng& rng);

/// Mean over non-empty clients of sum_c |r_c^k - R_c|.
double c_score(std::span<const data::ClientDataset> clients);

}  // namespace radfed::partition
