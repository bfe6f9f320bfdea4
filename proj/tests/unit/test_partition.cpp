#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "radfed/error.hpp"
#include "radfed/partition.hpp"
#include "support.hpp"

namespace radfed::partition {
namespace {

// ---------------------------------------------------------------- Dirichlet

TEST(Dirichlet, DimensionOneIsTheUnitVector) {
    Rng rng = make_rng(1);
    for (double c : {0.01, 1.0, 50.0}) {
        EXPECT_EQ(sample_dirichlet(c, 1, rng), std::vector<double>{1.0});
    }
}

TEST(Dirichlet, RejectsBadArguments) {
    Rng rng = make_rng(1);
    EXPECT_THROW(sample_dirichlet(0.0, 3, rng), ParameterError);
    EXPECT_THROW(sample_dirichlet(-1.0, 3, rng), ParameterError);
    EXPECT_THROW(sample_dirichlet(1.0, 0, rng), ParameterError);
}

TEST(Dirichlet, DrawsLieOnTheSimplex) {
    Rng rng = make_rng(2);
    for (double c : {1e-3, 0.1, 1.0, 7.5}) {
        for (int i = 0; i < 200; ++i) {
            const auto v = sample_dirichlet(c, 10, rng);
            double sum = 0;
            for (double x : v) {
                ASSERT_GE(x, 0.0);
                ASSERT_TRUE(std::isfinite(x));
                sum += x;
            }
            ASSERT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(Dirichlet, SmallConcentrationConcentratesMass) {
    Rng rng = make_rng(3);
    double mean_max = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto v = sample_dirichlet(0.1, 10, rng);
        mean_max += *std::max_element(v.begin(), v.end());
    }
    mean_max /= 1000;
    // A uniform split would give 0.1.
    EXPECT_GT(mean_max, 0.5);
}

TEST(Dirichlet, UnitConcentrationMatchesNormalizedGammaOracle) {
    for (std::uint64_t seed : {0u, 1u, 99u}) {
        Rng rng = make_rng(seed);
        const auto v = sample_dirichlet(1.0, 3, rng);
        Rng oracle_rng = make_rng(seed);
        std::gamma_distribution<double> g(1.0, 1.0);
        const double a = g(oracle_rng);
        const double b = g(oracle_rng);
        const double c = g(oracle_rng);
        const double s = a + b + c;
        EXPECT_DOUBLE_EQ(v[0], a / s);
        EXPECT_DOUBLE_EQ(v[1], b / s);
        EXPECT_DOUBLE_EQ(v[2], c / s);
    }
}

TEST(Dirichlet, UnitConcentrationHasBetaMarginal) {
    // Dir(1,1,1) marginal is Beta(1,2): P(X < 1/2) = 3/4 and E[X] = 1/3.
    Rng rng = make_rng(4);
    const int n = 20000;
    int below = 0;
    double mean = 0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_dirichlet(1.0, 3, rng)[0];
        below += x < 0.5;
        mean += x;
    }
    EXPECT_NEAR(static_cast<double>(below) / n, 0.75, 3 * std::sqrt(0.75 * 0.25 / n));
    // Var of Beta(1,2) is 1/18.
    EXPECT_NEAR(mean / n, 1.0 / 3.0, 3 * std::sqrt(1.0 / 18.0 / n));
}

TEST(Dirichlet, SmallConcentrationMeanIsUniform) {
    // The log-space branch must keep E[X_i] = 1/dim.
    Rng rng = make_rng(5);
    const int n = 20000;
    double mean = 0;
    for (int i = 0; i < n; ++i) {
        mean += sample_dirichlet(0.3, 2, rng)[0];
    }
    // Beta(0.3, 0.3) has variance 0.25 / 1.6.
    EXPECT_NEAR(mean / n, 0.5, 3 * std::sqrt(0.25 / 1.6 / n));
}

TEST(Priors, Validation) {
    DirichletPriors p;
    EXPECT_NO_THROW(p.validate());
    p.mu = 0;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.clients = 1;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.feature_arities = {2};
    EXPECT_THROW(p.validate(), ParameterError);
    p.theta = 0.1;
    EXPECT_NO_THROW(p.validate());
}

// ---------------------------------------------------------------- targets

TEST(Target, UniformDrawsGiveFeasibleDesired) {
    const std::vector<double> sizes{0.5, 0.5};
    const RealMatrix dist{{0.5, 0.5}, {0.5, 0.5}};
    const std::vector<std::int64_t> totals{5, 5};
    const auto t = class_size_target(sizes, dist, totals);
    EXPECT_EQ(t.desired(), (RealMatrix{{2.5, 2.5}, {2.5, 2.5}}));
    EXPECT_EQ(t.row_sums, (std::vector<double>{5, 5}));
    EXPECT_EQ(t.col_sums, (std::vector<double>{5, 5}));
}

TEST(Target, DisjointFixture) {
    const std::vector<double> sizes{0.6, 0.4};
    const RealMatrix dist{{1, 0}, {0, 1}};
    const std::vector<std::int64_t> totals{5, 5};
    const auto t = class_size_target(sizes, dist, totals);
    EXPECT_EQ(t.desired(), (RealMatrix{{6, 0}, {0, 4}}));
    EXPECT_EQ(t.row_sums, (std::vector<double>{6, 4}));
    EXPECT_EQ(t.col_sums, (std::vector<double>{5, 5}));
}

TEST(Target, EmptyClassesRejected) {
    const std::vector<double> sizes{0.5, 0.5};
    const RealMatrix dist(2, 0);
    EXPECT_THROW(class_size_target(sizes, dist, std::vector<std::int64_t>{}), ParameterError);
    DirichletPriors p;
    EXPECT_THROW(build_target_class_size(p, std::vector<std::int64_t>{0, 0}, 1), ParameterError);
}

TEST(Target, DesiredRowsSumToClientSize) {
    DirichletPriors p;
    p.clients = 12;
    p.classes = 4;
    const std::vector<std::int64_t> totals{100, 50, 30, 20};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto t = build_target_class_size(p, totals, seed);
        const auto rows = t.desired().row_sums();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            EXPECT_NEAR(rows[r], t.row_sums[r], 1e-9 * 200);
        }
        EXPECT_NEAR(std::accumulate(t.row_sums.begin(), t.row_sums.end(), 0.0), 200.0, 1e-9);
    }
}

TEST(Target, SeedDeterminesTarget) {
    DirichletPriors p;
    p.clients = 5;
    const std::vector<std::int64_t> totals{10, 10};
    EXPECT_EQ(build_target_class_size(p, totals, 3).desired(),
              build_target_class_size(p, totals, 3).desired());
    EXPECT_NE(build_target_class_size(p, totals, 3).desired(),
              build_target_class_size(p, totals, 4).desired());
}

ConfigTotals two_by_two_configs() {
    return {{{0, 0}, 30}, {{0, 1}, 10}, {{1, 0}, 25}, {{1, 1}, 35}};
}

TEST(Target, FullSharesClassDrawsWithClassSize) {
    DirichletPriors p;
    p.clients = 6;
    p.theta = 0.1;
    p.feature_arities = {2};
    const auto full = build_target_full(p, two_by_two_configs(), 7);
    DirichletPriors q = p;
    q.feature_arities.clear();
    const auto simple = build_target_class_size(q, std::vector<std::int64_t>{40, 60}, 7);
    EXPECT_EQ(full.row_sums, simple.row_sums);
    EXPECT_EQ(full.groups[0].targets, simple.desired());
}

TEST(Target, SingleCategoryFeatureReducesToClassSize) {
    DirichletPriors p;
    p.clients = 5;
    p.classes = 3;
    p.theta = 0.1;
    p.feature_arities = {1};
    const ConfigTotals configs{{{0, 0}, 20}, {{1, 0}, 30}, {{2, 0}, 50}};
    const auto full = build_target_full(p, configs, 11);
    DirichletPriors q = p;
    q.feature_arities.clear();
    const auto simple = build_target_class_size(q, std::vector<std::int64_t>{20, 30, 50}, 11);
    EXPECT_EQ(full.col_sums, simple.col_sums);
    EXPECT_EQ(full.row_sums, simple.row_sums);
    EXPECT_EQ(full.groups[0].targets, simple.desired());
    // The one-category feature targets the whole client.
    for (std::size_t t = 0; t < 5; ++t) {
        EXPECT_DOUBLE_EQ(full.groups[1].targets(t, 0), simple.row_sums[t]);
    }
    const auto a = solve_qp(full);
    const auto b = solve_qp(simple);
    for (std::size_t i = 0; i < a.counts.size(); ++i) {
        EXPECT_NEAR(a.counts.values()[i], b.counts.values()[i], 1e-5);
    }
}

TEST(Target, UniformFeatureTargetsAreHalfTheClient) {
    DirichletPriors p;
    p.clients = 4;
    // A huge concentration makes every feature draw uniform up to sampling noise.
    p.theta = 1e12;
    p.feature_arities = {2};
    const auto t = build_target_full(p, two_by_two_configs(), 2);
    for (std::size_t r = 0; r < 4; ++r) {
        EXPECT_NEAR(t.groups[1].targets(r, 0), t.row_sums[r] / 2, 1e-4);
        EXPECT_NEAR(t.groups[1].targets(r, 1), t.row_sums[r] / 2, 1e-4);
    }
}

TEST(Target, FullLossMatchesHandExpansion) {
    DirichletPriors p;
    p.clients = 3;
    p.theta = 0.5;
    p.feature_arities = {2};
    const auto t = build_target_full(p, two_by_two_configs(), 5);
    ASSERT_EQ(t.configurations,
              (std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
    Rng rng = make_rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        RealMatrix a(3, 4);
        for (double& v : a.values()) {
            v = 20 * uniform01(rng);
        }
        double expected = 0;
        for (std::size_t r = 0; r < 3; ++r) {
            const auto& c = t.groups[0].targets;
            const auto& f = t.groups[1].targets;
            expected += std::pow(a(r, 0) + a(r, 1) - c(r, 0), 2);
            expected += std::pow(a(r, 2) + a(r, 3) - c(r, 1), 2);
            expected += std::pow(a(r, 0) + a(r, 2) - f(r, 0), 2);
            expected += std::pow(a(r, 1) + a(r, 3) - f(r, 1), 2);
        }
        EXPECT_NEAR(partition_loss(t, a), expected, 1e-9 * expected);
    }
}

TEST(Target, EmptyConfigurationsAreDropped) {
    DirichletPriors p;
    p.clients = 2;
    p.theta = 1;
    p.feature_arities = {2};
    ConfigTotals configs = two_by_two_configs();
    configs[{0, 1}] = 0;
    const auto t = build_target_full(p, configs, 1);
    EXPECT_EQ(t.cols(), 3u);
    EXPECT_EQ(t.col_sums, (std::vector<double>{30, 25, 35}));
}

TEST(Target, CountConfigurations) {
    data::Dataset ds;
    ds.labels = {0, 1, 1, 0};
    ds.class_names = {"a", "b"};
    ds.categorical = Matrix<int>{{0}, {1}, {1}, {0}};
    ds.categorical_names = {"f"};
    ds.category_names = {{"x", "y"}};
    const auto c = count_configurations(ds);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.at({0, 0}), 2);
    EXPECT_EQ(c.at({1, 1}), 2);
}

// ---------------------------------------------------------------- QP

PartitionTarget fixture_target() {
    return class_size_target(std::vector<double>{0.6, 0.4}, RealMatrix{{1, 0}, {0, 1}},
                             std::vector<std::int64_t>{5, 5});
}

TEST(Qp, FeasibleTargetIsReturned) {
    const auto t = class_size_target(std::vector<double>{0.5, 0.5},
                                     RealMatrix{{0.5, 0.5}, {0.5, 0.5}},
                                     std::vector<std::int64_t>{5, 5});
    const auto a = solve_qp(t);
    for (double v : a.counts.values()) {
        EXPECT_NEAR(v, 2.5, 1e-9);
    }
    EXPECT_NEAR(partition_loss(t, a.counts), 0.0, 1e-12);
}

TEST(Qp, DisjointFixtureOptimum) {
    // alpha11 = x gives loss 2(x-6)^2 + 2(x-5)^2 on x in [1, 5]; the optimum is x = 5.
    const auto t = fixture_target();
    const auto a = solve_qp(t);
    EXPECT_NEAR(a.counts(0, 0), 5, 1e-4);
    EXPECT_NEAR(a.counts(0, 1), 1, 1e-4);
    EXPECT_NEAR(a.counts(1, 0), 0, 1e-4);
    EXPECT_NEAR(a.counts(1, 1), 4, 1e-4);
    EXPECT_NEAR(partition_loss(t, a.counts), 2.0, 1e-6);
}

TEST(Qp, InconsistentMarginalsAreInfeasible) {
    PartitionTarget t = fixture_target();
    t.row_sums = {6, 5};
    EXPECT_THROW(solve_qp(t), InfeasibleError);
    EXPECT_THROW(project_transportation(RealMatrix(2, 2), std::vector<double>{1, 1},
                                        std::vector<double>{1, 2}),
                 InfeasibleError);
}

TEST(Qp, ProjectionOfAFeasiblePointIsItself) {
    const RealMatrix x{{1, 2, 3}, {4, 0, 1}};
    const auto p = project_transportation(x, x.row_sums(), x.col_sums());
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(p.values()[i], x.values()[i], 1e-9);
    }
}

// First-order optimality: no feasible rectangle move lowers the convex loss.
void expect_rectangle_optimal(const PartitionTarget& t, const RealMatrix& a) {
    const double base = partition_loss(t, a);
    const double eps = 1e-4;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t i2 = 0; i2 < a.rows(); ++i2) {
            for (std::size_t j = 0; j < a.cols(); ++j) {
                for (std::size_t j2 = 0; j2 < a.cols(); ++j2) {
                    if (i == i2 || j == j2 || a(i, j) < eps || a(i2, j2) < eps) {
                        continue;
                    }
                    RealMatrix moved = a;
                    apply_rectangle(moved, {i, j, i2, j2}, eps);
                    EXPECT_GE(partition_loss(t, moved), base - 1e-9 * (1 + base))
                        << "move (" << i << "," << j << ")-(" << i2 << "," << j2 << ")";
                }
            }
        }
    }
}

void expect_feasible(const PartitionTarget& t, const PartitionMatrix& a) {
    const double n = t.total();
    const auto rs = a.counts.row_sums();
    const auto cs = a.counts.col_sums();
    for (std::size_t r = 0; r < rs.size(); ++r) {
        EXPECT_LT(std::abs(rs[r] - t.row_sums[r]), 1e-6 * n);
    }
    for (std::size_t c = 0; c < cs.size(); ++c) {
        EXPECT_LT(std::abs(cs[c] - t.col_sums[c]), 1e-6 * n);
    }
    for (double v : a.counts.values()) {
        EXPECT_GE(v, 0.0);
    }
}

TEST(Qp, ClassSizeSolutionsAreFeasibleAndOptimal) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        DirichletPriors p;
        p.clients = 5;
        p.classes = 3;
        const auto t = build_target_class_size(p, std::vector<std::int64_t>{40, 25, 35}, seed);
        const auto a = solve_qp(t);
        expect_feasible(t, a);
        expect_rectangle_optimal(t, a.counts);
    }
}

TEST(Qp, ConfigurationSolutionsAreFeasibleAndOptimal) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        DirichletPriors p;
        p.clients = 4;
        p.theta = 0.3;
        p.feature_arities = {2};
        const auto t = build_target_full(p, two_by_two_configs(), seed);
        const auto a = solve_qp(t);
        expect_feasible(t, a);
        expect_rectangle_optimal(t, a.counts);
        // Never worse than the independent coupling the solver starts from.
        RealMatrix coupling(4, 4);
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) {
                coupling(r, c) = t.row_sums[r] * t.col_sums[c] / t.total();
            }
        }
        EXPECT_LE(partition_loss(t, a.counts), partition_loss(t, coupling) + 1e-9);
    }
}

// ---------------------------------------------------------------- random walk

TEST(Walk, RectangleFixture) {
    RealMatrix a{{5, 1}, {0, 4}};
    apply_rectangle(a, {0, 0, 1, 1}, 0.002);
    EXPECT_DOUBLE_EQ(a(0, 0), 4.998);
    EXPECT_DOUBLE_EQ(a(0, 1), 1.002);
    EXPECT_DOUBLE_EQ(a(1, 0), 0.002);
    EXPECT_DOUBLE_EQ(a(1, 1), 3.998);
    EXPECT_NEAR(a.row_sums()[0], 6, 1e-12);
    EXPECT_NEAR(a.row_sums()[1], 4, 1e-12);
    EXPECT_NEAR(a.col_sums()[0], 5, 1e-12);
    EXPECT_NEAR(a.col_sums()[1], 5, 1e-12);
}

TEST(Walk, TooSmallMatrixRejected) {
    RealMatrix a{{1, 2}};
    Rng rng = make_rng(0);
    EXPECT_THROW(randomize_step_inplace(a, 0.1, rng), ParameterError);
}

TEST(Walk, ZeroCornerGivesNoMove) {
    Rng rng = make_rng(1);
    std::size_t zero_cases = 0;
    for (int i = 0; i < 2000; ++i) {
        RealMatrix a{{0, 3, 1}, {2, 0, 1}, {1, 1, 0}};
        const RealMatrix before = a;
        const auto step = randomize_step_inplace(a, 0.5, rng);
        if (std::min(before(step.rect.row, step.rect.col),
                     before(step.rect.other_row, step.rect.other_col)) == 0) {
            ++zero_cases;
            EXPECT_EQ(step.eps, 0.0);
            EXPECT_EQ(a, before);
        }
        EXPECT_NE(step.rect.row, step.rect.other_row);
        EXPECT_NE(step.rect.col, step.rect.other_col);
    }
    EXPECT_GT(zero_cases, 0u);
}

TEST(Walk, StepsPreserveMarginalsExactlyOnTheGrid) {
    Rng rng = make_rng(2);
    RealMatrix a(4, 3);
    for (double& v : a.values()) {
        v = 10 * uniform01(rng);
    }
    a = snap_to_grid(a);
    const auto rows = a.row_sums();
    const auto cols = a.col_sums();
    for (int i = 0; i < 10000; ++i) {
        const auto step = randomize_step_inplace(a, 0.05, rng);
        ASSERT_LE(step.eps, 0.05);
        ASSERT_EQ(a.row_sums(), rows);
        ASSERT_EQ(a.col_sums(), cols);
        for (double v : a.values()) {
            ASSERT_GE(v, 0.0);
        }
    }
}

TEST(Walk, ZeroRecordedStepsReturnsTheBurnInMatrix) {
    const auto t = fixture_target();
    const auto start = solve_qp(t);
    WalkOptions opts;
    opts.burn_in = 500;
    opts.steps = 0;
    Rng rng = make_rng(3);
    const auto result = random_qp_solution(start, t, opts, rng);

    RealMatrix replay = snap_to_grid(start.counts);
    Rng replay_rng = make_rng(3);
    for (int i = 0; i < 500; ++i) {
        randomize_step_inplace(replay, opts.xi, replay_rng);
    }
    EXPECT_EQ(result.best.counts, replay);
    EXPECT_EQ(result.best_loss, result.burn_in_loss);
}

TEST(Walk, BestNeverWorseThanBurnIn) {
    DirichletPriors p;
    p.clients = 6;
    p.classes = 3;
    const auto t = build_target_class_size(p, std::vector<std::int64_t>{30, 30, 40}, 1);
    // Starting at the unconstrained target the walk can only drift away.
    PartitionMatrix start{solve_qp(t).counts, t.row_sums, t.col_sums};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        WalkOptions opts;
        opts.burn_in = 2000;
        opts.steps = 5000;
        opts.xi = 0.05;
        Rng rng = make_rng(seed);
        const auto r = random_qp_solution(start, t, opts, rng);
        EXPECT_LE(r.best_loss, r.burn_in_loss);
        EXPECT_EQ(r.best_loss, partition_loss(t, r.best.counts));
        r.best.validate();
    }
}

TEST(Walk, FixtureLossStaysNearTheOptimum) {
    const auto t = fixture_target();
    const auto start = solve_qp(t);
    WalkOptions opts;
    opts.burn_in = 1000;
    opts.steps = 1000;
    Rng rng = make_rng(4);
    const auto r = random_qp_solution(start, t, opts, rng);
    EXPECT_GE(r.best_loss, 2.0 - 1e-9);
    // 2000 moves of at most 0.002 cannot move alpha11 by more than 4.
    EXPECT_LE(r.best_loss, 2.0 + 0.5);
}

// ---------------------------------------------------------------- rounding

TEST(Rounding, LargestRemainder) {
    EXPECT_EQ(largest_remainder(std::vector<double>{2.5, 2.5}, 5), (std::vector<std::int64_t>{3, 2}));
    EXPECT_EQ(largest_remainder(std::vector<double>{1.2, 2.3, 1.5}, 5),
              (std::vector<std::int64_t>{1, 2, 2}));
    EXPECT_EQ(largest_remainder(std::vector<double>{3, 4}, 7), (std::vector<std::int64_t>{3, 4}));
}

TEST(Rounding, IntegerMatrixIsAFixedPoint) {
    const RealMatrix a{{5, 1}, {0, 4}};
    const auto r = round_partition({a, a.row_sums(), a.col_sums()});
    EXPECT_EQ(r.counts, (CountMatrix{{5, 1}, {0, 4}}));
}

TEST(Rounding, HalfMatrixRoundsToAVertex) {
    const RealMatrix a{{2.5, 2.5}, {2.5, 2.5}};
    const auto r = round_partition({a, a.row_sums(), a.col_sums()});
    EXPECT_TRUE(r.counts == (CountMatrix{{3, 2}, {2, 3}}) || r.counts == (CountMatrix{{2, 3}, {3, 2}}));
}

void check_rounding(const RealMatrix& a) {
    const auto r = round_partition({a, a.row_sums(), a.col_sums()});
    const auto real_rows = a.row_sums();
    const auto real_cols = a.col_sums();
    const double total = std::accumulate(real_cols.begin(), real_cols.end(), 0.0);
    ASSERT_EQ(r.row_sums, r.counts.row_sums());
    ASSERT_EQ(r.col_sums, r.counts.col_sums());
    const auto total_int = std::accumulate(r.col_sums.begin(), r.col_sums.end(), std::int64_t{0});
    EXPECT_EQ(total_int, std::llround(total));
    EXPECT_EQ(r.col_sums, largest_remainder(real_cols, std::llround(total)));
    for (std::size_t t = 0; t < a.rows(); ++t) {
        EXPECT_LT(std::abs(static_cast<double>(r.row_sums[t]) - real_rows[t]), 1.0);
        for (std::size_t g = 0; g < a.cols(); ++g) {
            EXPECT_LT(std::abs(static_cast<double>(r.counts(t, g)) - a(t, g)), 1.0);
            EXPECT_GE(r.counts(t, g), 0);
        }
    }
}

TEST(Rounding, RandomMatricesMeetBothInvariants) {
    Rng rng = make_rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        RealMatrix a(5, 4);
        for (double& v : a.values()) {
            v = uniform01(rng) < 0.2 ? 0.0 : 8 * uniform01(rng);
        }
        // Make the total an integer, as it is for a real dataset.
        const auto cols = a.col_sums();
        const double total = std::accumulate(cols.begin(), cols.end(), 0.0);
        a(0, 0) += std::ceil(total) - total;
        check_rounding(a);
    }
}

TEST(Rounding, PartitionPipelineIntegerColumns) {
    DirichletPriors p;
    p.clients = 20;
    p.classes = 3;
    const std::vector<std::int64_t> totals{321, 123, 556};
    const auto t = build_target_class_size(p, totals, 9);
    const auto r = round_partition(solve_qp(t));
    EXPECT_EQ(r.col_sums, totals);
    EXPECT_EQ(std::accumulate(r.row_sums.begin(), r.row_sums.end(), std::int64_t{0}), 1000);
}

// ---------------------------------------------------------------- assignment

data::Dataset ten_sample_fixture() {
    data::Dataset ds;
    ds.class_names = {"a", "b"};
    ds.numeric_names = {"x"};
    ds.numeric = RealMatrix(10, 1);
    for (std::size_t r = 0; r < 10; ++r) {
        ds.numeric(r, 0) = static_cast<double>(r);
        ds.labels.push_back(r < 5 ? 0 : 1);
    }
    ds.categorical = Matrix<int>(10, 0);
    return ds;
}

TEST(Assign, FixturePartition) {
    const auto ds = ten_sample_fixture();
    IntegerPartition part{CountMatrix{{5, 1}, {0, 4}}, {6, 4}, {5, 5}};
    Rng rng = make_rng(1);
    const auto cols = class_columns(ds);
    const auto clients = assign_samples(ds, cols, part, rng);
    ASSERT_EQ(clients.size(), 2u);
    EXPECT_EQ(clients[0].size(), 6u);
    EXPECT_EQ(clients[1].size(), 4u);
    EXPECT_EQ(clients[1].class_counts[0], 0);
    EXPECT_EQ(clients[0].class_counts, (std::vector<std::int64_t>{5, 1}));
}

TEST(Assign, SingleClientOwnsEverything) {
    const auto ds = ten_sample_fixture();
    IntegerPartition part{CountMatrix{{5, 5}}, {10}, {5, 5}};
    Rng rng = make_rng(2);
    const auto clients = assign_samples(ds, class_columns(ds), part, rng);
    ASSERT_EQ(clients.size(), 1u);
    std::vector<std::size_t> expected(10);
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    EXPECT_EQ(clients[0].source_rows, expected);
}

TEST(Assign, UnionIsTheDataset) {
    data::SynthSpec spec;
    spec.samples = 500;
    spec.classes = 3;
    const auto ds = data::synth_gaussian_mixture(spec);
    DirichletPriors p;
    p.clients = 7;
    p.classes = 3;
    const auto r = round_partition(solve_qp(build_target_class_size(p, ds.class_counts(), 3)));
    Rng rng = make_rng(3);
    const auto clients = assign_samples(ds, class_columns(ds), r, rng);
    std::vector<std::size_t> all;
    for (std::size_t t = 0; t < clients.size(); ++t) {
        EXPECT_EQ(static_cast<std::int64_t>(clients[t].size()), r.row_sums[t]);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_EQ(clients[t].class_counts[k], r.counts(t, k));
        }
        all.insert(all.end(), clients[t].source_rows.begin(), clients[t].source_rows.end());
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(ds.size());
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    EXPECT_EQ(all, expected);
}

TEST(Assign, CountMismatchIsAConsistencyError) {
    const auto ds = ten_sample_fixture();
    IntegerPartition part{CountMatrix{{5, 1}, {0, 3}}, {6, 3}, {5, 4}};
    Rng rng = make_rng(1);
    EXPECT_THROW(assign_samples(ds, class_columns(ds), part, rng), ConsistencyError);
}

TEST(Assign, ConfigurationColumns) {
    data::Dataset ds = ten_sample_fixture();
    ds.categorical = Matrix<int>(10, 1);
    ds.categorical_names = {"f"};
    ds.category_names = {{"u", "v"}};
    for (std::size_t r = 0; r < 10; ++r) {
        ds.categorical(r, 0) = static_cast<int>(r % 2);
    }
    DirichletPriors p;
    p.theta = 1;
    p.feature_arities = {2};
    const auto t = build_target_full(p, count_configurations(ds), 1);
    const auto cols = configuration_columns(ds, t);
    for (std::size_t r = 0; r < 10; ++r) {
        const auto& u = t.configurations[cols[r]];
        EXPECT_EQ(u[0], ds.labels[r]);
        EXPECT_EQ(u[1], ds.categorical(r, 0));
    }
}

// ---------------------------------------------------------------- C-score

TEST(CScore, IdenticalDistributionsScoreZero) {
    std::vector<data::ClientDataset> clients{
        testing::make_client(0, {{0}, {0}}, {0, 1}),
        testing::make_client(1, {{0}, {0}, {0}, {0}}, {0, 1, 1, 0})};
    EXPECT_EQ(c_score(clients), 0.0);
}

TEST(CScore, DisjointClientsScoreOne) {
    std::vector<data::ClientDataset> clients{testing::make_client(0, {{0}, {0}}, {0, 0}),
                                             testing::make_client(1, {{0}, {0}}, {1, 1})};
    EXPECT_EQ(c_score(clients), 1.0);
}

TEST(CScore, EmptyClientsAreSkipped) {
    std::vector<data::ClientDataset> clients{testing::make_client(0, {{0}, {0}}, {0, 0}),
                                             testing::make_client(1, {{0}, {0}}, {1, 1}),
                                             testing::make_client(2, {}, {})};
    EXPECT_EQ(c_score(clients), 1.0);
    std::vector<data::ClientDataset> none{testing::make_client(0, {}, {})};
    EXPECT_THROW(c_score(none), ParameterError);
}

}  // namespace
}  // namespace radfed::partition
