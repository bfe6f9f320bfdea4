#include <cmath>
#include <random>

#include <fmt/format.h>

#include "radfed/data.hpp"
#include "radfed/error.hpp"
#include "radfed/rng.hpp"

namespace radfed::data {

RealMatrix class_means(const SynthSpec& spec) {
    const auto k = static_cast<std::size_t>(spec.classes);
    const auto d = static_cast<std::size_t>(spec.features);
    RealMatrix means(k, d, 0.0);
    if (d >= k) {
        // Simplex corners: every pair of means is `separation` apart.
        const double scale = spec.separation / std::sqrt(2.0);
        for (std::size_t c = 0; c < k; ++c) {
            means(c, c) = scale;
        }
    } else {
        const double unit = 1.0 / std::sqrt(static_cast<double>(d));
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) {
                means(c, j) = static_cast<double>(c) * spec.separation * unit;
            }
        }
    }
    return means;
}

Dataset synth_gaussian_mixture(const SynthSpec& spec) {
    if (spec.classes < 2 || spec.features < 1 || spec.samples < 1) {
        throw ParameterError("synthetic data needs >= 2 classes, >= 1 feature and >= 1 sample");
    }
    if (!(spec.separation > 0.0)) {
        throw ParameterError("separation must be positive");
    }
    for (int a : spec.categorical_arities) {
        if (a < 1) {
            throw ParameterError("categorical arity must be >= 1");
        }
    }

    const RealMatrix means = class_means(spec);
    Dataset ds;
    for (int c = 0; c < spec.classes; ++c) {
        ds.class_names.push_back(fmt::format("c{}", c));
    }
    for (int j = 0; j < spec.features; ++j) {
        ds.numeric_names.push_back(fmt::format("x{}", j));
    }
    for (std::size_t j = 0; j < spec.categorical_arities.size(); ++j) {
        ds.categorical_names.push_back(fmt::format("f{}", j));
        std::vector<std::string> names;
        for (int i = 0; i < spec.categorical_arities[j]; ++i) {
            names.push_back(fmt::format("v{}", i));
        }
        ds.category_names.push_back(std::move(names));
    }

    const std::size_t n = spec.samples;
    ds.numeric = RealMatrix(n, static_cast<std::size_t>(spec.features));
    ds.categorical = Matrix<int>(n, spec.categorical_arities.size());
    ds.labels.resize(n);

    Rng label_rng = make_rng(spec.seed, {tag("synth.labels")});
    Rng noise_rng = make_rng(spec.seed, {tag("synth.noise")});
    Rng category_rng = make_rng(spec.seed, {tag("synth.categories")});
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t r = 0; r < n; ++r) {
        const int y = static_cast<int>(uniform_index(label_rng, static_cast<std::size_t>(spec.classes)));
        ds.labels[r] = y;
        for (std::size_t j = 0; j < ds.numeric.cols(); ++j) {
            ds.numeric(r, j) = means(static_cast<std::size_t>(y), j) + normal(noise_rng);
        }
        for (std::size_t j = 0; j < spec.categorical_arities.size(); ++j) {
            const auto arity = static_cast<std::size_t>(spec.categorical_arities[j]);
            // Half of the draws follow the class, the rest are uniform.
            const bool follow_class = uniform01(category_rng) < 0.5;
            const std::size_t code = follow_class ? static_cast<std::size_t>(y) % arity
                                                  : uniform_index(category_rng, arity);
            ds.categorical(r, j) = static_cast<int>(code);
        }
    }
    return ds;
}

}  // namespace radfed::data
