#include <algorithm>
#include <cmath>
#include <random>

#include "radfed/error.hpp"
#include "radfed/partition.hpp"

namespace radfed::partition {

std::vector<double> sample_dirichlet(double concentration, std::size_t dim, Rng& rng) {
    if (!(concentration > 0.0) || !std::isfinite(concentration)) {
        throw ParameterError("Dirichlet concentration must be positive and finite");
    }
    if (dim == 0) {
        throw ParameterError("Dirichlet dimension must be at least 1");
    }
    if (dim == 1) {
        return {1.0};
    }
    std::vector<double> out(dim);
    if (concentration >= 1.0) {
        std::gamma_distribution<double> gamma(concentration, 1.0);
        double sum = 0.0;
        for (double& g : out) {
            g = gamma(rng);
            sum += g;
        }
        for (double& g : out) {
            g /= sum;
        }
        return out;
    }
    // Small concentrations underflow in linear space. Use G(a) = G(a + 1) * U^(1/a) in logs.
    std::gamma_distribution<double> gamma(concentration + 1.0, 1.0);
    for (double& lg : out) {
        const double g = gamma(rng);
        double u = uniform01(rng);
        while (u == 0.0) {
            u = uniform01(rng);
        }
        lg = std::log(g) + std::log(u) / concentration;
    }
    const double peak = *std::max_element(out.begin(), out.end());
    double sum = 0.0;
    for (double& lg : out) {
        lg = std::exp(lg - peak);
        sum += lg;
    }
    for (double& v : out) {
        v /= sum;
    }
    return out;
}

}  // namespace radfed::partition
