#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/model.hpp"

namespace radfed::model {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::logistic: return "logistic";
        case ModelKind::mlp: return "mlp";
        case ModelKind::linear: return "linear";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "logistic") return ModelKind::logistic;
    if (name == "mlp") return ModelKind::mlp;
    if (name == "linear") return ModelKind::linear;
    throw ParameterError(fmt::format("unknown model kind '{}'", name));
}

ModelFamily ModelFamily::logistic(std::size_t inputs, std::size_t classes) {
    return {ModelKind::logistic, inputs, classes, {}};
}

ModelFamily ModelFamily::mlp(std::size_t inputs, std::vector<std::size_t> hidden,
                             std::size_t classes) {
    return {ModelKind::mlp, inputs, classes, std::move(hidden)};
}

ModelFamily ModelFamily::linear(std::size_t inputs) {
    return {ModelKind::linear, inputs, 1, {}};
}

namespace {

bool binary_logistic(const ModelFamily& f) {
    return f.kind == ModelKind::logistic && f.classes == 2;
}

// Layer widths of the softmax network view: inputs, hidden..., outputs.
std::vector<std::size_t> layer_sizes(const ModelFamily& f) {
    std::vector<std::size_t> sizes{f.inputs};
    if (f.kind == ModelKind::mlp) {
        sizes.insert(sizes.end(), f.hidden.begin(), f.hidden.end());
    }
    sizes.push_back(f.outputs());
    return sizes;
}

// 1 where the parameter is a weight, 0 for biases.
std::vector<char> weight_mask(const ModelFamily& f) {
    std::vector<char> mask;
    if (f.kind == ModelKind::linear) {
        return std::vector<char>(f.inputs, 1);
    }
    if (binary_logistic(f)) {
        mask.assign(f.inputs + 1, 1);
        mask.back() = 0;
        return mask;
    }
    const auto sizes = layer_sizes(f);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        mask.insert(mask.end(), sizes[l] * sizes[l + 1], 1);
        mask.insert(mask.end(), sizes[l + 1], 0);
    }
    return mask;
}

}  // namespace

std::size_t ModelFamily::outputs() const {
    if (kind == ModelKind::linear || binary_logistic(*this)) {
        return 1;
    }
    return classes;
}

std::size_t ModelFamily::parameter_count() const {
    if (kind == ModelKind::linear) {
        return inputs;
    }
    if (binary_logistic(*this)) {
        return inputs + 1;
    }
    const auto sizes = layer_sizes(*this);
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        n += (sizes[l] + 1) * sizes[l + 1];
    }
    return n;
}

void ModelFamily::validate() const {
    if (inputs == 0) {
        throw ParameterError("model needs at least one input");
    }
    if (kind != ModelKind::linear && classes < 2) {
        throw ParameterError("classifier needs at least 2 classes");
    }
    if (kind == ModelKind::mlp) {
        if (hidden.empty()) {
            throw ParameterError("mlp needs at least one hidden layer");
        }
        for (std::size_t h : hidden) {
            if (h == 0) {
                throw ParameterError("mlp layer sizes must be positive");
            }
        }
    } else if (!hidden.empty()) {
        throw ParameterError(fmt::format("{} model takes no hidden layers", to_string(kind)));
    }
}

void ModelState::validate() const {
    family.validate();
    if (params.size() != family.parameter_count()) {
        throw ConsistencyError(fmt::format("model has {} parameters, family expects {}",
                                           params.size(), family.parameter_count()));
    }
    if (!(l2 >= 0.0) || !std::isfinite(l2)) {
        throw ParameterError("l2 must be nonnegative");
    }
    for (double p : params) {
        if (!std::isfinite(p)) {
            throw NumericError("model parameters must be finite");
        }
    }
}

ModelState init_model(const ModelFamily& family, std::uint64_t seed, double l2) {
    family.validate();
    ModelState m{family, std::vector<double>(family.parameter_count(), 0.0), l2};
    if (family.kind == ModelKind::mlp) {
        Rng rng = make_rng(seed, {tag("model.init")});
        const auto sizes = layer_sizes(family);
        std::size_t offset = 0;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
            std::uniform_real_distribution<double> dist(-bound, bound);
            const std::size_t weights = sizes[l] * sizes[l + 1];
            for (std::size_t i = 0; i < weights; ++i) {
                m.params[offset + i] = dist(rng);
            }
            offset += weights + sizes[l + 1];
        }
    }
    m.validate();
    return m;
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void softmax_inplace(std::span<double> z) {
    const double peak = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - peak);
        sum += v;
    }
    for (double& v : z) {
        v /= sum;
    }
}

// Forward pass of the softmax network; activations[l] holds layer l outputs (post-ReLU for
// hidden layers, probabilities for the last).
void forward(const ModelState& m, std::span<const double> x,
             std::vector<std::vector<double>>& activations) {
    const auto sizes = layer_sizes(m.family);
    activations.resize(sizes.size());
    activations[0].assign(x.begin(), x.end());
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t in = sizes[l];
        const std::size_t out = sizes[l + 1];
        const double* w = m.params.data() + offset;
        const double* b = w + in * out;
        auto& a = activations[l + 1];
        a.assign(out, 0.0);
        const auto& prev = activations[l];
        for (std::size_t o = 0; o < out; ++o) {
            double z = b[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) {
                z += row[i] * prev[i];
            }
            a[o] = (l + 2 < sizes.size()) ? std::max(0.0, z) : z;
        }
        offset += in * out + out;
    }
    softmax_inplace(activations.back());
}

double dot(const double* a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void check_sample(const ModelState& m, std::span<const double> x, int y, bool need_label) {
    if (x.size() != m.family.inputs) {
        throw ConsistencyError(fmt::format("sample has {} features, model expects {}", x.size(),
                                           m.family.inputs));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite feature value");
        }
    }
    if (need_label && m.family.kind != ModelKind::linear &&
        (y < 0 || static_cast<std::size_t>(y) >= m.family.classes)) {
        throw ConsistencyError(fmt::format("label {} out of range", y));
    }
}

}  // namespace

LossGrad loss_and_grad(const ModelState& model, const Batch& batch, const ProxTerm* prox) {
    if (batch.features == nullptr || batch.size() == 0) {
        throw ParameterError("batch must be nonempty");
    }
    for (double p : model.params) {
        if (!std::isfinite(p)) {
            throw NumericError("non-finite model parameter");
        }
    }
    const ModelFamily& f = model.family;
    LossGrad out;
    out.grad.assign(model.params.size(), 0.0);
    const auto& params = model.params;
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> deltas;
    const auto sizes = layer_sizes(f);
    std::vector<std::size_t> offsets(sizes.size() - 1, 0);
    for (std::size_t l = 1; l < offsets.size(); ++l) {
        offsets[l] = offsets[l - 1] + sizes[l - 1] * sizes[l] + sizes[l];
    }

    for (std::size_t r : batch.rows) {
        const auto x = batch.features->row(r);
        const int y = batch.labels[r];
        check_sample(model, x, y, true);
        if (f.kind == ModelKind::linear) {
            const double e = dot(params.data(), x) - static_cast<double>(y);
            out.loss += 0.5 * e * e;
            for (std::size_t i = 0; i < x.size(); ++i) {
                out.grad[i] += e * x[i];
            }
        } else if (binary_logistic(f)) {
            const double z = dot(params.data(), x) + params[f.inputs];
            out.loss += softplus(z) - (y == 1 ? z : 0.0);
            const double d = sigmoid(z) - (y == 1 ? 1.0 : 0.0);
            for (std::size_t i = 0; i < x.size(); ++i) {
                out.grad[i] += d * x[i];
            }
            out.grad[f.inputs] += d;
        } else {
            forward(model, x, acts);
            const auto& probs = acts.back();
            out.loss -= std::log(std::max(probs[static_cast<std::size_t>(y)], 1e-300));
            deltas.resize(sizes.size());
            deltas.back() = probs;
            deltas.back()[static_cast<std::size_t>(y)] -= 1.0;
            for (std::size_t l = sizes.size() - 1; l-- > 0;) {
                const std::size_t in = sizes[l];
                const std::size_t out_n = sizes[l + 1];
                const std::size_t off = offsets[l];
                const auto& delta = deltas[l + 1];
                const auto& prev = acts[l];
                for (std::size_t o = 0; o < out_n; ++o) {
                    double* g = out.grad.data() + off + o * in;
                    for (std::size_t i = 0; i < in; ++i) {
                        g[i] += delta[o] * prev[i];
                    }
                    out.grad[off + in * out_n + o] += delta[o];
                }
                if (l > 0) {
                    auto& back = deltas[l];
                    back.assign(in, 0.0);
                    for (std::size_t o = 0; o < out_n; ++o) {
                        const double* w = params.data() + off + o * in;
                        for (std::size_t i = 0; i < in; ++i) {
                            back[i] += w[i] * delta[o];
                        }
                    }
                    for (std::size_t i = 0; i < in; ++i) {
                        if (prev[i] <= 0.0) {
                            back[i] = 0.0;
                        }
                    }
                }
            }
        }
    }
    const double n = static_cast<double>(batch.size());
    out.loss /= n;
    for (double& g : out.grad) {
        g /= n;
    }

    if (model.l2 > 0.0) {
        const auto mask = weight_mask(f);
        double sq = 0.0;
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (mask[i]) {
                sq += params[i] * params[i];
                out.grad[i] += model.l2 * params[i];
            }
        }
        out.loss += 0.5 * model.l2 * sq;
    }

    if (prox != nullptr && prox->mu > 0.0) {
        if (prox->anchor == nullptr) {
            throw ParameterError("proximal term needs an anchor model");
        }
        if (!(prox->anchor->family == f)) {
            throw ConsistencyError("anchor model family differs");
        }
        double sq = 0.0;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double d = params[i] - prox->anchor->params[i];
            sq += d * d;
            out.grad[i] += prox->mu * d;
        }
        out.loss += 0.5 * prox->mu * sq;
    }

    if (!std::isfinite(out.loss)) {
        throw NumericError("loss is not finite");
    }
    return out;
}

std::vector<double> predict(const ModelState& model, std::span<const double> x) {
    check_sample(model, x, 0, false);
    const ModelFamily& f = model.family;
    if (f.kind == ModelKind::linear) {
        return {dot(model.params.data(), x)};
    }
    if (binary_logistic(f)) {
        const double p = sigmoid(dot(model.params.data(), x) + model.params[f.inputs]);
        return {1.0 - p, p};
    }
    std::vector<std::vector<double>> acts;
    forward(model, x, acts);
    return acts.back();
}

double positive_score(const ModelState& model, std::span<const double> x) {
    if (model.family.kind == ModelKind::linear) {
        return predict(model, x)[0];
    }
    if (model.family.classes != 2) {
        throw ParameterError("positive score needs a binary model");
    }
    return predict(model, x)[1];
}

int predict_class(const ModelState& model, std::span<const double> x) {
    const auto p = predict(model, x);
    if (model.family.kind == ModelKind::linear) {
        return p[0] >= 0.5 ? 1 : 0;
    }
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace radfed::model
