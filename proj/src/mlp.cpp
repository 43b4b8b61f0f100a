#include "texclass/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "texclass/error.hpp"

namespace texclass::mlp {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Maps a 64-bit draw to [-scale, scale] without relying on
// implementation-defined distribution algorithms.
double uniform_symmetric(std::mt19937_64& gen, double scale) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return (2.0 * unit - 1.0) * scale;
}

void check_input(const Model& model, std::span<const double> x) {
    if (x.size() != model.inputs()) {
        throw Error("mlp: input has " + std::to_string(x.size()) + " values, network expects " +
                    std::to_string(model.inputs()));
    }
}

Gradient zero_like(const std::vector<Matrix>& shapes) {
    Gradient g;
    g.reserve(shapes.size());
    for (const Matrix& m : shapes) g.emplace_back(m.rows, m.cols);
    return g;
}

// Adds dE/dw for one example into grad; returns the example's squared error.
double accumulate_backprop(const Model& model, std::span<const double> x, std::span<const double> target,
                           Gradient& grad) {
    const ForwardPass pass = forward(model, x);
    const std::size_t layers = model.weights.size();
    const std::vector<double>& out = pass.output();
    if (target.size() != out.size()) throw Error("mlp: target size does not match output layer");

    double sq = 0.0;
    std::vector<double> delta(out.size());
    for (std::size_t r = 0; r < out.size(); ++r) {
        const double e = out[r] - target[r];
        sq += e * e;
        delta[r] = e * out[r] * (1.0 - out[r]);
    }
    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& w = model.weights[l];
        const std::vector<double>& in = pass.activations[l];
        Matrix& g = grad[l];
        const std::size_t n_in = in.size();
        for (std::size_t r = 0; r < w.rows; ++r) {
            double* grow = &g.data[r * g.cols];
            const double d = delta[r];
            for (std::size_t c = 0; c < n_in; ++c) grow[c] += d * in[c];
            grow[n_in] += d;
        }
        if (l == 0) break;
        std::vector<double> prev(n_in, 0.0);
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double* wrow = &w.data[r * w.cols];
            const double d = delta[r];
            for (std::size_t c = 0; c < n_in; ++c) prev[c] += wrow[c] * d;
        }
        for (std::size_t c = 0; c < n_in; ++c) prev[c] *= 1.0 - in[c] * in[c];
        delta = std::move(prev);
    }
    return sq;
}

}  // namespace

void Config::validate() const {
    if (layer_sizes.size() < 3) throw Error("mlp: need at least input, one hidden and output layer");
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw Error("mlp: layer sizes must be positive");
    }
    if (!(learning_rate >= 0.0)) throw Error("mlp: learning rate must be >= 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw Error("mlp: momentum must lie in [0,1)");
    if (!(init_scale >= 0.0)) throw Error("mlp: init_scale must be >= 0");
    if (epochs == 0) throw Error("mlp: epochs must be positive");
}

Model init(const Config& config) {
    config.validate();
    Model m{config, {}, {}};
    std::mt19937_64 gen(config.seed);
    for (std::size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
        Matrix w(config.layer_sizes[l + 1], config.layer_sizes[l] + 1);
        for (double& v : w.data) v = uniform_symmetric(gen, config.init_scale);
        m.prev_deltas.emplace_back(w.rows, w.cols);
        m.weights.push_back(std::move(w));
    }
    return m;
}

ForwardPass forward(const Model& model, std::span<const double> x) {
    check_input(model, x);
    ForwardPass pass;
    pass.activations.reserve(model.weights.size() + 1);
    pass.activations.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const Matrix& w = model.weights[l];
        const std::vector<double>& in = pass.activations[l];
        const bool output_layer = l + 1 == model.weights.size();
        std::vector<double> out(w.rows);
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double* wrow = &w.data[r * w.cols];
            double z = wrow[in.size()];
            for (std::size_t c = 0; c < in.size(); ++c) z += wrow[c] * in[c];
            out[r] = output_layer ? logistic(z) : std::tanh(z);
        }
        pass.activations.push_back(std::move(out));
    }
    return pass;
}

double loss(const Model& model, std::span<const double> x, std::span<const double> target) {
    const ForwardPass pass = forward(model, x);
    double e = 0.0;
    for (std::size_t r = 0; r < target.size(); ++r) {
        const double d = pass.output()[r] - target[r];
        e += d * d;
    }
    return 0.5 * e;
}

Gradient backprop(const Model& model, std::span<const double> x, std::span<const double> target) {
    Gradient g = zero_like(model.weights);
    accumulate_backprop(model, x, target, g);
    return g;
}

BatchGradient batch_gradient(const Model& model, std::span<const std::vector<double>> inputs,
                             std::span<const std::vector<double>> targets) {
    if (inputs.empty()) throw Error("mlp: empty training set");
    if (inputs.size() != targets.size()) throw Error("mlp: inputs and targets differ in length");
    BatchGradient b{zero_like(model.weights), 0.0, 0};
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        b.squared_error += accumulate_backprop(model, inputs[i], targets[i], b.gradient);
        b.terms += model.outputs();
    }
    const double scale = 1.0 / static_cast<double>(inputs.size());
    for (Matrix& g : b.gradient) {
        for (double& v : g.data) v *= scale;
    }
    return b;
}

void apply_update(Model& model, const Gradient& gradient) {
    const double lr = model.config.learning_rate;
    const double mom = model.config.momentum;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        auto& w = model.weights[l].data;
        auto& prev = model.prev_deltas[l].data;
        const auto& g = gradient[l].data;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double delta = momentum_delta(lr, mom, g[i], prev[i]);
            w[i] += delta;
            prev[i] = delta;
        }
    }
}

double train_epoch(Model& model, std::span<const std::vector<double>> inputs,
                   std::span<const std::vector<double>> targets) {
    const BatchGradient b = batch_gradient(model, inputs, targets);
    apply_update(model, b.gradient);
    return std::sqrt(b.squared_error / static_cast<double>(b.terms));
}

Gradient numeric_gradient(const Model& model, std::span<const double> x, std::span<const double> target,
                          double step) {
    Gradient g = zero_like(model.weights);
    Model probe = model;
    for (std::size_t l = 0; l < probe.weights.size(); ++l) {
        for (std::size_t i = 0; i < probe.weights[l].data.size(); ++i) {
            double& w = probe.weights[l].data[i];
            const double saved = w;
            w = saved + step;
            const double up = loss(probe, x, target);
            w = saved - step;
            const double down = loss(probe, x, target);
            w = saved;
            g[l].data[i] = (up - down) / (2.0 * step);
        }
    }
    return g;
}

double max_relative_error(const Gradient& a, const Gradient& b) {
    if (a.size() != b.size()) throw Error("mlp: gradient shapes differ");
    double worst = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (a[l].data.size() != b[l].data.size()) throw Error("mlp: gradient shapes differ");
        for (std::size_t i = 0; i < a[l].data.size(); ++i) {
            const double x = a[l].data[i];
            const double y = b[l].data[i];
            const double denom = std::max({std::abs(x), std::abs(y), 1e-12});
            worst = std::max(worst, std::abs(x - y) / denom);
        }
    }
    return worst;
}

double gradient_check(const Model& model, std::span<const double> x, std::span<const double> target) {
    return max_relative_error(backprop(model, x, target), numeric_gradient(model, x, target));
}

std::size_t predict(const Model& model, std::span<const double> x) {
    const ForwardPass pass = forward(model, x);
    const auto& out = pass.output();
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i] > out[best]) best = i;
    }
    return best;
}

std::vector<double> one_hot(std::size_t label, std::size_t classes) {
    if (label >= classes) throw Error("mlp: label " + std::to_string(label) + " out of range");
    std::vector<double> v(classes, 0.0);
    v[label] = 1.0;
    return v;
}

}  // namespace texclass::mlp
