#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace texclass::mlp {

struct Config {
    std::vector<std::size_t> layer_sizes;  // input, hidden..., output
    double learning_rate = 0.05;
    double momentum = 0.1;
    std::size_t epochs = 5000;
    std::uint64_t seed = 1;
    double init_scale = 0.1;

    void validate() const;
    bool operator==(const Config&) const = default;
};

// Row-major; a layer with `in` inputs and `out` units is out x (in + 1),
// the last column holding the bias.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    bool operator==(const Matrix&) const = default;
};

using Gradient = std::vector<Matrix>;

struct Model {
    Config config;
    std::vector<Matrix> weights;
    std::vector<Matrix> prev_deltas;

    std::size_t inputs() const { return config.layer_sizes.front(); }
    std::size_t outputs() const { return config.layer_sizes.back(); }
    bool operator==(const Model&) const = default;
};

/// Uniform weights in [-init_scale, init_scale] from a generator seeded with config.seed.
Model init(const Config& config);

// activations[0] is the input, activations.back() the output.
struct ForwardPass {
    std::vector<std::vector<double>> activations;
    const std::vector<double>& output() const { return activations.back(); }
};

/// tanh hidden layers, logistic output layer.
ForwardPass forward(const Model& model, std::span<const double> x);

/// E = 1/2 sum (output - target)^2 for one example.
double loss(const Model& model, std::span<const double> x, std::span<const double> target);

/// dE/dw for one example by backpropagation.
Gradient backprop(const Model& model, std::span<const double> x, std::span<const double> target);

struct BatchGradient {
    Gradient gradient;         // mean over the batch examples
    double squared_error = 0;  // sum over examples and outputs, before any update
    std::size_t terms = 0;     // examples x outputs
};

BatchGradient batch_gradient(const Model& model, std::span<const std::vector<double>> inputs,
                             std::span<const std::vector<double>> targets);

/// delta(n) = -learning_rate * grad + momentum * delta(n-1)
inline double momentum_delta(double learning_rate, double momentum, double grad, double prev_delta) {
    return -learning_rate * grad + momentum * prev_delta;
}

void apply_update(Model& model, const Gradient& gradient);

/// One full-batch step. Returns the RMSE measured before the update.
double train_epoch(Model& model, std::span<const std::vector<double>> inputs,
                   std::span<const std::vector<double>> targets);

Gradient numeric_gradient(const Model& model, std::span<const double> x, std::span<const double> target,
                          double step = 1e-6);
/// max |a - b| / max(|a|, |b|, 1e-12) over all entries.
double max_relative_error(const Gradient& a, const Gradient& b);
/// Analytic against central differences.
double gradient_check(const Model& model, std::span<const double> x, std::span<const double> target);

/// Argmax of the outputs; ties go to the lowest index.
std::size_t predict(const Model& model, std::span<const double> x);

std::vector<double> one_hot(std::size_t label, std::size_t classes);

}  // namespace texclass::mlp
