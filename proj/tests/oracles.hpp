#pragma once

// Reference implementations used only by tests. They follow the textbook
// formulas directly and share no code with the library.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Orthonormal 2-D DCT-II by direct O(N^4) summation; out[u * n + v].
inline std::vector<double> direct_dct(const std::vector<double>& f, std::size_t n) {
    std::vector<double> out(n * n, 0.0);
    const double N = static_cast<double>(n);
    auto alpha = [&](std::size_t k) { return k == 0 ? std::sqrt(1.0 / N) : std::sqrt(2.0 / N); };
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    s += f[i * n + j] * std::cos((2.0 * i + 1.0) * u * std::numbers::pi / (2.0 * N)) *
                         std::cos((2.0 * j + 1.0) * v * std::numbers::pi / (2.0 * N));
                }
            }
            out[u * n + v] = alpha(u) * alpha(v) * s;
        }
    }
    return out;
}

inline std::vector<double> random_block(std::mt19937_64& gen, std::size_t n) {
    std::uniform_int_distribution<int> level(0, 255);
    std::vector<double> f(n * n);
    for (double& v : f) v = level(gen);
    return f;
}

}  // namespace oracle
