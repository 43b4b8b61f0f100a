#include "texclass/dct.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "texclass/error.hpp"

namespace texclass::dct {

namespace {

// basis[u * n + i] = alpha(u) cos((2i + 1) u pi / 2n)
std::vector<double> dct_basis(std::size_t n) {
    std::vector<double> basis(n * n);
    const double dn = static_cast<double>(n);
    for (std::size_t u = 0; u < n; ++u) {
        const double alpha = u == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
        for (std::size_t i = 0; i < n; ++i) {
            basis[u * n + i] =
                alpha * std::cos((2.0 * static_cast<double>(i) + 1.0) * static_cast<double>(u) * std::numbers::pi / (2.0 * dn));
        }
    }
    return basis;
}

std::size_t parse_index(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("coefficient mask: bad index '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

CoefficientMask CoefficientMask::zigzag() {
    return CoefficientMask({{{0, 0}, {0, 1}, {1, 0}, {2, 0}, {1, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 1}}});
}

CoefficientMask::CoefficientMask(std::array<Position, kFeaturesPerBlock> positions) : positions_(positions) {
    if (positions_[0] != Position{0, 0}) {
        throw Error("coefficient mask must start with the DC position (0,0)");
    }
    const std::set<Position> distinct(positions_.begin(), positions_.end());
    if (distinct.size() != kFeaturesPerBlock) {
        throw Error("coefficient mask positions must be distinct");
    }
}

CoefficientMask CoefficientMask::parse(std::string_view text) {
    if (text == "zigzag") {
        return zigzag();
    }
    std::array<Position, kFeaturesPerBlock> positions{};
    std::size_t count = 0;
    while (!text.empty()) {
        const auto semi = text.find(';');
        const std::string_view pair = text.substr(0, semi);
        text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
        const auto comma = pair.find(',');
        if (comma == std::string_view::npos) {
            throw ParseError("coefficient mask: expected 'u,v' but got '" + std::string(pair) + "'");
        }
        if (count == kFeaturesPerBlock) {
            throw ParseError("coefficient mask: more than 9 positions");
        }
        positions[count++] = {parse_index(pair.substr(0, comma)), parse_index(pair.substr(comma + 1))};
    }
    if (count != kFeaturesPerBlock) {
        throw ParseError("coefficient mask: expected 9 positions, got " + std::to_string(count));
    }
    return CoefficientMask(positions);
}

void CoefficientMask::check_fits(std::size_t n) const {
    for (const auto& [u, v] : positions_) {
        if (u >= n || v >= n) {
            throw Error("coefficient mask position (" + std::to_string(u) + "," + std::to_string(v) +
                        ") outside a " + std::to_string(n) + "x" + std::to_string(n) + " block");
        }
    }
}

std::string CoefficientMask::to_string() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < positions_.size(); ++k) {
        out << (k ? ";" : "") << positions_[k].first << ',' << positions_[k].second;
    }
    return out.str();
}

CoefficientBlock forward_dct(const imaging::Block& block) {
    const std::size_t n = block.n;
    const std::vector<double> basis = dct_basis(n);
    // Along j first: tmp[i][v] = sum_j f(i, j) basis[v][j]
    std::vector<double> tmp(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                s += block.values[i * n + j] * basis[v * n + j];
            }
            tmp[i * n + v] = s;
        }
    }
    CoefficientBlock out{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += basis[u * n + i] * tmp[i * n + v];
            }
            out.coeffs[u * n + v] = s;
        }
    }
    return out;
}

imaging::Block inverse_dct(const CoefficientBlock& c) {
    const std::size_t n = c.n;
    const std::vector<double> basis = dct_basis(n);
    // tmp[i][v] = sum_u basis[u][i] F(u, v)
    std::vector<double> tmp(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (std::size_t u = 0; u < n; ++u) {
                s += basis[u * n + i] * c.coeffs[u * n + v];
            }
            tmp[i * n + v] = s;
        }
    }
    imaging::Block out{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                s += tmp[i * n + v] * basis[v * n + j];
            }
            out.values[i * n + j] = s;
        }
    }
    return out;
}

std::array<double, kFeaturesPerBlock> extract_block_features(const CoefficientBlock& coeffs,
                                                             const CoefficientMask& mask) {
    mask.check_fits(coeffs.n);
    std::array<double, kFeaturesPerBlock> out{};
    for (std::size_t k = 0; k < kFeaturesPerBlock; ++k) {
        const auto& [u, v] = mask.positions()[k];
        out[k] = coeffs.at(u, v);
    }
    return out;
}

FeatureVector extract_image_features(const imaging::GrayImage& img, std::size_t block_size,
                                     const CoefficientMask& mask) {
    mask.check_fits(block_size);
    const auto blocks = imaging::partition_blocks(img, block_size);
    FeatureVector fv{{}, blocks.size(), block_size};
    fv.values.reserve(blocks.size() * kFeaturesPerBlock);
    for (const auto& b : blocks) {
        const auto f = extract_block_features(forward_dct(b), mask);
        fv.values.insert(fv.values.end(), f.begin(), f.end());
    }
    return fv;
}

}  // namespace texclass::dct
