#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "texclass/imaging.hpp"

namespace texclass::dct {

inline constexpr std::size_t kFeaturesPerBlock = 9;

// coeffs[u * n + v] = F(u, v)
struct CoefficientBlock {
    std::size_t n = 0;
    std::vector<double> coeffs;

    double at(std::size_t u, std::size_t v) const { return coeffs[u * n + v]; }
};

// Nine (u, v) positions read from every block. The first is always DC.
class CoefficientMask {
public:
    using Position = std::pair<std::size_t, std::size_t>;

    // Zigzag-order lowest frequencies.
    static CoefficientMask zigzag();
    /// Accepts "zigzag" or nine "u,v" pairs separated by ';', e.g. "0,0;0,1;1,0;...".
    static CoefficientMask parse(std::string_view text);

    explicit CoefficientMask(std::array<Position, kFeaturesPerBlock> positions);

    const std::array<Position, kFeaturesPerBlock>& positions() const { return positions_; }
    // Throws unless every position fits an n x n block.
    void check_fits(std::size_t n) const;
    std::string to_string() const;

private:
    std::array<Position, kFeaturesPerBlock> positions_;
};

struct FeatureVector {
    std::vector<double> values;  // kFeaturesPerBlock per block, in block order
    std::size_t block_count = 0;
    std::size_t block_size = 0;
};

/// Orthonormal 2-D DCT-II, evaluated separably (rows then columns).
CoefficientBlock forward_dct(const imaging::Block& block);
/// Orthonormal 2-D DCT-III; exact inverse of forward_dct.
imaging::Block inverse_dct(const CoefficientBlock& coeffs);

std::array<double, kFeaturesPerBlock> extract_block_features(const CoefficientBlock& coeffs,
                                                             const CoefficientMask& mask);

FeatureVector extract_image_features(const imaging::GrayImage& img, std::size_t block_size,
                                     const CoefficientMask& mask = CoefficientMask::zigzag());

}  // namespace texclass::dct
