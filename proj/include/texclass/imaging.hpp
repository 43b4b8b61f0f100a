#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace texclass::imaging {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint32_t max_value = 255;
    std::vector<std::uint16_t> data;  // row-major

    std::uint16_t at(std::size_t x, std::size_t y) const { return data[y * width + x]; }
    bool operator==(const GrayImage&) const = default;
};

struct Rgb {
    std::uint16_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint32_t max_value = 255;
    std::vector<Rgb> data;  // row-major

    bool operator==(const RgbImage&) const = default;
};

// One n x n tile of gray levels promoted to real, row-major: values[i * n + j] = f(i, j).
struct Block {
    std::size_t n = 0;
    std::vector<double> values;
};

using Image = std::variant<GrayImage, RgbImage>;

enum class Encoding { Ascii, Binary };

/// Parses a Netpbm graymap or pixmap (P2, P3, P5, P6). Throws ParseError
/// with the failing field and byte offset.
Image parse_image(std::span<const std::uint8_t> bytes);
Image parse_image(std::string_view bytes);
Image read_image(const std::filesystem::path& path);

std::string serialize(const GrayImage& img, Encoding enc);
std::string serialize(const RgbImage& img, Encoding enc);
void write_image(const std::filesystem::path& path, const GrayImage& img, Encoding enc = Encoding::Binary);

/// BT.601 luma, rounded to nearest and clamped to max_value.
GrayImage to_grayscale(const RgbImage& img);

/// Gray view of any parsed image; color inputs go through to_grayscale.
GrayImage as_gray(const Image& img);

/// Center-crops to the largest multiple of n in each direction, then tiles
/// row-major (left to right, top to bottom).
std::vector<Block> partition_blocks(const GrayImage& img, std::size_t n);

/// Inverse of partition_blocks for the cropped region; blocks_per_row says
/// how the tiles were laid out.
GrayImage assemble_blocks(std::span<const Block> blocks, std::size_t blocks_per_row, std::uint32_t max_value = 255);

}  // namespace texclass::imaging
