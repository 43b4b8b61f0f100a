#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "texclass/dataset.hpp"
#include "texclass/imaging.hpp"

namespace texclass::synth {

// Procedural texture families standing in for a photographed texture database.
enum class Family { Brick, Metal, Rural };

Family parse_family(std::string_view name);
std::string_view to_string(Family f);

/// Renders one size x size texture. The same (family, size, seed, index)
/// always yields the same image.
imaging::GrayImage render(Family family, std::size_t size, std::uint64_t seed, std::size_t index);

struct Options {
    std::vector<Family> families = {Family::Brick, Family::Metal, Family::Rural};
    std::size_t count_per_class = 80;
    std::size_t size = 48;
    std::uint64_t seed = 1;
    std::size_t min_size = 8;  // smallest size accepted, normally the block size
};

/// Writes <family>_<index>.pgm images and manifest.csv into out_dir.
std::vector<ManifestEntry> generate(const std::filesystem::path& out_dir, const Options& options);

}  // namespace texclass::synth
