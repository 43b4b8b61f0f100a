#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "texclass/dct.hpp"
#include "texclass/normalizer.hpp"

namespace texclass {

struct Sample {
    std::vector<double> features;
    std::size_t label = 0;
};

struct Dataset {
    std::vector<Sample> items;
    std::vector<std::string> class_names;
    std::vector<std::string> source_ids;  // parallel to items; may be empty

    std::size_t size() const { return items.size(); }
    bool empty() const { return items.empty(); }
    std::size_t dims() const { return items.empty() ? 0 : items.front().features.size(); }

    /// Throws unless every item has the same length and a known label.
    void validate() const;
    std::vector<std::vector<double>> inputs() const;
    std::vector<std::size_t> labels() const;
};

Normalizer fit_normalizer(const Dataset& train);
std::vector<double> normalize(const Normalizer& norm, std::span<const double> x);
/// Copy of ds with every item normalised.
Dataset normalize(const Normalizer& norm, const Dataset& ds);

/// Stratified, seeded split. Each class keeps round(fraction * n_c) items
/// for training (at least one on each side); the training part is shuffled.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// Label manifest: "filename,class" rows with a header.
struct ManifestEntry {
    std::string filename;
    std::string label;
};
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

/// Extracts features for every manifest image (paths relative to the manifest).
/// Class names are sorted.
Dataset extract_dataset(const std::filesystem::path& manifest, std::size_t block_size,
                        const dct::CoefficientMask& mask);

// Feature CSV: header "label,b0_c0,...", then one row per image.
std::string feature_csv(const Dataset& ds, std::size_t features_per_block = dct::kFeaturesPerBlock);
void write_features(const std::filesystem::path& path, const Dataset& ds);
/// class_names fixes the label order when given (unknown labels throw);
/// otherwise the distinct labels are sorted.
Dataset read_features(const std::filesystem::path& path, const std::vector<std::string>& class_names = {});

}  // namespace texclass
