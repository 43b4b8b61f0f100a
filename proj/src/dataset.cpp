#include "texclass/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "texclass/error.hpp"
#include "texclass/imaging.hpp"
#include "texclass/text_io.hpp"

namespace texclass {

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

std::size_t index_of(const std::vector<std::string>& names, std::string_view name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error("unknown class label '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names.begin());
}

void check_label_text(std::string_view label) {
    if (label.empty() || label.find_first_of(",\" \t\r\n") != std::string_view::npos) {
        throw Error("class label '" + std::string(label) + "' must be non-empty without commas, quotes or spaces");
    }
}

}  // namespace

std::vector<double> Normalizer::apply(std::span<const double> x) const {
    if (x.size() != dims()) {
        throw Error("normalizer: vector has " + std::to_string(x.size()) + " dimensions, expected " +
                    std::to_string(dims()));
    }
    std::vector<double> out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double range = max[d] - min[d];
        out[d] = range > 0.0 ? std::clamp((x[d] - min[d]) / range, 0.0, 1.0) : 0.5;
    }
    return out;
}

void Dataset::validate() const {
    if (!source_ids.empty() && source_ids.size() != items.size()) {
        throw Error("dataset: source ids do not match item count");
    }
    for (const Sample& s : items) {
        if (s.features.size() != dims()) throw Error("dataset: feature vectors differ in length");
        if (s.label >= class_names.size()) throw Error("dataset: label index out of range");
    }
}

std::vector<std::vector<double>> Dataset::inputs() const {
    std::vector<std::vector<double>> out;
    out.reserve(items.size());
    for (const Sample& s : items) out.push_back(s.features);
    return out;
}

std::vector<std::size_t> Dataset::labels() const {
    std::vector<std::size_t> out;
    out.reserve(items.size());
    for (const Sample& s : items) out.push_back(s.label);
    return out;
}

Normalizer fit_normalizer(const Dataset& train) {
    if (train.empty()) throw Error("fit_normalizer: empty training set");
    train.validate();
    Normalizer n{train.items.front().features, train.items.front().features};
    for (const Sample& s : train.items) {
        for (std::size_t d = 0; d < s.features.size(); ++d) {
            n.min[d] = std::min(n.min[d], s.features[d]);
            n.max[d] = std::max(n.max[d], s.features[d]);
        }
    }
    return n;
}

std::vector<double> normalize(const Normalizer& norm, std::span<const double> x) { return norm.apply(x); }

Dataset normalize(const Normalizer& norm, const Dataset& ds) {
    Dataset out = ds;
    for (Sample& s : out.items) s.features = norm.apply(s.features);
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("split: fraction must lie in (0,1)");
    ds.validate();
    std::vector<std::vector<std::size_t>> by_class(ds.class_names.size());
    for (std::size_t i = 0; i < ds.items.size(); ++i) by_class[ds.items[i].label].push_back(i);

    std::mt19937_64 gen(seed);
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        if (idx.empty()) continue;
        if (idx.size() < 2) {
            throw Error("split: class '" + ds.class_names[c] + "' has fewer than 2 items, cannot stratify");
        }
        std::shuffle(idx.begin(), idx.end(), gen);
        const auto n = static_cast<double>(idx.size());
        auto keep = static_cast<std::size_t>(std::llround(train_fraction * n));
        keep = std::clamp<std::size_t>(keep, 1, idx.size() - 1);
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
        test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end());
    }
    std::shuffle(train_idx.begin(), train_idx.end(), gen);
    std::sort(test_idx.begin(), test_idx.end());

    auto take = [&](const std::vector<std::size_t>& idx) {
        Dataset out{{}, ds.class_names, {}};
        for (std::size_t i : idx) {
            out.items.push_back(ds.items[i]);
            if (!ds.source_ids.empty()) out.source_ids.push_back(ds.source_ids[i]);
        }
        return out;
    };
    return {take(train_idx), take(test_idx)};
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    const auto lines = text::read_lines(path);
    if (lines.empty() || lines.front() != "filename,class") {
        throw ParseError(path.string() + ": manifest must start with header 'filename,class'");
    }
    std::vector<ManifestEntry> entries;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cols = text::split(lines[i], ',');
        if (cols.size() != 2 || cols[0].empty()) {
            throw ParseError(path.string() + ": line " + std::to_string(i + 1) + " is not 'filename,class'");
        }
        check_label_text(cols[1]);
        entries.push_back({std::string(cols[0]), std::string(cols[1])});
    }
    return entries;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
    std::string out = "filename,class\n";
    for (const auto& e : entries) out += e.filename + "," + e.label + "\n";
    text::write_file(path, out);
}

Dataset extract_dataset(const std::filesystem::path& manifest, std::size_t block_size,
                        const dct::CoefficientMask& mask) {
    const auto entries = read_manifest(manifest);
    if (entries.empty()) throw Error(manifest.string() + ": manifest lists no images");
    std::vector<std::string> names;
    for (const auto& e : entries) names.push_back(e.label);

    Dataset ds{{}, sorted_unique(names), {}};
    const auto base = manifest.parent_path();
    for (const auto& e : entries) {
        const auto img = imaging::as_gray(imaging::read_image(base / e.filename));
        auto fv = dct::extract_image_features(img, block_size, mask);
        if (!ds.items.empty() && fv.values.size() != ds.dims()) {
            throw Error(e.filename + ": yields " + std::to_string(fv.values.size()) +
                        " features, earlier images yield " + std::to_string(ds.dims()));
        }
        ds.items.push_back({std::move(fv.values), index_of(ds.class_names, e.label)});
        ds.source_ids.push_back(e.filename);
    }
    return ds;
}

std::string feature_csv(const Dataset& ds, std::size_t features_per_block) {
    ds.validate();
    const std::size_t dims = ds.dims();
    std::string out = "label";
    for (std::size_t d = 0; d < dims; ++d) {
        out += ",b" + std::to_string(d / features_per_block) + "_c" + std::to_string(d % features_per_block);
    }
    out += '\n';
    for (const Sample& s : ds.items) {
        out += ds.class_names[s.label];
        for (double v : s.features) {
            out += ',';
            out += text::format_double(v);
        }
        out += '\n';
    }
    return out;
}

void write_features(const std::filesystem::path& path, const Dataset& ds) {
    text::write_file(path, feature_csv(ds));
}

Dataset read_features(const std::filesystem::path& path, const std::vector<std::string>& class_names) {
    const auto lines = text::read_lines(path);
    if (lines.empty()) throw ParseError(path.string() + ": empty feature file");
    const auto header = text::split(lines.front(), ',');
    if (header.empty() || header.front() != "label") {
        throw ParseError(path.string() + ": feature header must start with 'label'");
    }
    const std::size_t dims = header.size() - 1;
    if (dims == 0) throw ParseError(path.string() + ": feature header names no columns");

    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cols = text::split(lines[i], ',');
        const std::string where = path.string() + " line " + std::to_string(i + 1);
        if (cols.size() != header.size()) {
            throw ParseError(where + ": expected " + std::to_string(header.size()) + " columns, found " +
                             std::to_string(cols.size()));
        }
        check_label_text(cols[0]);
        std::vector<double> values(dims);
        for (std::size_t d = 0; d < dims; ++d) values[d] = text::parse_double(cols[d + 1], where);
        rows.emplace_back(std::string(cols[0]), std::move(values));
    }

    Dataset ds;
    if (class_names.empty()) {
        std::vector<std::string> names;
        for (const auto& r : rows) names.push_back(r.first);
        ds.class_names = sorted_unique(names);
    } else {
        ds.class_names = class_names;
    }
    for (auto& [label, values] : rows) {
        ds.items.push_back({std::move(values), index_of(ds.class_names, label)});
    }
    return ds;
}

}  // namespace texclass
