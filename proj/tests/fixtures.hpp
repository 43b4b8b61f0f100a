#pragma once

#include <cstddef>
#include <cstdint>

#include "texclass/dataset.hpp"
#include "texclass/dct.hpp"
#include "texclass/synth.hpp"

namespace fixture {

// Normalised three-class texture features rendered in memory, interleaved by class.
inline texclass::Dataset textures(std::size_t per_class, std::uint64_t seed = 1, std::size_t size = 48) {
    using namespace texclass;
    const synth::Family fams[] = {synth::Family::Brick, synth::Family::Metal, synth::Family::Rural};
    Dataset ds;
    ds.class_names = {"brick", "metal", "rural"};
    for (std::size_t i = 0; i < per_class; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            const auto img = synth::render(fams[c], size, seed, i);
            ds.items.push_back({dct::extract_image_features(img, 8).values, c});
        }
    }
    return normalize(fit_normalizer(ds), ds);
}

}  // namespace fixture
