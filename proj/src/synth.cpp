#include "texclass/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "texclass/error.hpp"

namespace texclass::synth {

namespace {

// Distribution helpers over mt19937_64 with fixed arithmetic, so images are
// byte-identical across standard library implementations.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t family, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(family), static_cast<std::uint32_t>(index)};
        gen_.seed(seq);
    }

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }

    double normal(double mean, double sd) {
        // Box-Muller; u1 kept away from zero.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

std::uint16_t to_level(double v) { return static_cast<std::uint16_t>(std::clamp(std::round(v), 0.0, 255.0)); }

// Rows of bricks separated by dark mortar, alternate courses shifted by half a brick.
imaging::GrayImage brick(std::size_t size, Rng& rng) {
    const int course = rng.integer(7, 11);
    const int length = 2 * course + rng.integer(-2, 3);
    const int mortar = rng.integer(1, 2);
    const int ox = rng.integer(0, length - 1);
    const int oy = rng.integer(0, course - 1);
    const double brick_level = rng.uniform(150.0, 180.0);
    const double mortar_level = rng.uniform(60.0, 85.0);

    const std::size_t rows = size / static_cast<std::size_t>(course) + 3;
    const std::size_t cols = size / static_cast<std::size_t>(length) + 3;
    std::vector<double> tint(rows * cols);
    for (double& t : tint) t = rng.normal(0.0, 12.0);

    imaging::GrayImage img{size, size, 255, std::vector<std::uint16_t>(size * size)};
    for (std::size_t y = 0; y < size; ++y) {
        const int yy = static_cast<int>(y) + oy;
        const int row = yy / course;
        const bool in_bed = yy % course < mortar;
        const int shift = (row % 2) * (length / 2);
        for (std::size_t x = 0; x < size; ++x) {
            const int xx = static_cast<int>(x) + ox + shift;
            const int col = xx / length;
            const bool in_head = xx % length < mortar;
            double v;
            if (in_bed || in_head) {
                v = rng.normal(mortar_level, 6.0);
            } else {
                v = brick_level + tint[static_cast<std::size_t>(row) * cols + static_cast<std::size_t>(col) % cols] +
                    rng.normal(0.0, 7.0);
            }
            img.data[y * size + x] = to_level(v);
        }
    }
    return img;
}

// Directional sinusoidal banding with thin specular streaks along the bands.
imaging::GrayImage metal(std::size_t size, Rng& rng) {
    const double theta = rng.uniform(-0.3, 0.3);
    const double period = rng.uniform(5.0, 11.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double amplitude = rng.uniform(45.0, 70.0);
    const double base = rng.uniform(110.0, 135.0);
    const double c = std::cos(theta), s = std::sin(theta);

    const int streaks = rng.integer(2, 5);
    std::vector<double> streak_offset(static_cast<std::size_t>(streaks));
    for (double& o : streak_offset) o = rng.uniform(-static_cast<double>(size), static_cast<double>(size));

    imaging::GrayImage img{size, size, 255, std::vector<std::uint16_t>(size * size)};
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            const double along = static_cast<double>(x) * c + static_cast<double>(y) * s;
            const double across = -static_cast<double>(x) * s + static_cast<double>(y) * c;
            double v = base + amplitude * std::sin(2.0 * std::numbers::pi * along / period + phase);
            for (double o : streak_offset) {
                const double d = std::abs(along - o);
                if (d < 1.0) v += 40.0 * (1.0 - d) * (0.5 + 0.5 * std::sin(across * 0.3));
            }
            img.data[y * size + x] = to_level(v + rng.normal(0.0, 5.0));
        }
    }
    return img;
}

// Smoothed low-frequency value noise.
imaging::GrayImage rural(std::size_t size, Rng& rng) {
    const double spacing = rng.uniform(12.0, 22.0);
    const double mean = rng.uniform(70.0, 100.0);
    const std::size_t cells = static_cast<std::size_t>(static_cast<double>(size) / spacing) + 3;
    std::vector<double> lattice(cells * cells);
    for (double& v : lattice) v = rng.normal(mean, 22.0);
    const double ox = rng.uniform(0.0, 1.0), oy = rng.uniform(0.0, 1.0);

    auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
    imaging::GrayImage img{size, size, 255, std::vector<std::uint16_t>(size * size)};
    for (std::size_t y = 0; y < size; ++y) {
        const double gy = static_cast<double>(y) / spacing + oy;
        const auto iy = static_cast<std::size_t>(gy);
        const double ty = smooth(gy - static_cast<double>(iy));
        for (std::size_t x = 0; x < size; ++x) {
            const double gx = static_cast<double>(x) / spacing + ox;
            const auto ix = static_cast<std::size_t>(gx);
            const double tx = smooth(gx - static_cast<double>(ix));
            const double v00 = lattice[iy * cells + ix], v01 = lattice[iy * cells + ix + 1];
            const double v10 = lattice[(iy + 1) * cells + ix], v11 = lattice[(iy + 1) * cells + ix + 1];
            const double top = v00 + (v01 - v00) * tx;
            const double bottom = v10 + (v11 - v10) * tx;
            img.data[y * size + x] = to_level(top + (bottom - top) * ty + rng.normal(0.0, 3.0));
        }
    }
    return img;
}

}  // namespace

Family parse_family(std::string_view name) {
    if (name == "brick") return Family::Brick;
    if (name == "metal") return Family::Metal;
    if (name == "rural") return Family::Rural;
    throw Error("unknown texture family '" + std::string(name) + "' (expected brick, metal or rural)");
}

std::string_view to_string(Family f) {
    switch (f) {
        case Family::Brick: return "brick";
        case Family::Metal: return "metal";
        case Family::Rural: return "rural";
    }
    return "unknown";
}

imaging::GrayImage render(Family family, std::size_t size, std::uint64_t seed, std::size_t index) {
    if (size == 0) throw Error("synth: image size must be positive");
    Rng rng(seed, static_cast<std::uint64_t>(family), index);
    switch (family) {
        case Family::Brick: return brick(size, rng);
        case Family::Metal: return metal(size, rng);
        case Family::Rural: return rural(size, rng);
    }
    throw Error("synth: unknown family");
}

std::vector<ManifestEntry> generate(const std::filesystem::path& out_dir, const Options& options) {
    if (options.size < options.min_size) {
        throw Error("synth: image size " + std::to_string(options.size) + " is below the block size " +
                    std::to_string(options.min_size));
    }
    if (options.families.empty() || options.count_per_class == 0) throw Error("synth: nothing to generate");
    std::filesystem::create_directories(out_dir);
    std::vector<ManifestEntry> manifest;
    for (Family f : options.families) {
        for (std::size_t i = 0; i < options.count_per_class; ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "%s_%03zu.pgm", std::string(to_string(f)).c_str(), i);
            imaging::write_image(out_dir / name, render(f, options.size, options.seed, i));
            manifest.push_back({name, std::string(to_string(f))});
        }
    }
    write_manifest(out_dir / "manifest.csv", manifest);
    return manifest;
}

}  // namespace texclass::synth
