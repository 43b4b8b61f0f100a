#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "texclass/dct.hpp"
#include "texclass/error.hpp"

using namespace texclass;
using namespace texclass::dct;
using imaging::Block;

namespace {

Block constant_block(std::size_t n, double c) { return Block{n, std::vector<double>(n * n, c)}; }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("forward DCT hand cases") {
    const auto zero = forward_dct(constant_block(8, 0.0));
    for (double c : zero.coeffs) CHECK(c == 0.0);

    const auto flat = forward_dct(constant_block(8, 128.0));
    CHECK(flat.at(0, 0) == doctest::Approx(1024.0).epsilon(1e-14));
    for (std::size_t k = 1; k < 64; ++k) CHECK(std::abs(flat.coeffs[k]) < 1e-9);

    const auto corner = forward_dct(Block{2, {1, 0, 0, 0}});
    for (double c : corner.coeffs) CHECK(c == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("inverse DCT hand cases") {
    const auto zero = inverse_dct(CoefficientBlock{8, std::vector<double>(64, 0.0)});
    for (double v : zero.values) CHECK(v == 0.0);

    CoefficientBlock dc{8, std::vector<double>(64, 0.0)};
    dc.coeffs[0] = 1024.0;
    for (double v : inverse_dct(dc).values) CHECK(v == doctest::Approx(128.0).epsilon(1e-14));

    const auto corner = inverse_dct(CoefficientBlock{2, {0.5, 0.5, 0.5, 0.5}});
    CHECK(corner.values[0] == doctest::Approx(1.0));
    for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(corner.values[k]) < 1e-15);
}

TEST_CASE("separable transform matches direct summation, round-trips and keeps energy") {
    std::mt19937_64 gen(11);
    for (std::size_t n : {2u, 3u, 4u, 8u, 16u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Block b{n, oracle::random_block(gen, n)};
            const auto c = forward_dct(b);
            CHECK(max_abs_diff(c.coeffs, oracle::direct_dct(b.values, n)) < 1e-9);
            CHECK(max_abs_diff(inverse_dct(c).values, b.values) < 1e-9);

            double ef = 0.0, ec = 0.0, mean = 0.0;
            for (double v : b.values) ef += v * v, mean += v;
            for (double v : c.coeffs) ec += v * v;
            mean /= static_cast<double>(n * n);
            CHECK(std::abs(ef - ec) <= 1e-6 * ef);
            CHECK(std::abs(c.at(0, 0) - static_cast<double>(n) * mean) < 1e-9);
        }
    }
}

TEST_CASE("default mask is the zigzag low-frequency set") {
    const auto mask = CoefficientMask::zigzag();
    using P = CoefficientMask::Position;
    const std::array<P, 9> expected{{{0, 0}, {0, 1}, {1, 0}, {2, 0}, {1, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 1}}};
    CHECK(mask.positions() == expected);
    CHECK(CoefficientMask::parse(mask.to_string()).positions() == expected);
    CHECK(CoefficientMask::parse("zigzag").positions() == expected);
}

TEST_CASE("mask validation") {
    CHECK_THROWS_AS(CoefficientMask::parse("0,1;0,0;1,0;2,0;1,1;0,2;0,3;1,2;2,1"), Error);  // DC not first
    CHECK_THROWS_AS(CoefficientMask::parse("0,0;0,0;1,0;2,0;1,1;0,2;0,3;1,2;2,1"), Error);  // duplicate
    CHECK_THROWS_AS(CoefficientMask::parse("0,0;0,1"), ParseError);
    CHECK_THROWS_AS(CoefficientMask::parse("0,0;0,1;1,0;2,0;1,1;0,2;0,3;1,2;2,x"), ParseError);
    CHECK_THROWS_AS(CoefficientMask::zigzag().check_fits(3), Error);
    CHECK_NOTHROW(CoefficientMask::zigzag().check_fits(4));
}

TEST_CASE("block features read the mask positions in order") {
    const auto flat = extract_block_features(forward_dct(constant_block(8, 5.0)), CoefficientMask::zigzag());
    CHECK(flat[0] == doctest::Approx(40.0));
    for (std::size_t k = 1; k < 9; ++k) CHECK(std::abs(flat[k]) < 1e-12);

    for (double v : extract_block_features(forward_dct(constant_block(8, 0.0)), CoefficientMask::zigzag())) {
        CHECK(v == 0.0);
    }

    std::mt19937_64 gen(5);
    const auto c = forward_dct(Block{8, oracle::random_block(gen, 8)});
    const auto f = extract_block_features(c, CoefficientMask::zigzag());
    CHECK(f[0] == c.at(0, 0));
    CHECK(f[6] == c.at(0, 3));
    CHECK(f[8] == c.at(2, 1));
}

TEST_CASE("image features concatenate blocks in order") {
    imaging::GrayImage img48{48, 48, 255, std::vector<std::uint16_t>(48 * 48, 10)};
    const auto fv = extract_image_features(img48, 8);
    CHECK(fv.values.size() == 324);
    CHECK(fv.block_count == 36);
    CHECK(fv.block_size == 8);

    imaging::GrayImage img8{8, 8, 255, std::vector<std::uint16_t>(64, 3)};
    CHECK(extract_image_features(img8, 8).values.size() == 9);

    imaging::GrayImage flat{16, 16, 255, std::vector<std::uint16_t>(256, 200)};
    const auto ff = extract_image_features(flat, 8);
    REQUIRE(ff.values.size() == 36);
    for (std::size_t b = 0; b < 4; ++b) {
        CHECK(ff.values[9 * b] == doctest::Approx(1600.0));
        for (std::size_t k = 1; k < 9; ++k) CHECK(std::abs(ff.values[9 * b + k]) < 1e-9);
    }
    CHECK_THROWS_AS(extract_image_features(img8, 16), Error);
}
