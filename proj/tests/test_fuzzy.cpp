#include <cmath>
#include <random>

#include "doctest.h"
#include "texclass/error.hpp"
#include "texclass/fuzzy.hpp"

using namespace texclass;
using namespace texclass::fuzzy;

namespace {

void check_degrees(const std::vector<double>& got, const std::vector<double>& want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-15));
}

}  // namespace

TEST_CASE("membership centers are evenly spaced") {
    const MembershipPartition p(4);
    check_degrees(p.centers(), {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
    CHECK_THROWS_AS(MembershipPartition(1), Error);
}

TEST_CASE("scalar fuzzification hand cases") {
    const MembershipPartition p(4);
    check_degrees(fuzzify_scalar(0.0, p), {1, 0, 0, 0});
    check_degrees(fuzzify_scalar(1.0, p), {0, 0, 0, 1});
    check_degrees(fuzzify_scalar(0.5, p), {0, 0.5, 0.5, 0});
    check_degrees(fuzzify_scalar(1.0 / 3.0, p), {0, 1, 0, 0});
    check_degrees(fuzzify_scalar(0.25, p), {0.25, 0.75, 0, 0});
}

TEST_CASE("out-of-range inputs are clamped and counted") {
    const MembershipPartition p(3);
    std::size_t clamped = 0;
    check_degrees(fuzzify_scalar(-0.2, p, &clamped), {1, 0, 0});
    check_degrees(fuzzify_scalar(1.7, p, &clamped), {0, 0, 1});
    check_degrees(fuzzify_scalar(0.5, p, &clamped), {0, 1, 0});
    CHECK(clamped == 2);
}

TEST_CASE("vector fuzzification concatenates segments") {
    const MembershipPartition p(4);
    const std::vector<double> x{0.0, 1.0};
    const FuzzyVector f = fuzzify_vector(x, p);
    CHECK(f.dims == 2);
    CHECK(f.m == 4);
    check_degrees(f.degrees, {1, 0, 0, 0, 0, 0, 0, 1});

    const std::vector<double> one{0.37};
    CHECK(fuzzify_vector(one, p).degrees == fuzzify_scalar(0.37, p));

    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> r(30);
    for (double& v : r) v = u(gen);
    const FuzzyVector fr = fuzzify_vector(r, p);
    for (std::size_t d = 0; d < r.size(); ++d) {
        double s = 0.0;
        for (double v : fr.segment(d)) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("partition of unity and two-neighbour support") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t m = 2; m <= 7; ++m) {
        const MembershipPartition p(m);
        std::vector<double> out(m);
        double worst = 0.0;
        bool support_ok = true;
        for (int i = 0; i < 100000; ++i) {
            const double x = u(gen);
            fuzzify_scalar(x, p, out);
            double s = 0.0;
            std::size_t nonzero = 0, first = m;
            for (std::size_t k = 0; k < m; ++k) {
                s += out[k];
                if (out[k] != 0.0) {
                    ++nonzero;
                    if (first == m) first = k;
                }
            }
            worst = std::max(worst, std::abs(s - 1.0));
            bool at_center = false;
            for (double c : p.centers()) at_center = at_center || x == c;
            if (!at_center) {
                // exactly the two MFs whose centers bracket x
                const std::size_t k = std::min(static_cast<std::size_t>(x * static_cast<double>(m - 1)), m - 2);
                support_ok = support_ok && nonzero == 2 && first == k;
            }
        }
        CHECK(worst < 1e-12);
        CHECK(support_ok);
    }
}

TEST_CASE("fuzzy distance hand cases") {
    const std::vector<double> a{1, 0}, b{0, 1};
    CHECK(fuzzy_distance(a, b) == 1.0);
    const std::vector<double> c{0.5, 0.5}, d{0.25, 0.75};
    CHECK(fuzzy_distance(c, d) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(fuzzy_distance(c, c) == 0.0);
}

TEST_CASE("fuzzy distance errors") {
    const std::vector<double> z{0, 0}, z3{0, 0, 0}, a{1, 0};
    CHECK_THROWS_AS(fuzzy_distance(z, z), Error);
    CHECK_THROWS_AS(fuzzy_distance(a, z3), Error);
    const MembershipPartition p(3);
    const std::vector<double> x1{0.2}, x2{0.2, 0.4};
    CHECK_THROWS_AS(fuzzy_distance(fuzzify_vector(x1, p), fuzzify_vector(x2, p)), Error);
}

TEST_CASE("fuzzy distance is symmetric, zero on identity and bounded") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t m = 2; m <= 6; ++m) {
        const MembershipPartition p(m);
        for (int trial = 0; trial < 2000; ++trial) {
            std::vector<double> x(5), y(5);
            for (double& v : x) v = u(gen);
            for (double& v : y) v = u(gen);
            const FuzzyVector a = fuzzify_vector(x, p), b = fuzzify_vector(y, p);
            const double dab = fuzzy_distance(a, b);
            REQUIRE(dab == fuzzy_distance(b, a));
            REQUIRE(dab >= 0.0);
            REQUIRE(dab <= 1.0);
            REQUIRE(fuzzy_distance(a, a) == 0.0);
        }
    }
}

TEST_CASE("class defuzzification") {
    const MembershipPartition p(4);
    const std::vector<double> crisp{0.2, 0.7, 0.1};
    CHECK(defuzzify_class(crisp, 3, p).index == 1);
    const std::vector<double> tie{0.4, 0.4, 0.4};
    CHECK(defuzzify_class(tie, 3, p).index == 0);

    // one-hot target for class 2 of 3, fuzzified: segments [1,0,0,0] except the hot one [0,0,0,1]
    std::vector<double> onehot(12, 0.0);
    for (std::size_t c = 0; c < 3; ++c) onehot[c * 4 + (c == 2 ? 3 : 0)] = 1.0;
    const ClassDecision dec = defuzzify_class(onehot, 3, p);
    CHECK(dec.index == 2);
    check_degrees(dec.scores, {0, 0, 1});

    const std::vector<double> zeros(3, 0.0);
    CHECK_THROWS_AS(defuzzify_class(zeros, 3, p), Error);
    CHECK_THROWS_AS(defuzzify_class(crisp, 1, p), Error);
    const std::vector<double> bad(5, 0.1);
    CHECK_THROWS_AS(defuzzify_class(bad, 3, p), Error);
}
