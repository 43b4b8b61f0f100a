#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "texclass/efunn.hpp"
#include "texclass/error.hpp"

using namespace texclass;
using namespace texclass::efunn;

namespace {

const std::vector<std::string> kTwo{"a", "b"};

Config loose() {
    Config c;
    c.sthr = 0.9;
    c.errthr = 0.1;
    return c;
}

fuzzy::FuzzyVector fv(std::vector<double> d, std::size_t dims, std::size_t m) { return {std::move(d), dims, m}; }

}  // namespace

TEST_CASE("activation hand cases") {
    Config c;
    c.mfs = 2;
    c.tc = 0.5;
    // One input; the node sits at MF0. Inputs built directly in fuzzy space.
    Model m = Model::restore(c, 1, kTwo, {},
                             {RuleNode{fv({1, 0}, 1, 2), fv({0, 1, 1, 0}, 2, 2), 1, 1.0, 1},
                              RuleNode{fv({0.35, 0.65}, 1, 2), fv({1, 0, 0, 1}, 2, 2), 1, 1.0, 1}},
                             {0.0, 0.4, 0.0, 0.0}, std::nullopt, 0.0);
    const auto at_node = m.activate(fv({1, 0}, 1, 2), std::nullopt);
    CHECK(at_node[0] == 1.0);
    const auto far = m.activate(fv({0, 1}, 1, 2), std::nullopt);
    CHECK(far[0] == 0.0);
    // D([0.65,0.35],[0.35,0.65]) = 0.6 / 2 = 0.3; W3(0,1) = 0.4.
    const auto linked = m.activate(fv({0.65, 0.35}, 1, 2), 0);
    CHECK(linked[1] == doctest::Approx(0.9).epsilon(1e-12));
    const auto unlinked = m.activate(fv({0.65, 0.35}, 1, 2), std::nullopt);
    CHECK(unlinked[1] == doctest::Approx(0.7).epsilon(1e-12));

    c.activation = Activation::Radbas;
    m.set_config(c);
    const auto rb = m.activate(fv({0.65, 0.35}, 1, 2), 0);
    CHECK(rb[1] == doctest::Approx(std::exp(-0.1 * 0.1)).epsilon(1e-12));
    CHECK(m.activate(fv({1, 0}, 1, 2), std::nullopt)[0] == 1.0);

    Model empty(Config{}, 1, kTwo);
    CHECK_THROWS_AS(empty.activate(fv({1, 0, 0, 0}, 1, 4), std::nullopt), Error);
}

TEST_CASE("first example becomes the first node") {
    Model m(Config{}, 2, kTwo);
    const std::vector<double> x{0.25, 0.5};
    const LearnEvent ev = m.learn(x, 1);
    CHECK(ev.kind == LearnKind::NodeCreated);
    REQUIRE(m.size() == 1);
    CHECK(m.nodes()[0].w1 == fuzzy::fuzzify_vector(x, m.partition()));
    const std::vector<double> hot{0, 1};
    CHECK(m.nodes()[0].w2 == fuzzy::fuzzify_vector(hot, m.partition()));
}

TEST_CASE("repeat presentations are absorbed") {
    Model m(loose(), 2, kTwo);
    const std::vector<double> x{0.1, 0.7};
    m.learn(x, 0);
    const LearnEvent ev = m.learn(x, 0);
    CHECK(ev.kind == LearnKind::NodeUpdated);
    CHECK(*ev.output_distance == 0.0);
    CHECK(m.size() == 1);

    Model many(loose(), 2, kTwo);
    std::vector<std::vector<double>> xs(25, x);
    std::vector<std::size_t> ys(25, 1);
    train_one_pass(many, xs, ys);
    CHECK(many.size() == 1);
    CHECK(many.nodes()[0].age == 25);
    CHECK(many.nodes()[0].wins == 25);
}

TEST_CASE("disjoint examples create separate nodes") {
    Model m(loose(), 1, kTwo);
    m.learn(std::vector<double>{0.0}, 0);
    const LearnEvent ev = m.learn(std::vector<double>{1.0}, 0);
    CHECK(ev.kind == LearnKind::NodeCreated);
    CHECK(ev.max_activation == 0.0);
    CHECK(m.size() == 2);

    // Ten values on distinct MF centers of a 10-MF partition stay apart.
    Config c;
    c.mfs = 10;
    Model spread(c, 1, kTwo);
    std::vector<std::vector<double>> xs;
    std::vector<std::size_t> ys;
    for (std::size_t k = 0; k < 10; ++k) {
        xs.push_back({static_cast<double>(k) / 9.0});
        ys.push_back(k % 2);
    }
    train_one_pass(spread, xs, ys);
    CHECK(spread.size() == 10);
}

TEST_CASE("output-center update arithmetic") {
    std::vector<double> w2{0.2};
    const std::vector<double> err{0.4};
    update_output_center(w2, err, 0.5, 0.5);
    CHECK(w2[0] == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("input-center update never moves away from the example") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const fuzzy::MembershipPartition p(4);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> a(6), b(6);
        for (double& v : a) v = u(gen);
        for (double& v : b) v = u(gen);
        auto w1 = fuzzy::fuzzify_vector(a, p);
        const auto ex = fuzzy::fuzzify_vector(b, p);
        const double before = fuzzy::fuzzy_distance(w1, ex);
        const double lr1 = 1.0 - u(gen);  // (0, 1]
        update_input_center(w1.degrees, ex.degrees, lr1);
        REQUIRE(fuzzy::fuzzy_distance(w1, ex) <= before + 1e-15);
    }
}

TEST_CASE("capacity is enforced") {
    Config c = loose();
    c.max_nodes = 1;
    Model m(c, 1, kTwo);
    m.learn(std::vector<double>{0.0}, 0);
    try {
        m.learn(std::vector<double>{1.0}, 1);
        FAIL("expected capacity error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("max_nodes=1") != std::string::npos);
    }
}

TEST_CASE("config validation") {
    Config c;
    c.sthr = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = Config{};
    c.errthr = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = Config{};
    c.m_best = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = Config{};
    c.thr1 = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK_THROWS_AS(parse_activation("relu"), Error);
    CHECK(parse_activation(to_string(Activation::Radbas)) == Activation::Radbas);
}

TEST_CASE("inference on small models") {
    Model one(Config{}, 2, kTwo);
    one.learn(std::vector<double>{0.3, 0.6}, 1);
    CHECK(one.infer(std::vector<double>{0.3, 0.6}).label == 1);
    CHECK(one.infer(std::vector<double>{0.0, 0.0}).label == 1);
    CHECK(one.infer(std::vector<double>{1.0, 1.0}).label == 1);

    // Node 0 (at 0.25) says b, node 1 (at 0.75) says a; the query 0.5 is exactly D = 0.5 from both.
    for (auto [m_best, sthr] : {std::pair<std::size_t, double>{3, 0.99}, {1, 0.4}}) {
        Config c;
        c.mfs = 3;
        c.m_best = m_best;
        c.sthr = sthr;
        const Model two = Model::restore(c, 1, kTwo, {},
                                         {RuleNode{fv({0.5, 0.5, 0}, 1, 3), fv({1, 0, 0, 0, 0, 1}, 2, 3), 1, 1.0, 1},
                                          RuleNode{fv({0, 0.5, 0.5}, 1, 3), fv({0, 0, 1, 1, 0, 0}, 2, 3), 1, 1.0, 1}},
                                         std::vector<double>(4, 0.0), std::nullopt, 0.0);
        const Inference inf = two.infer(std::vector<double>{0.5});
        CHECK(inf.winner == 0);
        CHECK(inf.label == 1);
    }

    Model empty(Config{}, 1, kTwo);
    CHECK_THROWS_AS(empty.infer(std::vector<double>{0.5}), Error);
}

TEST_CASE("one-pass recall, node bounds, determinism and lr3 = 0") {
    const Dataset ds = fixture::textures(12);
    const auto xs = ds.inputs();
    const auto ys = ds.labels();
    Model a(Config{}, ds.dims(), ds.class_names);
    train_one_pass(a, xs, ys);
    CHECK(a.size() >= 1);
    CHECK(a.size() <= ds.size());
    for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(a.infer(xs[i]).label == ys[i]);
    for (double w : a.w3_matrix()) REQUIRE(w == 0.0);

    Model b(Config{}, ds.dims(), ds.class_names);
    train_one_pass(b, xs, ys);
    CHECK(a == b);
}

TEST_CASE("node count is monotone in both thresholds") {
    const Dataset ds = fixture::textures(64);
    const auto xs = ds.inputs();
    const auto ys = ds.labels();
    auto count = [&](double sthr, double errthr) {
        Config c;
        c.sthr = sthr;
        c.errthr = errthr;
        Model m(c, ds.dims(), ds.class_names);
        train_one_pass(m, xs, ys);
        return m.size();
    };
    std::size_t prev = 0;
    for (double sthr : {0.5, 0.7, 0.9, 0.99}) {
        const std::size_t n = count(sthr, 0.001);
        CHECK(n >= prev);
        prev = n;
    }
    std::size_t prev_e = ds.size() + 1;
    for (double errthr : {0.001, 0.01, 0.05, 0.1, 0.2, 0.4, 0.8}) {
        const std::size_t n = count(0.7, errthr);
        CHECK(n <= prev_e);
        prev_e = n;
    }
}

TEST_CASE("temporal links accumulate when lr3 > 0") {
    Config c = loose();
    c.lr3 = 0.5;
    Model m(c, 1, kTwo);
    m.learn(std::vector<double>{0.0}, 0);
    m.learn(std::vector<double>{1.0}, 1);
    // prev winner 0 (activation 1) to new node 1 (activation 1).
    CHECK(m.w3(0, 1) == doctest::Approx(0.5));
    CHECK(m.w3(1, 0) == 0.0);
    m.learn(std::vector<double>{1.0}, 1);
    CHECK(m.w3(1, 1) == doctest::Approx(0.5));
    for (double w : m.w3_matrix()) CHECK(w >= 0.0);
}

TEST_CASE("pruning") {
    Config c;
    c.mfs = 2;
    auto node = [](std::vector<double> w1, std::size_t age, double act_sum) {
        return RuleNode{fv(std::move(w1), 1, 2), fv({1, 0, 0, 1}, 2, 2), age, act_sum, 0};
    };
    const std::vector<RuleNode> nodes{node({1, 0}, 100, 1.0), node({0, 1}, 1, 0.0), node({0.5, 0.5}, 100, 80.0)};
    std::vector<double> w3(9);
    for (std::size_t i = 0; i < 9; ++i) w3[i] = static_cast<double>(i);
    const Model base = Model::restore(c, 1, kTwo, {}, nodes, w3, 2, 0.7);

    Model untouched = base;
    const PruneReport none = untouched.prune(0.0);
    CHECK(none.removed == 0);
    CHECK(untouched == base);

    Model full = base;
    const PruneReport r = full.prune(1.0);
    CHECK(r.removed == 1);
    CHECK(r.remaining == 2);
    CHECK_FALSE(r.emptied);
    CHECK(full.nodes()[0].w1.degrees == std::vector<double>{0, 1});
    // W3 rows/cols of node 0 removed: remaining entries from rows/cols 1..2.
    CHECK(full.w3_matrix() == std::vector<double>{4, 5, 7, 8});
    CHECK(full.last_winner() == 1);

    // score for node 0 = (50/100) * (0.04/0.05) = 0.4
    Model mid = base;
    CHECK(mid.prune(0.59).removed == 0);
    CHECK(mid.prune(0.61).removed == 1);

    Model loner = Model::restore(c, 1, kTwo, {}, {node({1, 0}, 100, 0.0)}, {0.0}, std::nullopt, 0.0);
    const PruneReport gone = loner.prune(1.0);
    CHECK(gone.emptied);
    CHECK(loner.size() == 0);
    CHECK_THROWS_AS(loner.prune(1.5), Error);
}

TEST_CASE("aggregation") {
    Config c;
    c.mfs = 2;
    c.thr1 = 0.25;
    c.thr2 = 0.0;
    auto node = [](std::vector<double> w1, std::size_t age) {
        return RuleNode{fv(std::move(w1), 1, 2), fv({1, 0, 0, 1}, 2, 2), age, 0.5 * static_cast<double>(age), 1};
    };
    Model m = Model::restore(c, 1, kTwo, {}, {node({0.2, 0.8}, 4), node({0.4, 0.6}, 6)}, {0, 1, 2, 3}, 1, 0.5);
    CHECK(m.aggregate() == 1);
    REQUIRE(m.size() == 1);
    // 0.3 itself is not reachable: the exact mean of the two doubles is a rounding tie.
    CHECK(std::abs(m.nodes()[0].w1.degrees[0] - 0.3) <= std::nextafter(0.3, 1.0) - 0.3);
    CHECK(m.nodes()[0].w1.degrees[1] == 0.7);
    CHECK(m.nodes()[0].w2.degrees == std::vector<double>{1, 0, 0, 1});
    CHECK(m.nodes()[0].age == 10);
    CHECK(m.nodes()[0].activation_sum == doctest::Approx(5.0));
    CHECK(m.nodes()[0].wins == 2);
    CHECK(m.w3_matrix() == std::vector<double>{6});
    CHECK(m.last_winner() == 0);

    c.thr1 = 0.0;
    Model strict = Model::restore(c, 1, kTwo, {},
                                  {node({0.2, 0.8}, 1), node({0.4, 0.6}, 1), node({0.2, 0.8}, 1)},
                                  std::vector<double>(9, 0.0), std::nullopt, 0.0);
    CHECK(strict.aggregate() == 1);
    CHECK(strict.size() == 2);
    CHECK(strict.nodes()[0].w1.degrees == std::vector<double>{0.2, 0.8});

    const Dataset ds = fixture::textures(6);
    Config d;
    d.thr1 = 0.3;
    d.thr2 = 0.3;
    Model trained(d, ds.dims(), ds.class_names);
    const auto xs = ds.inputs();
    const auto ys = ds.labels();
    train_one_pass(trained, xs, ys);
    const std::size_t before = trained.size();
    trained.aggregate();
    CHECK(trained.size() <= before);
    CHECK(trained.size() >= 1);
}

TEST_CASE("rule extraction and formatting") {
    Config c;
    const std::vector<std::string> names{"brick", "metal"};
    Model m(c, 2, names);
    m.insert_rule(Rule{{{0, 2, 1.0}, {1, 0, 1.0}}, 1});
    const auto rules = m.extract_rules();
    REQUIRE(rules.size() == 1);
    CHECK(rules[0] == Rule{{{0, 2, 1.0}, {1, 0, 1.0}}, 1});
    const std::string text = m.format_rule(rules[0]);
    CHECK(text == "if x0 is MF2 (1.00) and x1 is MF0 (1.00) then class metal");
    CHECK(m.parse_rule(text) == rules[0]);

    Model one(c, 1, names);
    one.insert_rule(Rule{{{0, 2, 1.0}}, 0});
    CHECK(one.format_rule(one.extract_rules()[0]) == "if x0 is MF2 (1.00) then class brick");

    // A partial degree shows up as the antecedent's confidence.
    Model learnt(c, 1, names);
    learnt.learn(std::vector<double>{0.4}, 0);
    const Rule r = learnt.extract_rules()[0];
    CHECK(r.antecedents[0].mf == 1);
    CHECK(r.antecedents[0].degree == doctest::Approx(0.8));
    CHECK(learnt.format_rule(r) == "if x0 is MF1 (0.80) then class brick");
}

TEST_CASE("rule insertion") {
    Config c;
    Model m(c, 2, kTwo);
    m.insert_rule(Rule{{{0, 3, 1.0}, {1, 1, 1.0}}, 0});
    CHECK(m.size() == 1);
    CHECK(m.w3_matrix().size() == 1);
    m.insert_rule(Rule{{{0, 0, 1.0}, {1, 2, 1.0}}, 1});
    CHECK(m.w3_matrix().size() == 4);
    // prototypes at the MF centers
    const Inference first = m.infer(std::vector<double>{1.0, 1.0 / 3.0});
    CHECK(first.winner == 0);
    CHECK(first.label == 0);
    const Inference second = m.infer(std::vector<double>{0.0, 2.0 / 3.0});
    CHECK(second.winner == 1);
    CHECK(second.label == 1);

    CHECK_THROWS_AS(m.insert_rule(Rule{{{0, 4, 1.0}, {1, 1, 1.0}}, 0}), Error);
    CHECK_THROWS_AS(m.insert_rule(Rule{{{0, 1, 1.0}, {1, 1, 1.0}}, 2}), Error);
    CHECK_THROWS_AS(m.insert_rule(Rule{{{0, 1, 1.0}}, 0}), Error);
    CHECK_THROWS_AS(m.parse_rule("if x0 is MF9 then class a"), Error);
    CHECK_THROWS_AS(m.parse_rule("if x0 is MF1 and x1 is MF0 then class c"), Error);
    CHECK_THROWS_AS(m.parse_rule("x0 is MF1 then class a"), ParseError);

    Config z;
    z.thr1 = 0.0;
    z.thr2 = 0.0;
    Model dup(z, 2, kTwo);
    const Rule r{{{0, 1, 1.0}, {1, 2, 1.0}}, 1};
    dup.insert_rule(r);
    dup.insert_rule(r);
    CHECK(dup.size() == 2);
    CHECK(dup.aggregate() == 1);
    CHECK(dup.size() == 1);
    CHECK(dup.extract_rules()[0] == r);
}
