#include "texclass/efunn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "texclass/error.hpp"

namespace texclass::efunn {

namespace {

double satlin(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<double> one_hot(std::size_t label, std::size_t classes) {
    std::vector<double> v(classes, 0.0);
    v[label] = 1.0;
    return v;
}

std::size_t argmax(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error("efunn config: " + what);
}

}  // namespace

std::string_view to_string(Activation a) { return a == Activation::Satlin ? "satlin" : "radbas"; }

Activation parse_activation(std::string_view s) {
    if (s == "satlin") return Activation::Satlin;
    if (s == "radbas") return Activation::Radbas;
    throw Error("unknown activation '" + std::string(s) + "' (expected satlin or radbas)");
}

void Config::validate() const {
    require(sthr > 0.0 && sthr < 1.0, "sthr must lie in (0,1)");
    require(errthr > 0.0 && errthr < 1.0, "errthr must lie in (0,1)");
    require(lr1 >= 0.0 && lr2 >= 0.0 && lr3 >= 0.0, "learning rates must be >= 0");
    require(m_best >= 1, "m_best must be >= 1");
    require(ss >= 0.0 && tc >= 0.0, "ss and tc must be >= 0");
    require(mfs >= 2, "mfs must be >= 2");
    require(age_thr >= 1, "age_thr must be >= 1");
    require(act_thr >= 0.0, "act_thr must be >= 0");
    require(thr1 >= 0.0 && thr1 <= 1.0 && thr2 >= 0.0 && thr2 <= 1.0, "aggregation thresholds must lie in [0,1]");
}

Model::Model(Config config, std::size_t input_dims, std::vector<std::string> class_names, Normalizer normalization)
    : config_(config),
      input_dims_(input_dims),
      class_names_(std::move(class_names)),
      normalization_(std::move(normalization)),
      partition_(config.mfs) {
    config_.validate();
    if (input_dims_ == 0) throw Error("efunn: input_dims must be positive");
    if (class_names_.size() < 2) throw Error("efunn: need at least two classes");
    if (!normalization_.empty() && normalization_.dims() != input_dims_) {
        throw Error("efunn: normalization table has " + std::to_string(normalization_.dims()) +
                    " dimensions, model has " + std::to_string(input_dims_));
    }
}

Model Model::restore(Config config, std::size_t input_dims, std::vector<std::string> class_names,
                     Normalizer normalization, std::vector<RuleNode> nodes, std::vector<double> w3,
                     std::optional<std::size_t> last_winner, double last_activation) {
    Model m(config, input_dims, std::move(class_names), std::move(normalization));
    const std::size_t in_len = m.input_dims_ * m.partition_.size();
    const std::size_t out_len = m.output_classes() * m.partition_.size();
    for (const auto& n : nodes) {
        if (n.w1.degrees.size() != in_len || n.w2.degrees.size() != out_len) {
            throw Error("efunn: rule node shape does not match the model");
        }
        if (n.wins > n.age) throw Error("efunn: rule node has more wins than age");
    }
    if (w3.size() != nodes.size() * nodes.size()) throw Error("efunn: W3 size does not match node count");
    if (last_winner && *last_winner >= nodes.size()) throw Error("efunn: last winner out of range");
    if (config.max_nodes != 0 && nodes.size() > config.max_nodes) throw Error("efunn: node count exceeds max_nodes");
    m.nodes_ = std::move(nodes);
    m.w3_ = std::move(w3);
    m.last_winner_ = last_winner;
    m.last_activation_ = last_activation;
    return m;
}

void Model::set_config(const Config& config) {
    config.validate();
    if (config.mfs != config_.mfs) throw Error("efunn: the MF count cannot change after construction");
    if (config.max_nodes != 0 && config.max_nodes < nodes_.size()) throw Error("efunn: max_nodes below node count");
    config_ = config;
}

void Model::set_normalization(Normalizer n) {
    if (!n.empty() && n.dims() != input_dims_) throw Error("efunn: normalization dimension mismatch");
    normalization_ = std::move(n);
}

fuzzy::FuzzyVector Model::fuzzify_input(std::span<const double> x) const {
    if (x.size() != input_dims_) {
        throw Error("efunn: example has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(input_dims_));
    }
    return fuzzy::fuzzify_vector(x, partition_);
}

fuzzy::FuzzyVector Model::fuzzify_target(std::size_t label) const {
    if (label >= output_classes()) throw Error("efunn: unknown class index " + std::to_string(label));
    const auto hot = one_hot(label, output_classes());
    return fuzzy::fuzzify_vector(hot, partition_);
}

std::vector<double> Model::activate(const fuzzy::FuzzyVector& xf, std::optional<std::size_t> prev_winner) const {
    if (nodes_.empty()) throw Error("efunn: cannot activate an empty model");
    const bool temporal = config_.tc > 0.0 && prev_winner.has_value();
    std::vector<double> a(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        const double d = fuzzy::fuzzy_distance(xf, nodes_[j].w1);
        const double link = temporal ? config_.tc * w3(*prev_winner, j) : 0.0;
        if (config_.activation == Activation::Satlin) {
            a[j] = satlin(1.0 - config_.ss * d + link);
        } else {
            const double z = config_.ss * d - link;
            a[j] = std::exp(-z * z);
        }
    }
    return a;
}

std::size_t Model::add_node(fuzzy::FuzzyVector w1, fuzzy::FuzzyVector w2, std::size_t age, double activation_sum,
                            std::size_t wins) {
    if (config_.max_nodes != 0 && nodes_.size() >= config_.max_nodes) {
        throw Error("efunn: rule node capacity exceeded (max_nodes=" + std::to_string(config_.max_nodes) + ")");
    }
    const std::size_t old_n = nodes_.size();
    std::vector<double> grown((old_n + 1) * (old_n + 1), 0.0);
    for (std::size_t i = 0; i < old_n; ++i) {
        std::copy_n(w3_.begin() + static_cast<std::ptrdiff_t>(i * old_n), old_n,
                    grown.begin() + static_cast<std::ptrdiff_t>(i * (old_n + 1)));
    }
    w3_ = std::move(grown);
    nodes_.push_back(RuleNode{std::move(w1), std::move(w2), age, activation_sum, wins});
    return old_n;
}

void Model::remove_nodes(const std::vector<bool>& drop) {
    const std::size_t n = nodes_.size();
    std::vector<std::size_t> remap(n, n);
    std::vector<RuleNode> kept;
    for (std::size_t i = 0; i < n; ++i) {
        if (!drop[i]) {
            remap[i] = kept.size();
            kept.push_back(std::move(nodes_[i]));
        }
    }
    const std::size_t k = kept.size();
    std::vector<double> w3(k * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (remap[i] < k && remap[j] < k) {
                w3[remap[i] * k + remap[j]] = w3_[i * n + j];
            }
        }
    }
    nodes_ = std::move(kept);
    w3_ = std::move(w3);
    if (last_winner_) {
        if (remap[*last_winner_] < k) {
            last_winner_ = remap[*last_winner_];
        } else {
            last_winner_.reset();
            last_activation_ = 0.0;
        }
    }
}

void update_input_center(std::span<double> w1, std::span<const double> ex, double lr1) {
    for (std::size_t i = 0; i < w1.size(); ++i) w1[i] += lr1 * (ex[i] - w1[i]);
}

void update_output_center(std::span<double> w2, std::span<const double> err, double a1, double lr2) {
    for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += lr2 * err[i] * a1;
}

void Model::update_node(std::size_t k, const fuzzy::FuzzyVector& ex, const fuzzy::FuzzyVector& te, double a1) {
    RuleNode& node = nodes_[k];
    update_input_center(node.w1.degrees, ex.degrees, config_.lr1);
    // The node's own fuzzy output for this example, and its error against the target.
    std::vector<double> err(node.w2.degrees.size());
    for (std::size_t i = 0; i < err.size(); ++i) {
        err[i] = te.degrees[i] - satlin(node.w2.degrees[i] * a1);
    }
    update_output_center(node.w2.degrees, err, a1, config_.lr2);
}

std::vector<std::size_t> Model::select_propagating(std::span<const double> a1) const {
    std::vector<std::size_t> order(a1.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return a1[l] > a1[r]; });
    std::vector<std::size_t> chosen;
    for (std::size_t idx : order) {
        if (chosen.size() == config_.m_best || a1[idx] < config_.sthr) break;
        chosen.push_back(idx);
    }
    return chosen;
}

std::vector<double> Model::propagate(std::span<const double> a1, std::span<const std::size_t> chosen) const {
    std::vector<double> a2(output_classes() * partition_.size(), 0.0);
    for (std::size_t k : chosen) {
        const auto& w2 = nodes_[k].w2.degrees;
        for (std::size_t i = 0; i < a2.size(); ++i) {
            a2[i] += a1[k] * w2[i];
        }
    }
    for (double& v : a2) v = satlin(v);
    return a2;
}

LearnEvent Model::learn(std::span<const double> x, std::size_t label) {
    const fuzzy::FuzzyVector ex = fuzzify_input(x);
    const fuzzy::FuzzyVector te = fuzzify_target(label);
    const std::optional<std::size_t> prev = last_winner_;
    const double prev_activation = last_activation_;

    LearnEvent ev;
    if (nodes_.empty()) {
        ev.kind = LearnKind::NodeCreated;
        ev.winner = add_node(ex, te, 1, 1.0, 1);
        ev.node_count = nodes_.size();
        last_winner_ = ev.winner;
        last_activation_ = 1.0;
        return ev;
    }

    const std::vector<double> a1 = activate(ex, prev);
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        nodes_[j].age += 1;
        nodes_[j].activation_sum += a1[j];
    }
    const std::size_t best = argmax(a1);
    ev.max_activation = a1[best];

    bool create = ev.max_activation < config_.sthr;
    std::vector<std::size_t> chosen;
    if (!create) {
        chosen = select_propagating(a1);
        const std::vector<double> a2 = propagate(a1, chosen);
        ev.output_distance = fuzzy::fuzzy_distance(std::span<const double>(a2), std::span<const double>(te.degrees));
        create = *ev.output_distance > config_.errthr;
    }

    double winner_activation = 1.0;
    if (create) {
        // The matched nodes, if any, were found wrong; only the best of them moves.
        if (!chosen.empty()) update_node(best, ex, te, a1[best]);
        ev.kind = LearnKind::NodeCreated;
        ev.winner = add_node(ex, te, 1, 1.0, 1);
    } else {
        for (std::size_t k : chosen) update_node(k, ex, te, a1[k]);
        ev.kind = LearnKind::NodeUpdated;
        ev.winner = best;
        nodes_[best].wins += 1;
        winner_activation = a1[best];
    }

    if (prev && config_.lr3 > 0.0) {
        w3_[*prev * nodes_.size() + ev.winner] += config_.lr3 * prev_activation * winner_activation;
    }
    last_winner_ = ev.winner;
    last_activation_ = winner_activation;
    ev.node_count = nodes_.size();
    return ev;
}

Inference Model::infer_with(std::span<const double> x, std::optional<std::size_t> prev_winner) const {
    const fuzzy::FuzzyVector xf = fuzzify_input(x);
    const std::vector<double> a1 = activate(xf, prev_winner);
    std::vector<std::size_t> chosen = select_propagating(a1);
    if (chosen.empty()) chosen.push_back(argmax(a1));

    Inference out;
    out.winner = chosen.front();
    const std::vector<double> a2 = propagate(a1, chosen);
    if (std::all_of(a2.begin(), a2.end(), [](double v) { return v == 0.0; })) {
        // No node fires at all: fall back to the nearest prototype's own output.
        std::size_t nearest = 0;
        double best_d = 2.0;
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            const double d = fuzzy::fuzzy_distance(xf, nodes_[j].w1);
            if (d < best_d) {
                best_d = d;
                nearest = j;
            }
        }
        out.winner = nearest;
        const auto d = fuzzy::defuzzify_class(nodes_[nearest].w2.degrees, output_classes(), partition_);
        out.label = d.index;
        out.scores = d.scores;
        return out;
    }
    const auto d = fuzzy::defuzzify_class(a2, output_classes(), partition_);
    out.label = d.index;
    out.scores = d.scores;
    return out;
}

Inference Model::infer(std::span<const double> x) const {
    return infer_with(x, config_.tc > 0.0 ? last_winner_ : std::nullopt);
}

Inference Model::infer(std::span<const double> x, Session& session) const {
    Inference out = infer_with(x, config_.tc > 0.0 ? session.winner : std::nullopt);
    session.winner = out.winner;
    return out;
}

Inference Model::classify(std::span<const double> raw) const {
    if (normalization_.empty()) return infer(raw);
    const std::vector<double> x = normalization_.apply(raw);
    return infer(x);
}

PruneReport Model::prune(double level) {
    if (!(level >= 0.0 && level <= 1.0)) throw Error("efunn: prune level must lie in [0,1]");
    PruneReport report;
    std::vector<bool> drop(nodes_.size(), false);
    if (level > 0.0) {
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            const RuleNode& n = nodes_[j];
            if (n.age <= config_.age_thr) continue;
            const double avg = n.average_activation();
            if (!(avg < config_.act_thr)) continue;
            const double age_excess = static_cast<double>(n.age - config_.age_thr) / static_cast<double>(n.age);
            const double deficit = (config_.act_thr - avg) / config_.act_thr;
            if (age_excess * deficit >= 1.0 - level) {
                drop[j] = true;
                ++report.removed;
            }
        }
    }
    if (report.removed) remove_nodes(drop);
    report.remaining = nodes_.size();
    report.emptied = nodes_.empty();
    return report;
}

std::size_t Model::aggregate() {
    std::size_t merges = 0;
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < nodes_.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < nodes_.size() && !merged; ++j) {
                if (fuzzy::fuzzy_distance(nodes_[i].w1, nodes_[j].w1) > config_.thr1) continue;
                if (fuzzy::fuzzy_distance(nodes_[i].w2, nodes_[j].w2) > config_.thr2) continue;
                RuleNode& a = nodes_[i];
                const RuleNode& b = nodes_[j];
                for (std::size_t k = 0; k < a.w1.degrees.size(); ++k) {
                    a.w1.degrees[k] = (a.w1.degrees[k] + b.w1.degrees[k]) / 2.0;
                }
                for (std::size_t k = 0; k < a.w2.degrees.size(); ++k) {
                    a.w2.degrees[k] = (a.w2.degrees[k] + b.w2.degrees[k]) / 2.0;
                }
                a.age += b.age;
                a.activation_sum += b.activation_sum;
                a.wins += b.wins;
                // Links into and out of j fold into i.
                const std::size_t n = nodes_.size();
                for (std::size_t k = 0; k < n; ++k) {
                    w3_[i * n + k] += w3_[j * n + k];
                }
                for (std::size_t k = 0; k < n; ++k) {
                    w3_[k * n + i] += w3_[k * n + j];
                }
                if (last_winner_ == j) last_winner_ = i;
                std::vector<bool> drop(n, false);
                drop[j] = true;
                remove_nodes(drop);
                ++merges;
                merged = true;
            }
        }
    }
    return merges;
}

std::vector<Rule> Model::extract_rules() const {
    std::vector<Rule> rules;
    rules.reserve(nodes_.size());
    for (const RuleNode& node : nodes_) {
        Rule r;
        for (std::size_t d = 0; d < input_dims_; ++d) {
            const auto seg = node.w1.segment(d);
            const std::size_t mf = argmax(seg);
            r.antecedents.push_back({d, mf, seg[mf]});
        }
        r.consequent = fuzzy::defuzzify_class(node.w2.degrees, output_classes(), partition_).index;
        rules.push_back(std::move(r));
    }
    return rules;
}

void Model::insert_rule(const Rule& rule) {
    if (rule.consequent >= output_classes()) {
        throw Error("efunn: rule names unknown class index " + std::to_string(rule.consequent));
    }
    const std::size_t m = partition_.size();
    fuzzy::FuzzyVector w1{std::vector<double>(input_dims_ * m, 0.0), input_dims_, m};
    std::vector<bool> seen(input_dims_, false);
    for (const Antecedent& a : rule.antecedents) {
        if (a.dim >= input_dims_) throw Error("efunn: rule names unknown input x" + std::to_string(a.dim));
        if (a.mf >= m) throw Error("efunn: rule names unknown membership function MF" + std::to_string(a.mf));
        if (seen[a.dim]) throw Error("efunn: rule repeats input x" + std::to_string(a.dim));
        seen[a.dim] = true;
        w1.degrees[a.dim * m + a.mf] = 1.0;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw Error("efunn: an inserted rule must give a term for every input");
    }
    add_node(std::move(w1), fuzzify_target(rule.consequent), 0, 0.0, 0);
}

std::string Model::format_rule(const Rule& rule) const {
    std::string out = "if";
    char buf[32];
    for (std::size_t k = 0; k < rule.antecedents.size(); ++k) {
        const Antecedent& a = rule.antecedents[k];
        std::snprintf(buf, sizeof buf, "%.2f", a.degree);
        out += (k ? " and x" : " x") + std::to_string(a.dim) + " is MF" + std::to_string(a.mf) + " (" + buf + ")";
    }
    out += " then class " + class_names_.at(rule.consequent);
    return out;
}

Rule Model::parse_rule(std::string_view text) const {
    std::istringstream in{std::string(text)};
    std::string tok;
    auto expect = [&](std::string_view word) {
        if (!(in >> tok) || tok != word) {
            throw ParseError("rule: expected '" + std::string(word) + "' near '" + tok + "'");
        }
    };
    auto index_after = [&](std::string_view prefix) -> std::size_t {
        if (tok.rfind(prefix, 0) != 0) throw ParseError("rule: expected " + std::string(prefix) + "<n>, got '" + tok + "'");
        std::size_t v = 0;
        const char* first = tok.data() + prefix.size();
        const char* last = tok.data() + tok.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || first == last) throw ParseError("rule: bad label '" + tok + "'");
        return v;
    };

    Rule rule;
    expect("if");
    while (true) {
        if (!(in >> tok)) throw ParseError("rule: truncated antecedent");
        Antecedent a;
        a.dim = index_after("x");
        expect("is");
        if (!(in >> tok)) throw ParseError("rule: truncated antecedent");
        a.mf = index_after("MF");
        if (a.mf >= partition_.size()) throw Error("rule: unknown membership function " + tok);
        if (!(in >> tok)) throw ParseError("rule: missing 'then'");
        if (tok.size() > 2 && tok.front() == '(' && tok.back() == ')') {
            a.degree = std::stod(tok.substr(1, tok.size() - 2));
            if (!(in >> tok)) throw ParseError("rule: missing 'then'");
        }
        rule.antecedents.push_back(a);
        if (tok == "then") break;
        if (tok != "and") throw ParseError("rule: expected 'and' or 'then', got '" + tok + "'");
    }
    expect("class");
    std::string name;
    if (!(in >> name)) throw ParseError("rule: missing class name");
    const auto it = std::find(class_names_.begin(), class_names_.end(), name);
    if (it == class_names_.end()) throw Error("rule: unknown class '" + name + "'");
    rule.consequent = static_cast<std::size_t>(it - class_names_.begin());
    return rule;
}

std::vector<LearnEvent> train_one_pass(Model& model, std::span<const std::vector<double>> inputs,
                                       std::span<const std::size_t> labels) {
    if (inputs.empty()) throw Error("efunn: empty training set");
    if (inputs.size() != labels.size()) throw Error("efunn: inputs and labels differ in length");
    if (model.config().max_nodes == 0) {
        Config c = model.config();
        c.max_nodes = model.size() + inputs.size();
        model.set_config(c);
    }
    std::vector<LearnEvent> log;
    log.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        log.push_back(model.learn(inputs[i], labels[i]));
    }
    return log;
}

}  // namespace texclass::efunn
