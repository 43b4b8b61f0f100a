#pragma once

// Evolving fuzzy neural network: a five-layer network (crisp input, fuzzy
// input, rule nodes, fuzzy output, crisp output) whose rule layer grows one
// node at a time during a single pass over the data.
//
// Each rule node holds W1, the center of a hyper-sphere in fuzzy input
// space, and W2, the center of the associated sphere in fuzzy output space.
// A new example either falls inside an existing node's input sphere (radius
// 1 - sthr) with an output error below errthr and pulls that node's centers
// toward itself, or it becomes a node of its own. W3 accumulates temporal
// links between consecutive winners.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texclass/fuzzy.hpp"
#include "texclass/normalizer.hpp"

namespace texclass::efunn {

enum class Activation { Satlin, Radbas };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);

struct Config {
    double sthr = 0.99;
    double errthr = 0.001;
    double lr1 = 0.1;
    double lr2 = 0.1;
    double lr3 = 0.0;
    std::size_t m_best = 3;
    double ss = 1.0;
    double tc = 0.0;
    // 0 defers to the training-set size when train_one_pass runs.
    std::size_t max_nodes = 0;
    std::size_t mfs = 4;
    Activation activation = Activation::Satlin;
    std::size_t age_thr = 50;
    double act_thr = 0.05;
    double thr1 = 0.05;
    double thr2 = 0.01;

    // Throws on out-of-range fields. max_nodes == 0 is accepted here.
    void validate() const;
    bool operator==(const Config&) const = default;
};

struct RuleNode {
    fuzzy::FuzzyVector w1;
    fuzzy::FuzzyVector w2;
    std::size_t age = 0;
    double activation_sum = 0.0;
    std::size_t wins = 0;

    double average_activation() const { return age ? activation_sum / static_cast<double>(age) : 0.0; }
    bool operator==(const RuleNode&) const = default;
};

enum class LearnKind { NodeCreated, NodeUpdated };

struct LearnEvent {
    LearnKind kind = LearnKind::NodeCreated;
    std::size_t winner = 0;
    // Highest rule activation before any node was created; 0 for the first example.
    double max_activation = 0.0;
    // D(A2, TE) when the output gate was evaluated.
    std::optional<double> output_distance;
    std::size_t node_count = 0;
};

struct Antecedent {
    std::size_t dim = 0;
    std::size_t mf = 0;
    double degree = 1.0;
    bool operator==(const Antecedent&) const = default;
};

// "if x<dim> is MF<mf> and ... then class <consequent>"
struct Rule {
    std::vector<Antecedent> antecedents;
    std::size_t consequent = 0;
    bool operator==(const Rule&) const = default;
};

struct Inference {
    std::size_t label = 0;
    std::vector<double> scores;
    std::size_t winner = 0;
};

// Temporal context for inference when tc > 0.
struct Session {
    std::optional<std::size_t> winner;
};

struct PruneReport {
    std::size_t removed = 0;
    std::size_t remaining = 0;
    bool emptied = false;
};

/// Input-center step: w1 += lr1 * (ex - w1).
void update_input_center(std::span<double> w1, std::span<const double> ex, double lr1);
/// Output-center step: w2 += lr2 * err * a1, with err signed.
void update_output_center(std::span<double> w2, std::span<const double> err, double a1, double lr2);

class Model {
public:
    Model(Config config, std::size_t input_dims, std::vector<std::string> class_names, Normalizer normalization = {});

    // Rebuilds a model from persisted parts; throws if they are inconsistent.
    static Model restore(Config config, std::size_t input_dims, std::vector<std::string> class_names,
                         Normalizer normalization, std::vector<RuleNode> nodes, std::vector<double> w3,
                         std::optional<std::size_t> last_winner, double last_activation);

    const Config& config() const { return config_; }
    // Replaces tuning fields; the MF count is fixed at construction.
    void set_config(const Config& config);
    std::size_t input_dims() const { return input_dims_; }
    std::size_t output_classes() const { return class_names_.size(); }
    const std::vector<std::string>& class_names() const { return class_names_; }
    const Normalizer& normalization() const { return normalization_; }
    void set_normalization(Normalizer n);
    const fuzzy::MembershipPartition& partition() const { return partition_; }

    const std::vector<RuleNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    double w3(std::size_t from, std::size_t to) const { return w3_[from * nodes_.size() + to]; }
    const std::vector<double>& w3_matrix() const { return w3_; }
    std::optional<std::size_t> last_winner() const { return last_winner_; }
    double last_activation() const { return last_activation_; }

    fuzzy::FuzzyVector fuzzify_input(std::span<const double> x) const;
    fuzzy::FuzzyVector fuzzify_target(std::size_t label) const;

    /// Activation of every rule node for a fuzzy input; prev_winner feeds
    /// the temporal term when tc > 0. Throws on an empty model.
    std::vector<double> activate(const fuzzy::FuzzyVector& xf, std::optional<std::size_t> prev_winner) const;

    /// One iteration of the evolving loop for a normalised example.
    LearnEvent learn(std::span<const double> x, std::size_t label);

    /// Classifies a normalised example.
    Inference infer(std::span<const double> x) const;
    Inference infer(std::span<const double> x, Session& session) const;
    /// Normalises with the stored table first, when one is present.
    Inference classify(std::span<const double> raw) const;

    PruneReport prune(double level);
    /// Merges node pairs inside both aggregation thresholds until none remain.
    /// Returns the number of merges performed.
    std::size_t aggregate();

    std::vector<Rule> extract_rules() const;
    void insert_rule(const Rule& rule);
    std::string format_rule(const Rule& rule) const;
    Rule parse_rule(std::string_view text) const;

    bool operator==(const Model&) const = default;

private:
    std::size_t add_node(fuzzy::FuzzyVector w1, fuzzy::FuzzyVector w2, std::size_t age, double activation_sum,
                         std::size_t wins);
    void remove_nodes(const std::vector<bool>& drop);
    void update_node(std::size_t k, const fuzzy::FuzzyVector& ex, const fuzzy::FuzzyVector& te, double a1);
    std::vector<std::size_t> select_propagating(std::span<const double> a1) const;
    std::vector<double> propagate(std::span<const double> a1, std::span<const std::size_t> chosen) const;
    Inference infer_with(std::span<const double> x, std::optional<std::size_t> prev_winner) const;

    Config config_;
    std::size_t input_dims_;
    std::vector<std::string> class_names_;
    Normalizer normalization_;
    fuzzy::MembershipPartition partition_;
    std::vector<RuleNode> nodes_;
    std::vector<double> w3_;  // row-major, nodes_.size() squared
    std::optional<std::size_t> last_winner_;
    double last_activation_ = 0.0;
};

/// Single sequential pass of Model::learn over normalised examples. A
/// max_nodes of 0 is resolved to the number of examples first.
std::vector<LearnEvent> train_one_pass(Model& model, std::span<const std::vector<double>> inputs,
                                       std::span<const std::size_t> labels);

}  // namespace texclass::efunn
