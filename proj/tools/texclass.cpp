// texclass: block-DCT texture features, EFuNN and MLP classifiers.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "texclass/dataset.hpp"
#include "texclass/dct.hpp"
#include "texclass/efunn.hpp"
#include "texclass/error.hpp"
#include "texclass/evaluation.hpp"
#include "texclass/mlp.hpp"
#include "texclass/persistence.hpp"
#include "texclass/synth.hpp"
#include "texclass/text_io.hpp"

namespace fs = std::filesystem;
using namespace texclass;

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto part : text::split(s, ',')) {
        if (!part.empty()) out.emplace_back(part);
    }
    return out;
}

struct SynthArgs {
    std::string out_dir;
    std::size_t count = 80;
    std::size_t size = 48;
    std::uint64_t seed = 1;
    std::string families = "brick,metal,rural";
};

struct ExtractArgs {
    std::string manifest;
    std::size_t block_size = 8;
    std::string mask = "zigzag";
    std::string out;
};

struct SplitArgs {
    std::string features;
    double fraction = 0.8;
    std::uint64_t seed = 1;
    std::string train;
    std::string test;
};

struct EfunnArgs {
    std::string features;
    std::string out;
    std::string events;
    std::string activation = "satlin";
    efunn::Config config;
};

struct MlpArgs {
    std::string features;
    std::string out;
    std::string log;
    std::string hidden = "90,90";
    mlp::Config config;
    std::size_t log_every = 100;
};

struct ModelArgs {
    std::string model;
    std::string features;
    std::string out;
    std::string csv;
};

struct TransformArgs {
    std::string model;
    std::string out;
    double level = 0.0;
    std::optional<std::size_t> age_thr;
    std::optional<double> act_thr;
    std::optional<double> thr1;
    std::optional<double> thr2;
};

void run_synth(const SynthArgs& a) {
    synth::Options opt;
    opt.families.clear();
    for (const auto& f : split_list(a.families)) opt.families.push_back(synth::parse_family(f));
    opt.count_per_class = a.count;
    opt.size = a.size;
    opt.seed = a.seed;
    const auto manifest = synth::generate(a.out_dir, opt);
    std::cout << "wrote " << manifest.size() << " images and manifest.csv to " << a.out_dir << "\n";
}

void run_extract(const ExtractArgs& a) {
    const auto mask = dct::CoefficientMask::parse(a.mask);
    const Dataset ds = extract_dataset(a.manifest, a.block_size, mask);
    write_features(a.out, ds);
    std::cout << "extracted " << ds.size() << " feature vectors of length " << ds.dims() << " to " << a.out << "\n";
}

void run_split(const SplitArgs& a) {
    const Dataset ds = read_features(a.features);
    const auto [train, test] = split(ds, a.fraction, a.seed);
    write_features(a.train, train);
    write_features(a.test, test);
    std::cout << "split " << ds.size() << " items into " << train.size() << " train and " << test.size()
              << " test\n";
}

void run_train_efunn(EfunnArgs a) {
    a.config.activation = efunn::parse_activation(a.activation);
    const Dataset train = read_features(a.features);
    const Normalizer norm = fit_normalizer(train);
    const Dataset scaled = normalize(norm, train);

    Stopwatch clock;
    efunn::Model model(a.config, train.dims(), train.class_names, norm);
    const auto inputs = scaled.inputs();
    const auto labels = scaled.labels();
    const auto log = efunn::train_one_pass(model, inputs, labels);
    std::cerr << "efunn one-pass training took " << clock.seconds() << " s\n";

    text::write_file(a.out, save_efunn(model));
    if (!a.events.empty()) {
        std::string csv = "example,event,winner,max_activation,output_distance,nodes\n";
        for (std::size_t i = 0; i < log.size(); ++i) {
            const auto& ev = log[i];
            csv += std::to_string(i) + (ev.kind == efunn::LearnKind::NodeCreated ? ",created," : ",updated,") +
                   std::to_string(ev.winner) + "," + text::format_double(ev.max_activation) + "," +
                   (ev.output_distance ? text::format_double(*ev.output_distance) : std::string()) + "," +
                   std::to_string(ev.node_count) + "\n";
        }
        text::write_file(a.events, csv);
    }
    std::cout << "efunn: " << model.size() << " rule nodes from " << train.size() << " examples\n";
}

void run_train_mlp(MlpArgs a) {
    const Dataset train = read_features(a.features);
    const Normalizer norm = fit_normalizer(train);
    const Dataset scaled = normalize(norm, train);

    a.config.layer_sizes = {train.dims()};
    for (const auto& h : split_list(a.hidden)) {
        a.config.layer_sizes.push_back(static_cast<std::size_t>(text::parse_unsigned(h, "--hidden")));
    }
    a.config.layer_sizes.push_back(train.class_names.size());

    MlpClassifier clf{mlp::init(a.config), norm, train.class_names};
    const auto inputs = scaled.inputs();
    std::vector<std::vector<double>> targets;
    for (const auto& s : scaled.items) targets.push_back(mlp::one_hot(s.label, train.class_names.size()));

    Stopwatch clock;
    std::string log = "epoch,rmse\n";
    double rmse = 0.0;
    for (std::size_t e = 0; e < a.config.epochs; ++e) {
        rmse = mlp::train_epoch(clf.net, inputs, targets);
        if (a.log_every && (e % a.log_every == 0 || e + 1 == a.config.epochs)) {
            log += std::to_string(e) + "," + text::format_double(rmse) + "\n";
        }
    }
    std::cerr << "mlp training (" << a.config.epochs << " epochs) took " << clock.seconds() << " s\n";
    text::write_file(a.out, save_mlp(clf));
    if (!a.log.empty()) text::write_file(a.log, log);
    std::cout << "mlp: final epoch rmse " << text::format_double(rmse) << "\n";
}

// Loaded classifier of either kind behind one predict interface.
struct AnyModel {
    std::optional<efunn::Model> efunn;
    std::optional<MlpClassifier> mlp;

    const std::vector<std::string>& class_names() const { return efunn ? efunn->class_names() : mlp->class_names; }
    std::size_t predict(std::span<const double> raw) const {
        return efunn ? efunn->classify(raw).label : mlp->classify(raw);
    }
};

AnyModel load_any(const std::string& path) {
    const std::string text = read_text(path);
    AnyModel m;
    if (detect_model_kind(text) == ModelKind::Efunn) {
        m.efunn = load_efunn(text);
    } else {
        m.mlp = load_mlp(text);
    }
    return m;
}

efunn::Model load_efunn_file(const std::string& path) {
    const std::string text = read_text(path);
    if (detect_model_kind(text) != ModelKind::Efunn) throw Error(path + " is not an EFuNN model");
    return load_efunn(text);
}

void run_classify(const ModelArgs& a) {
    const AnyModel model = load_any(a.model);
    const Dataset ds = read_features(a.features);
    std::string csv = "index,predicted\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        csv += std::to_string(i) + "," + model.class_names()[model.predict(ds.items[i].features)] + "\n";
    }
    if (a.out.empty()) {
        std::cout << csv;
    } else {
        text::write_file(a.out, csv);
    }
}

void run_evaluate(const ModelArgs& a) {
    const AnyModel model = load_any(a.model);
    const Dataset test = read_features(a.features, model.class_names());
    const auto report = evaluate([&](std::span<const double> x) { return model.predict(x); }, test);
    std::cout << report.table();
    if (!a.csv.empty()) text::write_file(a.csv, report.csv());
}

void run_rules(const ModelArgs& a) {
    const efunn::Model model = load_efunn_file(a.model);
    std::ostringstream out;
    const auto rules = model.extract_rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
        out << "rule " << i << ": " << model.format_rule(rules[i]) << "\n";
    }
    if (a.out.empty()) {
        std::cout << out.str();
    } else {
        text::write_file(a.out, out.str());
    }
}

void apply_overrides(efunn::Model& model, const TransformArgs& a) {
    efunn::Config c = model.config();
    if (a.age_thr) c.age_thr = *a.age_thr;
    if (a.act_thr) c.act_thr = *a.act_thr;
    if (a.thr1) c.thr1 = *a.thr1;
    if (a.thr2) c.thr2 = *a.thr2;
    model.set_config(c);
}

void run_prune(const TransformArgs& a) {
    efunn::Model model = load_efunn_file(a.model);
    apply_overrides(model, a);
    const auto report = model.prune(a.level);
    text::write_file(a.out, save_efunn(model));
    std::cout << "pruned " << report.removed << " nodes, " << report.remaining << " remain\n";
    if (report.emptied) std::cerr << "warning: pruning removed every rule node\n";
}

void run_aggregate(const TransformArgs& a) {
    efunn::Model model = load_efunn_file(a.model);
    apply_overrides(model, a);
    const std::size_t before = model.size();
    const std::size_t merges = model.aggregate();
    text::write_file(a.out, save_efunn(model));
    std::cout << "aggregated " << before << " nodes into " << model.size() << " (" << merges << " merges)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-DCT texture classification with EFuNN and MLP models"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labelled texture set");
    synth_cmd->add_option("--out", synth_args.out_dir, "Output directory")->required();
    synth_cmd->add_option("--count", synth_args.count, "Images per class")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--size", synth_args.size, "Image side in pixels")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth_args.seed, "Generator seed");
    synth_cmd->add_option("--families", synth_args.families, "Comma-separated families");

    ExtractArgs extract_args;
    auto* extract_cmd = app.add_subcommand("extract", "Images listed in a manifest -> feature CSV");
    extract_cmd->add_option("--manifest", extract_args.manifest, "filename,class manifest")
        ->required()
        ->check(CLI::ExistingFile);
    extract_cmd->add_option("--block-size", extract_args.block_size, "DCT block side")->check(CLI::Range(2, 256));
    extract_cmd->add_option("--mask", extract_args.mask, "'zigzag' or nine u,v pairs joined by ';'");
    extract_cmd->add_option("--out", extract_args.out, "Feature CSV")->required();

    SplitArgs split_args;
    auto* split_cmd = app.add_subcommand("split", "Stratified train/test split of a feature CSV");
    split_cmd->add_option("--features", split_args.features)->required()->check(CLI::ExistingFile);
    split_cmd->add_option("--fraction", split_args.fraction, "Training fraction")->check(CLI::Range(0.0, 1.0));
    split_cmd->add_option("--seed", split_args.seed);
    split_cmd->add_option("--train", split_args.train)->required();
    split_cmd->add_option("--test", split_args.test)->required();

    EfunnArgs ef;
    auto* ef_cmd = app.add_subcommand("train-efunn", "One-pass EFuNN training");
    ef_cmd->add_option("--features", ef.features)->required()->check(CLI::ExistingFile);
    ef_cmd->add_option("--out", ef.out, "Model file")->required();
    ef_cmd->add_option("--events", ef.events, "Per-example event log CSV");
    ef_cmd->add_option("--sthr", ef.config.sthr);
    ef_cmd->add_option("--errthr", ef.config.errthr);
    ef_cmd->add_option("--mfs", ef.config.mfs);
    ef_cmd->add_option("--lr1", ef.config.lr1);
    ef_cmd->add_option("--lr2", ef.config.lr2);
    ef_cmd->add_option("--lr3", ef.config.lr3);
    ef_cmd->add_option("--mbest", ef.config.m_best);
    ef_cmd->add_option("--ss", ef.config.ss);
    ef_cmd->add_option("--tc", ef.config.tc);
    ef_cmd->add_option("--max-nodes", ef.config.max_nodes, "0 = training-set size");
    ef_cmd->add_option("--activation", ef.activation, "satlin or radbas");
    ef_cmd->add_option("--age-thr", ef.config.age_thr);
    ef_cmd->add_option("--act-thr", ef.config.act_thr);
    ef_cmd->add_option("--thr1", ef.config.thr1);
    ef_cmd->add_option("--thr2", ef.config.thr2);

    MlpArgs ml;
    auto* ml_cmd = app.add_subcommand("train-mlp", "Backpropagation MLP training");
    ml_cmd->add_option("--features", ml.features)->required()->check(CLI::ExistingFile);
    ml_cmd->add_option("--out", ml.out, "Model file")->required();
    ml_cmd->add_option("--hidden", ml.hidden, "Hidden layer sizes, e.g. 90,90");
    ml_cmd->add_option("--lr", ml.config.learning_rate);
    ml_cmd->add_option("--momentum", ml.config.momentum);
    ml_cmd->add_option("--epochs", ml.config.epochs)->check(CLI::PositiveNumber);
    ml_cmd->add_option("--seed", ml.config.seed);
    ml_cmd->add_option("--init-scale", ml.config.init_scale);
    ml_cmd->add_option("--log", ml.log, "RMSE log CSV");
    ml_cmd->add_option("--log-every", ml.log_every, "Epochs between log rows");

    ModelArgs classify_args;
    auto* classify_cmd = app.add_subcommand("classify", "Predict labels for a feature CSV");
    classify_cmd->add_option("--model", classify_args.model)->required()->check(CLI::ExistingFile);
    classify_cmd->add_option("--features", classify_args.features)->required()->check(CLI::ExistingFile);
    classify_cmd->add_option("--out", classify_args.out, "Predictions CSV (default stdout)");

    ModelArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "Per-class report on a labelled feature CSV");
    eval_cmd->add_option("--model", eval_args.model)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--features", eval_args.features)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--csv", eval_args.csv, "Also write the report as CSV");

    ModelArgs rules_args;
    auto* rules_cmd = app.add_subcommand("rules", "Extract if-then rules from an EFuNN model");
    rules_cmd->add_option("--model", rules_args.model)->required()->check(CLI::ExistingFile);
    rules_cmd->add_option("--out", rules_args.out, "Rules file (default stdout)");

    TransformArgs prune_args;
    auto* prune_cmd = app.add_subcommand("prune", "Remove old, rarely activated EFuNN rule nodes");
    prune_cmd->add_option("--model", prune_args.model)->required()->check(CLI::ExistingFile);
    prune_cmd->add_option("--out", prune_args.out)->required();
    prune_cmd->add_option("--level", prune_args.level, "Pruning level in [0,1]")->check(CLI::Range(0.0, 1.0));
    prune_cmd->add_option("--age-thr", prune_args.age_thr);
    prune_cmd->add_option("--act-thr", prune_args.act_thr);

    TransformArgs agg_args;
    auto* agg_cmd = app.add_subcommand("aggregate", "Merge close EFuNN rule nodes");
    agg_cmd->add_option("--model", agg_args.model)->required()->check(CLI::ExistingFile);
    agg_cmd->add_option("--out", agg_args.out)->required();
    agg_cmd->add_option("--thr1", agg_args.thr1);
    agg_cmd->add_option("--thr2", agg_args.thr2);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth_cmd) run_synth(synth_args);
        if (*extract_cmd) run_extract(extract_args);
        if (*split_cmd) run_split(split_args);
        if (*ef_cmd) run_train_efunn(ef);
        if (*ml_cmd) run_train_mlp(ml);
        if (*classify_cmd) run_classify(classify_args);
        if (*eval_cmd) run_evaluate(eval_args);
        if (*rules_cmd) run_rules(rules_args);
        if (*prune_cmd) run_prune(prune_args);
        if (*agg_cmd) run_aggregate(agg_args);
    } catch (const std::exception& e) {
        std::cerr << "texclass: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
