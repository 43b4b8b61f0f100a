#include "texclass/persistence.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "texclass/error.hpp"
#include "texclass/text_io.hpp"

namespace texclass {

namespace {

constexpr std::string_view kEfunnMagic = "texclass-efunn 1";
constexpr std::string_view kMlpMagic = "texclass-mlp 1";

class Writer {
public:
    Writer& key(std::string_view k) {
        if (!first_) out_ += '\n';
        out_ += k;
        first_ = false;
        fresh_ = false;
        return *this;
    }
    Writer& line() {
        if (!first_) out_ += '\n';
        first_ = false;
        fresh_ = true;
        return *this;
    }
    Writer& num(double v) { return word(text::format_double(v)); }
    Writer& num(std::size_t v) { return word(std::to_string(v)); }
    Writer& word(std::string_view w) {
        if (!fresh_) out_ += ' ';
        fresh_ = false;
        out_ += w;
        return *this;
    }
    Writer& nums(const std::vector<double>& v) {
        for (double x : v) num(x);
        return *this;
    }
    std::string finish() { return out_ + '\n'; }

private:
    std::string out_;
    bool first_ = true;
    bool fresh_ = false;
};

class Reader {
public:
    explicit Reader(std::string_view text) {
        std::size_t start = 0;
        while (start < text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view l = text.substr(start, end - start);
            if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
            lines_.push_back(l);
            start = end + 1;
        }
    }

    // Next line split on spaces; if `expected` is given, the first token must match it.
    std::vector<std::string_view> next(std::string_view expected = {}) {
        if (pos_ >= lines_.size()) fail("unexpected end of file");
        ++pos_;
        auto toks = text::split(lines_[pos_ - 1], ' ');
        if (!expected.empty() && toks.front() != expected) {
            fail("expected '" + std::string(expected) + "', found '" + std::string(toks.front()) + "'");
        }
        return toks;
    }

    std::string_view raw_line() {
        if (pos_ >= lines_.size()) fail("unexpected end of file");
        return lines_[pos_++];
    }

    double real(std::string_view k) {
        const auto t = next(k);
        arity(t, 2);
        return text::parse_double(t[1], where());
    }

    std::size_t count(std::string_view k) {
        const auto t = next(k);
        arity(t, 2);
        return static_cast<std::size_t>(text::parse_unsigned(t[1], where()));
    }

    std::string_view word(std::string_view k) {
        const auto t = next(k);
        arity(t, 2);
        return t[1];
    }

    std::vector<double> reals(std::span<const std::string_view> toks, std::size_t expected) {
        if (toks.size() != expected) {
            fail("expected " + std::to_string(expected) + " values, found " + std::to_string(toks.size()));
        }
        std::vector<double> v;
        v.reserve(toks.size());
        for (auto t : toks) v.push_back(text::parse_double(t, where()));
        return v;
    }

    void arity(const std::vector<std::string_view>& t, std::size_t n) {
        if (t.size() != n) fail("wrong number of fields");
    }

    void finish() {
        while (pos_ < lines_.size()) {
            if (!lines_[pos_].empty()) fail("trailing content");
            ++pos_;
        }
    }

    std::string where() const { return "model line " + std::to_string(pos_); }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(where() + ": " + what); }

private:
    std::vector<std::string_view> lines_;
    std::size_t pos_ = 0;
};

void write_class_names(Writer& w, const std::vector<std::string>& names) {
    w.key("class_names").num(names.size());
    for (const auto& n : names) w.word(n);
}

std::vector<std::string> read_class_names(Reader& r) {
    const auto t = r.next("class_names");
    if (t.size() < 2) r.fail("class_names needs a count");
    const auto k = text::parse_unsigned(t[1], r.where());
    if (t.size() != k + 2) r.fail("class_names count mismatch");
    return {t.begin() + 2, t.end()};
}

void write_normalizer(Writer& w, const Normalizer& n) {
    w.key("normalization").num(n.dims());
    for (std::size_t d = 0; d < n.dims(); ++d) w.line().num(n.min[d]).num(n.max[d]);
}

Normalizer read_normalizer(Reader& r) {
    const std::size_t dims = r.count("normalization");
    Normalizer n;
    for (std::size_t d = 0; d < dims; ++d) {
        const auto t = text::split(r.raw_line(), ' ');
        const auto v = r.reals(t, 2);
        if (v[0] > v[1]) r.fail("normalization min exceeds max");
        n.min.push_back(v[0]);
        n.max.push_back(v[1]);
    }
    return n;
}

void write_matrices(Writer& w, std::string_view k, const std::vector<mlp::Matrix>& ms) {
    w.key(k).num(ms.size());
    for (const auto& m : ms) {
        w.key("matrix").num(m.rows).num(m.cols);
        for (std::size_t r = 0; r < m.rows; ++r) {
            w.line();
            for (std::size_t c = 0; c < m.cols; ++c) w.num(m(r, c));
        }
    }
}

std::vector<mlp::Matrix> read_matrices(Reader& r, std::string_view k) {
    const std::size_t count = r.count(k);
    std::vector<mlp::Matrix> ms;
    for (std::size_t i = 0; i < count; ++i) {
        const auto t = r.next("matrix");
        r.arity(t, 3);
        mlp::Matrix m(text::parse_unsigned(t[1], r.where()), text::parse_unsigned(t[2], r.where()));
        for (std::size_t row = 0; row < m.rows; ++row) {
            const auto vals = r.reals(text::split(r.raw_line(), ' '), m.cols);
            std::copy(vals.begin(), vals.end(), m.data.begin() + static_cast<std::ptrdiff_t>(row * m.cols));
        }
        ms.push_back(std::move(m));
    }
    return ms;
}

void check_magic(Reader& r, std::string_view magic) {
    if (r.raw_line() != magic) r.fail("not a '" + std::string(magic) + "' model file");
}

}  // namespace

std::size_t MlpClassifier::classify(std::span<const double> raw) const {
    if (normalization.empty()) return mlp::predict(net, raw);
    const auto x = normalization.apply(raw);
    return mlp::predict(net, x);
}

std::string save_efunn(const efunn::Model& model) {
    const efunn::Config& c = model.config();
    Writer w;
    w.key(kEfunnMagic);
    w.key("input_dims").num(model.input_dims());
    write_class_names(w, model.class_names());
    w.key("sthr").num(c.sthr);
    w.key("errthr").num(c.errthr);
    w.key("lr1").num(c.lr1);
    w.key("lr2").num(c.lr2);
    w.key("lr3").num(c.lr3);
    w.key("m_best").num(c.m_best);
    w.key("ss").num(c.ss);
    w.key("tc").num(c.tc);
    w.key("max_nodes").num(c.max_nodes);
    w.key("mfs").num(c.mfs);
    w.key("activation").word(efunn::to_string(c.activation));
    w.key("age_thr").num(c.age_thr);
    w.key("act_thr").num(c.act_thr);
    w.key("thr1").num(c.thr1);
    w.key("thr2").num(c.thr2);
    write_normalizer(w, model.normalization());
    w.key("last_winner");
    if (model.last_winner()) {
        w.num(*model.last_winner());
    } else {
        w.word("none");
    }
    w.num(model.last_activation());
    w.key("nodes").num(model.size());
    for (const auto& n : model.nodes()) {
        w.key("node").num(n.age).num(n.activation_sum).num(n.wins);
        w.key("w1").nums(n.w1.degrees);
        w.key("w2").nums(n.w2.degrees);
    }
    w.key("w3").num(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        w.line();
        for (std::size_t j = 0; j < model.size(); ++j) w.num(model.w3(i, j));
    }
    return w.finish();
}

efunn::Model load_efunn(std::string_view text) {
    Reader r(text);
    check_magic(r, kEfunnMagic);
    const std::size_t dims = r.count("input_dims");
    auto names = read_class_names(r);
    efunn::Config c;
    c.sthr = r.real("sthr");
    c.errthr = r.real("errthr");
    c.lr1 = r.real("lr1");
    c.lr2 = r.real("lr2");
    c.lr3 = r.real("lr3");
    c.m_best = r.count("m_best");
    c.ss = r.real("ss");
    c.tc = r.real("tc");
    c.max_nodes = r.count("max_nodes");
    c.mfs = r.count("mfs");
    c.activation = efunn::parse_activation(r.word("activation"));
    c.age_thr = r.count("age_thr");
    c.act_thr = r.real("act_thr");
    c.thr1 = r.real("thr1");
    c.thr2 = r.real("thr2");
    Normalizer norm = read_normalizer(r);

    const auto lw = r.next("last_winner");
    r.arity(lw, 3);
    std::optional<std::size_t> last_winner;
    if (lw[1] != "none") last_winner = text::parse_unsigned(lw[1], r.where());
    const double last_activation = text::parse_double(lw[2], r.where());

    const std::size_t count = r.count("nodes");
    const std::size_t in_len = dims * c.mfs;
    const std::size_t out_len = names.size() * c.mfs;
    std::vector<efunn::RuleNode> nodes;
    for (std::size_t i = 0; i < count; ++i) {
        const auto t = r.next("node");
        r.arity(t, 4);
        efunn::RuleNode n;
        n.age = text::parse_unsigned(t[1], r.where());
        n.activation_sum = text::parse_double(t[2], r.where());
        n.wins = text::parse_unsigned(t[3], r.where());
        const auto w1 = r.next("w1");
        n.w1 = {r.reals(std::span(w1).subspan(1), in_len), dims, c.mfs};
        const auto w2 = r.next("w2");
        n.w2 = {r.reals(std::span(w2).subspan(1), out_len), names.size(), c.mfs};
        nodes.push_back(std::move(n));
    }
    const std::size_t n3 = r.count("w3");
    if (n3 != count) r.fail("w3 size does not match node count");
    std::vector<double> w3;
    w3.reserve(n3 * n3);
    for (std::size_t i = 0; i < n3; ++i) {
        const auto row = r.reals(text::split(r.raw_line(), ' '), n3);
        w3.insert(w3.end(), row.begin(), row.end());
    }
    r.finish();
    return efunn::Model::restore(c, dims, std::move(names), std::move(norm), std::move(nodes), std::move(w3),
                                 last_winner, last_activation);
}

std::string save_mlp(const MlpClassifier& model) {
    const mlp::Config& c = model.net.config;
    Writer w;
    w.key(kMlpMagic);
    w.key("layers").num(c.layer_sizes.size());
    for (std::size_t s : c.layer_sizes) w.num(s);
    w.key("learning_rate").num(c.learning_rate);
    w.key("momentum").num(c.momentum);
    w.key("epochs").num(c.epochs);
    w.key("seed").word(std::to_string(c.seed));
    w.key("init_scale").num(c.init_scale);
    write_class_names(w, model.class_names);
    write_normalizer(w, model.normalization);
    write_matrices(w, "weights", model.net.weights);
    write_matrices(w, "prev_deltas", model.net.prev_deltas);
    return w.finish();
}

MlpClassifier load_mlp(std::string_view text) {
    Reader r(text);
    check_magic(r, kMlpMagic);
    MlpClassifier m;
    mlp::Config& c = m.net.config;
    const auto layers = r.next("layers");
    if (layers.size() < 2 || text::parse_unsigned(layers[1], r.where()) != layers.size() - 2) {
        r.fail("layers count mismatch");
    }
    for (std::size_t i = 2; i < layers.size(); ++i) c.layer_sizes.push_back(text::parse_unsigned(layers[i], r.where()));
    c.learning_rate = r.real("learning_rate");
    c.momentum = r.real("momentum");
    c.epochs = r.count("epochs");
    c.seed = text::parse_unsigned(r.word("seed"), r.where());
    c.init_scale = r.real("init_scale");
    c.validate();
    m.class_names = read_class_names(r);
    m.normalization = read_normalizer(r);
    m.net.weights = read_matrices(r, "weights");
    m.net.prev_deltas = read_matrices(r, "prev_deltas");
    r.finish();

    if (m.net.weights.size() != c.layer_sizes.size() - 1 || m.net.prev_deltas.size() != m.net.weights.size()) {
        throw ParseError("mlp model: layer count does not match weights");
    }
    for (std::size_t l = 0; l < m.net.weights.size(); ++l) {
        const auto& w = m.net.weights[l];
        if (w.rows != c.layer_sizes[l + 1] || w.cols != c.layer_sizes[l] + 1 || !(m.net.prev_deltas[l].rows == w.rows) ||
            m.net.prev_deltas[l].cols != w.cols) {
            throw ParseError("mlp model: matrix " + std::to_string(l) + " has the wrong shape");
        }
    }
    if (m.class_names.size() != c.layer_sizes.back()) throw ParseError("mlp model: class count != output size");
    if (!m.normalization.empty() && m.normalization.dims() != c.layer_sizes.front()) {
        throw ParseError("mlp model: normalization size != input size");
    }
    return m;
}

ModelKind detect_model_kind(std::string_view text) {
    const auto first = text.substr(0, text.find('\n'));
    if (first == kEfunnMagic) return ModelKind::Efunn;
    if (first == kMlpMagic) return ModelKind::Mlp;
    throw ParseError("unrecognised model file header '" + std::string(first.substr(0, 40)) + "'");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace texclass
