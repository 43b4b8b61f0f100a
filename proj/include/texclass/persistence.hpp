#pragma once

// Line-oriented text model files. Every line is "<key> <values...>"
// separated by single spaces; reals use the shortest round-trip form, so
// load(save(m)) == m bit for bit.
//
// EFuNN ("texclass-efunn 1"):
//   input_dims, class_names <k> <names...>, the config fields in
//   declaration order (sthr errthr lr1 lr2 lr3 m_best ss tc max_nodes mfs
//   activation age_thr act_thr thr1 thr2), normalization <d> followed by d
//   "<min> <max>" lines, last_winner <index|none> <activation>,
//   nodes <n> followed by n triples of lines
//   "node <age> <activation_sum> <wins>", "w1 <values>", "w2 <values>",
//   then w3 <n> followed by n row lines.
//
// MLP ("texclass-mlp 1"):
//   layers <count> <sizes...>, learning_rate, momentum, epochs, seed,
//   init_scale, class_names, normalization (as above), then
//   weights <L> and prev_deltas <L>, each followed by L blocks of
//   "matrix <rows> <cols>" and one line per row.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "texclass/efunn.hpp"
#include "texclass/mlp.hpp"
#include "texclass/normalizer.hpp"

namespace texclass {

struct MlpClassifier {
    mlp::Model net;
    Normalizer normalization;
    std::vector<std::string> class_names;

    std::size_t classify(std::span<const double> raw) const;
    bool operator==(const MlpClassifier&) const = default;
};

enum class ModelKind { Efunn, Mlp };

std::string save_efunn(const efunn::Model& model);
efunn::Model load_efunn(std::string_view text);
std::string save_mlp(const MlpClassifier& model);
MlpClassifier load_mlp(std::string_view text);

/// Reads the magic line of a model file.
ModelKind detect_model_kind(std::string_view text);

std::string read_text(const std::filesystem::path& path);

}  // namespace texclass
