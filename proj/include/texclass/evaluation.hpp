#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "texclass/dataset.hpp"

namespace texclass {

struct ClassTally {
    std::string name;
    std::size_t correct = 0;
    std::size_t incorrect = 0;
};

struct EvaluationReport {
    std::vector<ClassTally> classes;
    std::size_t total_correct = 0;    // X
    std::size_t total_incorrect = 0;  // Y

    std::size_t total() const { return total_correct + total_incorrect; }
    /// 100 * X / (X + Y)
    double reliability() const;
    /// Nearest integer percent, halves rounded up (87.5 -> 88).
    long rounded_reliability() const;
    /// Exact when two decimals suffice (87.5, 81.25), otherwise one decimal (85.4).
    std::string reliability_text() const;

    std::string table() const;
    std::string csv() const;
};

EvaluationReport make_report(std::vector<std::string> class_names, std::span<const std::size_t> truth,
                             std::span<const std::size_t> predicted);

using PredictFn = std::function<std::size_t(std::span<const double>)>;
EvaluationReport evaluate(const PredictFn& predict, const Dataset& test);

/// Formats a percentage the way reliability_text does.
std::string format_percent(double percent);

}  // namespace texclass
