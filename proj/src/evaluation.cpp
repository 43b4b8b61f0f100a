#include "texclass/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "texclass/error.hpp"

namespace texclass {

std::string format_percent(double percent) {
    char buf[32];
    const double hundredths = percent * 100.0;
    if (std::abs(hundredths - std::round(hundredths)) < 1e-6) {
        std::snprintf(buf, sizeof buf, "%.2f", percent);
        std::string s = buf;
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
        return s;
    }
    std::snprintf(buf, sizeof buf, "%.1f", percent);
    return buf;
}

double EvaluationReport::reliability() const {
    if (total() == 0) throw Error("evaluation: empty report");
    return 100.0 * static_cast<double>(total_correct) / static_cast<double>(total());
}

long EvaluationReport::rounded_reliability() const { return std::lround(reliability()); }

std::string EvaluationReport::reliability_text() const { return format_percent(reliability()); }

std::string EvaluationReport::table() const {
    std::size_t width = 5;
    for (const auto& c : classes) width = std::max(width, c.name.size() + std::to_string(c.correct + c.incorrect).size() + 3);
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %8s %10s\n", static_cast<int>(width), "class", "correct", "incorrect");
    out << line;
    for (const auto& c : classes) {
        const std::string label = c.name + " (" + std::to_string(c.correct + c.incorrect) + ")";
        std::snprintf(line, sizeof line, "%-*s %8zu %10zu\n", static_cast<int>(width), label.c_str(), c.correct,
                      c.incorrect);
        out << line;
    }
    const std::string total_label = "total (" + std::to_string(total()) + ")";
    std::snprintf(line, sizeof line, "%-*s %8zu %10zu\n", static_cast<int>(width), total_label.c_str(),
                  total_correct, total_incorrect);
    out << line;
    out << "reliability " << reliability_text() << " % (" << rounded_reliability() << " %)\n";
    return out.str();
}

std::string EvaluationReport::csv() const {
    std::ostringstream out;
    out << "class,correct,incorrect\n";
    for (const auto& c : classes) out << c.name << ',' << c.correct << ',' << c.incorrect << '\n';
    out << "total," << total_correct << ',' << total_incorrect << '\n';
    out << "reliability," << reliability_text() << ',' << rounded_reliability() << '\n';
    return out.str();
}

EvaluationReport make_report(std::vector<std::string> class_names, std::span<const std::size_t> truth,
                             std::span<const std::size_t> predicted) {
    if (truth.size() != predicted.size()) throw Error("evaluation: truth and predictions differ in length");
    if (truth.empty()) throw Error("evaluation: empty test set");
    EvaluationReport r;
    for (auto& name : class_names) r.classes.push_back({std::move(name), 0, 0});
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= r.classes.size()) throw Error("evaluation: label out of range");
        if (truth[i] == predicted[i]) {
            ++r.classes[truth[i]].correct;
            ++r.total_correct;
        } else {
            ++r.classes[truth[i]].incorrect;
            ++r.total_incorrect;
        }
    }
    return r;
}

EvaluationReport evaluate(const PredictFn& predict, const Dataset& test) {
    if (test.empty()) throw Error("evaluation: empty test set");
    std::vector<std::size_t> truth, predicted;
    for (const Sample& s : test.items) {
        truth.push_back(s.label);
        predicted.push_back(predict(s.features));
    }
    return make_report(test.class_names, truth, predicted);
}

}  // namespace texclass
