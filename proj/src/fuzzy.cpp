#include "texclass/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "texclass/error.hpp"

namespace texclass::fuzzy {

MembershipPartition::MembershipPartition(std::size_t m) {
    if (m < 2) {
        throw Error("a membership partition needs at least 2 MFs, got " + std::to_string(m));
    }
    centers_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        centers_[k] = static_cast<double>(k) / static_cast<double>(m - 1);
    }
    centers_.back() = 1.0;
}

void fuzzify_scalar(double x, const MembershipPartition& p, std::span<double> out, std::size_t* clamped) {
    const auto& c = p.centers();
    const std::size_t m = c.size();
    if (!(x >= 0.0 && x <= 1.0)) {
        if (clamped) ++*clamped;
        x = std::isnan(x) ? 0.0 : std::clamp(x, 0.0, 1.0);
    }
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t k = 0;
    while (k + 2 < m && x >= c[k + 1]) {
        ++k;
    }
    if (x >= c[m - 1]) {
        out[m - 1] = 1.0;
        return;
    }
    const double left = (c[k + 1] - x) / (c[k + 1] - c[k]);
    out[k] = left;
    out[k + 1] = 1.0 - left;
}

std::vector<double> fuzzify_scalar(double x, const MembershipPartition& p, std::size_t* clamped) {
    std::vector<double> out(p.size());
    fuzzify_scalar(x, p, out, clamped);
    return out;
}

FuzzyVector fuzzify_vector(std::span<const double> x, const MembershipPartition& p, std::size_t* clamped) {
    const std::size_t m = p.size();
    FuzzyVector fv{std::vector<double>(x.size() * m), x.size(), m};
    for (std::size_t d = 0; d < x.size(); ++d) {
        fuzzify_scalar(x[d], p, std::span(fv.degrees).subspan(d * m, m), clamped);
    }
    return fv;
}

double fuzzy_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error("fuzzy_distance: shape mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
    }
    double diff = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += std::abs(a[i] - b[i]);
        total += a[i] + b[i];
    }
    if (total <= 0.0) {
        throw Error("fuzzy_distance: undefined for two all-zero vectors");
    }
    return diff / total;
}

double fuzzy_distance(const FuzzyVector& a, const FuzzyVector& b) {
    return fuzzy_distance(std::span<const double>(a.degrees), std::span<const double>(b.degrees));
}

ClassDecision defuzzify_class(std::span<const double> out, std::size_t classes, const MembershipPartition& p) {
    if (classes < 2) {
        throw Error("defuzzify_class: need at least 2 classes");
    }
    ClassDecision d{0, std::vector<double>(classes, 0.0)};
    if (out.size() == classes) {
        std::copy(out.begin(), out.end(), d.scores.begin());
    } else if (out.size() == classes * p.size()) {
        const std::size_t m = p.size();
        for (std::size_t c = 0; c < classes; ++c) {
            for (std::size_t k = 0; k < m; ++k) {
                d.scores[c] += out[c * m + k] * p.centers()[k];
            }
        }
    } else {
        throw Error("defuzzify_class: output length " + std::to_string(out.size()) + " fits neither " +
                    std::to_string(classes) + " nor " + std::to_string(classes * p.size()));
    }
    if (std::all_of(d.scores.begin(), d.scores.end(), [](double s) { return s == 0.0; })) {
        throw Error("defuzzify_class: all class scores are zero (untrained model?)");
    }
    for (std::size_t c = 1; c < classes; ++c) {
        if (d.scores[c] > d.scores[d.index]) {
            d.index = c;
        }
    }
    return d;
}

}  // namespace texclass::fuzzy
