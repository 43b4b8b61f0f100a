#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace texclass::fuzzy {

// m triangular MFs with evenly spaced centers over [0, 1]; neighbouring
// triangles overlap so the degrees at any x sum to one.
class MembershipPartition {
public:
    explicit MembershipPartition(std::size_t m);

    std::size_t size() const { return centers_.size(); }
    const std::vector<double>& centers() const { return centers_; }
    bool operator==(const MembershipPartition&) const = default;

private:
    std::vector<double> centers_;
};

struct FuzzyVector {
    std::vector<double> degrees;  // dims segments of m degrees each
    std::size_t dims = 0;
    std::size_t m = 0;

    std::span<const double> segment(std::size_t dim) const {
        return std::span(degrees).subspan(dim * m, m);
    }
    bool operator==(const FuzzyVector&) const = default;
};

/// Writes m degrees for x into out. x outside [0, 1] is clamped and, when
/// `clamped` is given, counted there.
void fuzzify_scalar(double x, const MembershipPartition& p, std::span<double> out, std::size_t* clamped = nullptr);
std::vector<double> fuzzify_scalar(double x, const MembershipPartition& p, std::size_t* clamped = nullptr);

FuzzyVector fuzzify_vector(std::span<const double> x, const MembershipPartition& p, std::size_t* clamped = nullptr);

/// Normalised fuzzy difference sum|a - b| / sum(a + b), in [0, 1] for
/// non-negative inputs. Throws if the shapes differ or both are all zero.
double fuzzy_distance(std::span<const double> a, std::span<const double> b);
double fuzzy_distance(const FuzzyVector& a, const FuzzyVector& b);

struct ClassDecision {
    std::size_t index = 0;
    std::vector<double> scores;
};

/// Picks a class from an output activation vector laid out either as k
/// crisp scores or as k segments of p.size() MF activations. Segment scores
/// weight each activation by its MF center. Ties go to the lowest index;
/// all-zero scores throw.
ClassDecision defuzzify_class(std::span<const double> out, std::size_t classes, const MembershipPartition& p);

}  // namespace texclass::fuzzy
