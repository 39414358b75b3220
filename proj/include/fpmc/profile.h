#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpmc/errors.h"
#include "fpmc/expression.h"
#include "fpmc/feature_model.h"
#include "fpmc/rational.h"

namespace fpmc {

struct ProfileCase {
    Expr guard;
    Rational value;

    friend bool operator==(ProfileCase const& a, ProfileCase const& b) {
        return a.guard == b.guard && a.value == b.value;
    }
};

/// A total function from the valid products of a diagram to rationals,
/// written as guarded cases with first-match semantics and a default.
///
/// Profiles carry every kind of variability in the models: transition
/// probabilities, state rewards and 0/1 satisfaction indicators.
class Profile {
public:
    Profile(DiagramPtr diagram, Rational constant);
    Profile(DiagramPtr diagram, std::vector<ProfileCase> cases, Rational default_value);

    DiagramPtr const& diagram() const { return diagram_; }
    std::vector<ProfileCase> const& cases() const { return cases_; }
    Rational const& default_value() const { return default_; }
    bool is_constant() const { return cases_.empty(); }

    /// Value at the product with the given canonical index.
    Rational eval(std::size_t product) const;

    /// Same profile over another diagram whose signature contains every
    /// feature this profile mentions (e.g. a conjoined diagram).
    Profile rehome(DiagramPtr diagram) const;

    /// Removes unreachable cases and merges neighbours; pointwise equal.
    Profile compacted() const;

    std::string to_string() const;

    friend bool operator==(Profile const& a, Profile const& b) {
        return same_diagram(*a.diagram_, *b.diagram_) && a.cases_ == b.cases_ && a.default_ == b.default_;
    }

private:
    DiagramPtr diagram_;
    std::vector<ProfileCase> cases_;
    Rational default_;
};

/// Profile evaluated at every valid product, indexed canonically.
template <typename T>
struct BasicDenseProfile {
    DiagramPtr diagram;
    std::vector<T> values;

    BasicDenseProfile() = default;
    BasicDenseProfile(DiagramPtr d, T fill) : diagram(std::move(d)), values(diagram->product_count(), fill) {}
    BasicDenseProfile(DiagramPtr d, std::vector<T> v) : diagram(std::move(d)), values(std::move(v)) {
        if (values.size() != diagram->product_count()) {
            throw ModelError("dense profile length does not match the product count");
        }
    }

    std::size_t size() const { return values.size(); }
    T const& operator[](std::size_t i) const { return values[i]; }
    T& operator[](std::size_t i) { return values[i]; }

    friend bool operator==(BasicDenseProfile const& a, BasicDenseProfile const& b) { return a.values == b.values; }
};

using DenseProfile = BasicDenseProfile<Rational>;

/// Throws ModelError if the product is not valid for the profile's diagram.
Rational eval_profile(Profile const& profile, Product const& product);

Profile constant_profile(DiagramPtr diagram, Rational value);
/// 1 on products satisfying `expr`, 0 elsewhere.
Profile indicator(Expr const& expr, DiagramPtr diagram);

Profile mul(Profile const& a, Profile const& b);
Profile add(Profile const& a, Profile const& b);
Profile sub(Profile const& a, Profile const& b);
Profile complement(Profile const& a);
Profile scale(Profile const& a, Rational const& factor);
Profile pointwise_max(Profile const& a, Profile const& b);

/// True iff some valid product has a(p) > b(p) + tolerance.
bool exceeds(Profile const& a, Profile const& b, Rational const& tolerance);

bool pointwise_equal(Profile const& a, Profile const& b);
/// True iff the profile is zero on every valid product.
bool is_zero(Profile const& a);

DenseProfile to_dense(Profile const& profile);
/// Requires the profile's own diagram to match `diagram` by signature.
DenseProfile to_dense(Profile const& profile, DiagramPtr const& diagram);
/// One minterm guard per product that differs from the most frequent value.
Profile from_dense(DenseProfile const& dense);

/// Case values or default outside [0,1], as human-readable findings.
std::vector<std::string> probability_bound_violations(Profile const& profile);

/// Minterm expression selecting exactly the given product.
Expr product_minterm(FeatureDiagram const& diagram, std::uint64_t mask);

template <typename T, typename Op>
BasicDenseProfile<T> pointwise(BasicDenseProfile<T> const& a, BasicDenseProfile<T> const& b, Op op) {
    if (a.values.size() != b.values.size()) {
        throw ModelError("dense profiles over different diagrams");
    }
    BasicDenseProfile<T> result = a;
    for (std::size_t i = 0; i < result.values.size(); ++i) {
        result.values[i] = op(a.values[i], b.values[i]);
    }
    return result;
}

}  // namespace fpmc
