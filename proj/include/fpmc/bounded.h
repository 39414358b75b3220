#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fpmc/family_result.h"
#include "fpmc/models.h"
#include "fpmc/pctl.h"

namespace fpmc {

struct BoundedOptions {
    /// Residual stopping rule: stop once every undecided mass is below epsilon.
    double epsilon = 1e-3;
    /// Fixed number of breadth-first rounds instead of the residual rule.
    std::optional<std::uint64_t> depth;
    std::uint64_t max_depth = 100000;
    /// Skip states with no successor changed in the previous round.
    bool frontier = true;
    /// Rerun undecided threshold checks once at epsilon / 10.
    bool deepen = true;
    /// Minimal increase accepted by a floating-point update.
    double tolerance = 1e-12;
};

/// Per-state, per-product values, indexed [state][product].
template <typename Scalar>
using ProfileTable = std::vector<std::vector<Scalar>>;

/// Three-valued satisfaction: 0 false, 1 true, 2 undecided.
using TriTable = std::vector<std::vector<char>>;

template <typename Scalar>
struct Approximation {
    ProfileTable<Scalar> lower;
    /// Mass of paths still inside Φ1 ∧ ¬Φ2 that can still reach Φ2.
    ProfileTable<Scalar> undecided;
    std::uint64_t depth = 0;
};

/// Feature-aware bounded search over dense product-indexed profiles. One
/// exploration computes the values of every valid product at once.
template <typename Scalar>
class BoundedEngine {
public:
    using Observer = std::function<void(Approximation<Scalar> const&)>;

    BoundedEngine(Fdtmc const& model, BoundedOptions options = {});

    /// Satisfaction of every subformula computed bottom-up over the parse tree.
    TriTable satisfaction(Formula const& formula);

    ProfileTable<Scalar> next_profiles(Formula const& operand);
    ProfileTable<Scalar> bounded_until_profiles(Formula const& left, Formula const& right, std::uint64_t steps);

    /// Lower approximation of Φ1 U Φ2 with its undecided mass. Stops after
    /// `options.depth` rounds if set, else when all undecided mass is below
    /// `epsilon`. `observer` sees the state after every round (and round 0).
    Approximation<Scalar> until_lower_approx(Formula const& left, Formula const& right, double epsilon,
                                             Observer const& observer = {});

    /// Expected accumulated reward until `target`: lower and upper bounds per
    /// product, weighted by the initial distribution; nullopt = infinite.
    std::vector<std::optional<std::pair<Scalar, Scalar>>> expected_reward(Formula const& target, double epsilon);

    std::size_t products() const { return products_; }

private:
    struct Step {
        StateIndex target;
        std::vector<Scalar> probability;
    };

    std::vector<std::vector<char>> definite(Formula const& formula);
    std::vector<std::vector<char>> can_reach(std::vector<std::vector<char>> const& path,
                                             std::vector<std::vector<char>> const& goal) const;
    Approximation<Scalar> iterate(std::vector<std::vector<char>> const& path, std::vector<std::vector<char>> const& goal,
                                  std::optional<std::uint64_t> rounds, double epsilon, bool track_undecided,
                                  Observer const& observer);
    TriTable threshold(PathFormula const& path, Interval const& interval, bool quantitative);

    Fdtmc const& model_;
    BoundedOptions options_;
    std::size_t products_;
    std::vector<std::vector<Step>> steps_;
    std::vector<std::vector<StateIndex>> predecessors_;
};

extern template class BoundedEngine<double>;
extern template class BoundedEngine<Rational>;

/// Classification of the interval [lower, upper] against J.
Verdict classify(Interval const& interval, Rational const& lower, Rational const& upper);

FamilyResult check_family_bounded(Fdtmc const& model, Property const& property, BoundedOptions const& options = {});
/// Same computation in exact rational arithmetic.
FamilyResult check_family_bounded_exact(Fdtmc const& model, Property const& property,
                                        BoundedOptions const& options = {});

}  // namespace fpmc
