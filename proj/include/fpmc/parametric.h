#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpmc/family_result.h"
#include "fpmc/models.h"
#include "fpmc/pctl.h"
#include "fpmc/polynomial.h"

namespace fpmc {

/// Per-state 0/1 satisfaction, indexed [state][product].
using SatisfactionTable = std::vector<std::vector<char>>;

/// Probability of `goal` via `path` states from the initial distribution,
/// as one rational function over the features, by state elimination.
RationalFunction eliminate_reachability(Fdtmc const& model, SatisfactionTable const& path,
                                        SatisfactionTable const& goal);
RationalFunction eliminate_reachability(Fdtmc const& model, std::vector<char> const& target);

/// Expected accumulated reward until `target`. Throws ModelError listing
/// the products that miss the target with positive probability.
RationalFunction eliminate_expected_reward(Fdtmc const& model, SatisfactionTable const& target);
RationalFunction eliminate_expected_reward(Fdtmc const& model, std::vector<char> const& target);

struct ParametricResult {
    FamilyResult family;
    /// Closed form of the root value (absent for Boolean roots).
    std::optional<RationalFunction> function;
};

/// One symbolic computation, then one evaluation per product. Products at
/// which the denominator vanishes are rechecked by projection.
ParametricResult check_family_parametric(Fdtmc const& model, Property const& property);

/// Text form of the function over the diagram. When the diagram has at most
/// 20 features the function is first replaced by the multilinear polynomial
/// that agrees with it on every valid product (zero elsewhere) and printed
/// integer-scaled over a common integer denominator.
std::string emit_expression(RationalFunction const& function, FeatureDiagram const& diagram,
                            std::vector<Rational> const* product_values = nullptr);

}  // namespace fpmc
