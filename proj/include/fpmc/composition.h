#pragma once

#include <string>

#include "fpmc/models.h"

namespace fpmc {

struct CompositionOptions {
    /// Drop composite states that no valid product can reach.
    bool prune = true;
};

/// Composite state names join the component names with a comma.
std::string composite_name(std::string const& first, std::string const& second);

/// Single-action view of a chain; every transition is unguarded.
Fmdp fdtmc_as_fmdp(Fdtmc const& model, std::string const& action = "tick");

/// Synchronous product: shared actions move both components jointly,
/// private actions interleave. Observation guards are resolved against the
/// partner's current labels; residual guards are kept.
Fmdp sync_product(Fmdp const& first, Fmdp const& second, CompositionOptions const& options = {});

/// Observer product: the observer (single action, complete, guards over the
/// observed component's propositions) reacts to the observed component's
/// next state in the same step.
Fmdp observer_product(Fmdp const& observed, Fmdp const& observer, CompositionOptions const& options = {});

/// Profiles become indicators of the feature guards.
Fmdp fts_to_fmdp(Fts const& fts);

/// Adds self-loops for every (state, action, observation, product) without
/// an enabled transition. Raises ModelError if two transitions are enabled
/// at once.
Fmdp complete_deterministic(Fmdp const& model);

/// Completes every (state, action, observation) row to 1 with self-loops;
/// raises ModelError naming the products under which a row exceeds 1.
Fmdp complete_with_self_loops(Fmdp const& model);

/// Requires exactly one action and observation guards that fold to true;
/// parallel transitions are merged.
Fdtmc as_fdtmc(Fmdp const& model);

/// Keeps states reachable under at least one valid product.
Fmdp prune_unreachable(Fmdp const& model);

}  // namespace fpmc
