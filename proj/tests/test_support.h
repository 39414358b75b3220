#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fpmc/models.h"
#include "fpmc/pctl.h"

namespace fpmc::support {

using Rng = std::mt19937_64;

/// Canonical p/q.
Rational ratio(long numerator, long denominator);

std::string models_dir();
std::string model_path(std::string const& name);

/// Random guard over the signature: a literal, a conjunction or a disjunction of two literals.
Expr random_guard(Rng& rng, std::vector<std::string> const& signature);

/// Random guarded profile whose values lie in {0, step, 2 step, ..., max}.
Profile random_profile(Rng& rng, DiagramPtr const& diagram, Rational const& step, unsigned max_steps);

/// Random stochastic rows: each state gets 1-3 targets, the last one takes
/// the remaining mass, so every row sums to 1 under every product.
struct RandomChainOptions {
    unsigned max_states = 8;
    unsigned max_features = 4;
    std::vector<std::string> propositions = {"a", "b"};
    bool rewards = false;
};
Fdtmc random_fdtmc(Rng& rng, RandomChainOptions const& options = {});

/// Random state formula over the propositions, without probability operators.
Formula random_state_formula(Rng& rng, std::vector<std::string> const& propositions, int depth = 1);
/// P=? over Next, bounded or unbounded Until.
Property random_query(Rng& rng, std::vector<std::string> const& propositions);

/// Complete FMDP over its own features and propositions. Transitions of
/// `actions` may read the `observed` propositions through observation guards.
struct RandomFmdpOptions {
    std::vector<std::string> features;
    std::vector<std::string> propositions;
    std::vector<std::string> actions = {"tick"};
    std::vector<std::string> observed;
    std::string prefix = "s";
    unsigned max_states = 3;
};
Fmdp random_fmdp(Rng& rng, RandomFmdpOptions const& options);

/// Oracle: first-match evaluation of a profile at a product, written
/// against the guard expressions directly.
Rational oracle_eval(Profile const& profile, Product const& product);

/// Oracle: per-state values of a P=? query on one projected chain by plain
/// value iteration (bounded/next exact, unbounded until to 1e-12).
std::vector<double> oracle_probabilities(Dtmc const& chain, PathFormula const& path);

/// Canonical text of a single-product FMDP: one line per
/// (state, action, observation valuation, target, probability).
std::map<std::string, Rational> canonical_rows(Fmdp const& model);

/// Compares the projection of the composite onto every valid product with
/// the composition of the projected components (unpruned, row by row).
/// Returns a description of the first mismatch, or an empty string.
std::string projection_mismatch(Fmdp const& first, Fmdp const& second, bool observer);

}  // namespace fpmc::support
