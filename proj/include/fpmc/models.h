#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fpmc/expression.h"
#include "fpmc/feature_model.h"
#include "fpmc/profile.h"
#include "fpmc/rational.h"

namespace fpmc {

using StateIndex = std::size_t;
using LabelSet = std::set<std::string>;

struct Transition {
    StateIndex target;
    Profile probability;
};

/// Featured discrete-time Markov chain: every transition carries a
/// probability profile, every state optionally a reward profile.
struct Fdtmc {
    DiagramPtr diagram;
    std::vector<std::string> states;
    std::vector<Rational> initial;
    std::vector<std::vector<Transition>> transitions;
    std::set<std::string> propositions;
    std::vector<LabelSet> labels;
    std::optional<std::vector<Profile>> rewards;

    std::size_t state_count() const { return states.size(); }
    std::optional<StateIndex> find_state(std::string const& name) const;
    bool has_label(StateIndex state, std::string const& proposition) const {
        return labels[state].count(proposition) != 0;
    }
};

/// Chain without transitions or labels, point mass on `initial`.
Fdtmc make_fdtmc(DiagramPtr diagram, std::vector<std::string> states, StateIndex initial = 0);

struct FmdpTransition {
    std::string action;
    /// Guard over atomic propositions of other components.
    Expr observation;
    StateIndex target;
    Profile probability;
};

/// Featured Markov decision process. Actions are base names; each
/// transition additionally carries an observation guard over foreign
/// propositions, realising actions of the form (name, observed label set).
struct Fmdp {
    DiagramPtr diagram;
    std::vector<std::string> states;
    std::vector<Rational> initial;
    std::vector<std::string> actions;
    std::vector<std::vector<FmdpTransition>> transitions;
    std::set<std::string> propositions;
    std::vector<LabelSet> labels;
    std::optional<std::vector<Profile>> rewards;

    std::size_t state_count() const { return states.size(); }
    std::optional<StateIndex> find_state(std::string const& name) const;
    /// Propositions read by observation guards.
    std::set<std::string> observed_propositions() const;
};

struct FtsTransition {
    std::string action;
    Expr observation;
    StateIndex target;
    Expr feature_guard;
};

/// Featured transition system: transitions guarded by feature expressions
/// instead of probability profiles.
struct Fts {
    DiagramPtr diagram;
    std::vector<std::string> states;
    StateIndex initial = 0;
    std::vector<std::string> actions;
    std::vector<std::vector<FtsTransition>> transitions;
    std::set<std::string> propositions;
    std::vector<LabelSet> labels;
};

/// Concrete chain (or reward model when rewards are present).
struct Dtmc {
    std::vector<std::string> states;
    std::vector<Rational> initial;
    std::vector<std::vector<std::pair<StateIndex, Rational>>> rows;
    std::set<std::string> propositions;
    std::vector<LabelSet> labels;
    std::optional<std::vector<Rational>> rewards;

    std::size_t state_count() const { return states.size(); }
};

struct Finding {
    enum class Kind { RowSum, ProbabilityBound, Initial, Reward, Structure };

    Kind kind;
    std::optional<StateIndex> state;
    std::optional<std::size_t> product;
    std::string action;
    std::string observation;
    Rational value;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const { return findings.empty(); }
    std::vector<Finding> row_sum_findings() const;
    std::string to_string() const;
};

/// Checks the probability axiom for every (state, product), bounds of all
/// profiles, the initial distribution and reward non-negativity.
ValidationReport validate_fdtmc(Fdtmc const& model);

/// Consistency: every (state, action, observation, product) row sums to 0 or 1.
ValidationReport validate_fmdp(Fmdp const& model);
bool is_complete(Fmdp const& model);

Dtmc project(Fdtmc const& model, std::size_t product);
Dtmc project(Fdtmc const& model, Product const& product);

/// Projection of an FMDP onto one product: same structure over the
/// single-product diagram with constant profiles.
Fmdp project(Fmdp const& model, Product const& product);

/// Product of the transition profiles along the path; constant 1 for
/// paths of length 0 and constant 0 if some step is not a transition.
Profile path_probability(Fdtmc const& model, std::vector<StateIndex> const& path);

/// Per-transition dense probabilities, indexed like `model.transitions`.
std::vector<std::vector<DenseProfile>> dense_transitions(Fdtmc const& model);

/// All observation valuations over the given propositions as maps,
/// in binary counting order.
std::vector<std::map<std::string, bool>> observation_valuations(std::vector<std::string> const& propositions);

}  // namespace fpmc
