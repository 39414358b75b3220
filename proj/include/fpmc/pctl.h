#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fpmc/rational.h"

namespace fpmc {

class TokenStream;

/// Probability interval J ⊆ [0,1] with open or closed ends.
struct Interval {
    Rational lower = 0;
    Rational upper = 1;
    bool lower_open = false;
    bool upper_open = false;

    bool contains(Rational const& value) const;
    /// Numeric containment with a relative slack, for float results.
    bool contains(double value, double tolerance) const;
    bool empty() const;
    std::string to_string() const;

    friend bool operator==(Interval const& a, Interval const& b) {
        return a.lower == b.lower && a.upper == b.upper && a.lower_open == b.lower_open &&
               a.upper_open == b.upper_open;
    }
};

struct StateFormula;
struct PathFormula;
using Formula = std::shared_ptr<StateFormula const>;
using PathPtr = std::shared_ptr<PathFormula const>;

struct PathFormula {
    enum class Kind { Next, Until };

    Kind kind;
    Formula left;   // Until only
    Formula right;  // operand of Next, goal of Until
    /// Step bound of Until; nullopt is unbounded.
    std::optional<std::uint64_t> bound;
};

struct StateFormula {
    enum class Kind { True, Atom, Not, And, Probability };

    Kind kind;
    std::string atom;
    Formula left;   // operand of Not, left of And
    Formula right;  // right of And
    PathPtr path;
    Interval interval;
    /// Probability operator asking for the value (P=?) instead of a decision.
    bool quantitative = false;
};

Formula formula_true();
Formula formula_false();
Formula formula_atom(std::string name);
Formula formula_not(Formula operand);
Formula formula_and(Formula left, Formula right);
/// Sugar for !(!left & !right).
Formula formula_or(Formula left, Formula right);
Formula formula_probability(Interval interval, PathPtr path);
Formula formula_query(PathPtr path);

PathPtr path_next(Formula operand);
PathPtr path_until(Formula left, Formula right, std::optional<std::uint64_t> bound = std::nullopt);
/// true U goal.
PathPtr path_eventually(Formula goal, std::optional<std::uint64_t> bound = std::nullopt);

/// A parsed property: either a state formula or an expected-reward query
/// (accumulated state reward until a target state is first reached).
struct Property {
    enum class Kind { State, Reward };

    Kind kind = Kind::State;
    /// The state formula, or the reward target.
    Formula formula;

    bool is_reward() const { return kind == Kind::Reward; }
    /// True for P=? and reward queries.
    bool quantitative() const;
};

Property parse_property(std::string_view text);
Formula parse_state_formula(std::string_view text);
Property parse_property(TokenStream& tokens);

std::string to_string(Formula const& formula);
std::string to_string(PathFormula const& path);
std::string to_string(Property const& property);

bool equal(Formula const& a, Formula const& b);
bool equal(PathFormula const& a, PathFormula const& b);
bool equal(Property const& a, Property const& b);

/// State subformulae in topological order (children first, left before
/// right); path formulae are represented by their probability operator.
std::vector<Formula> parse_tree(Formula const& formula);

std::set<std::string> atoms(Formula const& formula);

/// Throws ModelError naming the first proposition not in `propositions`.
void check_propositions(Property const& property, std::set<std::string> const& propositions);

}  // namespace fpmc
