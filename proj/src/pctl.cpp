#include "fpmc/pctl.h"

#include <cmath>
#include <functional>

#include "fpmc/errors.h"
#include "fpmc/lexer.h"

namespace fpmc {

bool Interval::contains(Rational const& value) const {
    bool above = lower_open ? value > lower : value >= lower;
    bool below = upper_open ? value < upper : value <= upper;
    return above && below;
}

bool Interval::contains(double value, double tolerance) const {
    double lo = to_double(lower);
    double hi = to_double(upper);
    bool above = lower_open ? value > lo - tolerance : value >= lo - tolerance;
    bool below = upper_open ? value < hi + tolerance : value <= hi + tolerance;
    return above && below;
}

bool Interval::empty() const {
    if (lower > upper) {
        return true;
    }
    return lower == upper && (lower_open || upper_open);
}

std::string Interval::to_string() const {
    bool from_zero = lower == 0 && !lower_open;
    bool to_one = upper == 1 && !upper_open;
    if (from_zero && to_one) {
        return ">=0";
    }
    if (from_zero) {
        return (upper_open ? "<" : "<=") + fpmc::to_string(upper);
    }
    if (to_one) {
        return (lower_open ? ">" : ">=") + fpmc::to_string(lower);
    }
    if (!lower_open && !upper_open) {
        return fpmc::to_string(lower) + "," + fpmc::to_string(upper);
    }
    return (lower_open ? ">" : ">=") + fpmc::to_string(lower) + "," + (upper_open ? "<" : "<=") +
           fpmc::to_string(upper);
}

namespace {

Formula make(StateFormula node) { return std::make_shared<StateFormula const>(std::move(node)); }

bool is_reserved(std::string const& name) {
    return name == "X" || name == "F" || name == "U" || name == "P" || name == "R" || name == "true" ||
           name == "false";
}

class PropertyParser {
public:
    explicit PropertyParser(TokenStream& tokens) : tokens_(tokens) {}

    Property parse() {
        Property property;
        if (tokens_.peek().is_keyword("R")) {
            property.kind = Property::Kind::Reward;
            property.formula = reward();
        } else {
            property.formula = state();
            if (!queries_.empty()) {
                bool root_query = property.formula->kind == StateFormula::Kind::Probability &&
                                  property.formula->quantitative;
                if (!root_query || queries_.size() > 1) {
                    tokens_.fail(root_query ? queries_[1] : queries_[0],
                                 "only the outermost operator may ask for a value");
                }
            }
        }
        return property;
    }

private:
    Formula reward() {
        tokens_.next();
        if (tokens_.accept_symbol("=")) {
            tokens_.expect_symbol("?");
        }
        std::string close = open_bracket();
        if (!tokens_.accept_keyword("F")) {
            tokens_.fail("expected 'F' in reward query");
        }
        Formula target = state();
        tokens_.expect_symbol(close);
        return target;
    }

    std::string open_bracket() {
        if (tokens_.accept_symbol("(")) {
            return ")";
        }
        tokens_.expect_symbol("[");
        return "]";
    }

    Formula state() {
        Formula left = conjunction();
        while (tokens_.accept_symbol("|")) {
            left = formula_or(left, conjunction());
        }
        return left;
    }

    Formula conjunction() {
        Formula left = unary();
        while (tokens_.accept_symbol("&")) {
            left = formula_and(left, unary());
        }
        return left;
    }

    Formula unary() {
        if (tokens_.accept_symbol("!")) {
            return formula_not(unary());
        }
        return primary();
    }

    Formula primary() {
        Token const& token = tokens_.peek();
        if (tokens_.accept_symbol("(")) {
            Formula inner = state();
            tokens_.expect_symbol(")");
            return inner;
        }
        if (token.kind != Token::Kind::Identifier) {
            tokens_.fail("expected a state formula, found " + describe(token));
        }
        if (token.text == "true" || token.text == "false") {
            bool value = token.text == "true";
            tokens_.next();
            return value ? formula_true() : formula_false();
        }
        if (token.text == "P") {
            return probability();
        }
        if (token.text == "R") {
            tokens_.fail("reward queries cannot be nested");
        }
        if (is_reserved(token.text)) {
            tokens_.fail("'" + token.text + "' is reserved and cannot name a proposition");
        }
        return formula_atom(tokens_.next().text);
    }

    Formula probability() {
        Token start = tokens_.next();
        bool query = false;
        Interval interval;
        if (tokens_.accept_symbol("=")) {
            tokens_.expect_symbol("?");
            query = true;
            queries_.push_back(start);
        } else {
            tokens_.expect_symbol("[");
            interval = parse_interval();
            tokens_.expect_symbol("]");
        }
        std::string close = open_bracket();
        PathPtr path = path_formula();
        tokens_.expect_symbol(close);
        return query ? formula_query(path) : formula_probability(interval, path);
    }

    PathPtr path_formula() {
        if (tokens_.accept_keyword("X")) {
            return path_next(unary());
        }
        if (tokens_.accept_keyword("F")) {
            auto bound = step_bound();
            return path_eventually(unary(), bound);
        }
        Formula left = unary();
        if (!tokens_.accept_keyword("U")) {
            tokens_.fail("expected 'U', 'X' or 'F' in path formula, found " + describe(tokens_.peek()));
        }
        auto bound = step_bound();
        return path_until(left, unary(), bound);
    }

    std::optional<std::uint64_t> step_bound() {
        if (!tokens_.accept_symbol("<=")) {
            return std::nullopt;
        }
        Token const& token = tokens_.peek();
        if (token.kind != Token::Kind::Number) {
            tokens_.fail("expected a step bound");
        }
        for (char c : token.text) {
            if (c < '0' || c > '9') {
                tokens_.fail("step bound must be a non-negative integer");
            }
        }
        try {
            return std::stoull(tokens_.next().text);
        } catch (std::out_of_range const&) {
            tokens_.fail(token, "step bound is too large");
        }
    }

    Rational probability_value() {
        Token const& token = tokens_.peek();
        if (token.kind != Token::Kind::Number) {
            tokens_.fail("expected a probability bound, found " + describe(token));
        }
        Token first = tokens_.next();
        std::string text = first.text;
        if (tokens_.accept_symbol("/")) {
            Token const& den = tokens_.peek();
            if (den.kind != Token::Kind::Number) {
                tokens_.fail("expected a denominator");
            }
            text += "/" + tokens_.next().text;
        }
        Rational value;
        try {
            value = parse_rational(text);
        } catch (ParseError const& e) {
            tokens_.fail(first, e.detail());
        }
        if (value < 0 || value > 1) {
            tokens_.fail(first, "probability bound " + text + " is outside [0,1]");
        }
        return value;
    }

    Interval parse_interval() {
        Token start = tokens_.peek();
        Interval interval;
        if (start.kind == Token::Kind::Number) {
            interval.lower = probability_value();
            tokens_.expect_symbol(",");
            interval.upper = probability_value();
        } else {
            do {
                Token const& op = tokens_.peek();
                if (op.kind != Token::Kind::Symbol) {
                    tokens_.fail("expected a comparison, found " + describe(op));
                }
                std::string symbol = tokens_.next().text;
                if (symbol == "<" || symbol == "<=") {
                    interval.upper = probability_value();
                    interval.upper_open = symbol == "<";
                } else if (symbol == ">" || symbol == ">=") {
                    interval.lower = probability_value();
                    interval.lower_open = symbol == ">";
                } else if (symbol == "=") {
                    interval.lower = interval.upper = probability_value();
                    interval.lower_open = interval.upper_open = false;
                } else {
                    tokens_.fail("expected a comparison, found '" + symbol + "'");
                }
            } while (tokens_.accept_symbol(","));
        }
        if (interval.empty()) {
            tokens_.fail(start, "empty probability interval");
        }
        return interval;
    }

    TokenStream& tokens_;
    std::vector<Token> queries_;
};

std::string state_string(Formula const& f);

std::string bound_suffix(std::optional<std::uint64_t> const& bound) {
    return bound ? "<=" + std::to_string(*bound) : "";
}

bool is_disjunction(StateFormula const& f) {
    return f.kind == StateFormula::Kind::Not && f.left->kind == StateFormula::Kind::And &&
           f.left->left->kind == StateFormula::Kind::Not && f.left->right->kind == StateFormula::Kind::Not;
}

std::string state_string(Formula const& f) {
    switch (f->kind) {
        case StateFormula::Kind::True:
            return "true";
        case StateFormula::Kind::Atom:
            return f->atom;
        case StateFormula::Kind::Not:
            if (f->left->kind == StateFormula::Kind::True) {
                return "false";
            }
            if (is_disjunction(*f)) {
                return "(" + state_string(f->left->left->left) + " | " + state_string(f->left->right->left) + ")";
            }
            return "!" + state_string(f->left);
        case StateFormula::Kind::And:
            return "(" + state_string(f->left) + " & " + state_string(f->right) + ")";
        case StateFormula::Kind::Probability: {
            std::string head = f->quantitative ? "P=?" : "P[" + f->interval.to_string() + "]";
            return head + "(" + to_string(*f->path) + ")";
        }
    }
    return "";
}

}  // namespace

Formula formula_true() { return make({StateFormula::Kind::True, "", nullptr, nullptr, nullptr, {}, false}); }

Formula formula_false() { return formula_not(formula_true()); }

Formula formula_atom(std::string name) {
    return make({StateFormula::Kind::Atom, std::move(name), nullptr, nullptr, nullptr, {}, false});
}

Formula formula_not(Formula operand) {
    return make({StateFormula::Kind::Not, "", std::move(operand), nullptr, nullptr, {}, false});
}

Formula formula_and(Formula left, Formula right) {
    return make({StateFormula::Kind::And, "", std::move(left), std::move(right), nullptr, {}, false});
}

Formula formula_or(Formula left, Formula right) {
    return formula_not(formula_and(formula_not(std::move(left)), formula_not(std::move(right))));
}

Formula formula_probability(Interval interval, PathPtr path) {
    if (interval.lower < 0 || interval.upper > 1 || interval.empty()) {
        throw ModelError("probability interval " + interval.to_string() + " is not a nonempty subset of [0,1]");
    }
    return make({StateFormula::Kind::Probability, "", nullptr, nullptr, std::move(path), interval, false});
}

Formula formula_query(PathPtr path) {
    return make({StateFormula::Kind::Probability, "", nullptr, nullptr, std::move(path), {}, true});
}

PathPtr path_next(Formula operand) {
    return std::make_shared<PathFormula const>(PathFormula{PathFormula::Kind::Next, nullptr, std::move(operand), {}});
}

PathPtr path_until(Formula left, Formula right, std::optional<std::uint64_t> bound) {
    return std::make_shared<PathFormula const>(
        PathFormula{PathFormula::Kind::Until, std::move(left), std::move(right), bound});
}

PathPtr path_eventually(Formula goal, std::optional<std::uint64_t> bound) {
    return path_until(formula_true(), std::move(goal), bound);
}

bool Property::quantitative() const {
    return kind == Kind::Reward || (formula->kind == StateFormula::Kind::Probability && formula->quantitative);
}

Property parse_property(TokenStream& tokens) { return PropertyParser(tokens).parse(); }

Property parse_property(std::string_view text) {
    TokenStream tokens(tokenize(text), true);
    Property property = parse_property(tokens);
    if (!tokens.at_end()) {
        tokens.fail("unexpected " + describe(tokens.peek()) + " after the property");
    }
    return property;
}

Formula parse_state_formula(std::string_view text) {
    Property property = parse_property(text);
    if (property.is_reward()) {
        throw ParseError("expected a state formula, found a reward query", 0, 1);
    }
    return property.formula;
}

std::string to_string(PathFormula const& path) {
    if (path.kind == PathFormula::Kind::Next) {
        return "X " + state_string(path.right);
    }
    if (path.left->kind == StateFormula::Kind::True) {
        return "F" + bound_suffix(path.bound) + " " + state_string(path.right);
    }
    return state_string(path.left) + " U" + bound_suffix(path.bound) + " " + state_string(path.right);
}

std::string to_string(Formula const& formula) { return state_string(formula); }

std::string to_string(Property const& property) {
    if (property.is_reward()) {
        return "R=?[F " + state_string(property.formula) + "]";
    }
    return state_string(property.formula);
}

bool equal(Formula const& a, Formula const& b) {
    if (a == b) {
        return true;
    }
    if (!a || !b || a->kind != b->kind) {
        return false;
    }
    switch (a->kind) {
        case StateFormula::Kind::True:
            return true;
        case StateFormula::Kind::Atom:
            return a->atom == b->atom;
        case StateFormula::Kind::Not:
            return equal(a->left, b->left);
        case StateFormula::Kind::And:
            return equal(a->left, b->left) && equal(a->right, b->right);
        case StateFormula::Kind::Probability:
            return a->quantitative == b->quantitative && (a->quantitative || a->interval == b->interval) &&
                   equal(*a->path, *b->path);
    }
    return false;
}

bool equal(PathFormula const& a, PathFormula const& b) {
    if (a.kind != b.kind || a.bound != b.bound || !equal(a.right, b.right)) {
        return false;
    }
    return a.kind == PathFormula::Kind::Next || equal(a.left, b.left);
}

bool equal(Property const& a, Property const& b) { return a.kind == b.kind && equal(a.formula, b.formula); }

std::vector<Formula> parse_tree(Formula const& formula) {
    std::vector<Formula> order;
    std::function<void(Formula const&)> visit = [&](Formula const& f) {
        switch (f->kind) {
            case StateFormula::Kind::True:
            case StateFormula::Kind::Atom:
                break;
            case StateFormula::Kind::Not:
                visit(f->left);
                break;
            case StateFormula::Kind::And:
                visit(f->left);
                visit(f->right);
                break;
            case StateFormula::Kind::Probability:
                if (f->path->left) {
                    visit(f->path->left);
                }
                visit(f->path->right);
                break;
        }
        order.push_back(f);
    };
    visit(formula);
    return order;
}

std::set<std::string> atoms(Formula const& formula) {
    std::set<std::string> result;
    for (auto const& f : parse_tree(formula)) {
        if (f->kind == StateFormula::Kind::Atom) {
            result.insert(f->atom);
        }
    }
    return result;
}

void check_propositions(Property const& property, std::set<std::string> const& propositions) {
    for (auto const& a : atoms(property.formula)) {
        if (!propositions.count(a)) {
            throw ModelError("proposition '" + a + "' is not declared by the model");
        }
    }
}

}  // namespace fpmc
