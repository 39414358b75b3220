#include "fpmc/expression.h"

#include "fpmc/errors.h"
#include "fpmc/lexer.h"

namespace fpmc {

struct Expr::Node {
    Kind kind = Kind::Constant;
    bool value = true;
    std::string name;
    Expr left;
    Expr right;
};

namespace {

int precedence(Expr::Kind kind) {
    switch (kind) {
        case Expr::Kind::Implies:
            return 1;
        case Expr::Kind::Or:
            return 2;
        case Expr::Kind::Xor:
            return 3;
        case Expr::Kind::And:
            return 4;
        case Expr::Kind::Not:
            return 5;
        default:
            return 6;
    }
}

char const* symbol(Expr::Kind kind) {
    switch (kind) {
        case Expr::Kind::Implies:
            return " => ";
        case Expr::Kind::Or:
            return " | ";
        case Expr::Kind::Xor:
            return " ^ ";
        case Expr::Kind::And:
            return " & ";
        default:
            return "";
    }
}

}  // namespace

Expr::Expr() : Expr(constant(true)) {}

Expr::Expr(std::shared_ptr<Node const> node) : node_(std::move(node)) {}

Expr Expr::constant(bool value) {
    static auto const t = std::make_shared<Node const>(Node{Kind::Constant, true, {}, Expr(nullptr), Expr(nullptr)});
    static auto const f = std::make_shared<Node const>(Node{Kind::Constant, false, {}, Expr(nullptr), Expr(nullptr)});
    return Expr(value ? t : f);
}

Expr Expr::variable(std::string name) {
    return Expr(std::make_shared<Node const>(Node{Kind::Variable, false, std::move(name), Expr(nullptr), Expr(nullptr)}));
}

Expr Expr::negate(Expr operand) {
    return Expr(std::make_shared<Node const>(Node{Kind::Not, false, {}, std::move(operand), Expr(nullptr)}));
}

Expr Expr::conj(Expr left, Expr right) {
    return Expr(std::make_shared<Node const>(Node{Kind::And, false, {}, std::move(left), std::move(right)}));
}

Expr Expr::disj(Expr left, Expr right) {
    return Expr(std::make_shared<Node const>(Node{Kind::Or, false, {}, std::move(left), std::move(right)}));
}

Expr Expr::implies(Expr left, Expr right) {
    return Expr(std::make_shared<Node const>(Node{Kind::Implies, false, {}, std::move(left), std::move(right)}));
}

Expr Expr::exclusive_or(Expr left, Expr right) {
    return Expr(std::make_shared<Node const>(Node{Kind::Xor, false, {}, std::move(left), std::move(right)}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
bool Expr::constant_value() const { return node_->value; }
std::string const& Expr::name() const { return node_->name; }
Expr const& Expr::left() const { return node_->left; }
Expr const& Expr::right() const { return node_->right; }

bool Expr::evaluate(std::function<std::optional<bool>(std::string const&)> const& lookup) const {
    switch (kind()) {
        case Kind::Constant:
            return constant_value();
        case Kind::Variable: {
            auto const value = lookup(name());
            if (!value) {
                throw ModelError("unbound variable '" + name() + "'");
            }
            return *value;
        }
        case Kind::Not:
            return !left().evaluate(lookup);
        case Kind::And:
            return left().evaluate(lookup) && right().evaluate(lookup);
        case Kind::Or:
            return left().evaluate(lookup) || right().evaluate(lookup);
        case Kind::Implies:
            return !left().evaluate(lookup) || right().evaluate(lookup);
        case Kind::Xor:
            return left().evaluate(lookup) != right().evaluate(lookup);
    }
    return false;
}

std::set<std::string> Expr::variables() const {
    std::set<std::string> result;
    std::function<void(Expr const&)> walk = [&](Expr const& e) {
        switch (e.kind()) {
            case Kind::Constant:
                return;
            case Kind::Variable:
                result.insert(e.name());
                return;
            case Kind::Not:
                walk(e.left());
                return;
            default:
                walk(e.left());
                walk(e.right());
        }
    };
    walk(*this);
    return result;
}

Expr Expr::substitute(std::map<std::string, bool> const& values) const {
    switch (kind()) {
        case Kind::Constant:
            return *this;
        case Kind::Variable: {
            auto const it = values.find(name());
            return it == values.end() ? *this : constant(it->second);
        }
        case Kind::Not: {
            Expr const operand = left().substitute(values);
            if (operand.kind() == Kind::Constant) {
                return constant(!operand.constant_value());
            }
            return operand.node_ == left().node_ ? *this : negate(operand);
        }
        default:
            break;
    }
    Expr const a = left().substitute(values);
    Expr const b = right().substitute(values);
    bool const ca = a.kind() == Kind::Constant;
    bool const cb = b.kind() == Kind::Constant;
    switch (kind()) {
        case Kind::And:
            if ((ca && !a.constant_value()) || (cb && !b.constant_value())) return constant(false);
            if (ca) return b;
            if (cb) return a;
            return conj(a, b);
        case Kind::Or:
            if ((ca && a.constant_value()) || (cb && b.constant_value())) return constant(true);
            if (ca) return b;
            if (cb) return a;
            return disj(a, b);
        case Kind::Implies:
            if ((ca && !a.constant_value()) || (cb && b.constant_value())) return constant(true);
            if (ca) return b;
            if (cb) return negate(a).simplified();
            return implies(a, b);
        case Kind::Xor:
            if (ca && cb) return constant(a.constant_value() != b.constant_value());
            if (ca) return a.constant_value() ? negate(b).simplified() : b;
            if (cb) return b.constant_value() ? negate(a).simplified() : a;
            return exclusive_or(a, b);
        default:
            return *this;
    }
}

Expr Expr::simplified() const { return substitute({}); }

Expr Expr::rename(std::map<std::string, Expr> const& replacement) const {
    switch (kind()) {
        case Kind::Constant:
            return *this;
        case Kind::Variable: {
            auto const it = replacement.find(name());
            return it == replacement.end() ? *this : it->second;
        }
        case Kind::Not:
            return negate(left().rename(replacement));
        case Kind::And:
            return conj(left().rename(replacement), right().rename(replacement));
        case Kind::Or:
            return disj(left().rename(replacement), right().rename(replacement));
        case Kind::Implies:
            return implies(left().rename(replacement), right().rename(replacement));
        case Kind::Xor:
            return exclusive_or(left().rename(replacement), right().rename(replacement));
    }
    return *this;
}

std::string Expr::to_string() const {
    switch (kind()) {
        case Kind::Constant:
            return constant_value() ? "true" : "false";
        case Kind::Variable:
            return name();
        case Kind::Not: {
            std::string inner = left().to_string();
            if (precedence(left().kind()) < precedence(Kind::Not)) {
                inner = "(" + inner + ")";
            }
            return "!" + inner;
        }
        default:
            break;
    }
    int const own = precedence(kind());
    bool const right_assoc = kind() == Kind::Implies;
    std::string a = left().to_string();
    std::string b = right().to_string();
    int const pa = precedence(left().kind());
    int const pb = precedence(right().kind());
    if (right_assoc ? pa <= own : pa < own) a = "(" + a + ")";
    if (right_assoc ? pb < own : pb <= own) b = "(" + b + ")";
    return a + symbol(kind()) + b;
}

bool operator==(Expr const& a, Expr const& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Expr::Kind::Constant:
            return a.constant_value() == b.constant_value();
        case Expr::Kind::Variable:
            return a.name() == b.name();
        case Expr::Kind::Not:
            return a.left() == b.left();
        default:
            return a.left() == b.left() && a.right() == b.right();
    }
}

namespace {

// Precedence, loosest first: '=>' (right associative), '|', '^', '&', '!'.
Expr parse_implication(TokenStream& ts);

Expr parse_primary(TokenStream& ts) {
    Token const& token = ts.peek();
    if (token.is_symbol("!")) {
        ts.next();
        return Expr::negate(parse_primary(ts));
    }
    if (token.is_symbol("(")) {
        ts.next();
        Expr inner = parse_implication(ts);
        ts.expect_symbol(")");
        return inner;
    }
    if (token.kind == Token::Kind::Identifier) {
        ts.next();
        if (token.text == "true") return Expr::constant(true);
        if (token.text == "false") return Expr::constant(false);
        return Expr::variable(token.text);
    }
    ts.fail("expected expression but found " + describe(token));
}

Expr parse_and(TokenStream& ts) {
    Expr result = parse_primary(ts);
    while (ts.accept_symbol("&")) {
        result = Expr::conj(result, parse_primary(ts));
    }
    return result;
}

Expr parse_xor(TokenStream& ts) {
    Expr result = parse_and(ts);
    while (ts.accept_symbol("^")) {
        result = Expr::exclusive_or(result, parse_and(ts));
    }
    return result;
}

Expr parse_or(TokenStream& ts) {
    Expr result = parse_xor(ts);
    while (ts.accept_symbol("|")) {
        result = Expr::disj(result, parse_xor(ts));
    }
    return result;
}

Expr parse_implication(TokenStream& ts) {
    Expr left = parse_or(ts);
    if (ts.accept_symbol("=>")) {
        return Expr::implies(left, parse_implication(ts));
    }
    return left;
}

}  // namespace

Expr parse_expression(TokenStream& tokens) { return parse_implication(tokens); }

Expr parse_expression(std::string_view text) {
    TokenStream ts(tokenize(text), true);
    Expr result = parse_implication(ts);
    if (!ts.at_end()) {
        ts.fail("unexpected " + describe(ts.peek()));
    }
    return result;
}

MaskExpr::MaskExpr(Expr const& expr, std::function<std::optional<unsigned>(std::string const&)> const& index_of) {
    root_ = build(expr, index_of);
}

std::int32_t MaskExpr::build(Expr const& expr,
                             std::function<std::optional<unsigned>(std::string const&)> const& index_of) {
    Node node{expr.kind()};
    switch (expr.kind()) {
        case Expr::Kind::Constant:
            node.value = expr.constant_value();
            break;
        case Expr::Kind::Variable: {
            auto const bit = index_of(expr.name());
            if (!bit) {
                throw ModelError("unbound variable '" + expr.name() + "'");
            }
            node.bit = *bit;
            break;
        }
        case Expr::Kind::Not:
            node.left = build(expr.left(), index_of);
            break;
        default:
            node.left = build(expr.left(), index_of);
            node.right = build(expr.right(), index_of);
    }
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
}

bool MaskExpr::eval(std::int32_t index, std::uint64_t mask) const {
    Node const& node = nodes_[static_cast<std::size_t>(index)];
    switch (node.kind) {
        case Expr::Kind::Constant:
            return node.value;
        case Expr::Kind::Variable:
            return (mask >> node.bit) & 1U;
        case Expr::Kind::Not:
            return !eval(node.left, mask);
        case Expr::Kind::And:
            return eval(node.left, mask) && eval(node.right, mask);
        case Expr::Kind::Or:
            return eval(node.left, mask) || eval(node.right, mask);
        case Expr::Kind::Implies:
            return !eval(node.left, mask) || eval(node.right, mask);
        case Expr::Kind::Xor:
            return eval(node.left, mask) != eval(node.right, mask);
    }
    return false;
}

}  // namespace fpmc
