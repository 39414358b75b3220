#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fpmc {

class TokenStream;

/// Immutable Boolean expression over named variables. Used both for feature
/// expressions (variables are features) and for observation guards
/// (variables are atomic propositions of a partner component).
class Expr {
public:
    enum class Kind { Constant, Variable, Not, And, Or, Implies, Xor };

    Expr();  // constant true

    static Expr constant(bool value);
    static Expr variable(std::string name);
    static Expr negate(Expr operand);
    static Expr conj(Expr left, Expr right);
    static Expr disj(Expr left, Expr right);
    static Expr implies(Expr left, Expr right);
    static Expr exclusive_or(Expr left, Expr right);

    Kind kind() const;
    bool constant_value() const;
    std::string const& name() const;
    Expr const& left() const;
    Expr const& right() const;

    bool is_true() const { return kind() == Kind::Constant && constant_value(); }
    bool is_false() const { return kind() == Kind::Constant && !constant_value(); }

    /// `lookup` returns nullopt for unbound names, which raises ModelError.
    bool evaluate(std::function<std::optional<bool>(std::string const&)> const& lookup) const;

    std::set<std::string> variables() const;

    /// Replaces the given variables by constants and folds the result.
    /// Variables absent from `values` stay symbolic.
    Expr substitute(std::map<std::string, bool> const& values) const;

    /// Constant folding only; the result is equivalent to *this.
    Expr simplified() const;

    /// Renames variables; names missing from the map are kept.
    Expr rename(std::map<std::string, Expr> const& replacement) const;

    std::string to_string() const;

    friend bool operator==(Expr const& a, Expr const& b);
    friend bool operator!=(Expr const& a, Expr const& b) { return !(a == b); }

private:
    struct Node;
    explicit Expr(std::shared_ptr<Node const> node);
    std::shared_ptr<Node const> node_;
};

Expr parse_expression(std::string_view text);

/// Parses an expression from an embedding grammar; stops at the first token
/// that cannot continue the expression.
Expr parse_expression(TokenStream& tokens);

/// Expression compiled against a fixed variable numbering, evaluated on a
/// bitmask assignment (bit i = variable i).
class MaskExpr {
public:
    MaskExpr() = default;
    MaskExpr(Expr const& expr, std::function<std::optional<unsigned>(std::string const&)> const& index_of);

    bool operator()(std::uint64_t mask) const { return nodes_.empty() ? true : eval(root_, mask); }

private:
    struct Node {
        Expr::Kind kind;
        bool value = false;
        unsigned bit = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };
    std::int32_t build(Expr const& expr, std::function<std::optional<unsigned>(std::string const&)> const& index_of);
    bool eval(std::int32_t node, std::uint64_t mask) const;

    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace fpmc
