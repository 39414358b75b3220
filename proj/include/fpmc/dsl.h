#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpmc/expression.h"
#include "fpmc/models.h"
#include "fpmc/pctl.h"
#include "fpmc/rational.h"

namespace fpmc {

struct FeatureDecl {
    enum class Kind { Features, Xor, Or, Mandatory, Constraint };

    Kind kind = Kind::Features;
    std::vector<std::string> names;
    Expr constraint;

    friend bool operator==(FeatureDecl const& a, FeatureDecl const& b) {
        return a.kind == b.kind && a.names == b.names && a.constraint == b.constraint;
    }
};

/// Guarded cases with an optional default (missing default is 0).
struct ProfileAst {
    std::vector<ProfileCase> cases;
    std::optional<Rational> default_value;

    friend bool operator==(ProfileAst const& a, ProfileAst const& b) {
        return a.cases == b.cases && a.default_value == b.default_value;
    }
};

struct TransitionAst {
    std::string source;
    std::string target;
    /// fmdp/fts only; empty means the component's single action.
    std::string action;
    std::optional<Expr> observation;
    /// fdtmc/fmdp probability.
    ProfileAst probability;
    /// fts feature guard.
    std::optional<Expr> feature_guard;
    std::size_t line = 0;

    friend bool operator==(TransitionAst const& a, TransitionAst const& b) {
        return a.source == b.source && a.target == b.target && a.action == b.action &&
               a.observation == b.observation && a.probability == b.probability &&
               a.feature_guard == b.feature_guard;
    }
};

struct ComponentAst {
    enum class Kind { Fdtmc, Fmdp, Fts };

    Kind kind = Kind::Fdtmc;
    std::string name;
    std::vector<std::string> states;
    std::vector<std::pair<std::string, Rational>> initial;
    std::vector<std::string> actions;
    std::vector<std::string> propositions;
    std::vector<std::pair<std::string, std::vector<std::string>>> labels;
    std::vector<TransitionAst> transitions;
    std::vector<std::pair<std::string, ProfileAst>> rewards;
    std::size_t line = 0;

    friend bool operator==(ComponentAst const& a, ComponentAst const& b) {
        return a.kind == b.kind && a.name == b.name && a.states == b.states && a.initial == b.initial &&
               a.actions == b.actions && a.propositions == b.propositions && a.labels == b.labels &&
               a.transitions == b.transitions && a.rewards == b.rewards;
    }
};

struct SystemExpr {
    enum class Kind { Component, Sync, Observe };

    Kind kind = Kind::Component;
    std::string name;
    std::shared_ptr<SystemExpr const> left;
    std::shared_ptr<SystemExpr const> right;
};

bool operator==(SystemExpr const& a, SystemExpr const& b);

struct PropertyDecl {
    std::string name;
    Property property;

    friend bool operator==(PropertyDecl const& a, PropertyDecl const& b) {
        return a.name == b.name && equal(a.property, b.property);
    }
};

/// Parsed model file, before any semantic processing.
struct ModelFile {
    std::vector<FeatureDecl> features;
    std::vector<ComponentAst> components;
    std::optional<SystemExpr> system;
    std::vector<PropertyDecl> properties;

    friend bool operator==(ModelFile const& a, ModelFile const& b) {
        return a.features == b.features && a.components == b.components && a.system == b.system &&
               a.properties == b.properties;
    }
};

ModelFile parse_model_file(std::string_view text);
std::string print_model_file(ModelFile const& file);

/// Feature diagram of the file. Aliases (the first member of a two-member
/// xor stands for the negation of the second) are returned for renaming.
DiagramPtr build_diagram(ModelFile const& file, std::map<std::string, Expr>* aliases = nullptr);

struct BuiltModel {
    Fdtmc chain;
    std::map<std::string, Property> properties;
    /// Property names in declaration order.
    std::vector<std::string> property_order;
};

/// Builds every component, completes implicit self-loops, composes the
/// system expression and validates the result.
BuiltModel build_model(ModelFile const& file);

BuiltModel load_model(std::string_view text);
BuiltModel load_model_file(std::string const& path);
std::string read_file(std::string const& path);

}  // namespace fpmc
