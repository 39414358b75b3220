#include "fpmc/dsl.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fpmc/composition.h"
#include "fpmc/errors.h"
#include "fpmc/lexer.h"

namespace fpmc {

bool operator==(SystemExpr const& a, SystemExpr const& b) {
    if (a.kind != b.kind || a.name != b.name) {
        return false;
    }
    if (a.kind == SystemExpr::Kind::Component) {
        return true;
    }
    return *a.left == *b.left && *a.right == *b.right;
}

namespace {

// ---------------------------------------------------------------- parsing

class FileParser {
public:
    explicit FileParser(std::string_view text) : tokens_(tokenize(text), false) {}

    ModelFile parse() {
        ModelFile file;
        while (!tokens_.at_end()) {
            Token const& head = tokens_.peek();
            if (head.is_keyword("features") || head.is_keyword("xor") || head.is_keyword("or") ||
                head.is_keyword("mandatory") || head.is_keyword("constraint")) {
                file.features.push_back(feature_decl());
            } else if (head.is_keyword("fdtmc") || head.is_keyword("fmdp") || head.is_keyword("fts")) {
                file.components.push_back(component());
            } else if (head.is_keyword("system")) {
                if (file.system) {
                    tokens_.fail("duplicate system declaration");
                }
                tokens_.next();
                tokens_.expect_symbol("=");
                file.system = system_expr();
                tokens_.expect_symbol(";");
            } else if (head.is_keyword("property")) {
                file.properties.push_back(property_decl());
            } else {
                tokens_.fail("expected a declaration, found " + describe(head));
            }
        }
        return file;
    }

private:
    std::vector<std::string> identifiers_until_semicolon(std::string const& what) {
        std::vector<std::string> names;
        while (!tokens_.accept_symbol(";")) {
            names.push_back(tokens_.expect_identifier(what).text);
        }
        return names;
    }

    FeatureDecl feature_decl() {
        Token head = tokens_.next();
        FeatureDecl decl;
        if (head.text == "constraint") {
            decl.kind = FeatureDecl::Kind::Constraint;
            decl.constraint = parse_expression(tokens_);
            tokens_.expect_symbol(";");
            return decl;
        }
        decl.kind = head.text == "features"    ? FeatureDecl::Kind::Features
                    : head.text == "xor"       ? FeatureDecl::Kind::Xor
                    : head.text == "or"        ? FeatureDecl::Kind::Or
                                               : FeatureDecl::Kind::Mandatory;
        decl.names = identifiers_until_semicolon("a feature name");
        if (decl.names.empty() && decl.kind != FeatureDecl::Kind::Features) {
            tokens_.fail(head, "'" + head.text + "' needs at least one feature");
        }
        if (decl.kind == FeatureDecl::Kind::Xor && decl.names.size() < 2) {
            tokens_.fail(head, "'xor' needs at least two features");
        }
        return decl;
    }

    Rational number() {
        Token const& token = tokens_.peek();
        if (token.kind != Token::Kind::Number) {
            tokens_.fail("expected a number, found " + describe(token));
        }
        Token first = tokens_.next();
        std::string text = first.text;
        if (tokens_.accept_symbol("/")) {
            if (tokens_.peek().kind != Token::Kind::Number) {
                tokens_.fail("expected a denominator");
            }
            text += "/" + tokens_.next().text;
        }
        try {
            return parse_rational(text);
        } catch (ParseError const& e) {
            tokens_.fail(first, e.detail());
        }
    }

    ProfileAst profile() {
        ProfileAst p;
        do {
            if (p.default_value) {
                tokens_.fail("the unguarded default must be the last case");
            }
            if (tokens_.accept_symbol("[")) {
                Expr guard = parse_expression(tokens_);
                tokens_.expect_symbol("]");
                p.cases.push_back({guard, number()});
            } else {
                p.default_value = number();
            }
        } while (tokens_.accept_symbol(","));
        return p;
    }

    ComponentAst component() {
        Token head = tokens_.next();
        ComponentAst c;
        c.kind = head.text == "fdtmc" ? ComponentAst::Kind::Fdtmc
                 : head.text == "fmdp" ? ComponentAst::Kind::Fmdp
                                       : ComponentAst::Kind::Fts;
        c.line = head.line;
        c.name = tokens_.expect_identifier("a component name").text;
        tokens_.expect_symbol("{");
        while (!tokens_.accept_symbol("}")) {
            Token const& first = tokens_.peek();
            if (first.kind != Token::Kind::Identifier) {
                tokens_.fail("expected a statement, found " + describe(first));
            }
            Token const& second = tokens_.peek(1);
            if (second.is_symbol("->") || second.is_symbol("-")) {
                c.transitions.push_back(transition(c.kind));
                continue;
            }
            std::string keyword = tokens_.next().text;
            if (keyword == "states") {
                auto names = identifiers_until_semicolon("a state name");
                c.states.insert(c.states.end(), names.begin(), names.end());
            } else if (keyword == "init") {
                do {
                    std::string state = tokens_.expect_identifier("a state name").text;
                    Rational weight = 1;
                    if (tokens_.accept_symbol("[")) {
                        weight = number();
                        tokens_.expect_symbol("]");
                    }
                    c.initial.emplace_back(state, weight);
                } while (tokens_.accept_symbol(","));
                tokens_.expect_symbol(";");
            } else if (keyword == "action" || keyword == "actions") {
                if (c.kind == ComponentAst::Kind::Fdtmc) {
                    tokens_.fail(first, "chains have no actions");
                }
                auto names = identifiers_until_semicolon("an action name");
                c.actions.insert(c.actions.end(), names.begin(), names.end());
            } else if (keyword == "props") {
                auto names = identifiers_until_semicolon("a proposition");
                c.propositions.insert(c.propositions.end(), names.begin(), names.end());
            } else if (keyword == "label") {
                std::string state = tokens_.expect_identifier("a state name").text;
                tokens_.expect_symbol(":");
                c.labels.emplace_back(state, identifiers_until_semicolon("a proposition"));
            } else if (keyword == "reward") {
                if (c.kind == ComponentAst::Kind::Fts) {
                    tokens_.fail(first, "transition systems carry no rewards");
                }
                std::string state = tokens_.expect_identifier("a state name").text;
                tokens_.expect_symbol(":");
                c.rewards.emplace_back(state, profile());
                tokens_.expect_symbol(";");
            } else {
                tokens_.fail(first, "unknown statement '" + keyword + "'");
            }
        }
        return c;
    }

    TransitionAst transition(ComponentAst::Kind kind) {
        TransitionAst t;
        Token const& source = tokens_.next();
        t.source = source.text;
        t.line = source.line;
        if (!tokens_.accept_symbol("->")) {
            Token dash = tokens_.expect_symbol("-");
            if (kind == ComponentAst::Kind::Fdtmc) {
                tokens_.fail(dash, "chain transitions are written 's -> t'");
            }
            tokens_.expect_symbol("(");
            bool observation_only = tokens_.peek().is_keyword("obs") && tokens_.peek(1).is_symbol(":");
            if (!observation_only) {
                t.action = tokens_.expect_identifier("an action name").text;
            }
            if (observation_only || tokens_.accept_symbol("|")) {
                tokens_.expect_keyword("obs");
                tokens_.expect_symbol(":");
                t.observation = parse_expression(tokens_);
            }
            tokens_.expect_symbol(")");
            tokens_.expect_symbol("->");
        }
        t.target = tokens_.expect_identifier("a target state").text;
        if (kind == ComponentAst::Kind::Fts) {
            if (tokens_.accept_symbol(":")) {
                t.feature_guard = parse_expression(tokens_);
            }
        } else {
            tokens_.expect_symbol(":");
            t.probability = profile();
        }
        tokens_.expect_symbol(";");
        return t;
    }

    SystemExpr system_expr() {
        SystemExpr left = system_sync();
        while (tokens_.accept_symbol("|>")) {
            SystemExpr node;
            node.kind = SystemExpr::Kind::Observe;
            node.left = std::make_shared<SystemExpr const>(std::move(left));
            node.right = std::make_shared<SystemExpr const>(system_sync());
            left = std::move(node);
        }
        return left;
    }

    SystemExpr system_sync() {
        SystemExpr left = system_primary();
        while (tokens_.accept_symbol("||")) {
            SystemExpr node;
            node.kind = SystemExpr::Kind::Sync;
            node.left = std::make_shared<SystemExpr const>(std::move(left));
            node.right = std::make_shared<SystemExpr const>(system_primary());
            left = std::move(node);
        }
        return left;
    }

    SystemExpr system_primary() {
        if (tokens_.accept_symbol("(")) {
            SystemExpr inner = system_expr();
            tokens_.expect_symbol(")");
            return inner;
        }
        SystemExpr node;
        node.name = tokens_.expect_identifier("a component name").text;
        return node;
    }

    PropertyDecl property_decl() {
        tokens_.next();
        PropertyDecl decl;
        decl.name = tokens_.expect_identifier("a property name").text;
        tokens_.expect_symbol("=");
        Token const& text = tokens_.peek();
        if (text.kind != Token::Kind::String) {
            tokens_.fail("expected a quoted property, found " + describe(text));
        }
        try {
            decl.property = parse_property(text.text);
        } catch (ParseError const& e) {
            throw ParseError(e.detail(), text.line, text.column + e.column());
        }
        tokens_.next();
        tokens_.expect_symbol(";");
        return decl;
    }

    TokenStream tokens_;
};

// --------------------------------------------------------------- printing

std::string join(std::vector<std::string> const& names, std::string const& separator = " ") {
    std::string out;
    for (auto const& n : names) {
        out += (out.empty() ? "" : separator) + n;
    }
    return out;
}

std::string print_profile(ProfileAst const& p) {
    std::vector<std::string> items;
    for (auto const& c : p.cases) {
        items.push_back("[" + c.guard.to_string() + "] " + to_string(c.value));
    }
    if (p.default_value) {
        items.push_back(to_string(*p.default_value));
    }
    return join(items, ", ");
}

std::string print_system(SystemExpr const& e, bool nested) {
    if (e.kind == SystemExpr::Kind::Component) {
        return e.name;
    }
    std::string op = e.kind == SystemExpr::Kind::Sync ? " || " : " |> ";
    std::string text = print_system(*e.left, true) + op + print_system(*e.right, true);
    return nested ? "(" + text + ")" : text;
}

std::string quote(std::string const& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

// --------------------------------------------------------------- building

class Builder {
public:
    Builder(ModelFile const& file) : file_(file) { diagram_ = build_diagram(file, &aliases_); }

    BuiltModel build() {
        std::map<std::string, Fmdp> components;
        for (auto const& c : file_.components) {
            if (components.count(c.name)) {
                fail(c.line, "duplicate component '" + c.name + "'");
            }
            components.emplace(c.name, component(c));
        }
        Fmdp system;
        if (file_.system) {
            system = compose(*file_.system, components);
        } else if (file_.components.size() == 1) {
            system = components.begin()->second;
        } else {
            throw ModelError(file_.components.empty() ? "the model declares no component"
                                                      : "several components but no system declaration");
        }
        BuiltModel built;
        built.chain = as_fdtmc(system);
        ValidationReport report = validate_fdtmc(built.chain);
        if (!report.ok()) {
            throw ModelError("the model violates the probability axioms:\n" + report.to_string());
        }
        for (auto const& decl : file_.properties) {
            if (built.properties.count(decl.name)) {
                throw ModelError("duplicate property '" + decl.name + "'");
            }
            check_propositions(decl.property, built.chain.propositions);
            built.properties.emplace(decl.name, decl.property);
            built.property_order.push_back(decl.name);
        }
        return built;
    }

private:
    [[noreturn]] void fail(std::size_t line, std::string const& message) const {
        throw ModelError("line " + std::to_string(line) + ": " + message);
    }

    Expr features(Expr const& e) const { return aliases_.empty() ? e : e.rename(aliases_); }

    Profile profile(ProfileAst const& ast, std::size_t line) const {
        std::vector<ProfileCase> cases;
        for (auto const& c : ast.cases) {
            cases.push_back({features(c.guard), c.value});
        }
        try {
            return Profile(diagram_, cases, ast.default_value.value_or(Rational(0))).compacted();
        } catch (ModelError const& e) {
            fail(line, e.what());
        }
    }

    Fmdp component(ComponentAst const& c) {
        Fmdp m;
        m.diagram = diagram_;
        std::map<std::string, StateIndex> index;
        for (auto const& s : c.states) {
            if (index.count(s)) {
                fail(c.line, "duplicate state '" + s + "' in '" + c.name + "'");
            }
            index.emplace(s, m.states.size());
            m.states.push_back(s);
        }
        if (m.states.empty()) {
            fail(c.line, "component '" + c.name + "' declares no states");
        }
        auto state = [&](std::string const& name, std::size_t line) {
            auto it = index.find(name);
            if (it == index.end()) {
                fail(line, "unknown state '" + name + "' in '" + c.name + "'");
            }
            return it->second;
        };
        m.initial.assign(m.states.size(), Rational(0));
        if (c.initial.empty()) {
            fail(c.line, "component '" + c.name + "' has no init statement");
        }
        for (auto const& [name, weight] : c.initial) {
            m.initial[state(name, c.line)] += weight;
        }
        m.labels.resize(m.states.size());
        m.propositions.insert(c.propositions.begin(), c.propositions.end());
        for (auto const& [name, props] : c.labels) {
            StateIndex s = state(name, c.line);
            for (auto const& p : props) {
                m.labels[s].insert(p);
                m.propositions.insert(p);
            }
        }
        if (!c.rewards.empty()) {
            m.rewards.emplace(m.states.size(), constant_profile(diagram_, 0));
            for (auto const& [name, p] : c.rewards) {
                (*m.rewards)[state(name, c.line)] = profile(p, c.line);
            }
        }
        m.actions = c.actions;
        if (c.kind == ComponentAst::Kind::Fdtmc) {
            m.actions = {"tick"};
        } else if (m.actions.empty()) {
            fail(c.line, "component '" + c.name + "' declares no action");
        }
        m.transitions.resize(m.states.size());
        for (auto const& t : c.transitions) {
            StateIndex source = state(t.source, t.line);
            StateIndex target = state(t.target, t.line);
            std::string action = t.action;
            if (action.empty()) {
                if (m.actions.size() != 1) {
                    fail(t.line, "the transition must name one of the actions of '" + c.name + "'");
                }
                action = m.actions.front();
            } else if (std::find(m.actions.begin(), m.actions.end(), action) == m.actions.end()) {
                fail(t.line, "undeclared action '" + action + "'");
            }
            Expr observation = t.observation.value_or(Expr::constant(true));
            Profile probability = c.kind == ComponentAst::Kind::Fts
                                      ? fts_guard(t.feature_guard.value_or(Expr::constant(true)), t.line)
                                      : profile(t.probability, t.line);
            m.transitions[source].push_back({action, observation, target, probability});
        }
        try {
            switch (c.kind) {
                case ComponentAst::Kind::Fdtmc:
                    return complete_chain(m, c);
                case ComponentAst::Kind::Fmdp:
                    return complete_with_self_loops(m);
                case ComponentAst::Kind::Fts: {
                    std::size_t initial_states = 0;
                    for (auto const& w : m.initial) {
                        initial_states += w != 0;
                    }
                    if (initial_states != 1) {
                        fail(c.line, "a transition system has exactly one initial state");
                    }
                    return complete_deterministic(m);
                }
            }
        } catch (ModelError const& e) {
            throw ModelError("component '" + c.name + "': " + e.what());
        }
        return m;
    }

    Profile fts_guard(Expr const& guard, std::size_t line) const {
        try {
            return indicator(features(guard), diagram_);
        } catch (ModelError const& e) {
            fail(line, e.what());
        }
    }

    // Missing mass of every state becomes a self-loop.
    Fmdp complete_chain(Fmdp m, ComponentAst const& c) const {
        for (StateIndex s = 0; s < m.states.size(); ++s) {
            DenseProfile sum(diagram_, Rational(0));
            for (auto const& t : m.transitions[s]) {
                DenseProfile d = to_dense(t.probability, diagram_);
                for (std::size_t p = 0; p < sum.size(); ++p) {
                    sum[p] += d[p];
                }
            }
            std::string excess;
            DenseProfile missing(diagram_, Rational(0));
            bool any = false;
            for (std::size_t p = 0; p < sum.size(); ++p) {
                missing[p] = 1 - sum[p];
                if (missing[p] < 0) {
                    excess += (excess.empty() ? "" : ", ") + diagram_->product(p).to_string() + " (" +
                              to_string(sum[p]) + ")";
                }
                any = any || missing[p] != 0;
            }
            if (!excess.empty()) {
                fail(c.line, "outgoing probability of state '" + m.states[s] + "' exceeds 1 under " + excess);
            }
            if (!any) {
                continue;
            }
            Profile loop = from_dense(missing);
            bool merged = false;
            for (auto& t : m.transitions[s]) {
                if (t.target == s) {
                    t.probability = add(t.probability, loop);
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                m.transitions[s].push_back({"tick", Expr::constant(true), s, loop});
            }
        }
        return m;
    }

    Fmdp compose(SystemExpr const& e, std::map<std::string, Fmdp> const& components) const {
        if (e.kind == SystemExpr::Kind::Component) {
            auto it = components.find(e.name);
            if (it == components.end()) {
                throw ModelError("the system refers to unknown component '" + e.name + "'");
            }
            return it->second;
        }
        Fmdp left = compose(*e.left, components);
        Fmdp right = compose(*e.right, components);
        return e.kind == SystemExpr::Kind::Sync ? sync_product(left, right) : observer_product(left, right);
    }

    ModelFile const& file_;
    DiagramPtr diagram_;
    std::map<std::string, Expr> aliases_;
};

}  // namespace

ModelFile parse_model_file(std::string_view text) { return FileParser(text).parse(); }

std::string print_model_file(ModelFile const& file) {
    std::ostringstream out;
    for (auto const& decl : file.features) {
        switch (decl.kind) {
            case FeatureDecl::Kind::Features:
                out << "features" << (decl.names.empty() ? "" : " " + join(decl.names)) << ";\n";
                break;
            case FeatureDecl::Kind::Xor:
                out << "xor " << join(decl.names) << ";\n";
                break;
            case FeatureDecl::Kind::Or:
                out << "or " << join(decl.names) << ";\n";
                break;
            case FeatureDecl::Kind::Mandatory:
                out << "mandatory " << join(decl.names) << ";\n";
                break;
            case FeatureDecl::Kind::Constraint:
                out << "constraint " << decl.constraint.to_string() << ";\n";
                break;
        }
    }
    for (auto const& c : file.components) {
        out << "\n"
            << (c.kind == ComponentAst::Kind::Fdtmc  ? "fdtmc "
                : c.kind == ComponentAst::Kind::Fmdp ? "fmdp "
                                                     : "fts ")
            << c.name << " {\n";
        out << "    states " << join(c.states) << ";\n";
        if (!c.initial.empty()) {
            out << "    init ";
            if (c.initial.size() == 1 && c.initial[0].second == 1) {
                out << c.initial[0].first;
            } else {
                for (std::size_t i = 0; i < c.initial.size(); ++i) {
                    out << (i ? ", " : "") << c.initial[i].first << " [" << to_string(c.initial[i].second) << "]";
                }
            }
            out << ";\n";
        }
        if (!c.actions.empty()) {
            out << "    action " << join(c.actions) << ";\n";
        }
        if (!c.propositions.empty()) {
            out << "    props " << join(c.propositions) << ";\n";
        }
        for (auto const& [state, props] : c.labels) {
            out << "    label " << state << ":" << (props.empty() ? "" : " " + join(props)) << ";\n";
        }
        for (auto const& t : c.transitions) {
            out << "    " << t.source << " ";
            if (t.action.empty() && !t.observation) {
                out << "->";
            } else {
                out << "-(" << t.action;
                if (t.observation) {
                    out << (t.action.empty() ? "" : " | ") << "obs: " << t.observation->to_string();
                }
                out << ")->";
            }
            out << " " << t.target;
            if (c.kind == ComponentAst::Kind::Fts) {
                if (t.feature_guard) {
                    out << " : " << t.feature_guard->to_string();
                }
            } else {
                out << " : " << print_profile(t.probability);
            }
            out << ";\n";
        }
        for (auto const& [state, p] : c.rewards) {
            out << "    reward " << state << " : " << print_profile(p) << ";\n";
        }
        out << "}\n";
    }
    if (file.system) {
        out << "\nsystem = " << print_system(*file.system, false) << ";\n";
    }
    if (!file.properties.empty()) {
        out << "\n";
    }
    for (auto const& p : file.properties) {
        out << "property " << p.name << " = " << quote(to_string(p.property)) << ";\n";
    }
    return out.str();
}

DiagramPtr build_diagram(ModelFile const& file, std::map<std::string, Expr>* aliases) {
    std::vector<std::string> signature;
    std::set<std::string> declared;
    std::map<std::string, Expr> alias;
    Expr constraint = Expr::constant(true);
    auto declare = [&](std::string const& name) {
        if (!declared.insert(name).second) {
            throw ModelError("feature '" + name + "' is declared twice");
        }
        signature.push_back(name);
    };
    auto conjoin_constraint = [&](Expr e) {
        constraint = constraint.is_true() ? e : Expr::conj(constraint, e);
    };
    for (auto const& decl : file.features) {
        switch (decl.kind) {
            case FeatureDecl::Kind::Features:
                for (auto const& n : decl.names) {
                    declare(n);
                }
                break;
            case FeatureDecl::Kind::Xor:
                if (decl.names.size() == 2) {
                    if (!declared.insert(decl.names[0]).second) {
                        throw ModelError("feature '" + decl.names[0] + "' is declared twice");
                    }
                    declare(decl.names[1]);
                    alias[decl.names[0]] = Expr::negate(Expr::variable(decl.names[1]));
                } else {
                    Expr some = Expr::constant(false);
                    for (std::size_t i = 0; i < decl.names.size(); ++i) {
                        declare(decl.names[i]);
                        Expr v = Expr::variable(decl.names[i]);
                        some = i == 0 ? v : Expr::disj(some, v);
                        for (std::size_t j = 0; j < i; ++j) {
                            conjoin_constraint(Expr::negate(Expr::conj(Expr::variable(decl.names[j]), v)));
                        }
                    }
                    conjoin_constraint(some);
                }
                break;
            case FeatureDecl::Kind::Or: {
                Expr some = Expr::constant(false);
                for (std::size_t i = 0; i < decl.names.size(); ++i) {
                    declare(decl.names[i]);
                    Expr v = Expr::variable(decl.names[i]);
                    some = i == 0 ? v : Expr::disj(some, v);
                }
                conjoin_constraint(some);
                break;
            }
            case FeatureDecl::Kind::Mandatory:
                for (auto const& n : decl.names) {
                    if (!declared.count(n)) {
                        declare(n);
                    }
                    conjoin_constraint(alias.count(n) ? alias.at(n) : Expr::variable(n));
                }
                break;
            case FeatureDecl::Kind::Constraint:
                conjoin_constraint(decl.constraint.rename(alias));
                break;
        }
    }
    for (auto const& v : constraint.variables()) {
        if (std::find(signature.begin(), signature.end(), v) == signature.end()) {
            throw ModelError("constraint mentions undeclared feature '" + v + "'");
        }
    }
    if (aliases) {
        *aliases = alias;
    }
    return make_diagram(signature, constraint);
}

BuiltModel build_model(ModelFile const& file) { return Builder(file).build(); }

BuiltModel load_model(std::string_view text) { return build_model(parse_model_file(text)); }

std::string read_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

BuiltModel load_model_file(std::string const& path) { return load_model(read_file(path)); }

}  // namespace fpmc
