#include "test_support.h"

#include <algorithm>
#include <cmath>

#include "fpmc/composition.h"
#include "fpmc/feature_model.h"

#ifndef FPMC_MODELS_DIR
#define FPMC_MODELS_DIR "models"
#endif

namespace fpmc::support {

Rational ratio(long numerator, long denominator) {
    Rational r(numerator, denominator);
    r.canonicalize();
    return r;
}

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

std::vector<Profile> random_distribution(Rng& rng, DiagramPtr const& diagram, std::size_t targets) {
    std::vector<Profile> result;
    Profile used = constant_profile(diagram, 0);
    for (std::size_t i = 0; i + 1 < targets; ++i) {
        Profile p = random_profile(rng, diagram, Rational(1, 4 * static_cast<long>(targets - 1)), 3);
        used = add(used, p);
        result.push_back(p);
    }
    result.push_back(complement(used));
    return result;
}

std::vector<std::size_t> distinct_targets(Rng& rng, std::size_t states, std::size_t count) {
    std::vector<std::size_t> all(states);
    for (std::size_t i = 0; i < states; ++i) {
        all[i] = i;
    }
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(count, states));
    return all;
}

bool holds(Formula const& f, Dtmc const& chain, StateIndex s) {
    switch (f->kind) {
        case StateFormula::Kind::True:
            return true;
        case StateFormula::Kind::Atom:
            return chain.labels[s].count(f->atom) != 0;
        case StateFormula::Kind::Not:
            return !holds(f->left, chain, s);
        case StateFormula::Kind::And:
            return holds(f->left, chain, s) && holds(f->right, chain, s);
        case StateFormula::Kind::Probability:
            break;
    }
    throw Error("oracle does not support nested probability operators");
}

}  // namespace

std::string models_dir() { return FPMC_MODELS_DIR; }

std::string model_path(std::string const& name) { return models_dir() + "/" + name; }

Expr random_guard(Rng& rng, std::vector<std::string> const& signature) {
    auto literal = [&] {
        Expr v = Expr::variable(signature[uniform_index(rng, signature.size())]);
        return coin(rng) ? v : Expr::negate(v);
    };
    switch (uniform_index(rng, 3)) {
        case 0:
            return literal();
        case 1:
            return Expr::conj(literal(), literal());
        default:
            return Expr::disj(literal(), literal());
    }
}

Profile random_profile(Rng& rng, DiagramPtr const& diagram, Rational const& step, unsigned max_steps) {
    auto value = [&] { return Rational(step * static_cast<long>(uniform_index(rng, max_steps + 1))); };
    if (diagram->feature_count() == 0 || coin(rng, 0.3)) {
        return constant_profile(diagram, value());
    }
    std::vector<ProfileCase> cases;
    std::size_t count = 1 + uniform_index(rng, 2);
    for (std::size_t i = 0; i < count; ++i) {
        cases.push_back({random_guard(rng, diagram->signature()), value()});
    }
    return Profile(diagram, std::move(cases), value());
}

Fdtmc random_fdtmc(Rng& rng, RandomChainOptions const& options) {
    std::size_t features = uniform_index(rng, options.max_features + 1);
    std::vector<std::string> signature;
    for (std::size_t i = 0; i < features; ++i) {
        signature.push_back("f" + std::to_string(i));
    }
    DiagramPtr diagram = make_diagram(signature);
    std::size_t n = 1 + uniform_index(rng, options.max_states);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("s" + std::to_string(i));
    }
    Fdtmc m = make_fdtmc(diagram, names, 0);
    if (n > 1 && coin(rng, 0.2)) {
        m.initial[0] = Rational(1, 2);
        m.initial[1] = Rational(1, 2);
    }
    m.propositions.insert(options.propositions.begin(), options.propositions.end());
    for (std::size_t s = 0; s < n; ++s) {
        for (auto const& p : options.propositions) {
            if (coin(rng, 0.35)) {
                m.labels[s].insert(p);
            }
        }
        if (coin(rng, 0.15)) {
            m.transitions[s].push_back({s, constant_profile(diagram, 1)});
            continue;
        }
        auto targets = distinct_targets(rng, n, 1 + uniform_index(rng, 3));
        auto profiles = random_distribution(rng, diagram, targets.size());
        for (std::size_t i = 0; i < targets.size(); ++i) {
            m.transitions[s].push_back({targets[i], profiles[i]});
        }
    }
    if (options.rewards) {
        m.rewards.emplace();
        for (std::size_t s = 0; s < n; ++s) {
            m.rewards->push_back(random_profile(rng, diagram, Rational(1), 5));
        }
    }
    return m;
}

Formula random_state_formula(Rng& rng, std::vector<std::string> const& propositions, int depth) {
    std::size_t choice = uniform_index(rng, depth > 0 ? 6 : 3);
    switch (choice) {
        case 0:
            return formula_true();
        case 1:
        case 2:
            return formula_atom(propositions[uniform_index(rng, propositions.size())]);
        case 3:
            return formula_not(random_state_formula(rng, propositions, depth - 1));
        case 4:
            return formula_and(random_state_formula(rng, propositions, depth - 1),
                               random_state_formula(rng, propositions, depth - 1));
        default:
            return formula_or(random_state_formula(rng, propositions, depth - 1),
                              random_state_formula(rng, propositions, depth - 1));
    }
}

Property random_query(Rng& rng, std::vector<std::string> const& propositions) {
    Formula goal = random_state_formula(rng, propositions);
    PathPtr path;
    switch (uniform_index(rng, 3)) {
        case 0:
            path = path_next(goal);
            break;
        case 1:
            path = path_until(random_state_formula(rng, propositions), goal);
            break;
        default:
            path = path_until(random_state_formula(rng, propositions), goal, uniform_index(rng, 6));
            break;
    }
    Property property;
    property.formula = formula_query(path);
    return property;
}

Fmdp random_fmdp(Rng& rng, RandomFmdpOptions const& options) {
    DiagramPtr diagram = make_diagram(options.features);
    Fmdp m;
    m.diagram = diagram;
    std::size_t n = 1 + uniform_index(rng, options.max_states);
    for (std::size_t i = 0; i < n; ++i) {
        m.states.push_back(options.prefix + std::to_string(i));
    }
    m.initial.assign(n, Rational(0));
    m.initial[0] = 1;
    m.actions = options.actions;
    m.propositions.insert(options.propositions.begin(), options.propositions.end());
    m.labels.resize(n);
    m.transitions.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (auto const& p : options.propositions) {
            if (coin(rng)) {
                m.labels[s].insert(p);
            }
        }
        for (auto const& action : options.actions) {
            std::vector<Expr> branches = {Expr::constant(true)};
            if (!options.observed.empty() && coin(rng)) {
                Expr o = Expr::variable(options.observed[uniform_index(rng, options.observed.size())]);
                branches = {o, Expr::negate(o)};
            }
            for (auto const& guard : branches) {
                auto targets = distinct_targets(rng, n, 1 + uniform_index(rng, 3));
                auto profiles = random_distribution(rng, diagram, targets.size());
                for (std::size_t i = 0; i < targets.size(); ++i) {
                    m.transitions[s].push_back({action, guard, targets[i], profiles[i]});
                }
            }
        }
    }
    return m;
}

Rational oracle_eval(Profile const& profile, Product const& product) {
    for (auto const& c : profile.cases()) {
        if (evaluate_expr(c.guard, product)) {
            return c.value;
        }
    }
    return profile.default_value();
}

std::vector<double> oracle_probabilities(Dtmc const& chain, PathFormula const& path) {
    std::size_t n = chain.state_count();
    std::vector<char> goal(n);
    std::vector<char> left(n, 1);
    for (StateIndex s = 0; s < n; ++s) {
        goal[s] = holds(path.right, chain, s);
        if (path.kind == PathFormula::Kind::Until) {
            left[s] = holds(path.left, chain, s);
        }
    }
    auto step = [&](std::vector<double> const& x) {
        std::vector<double> y(n, 0.0);
        for (StateIndex s = 0; s < n; ++s) {
            for (auto const& [t, p] : chain.rows[s]) {
                y[s] += to_double(p) * x[t];
            }
        }
        return y;
    };
    std::vector<double> x(n);
    for (StateIndex s = 0; s < n; ++s) {
        x[s] = goal[s] ? 1.0 : 0.0;
    }
    if (path.kind == PathFormula::Kind::Next) {
        return step(x);
    }
    std::uint64_t rounds = path.bound ? *path.bound : 2'000'000;
    for (std::uint64_t k = 0; k < rounds; ++k) {
        std::vector<double> y = step(x);
        double change = 0;
        for (StateIndex s = 0; s < n; ++s) {
            y[s] = goal[s] ? 1.0 : (left[s] ? y[s] : 0.0);
            change = std::max(change, std::abs(y[s] - x[s]));
        }
        x = std::move(y);
        if (!path.bound && change < 1e-15) {
            break;
        }
    }
    return x;
}

std::map<std::string, Rational> canonical_rows(Fmdp const& model) {
    std::set<std::string> observed_set = model.observed_propositions();
    std::vector<std::string> observed(observed_set.begin(), observed_set.end());
    std::map<std::string, Rational> rows;
    for (StateIndex s = 0; s < model.state_count(); ++s) {
        for (auto const& valuation : observation_valuations(observed)) {
            std::string key_valuation;
            for (auto const& [name, value] : valuation) {
                key_valuation += (value ? "+" : "-") + name;
            }
            for (auto const& t : model.transitions[s]) {
                bool enabled = t.observation.evaluate([&](std::string const& name) -> std::optional<bool> {
                    auto it = valuation.find(name);
                    return it == valuation.end() ? std::nullopt : std::optional<bool>(it->second);
                });
                Rational p = t.probability.eval(0);
                if (!enabled || p == 0) {
                    continue;
                }
                rows[model.states[s] + "|" + t.action + "|" + key_valuation + "|" + model.states[t.target]] += p;
            }
        }
    }
    return rows;
}

std::string projection_mismatch(Fmdp const& first, Fmdp const& second, bool observer) {
    CompositionOptions unpruned{false};
    auto compose = [&](Fmdp const& a, Fmdp const& b) {
        return observer ? observer_product(a, b, unpruned) : sync_product(a, b, unpruned);
    };
    Fmdp composite = compose(first, second);
    for (std::size_t i = 0; i < composite.diagram->product_count(); ++i) {
        Product product = composite.diagram->product(i);
        Fmdp whole = project(composite, product);
        Fmdp parts = compose(project(first, restrict(product, first.diagram->signature())),
                             project(second, restrict(product, second.diagram->signature())));
        if (whole.states != parts.states || whole.initial != parts.initial || whole.labels != parts.labels) {
            return "state space differs at " + product.to_string();
        }
        if (canonical_rows(whole) != canonical_rows(parts)) {
            return "transition rows differ at " + product.to_string();
        }
    }
    return {};
}

}  // namespace fpmc::support
