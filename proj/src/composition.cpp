#include "fpmc/composition.h"

#include <deque>
#include <map>

#include "fpmc/errors.h"

namespace fpmc {

namespace {

using Valuation = std::map<std::string, bool>;

Valuation label_valuation(Fmdp const& model, StateIndex s) {
    Valuation v;
    for (auto const& p : model.propositions) {
        v[p] = model.labels[s].count(p) != 0;
    }
    return v;
}

void require_disjoint(Fmdp const& first, Fmdp const& second) {
    for (auto const& p : first.propositions) {
        if (second.propositions.count(p)) {
            throw ModelError("proposition '" + p + "' is declared by both components");
        }
    }
}

bool is_constant_zero(Profile const& p) { return p.is_constant() && p.default_value() == 0; }

struct ProductFrame {
    Fmdp result;
    std::size_t width = 0;

    StateIndex index(StateIndex s1, StateIndex s2) const { return s1 * width + s2; }
};

ProductFrame make_frame(Fmdp const& first, Fmdp const& second) {
    ProductFrame frame;
    frame.width = second.states.size();
    Fmdp& r = frame.result;
    r.diagram = conjoin(first.diagram, second.diagram);
    r.propositions = first.propositions;
    r.propositions.insert(second.propositions.begin(), second.propositions.end());
    for (StateIndex s1 = 0; s1 < first.states.size(); ++s1) {
        for (StateIndex s2 = 0; s2 < second.states.size(); ++s2) {
            r.states.push_back(composite_name(first.states[s1], second.states[s2]));
            r.initial.push_back(first.initial[s1] * second.initial[s2]);
            LabelSet labels = first.labels[s1];
            labels.insert(second.labels[s2].begin(), second.labels[s2].end());
            r.labels.push_back(std::move(labels));
        }
    }
    r.transitions.resize(r.states.size());
    if (first.rewards || second.rewards) {
        r.rewards.emplace();
        for (StateIndex s1 = 0; s1 < first.states.size(); ++s1) {
            for (StateIndex s2 = 0; s2 < second.states.size(); ++s2) {
                Profile reward = constant_profile(r.diagram, 0);
                if (first.rewards) {
                    reward = add(reward, (*first.rewards)[s1].rehome(r.diagram));
                }
                if (second.rewards) {
                    reward = add(reward, (*second.rewards)[s2].rehome(r.diagram));
                }
                r.rewards->push_back(reward);
            }
        }
    }
    return frame;
}

void add_transition(Fmdp& model, StateIndex source, std::string action, Expr guard, StateIndex target,
                    Profile probability) {
    if (guard.is_false() || is_constant_zero(probability)) {
        return;
    }
    model.transitions[source].push_back({std::move(action), std::move(guard), target, std::move(probability)});
}

Expr minterm(Valuation const& valuation) {
    Expr result = Expr::constant(true);
    bool first = true;
    for (auto const& [name, value] : valuation) {
        Expr literal = value ? Expr::variable(name) : Expr::negate(Expr::variable(name));
        result = first ? literal : Expr::conj(result, literal);
        first = false;
    }
    return result;
}

bool contains(std::vector<std::string> const& names, std::string const& name) {
    for (auto const& n : names) {
        if (n == name) {
            return true;
        }
    }
    return false;
}

}  // namespace

std::string composite_name(std::string const& first, std::string const& second) { return first + "," + second; }

Fmdp fdtmc_as_fmdp(Fdtmc const& model, std::string const& action) {
    Fmdp r;
    r.diagram = model.diagram;
    r.states = model.states;
    r.initial = model.initial;
    r.actions = {action};
    r.propositions = model.propositions;
    r.labels = model.labels;
    r.rewards = model.rewards;
    r.transitions.resize(model.states.size());
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        for (auto const& t : model.transitions[s]) {
            r.transitions[s].push_back({action, Expr::constant(true), t.target, t.probability});
        }
    }
    return r;
}

Fmdp sync_product(Fmdp const& first, Fmdp const& second, CompositionOptions const& options) {
    require_disjoint(first, second);
    ProductFrame frame = make_frame(first, second);
    Fmdp& r = frame.result;
    r.actions = first.actions;
    for (auto const& a : second.actions) {
        if (!contains(r.actions, a)) {
            r.actions.push_back(a);
        }
    }
    DiagramPtr const& d = r.diagram;
    for (StateIndex s1 = 0; s1 < first.states.size(); ++s1) {
        Valuation v1 = label_valuation(first, s1);
        for (StateIndex s2 = 0; s2 < second.states.size(); ++s2) {
            Valuation v2 = label_valuation(second, s2);
            StateIndex source = frame.index(s1, s2);
            for (auto const& t1 : first.transitions[s1]) {
                Expr g1 = t1.observation.substitute(v2);
                if (g1.is_false()) {
                    continue;
                }
                if (!contains(second.actions, t1.action)) {
                    add_transition(r, source, t1.action, g1, frame.index(t1.target, s2), t1.probability.rehome(d));
                    continue;
                }
                for (auto const& t2 : second.transitions[s2]) {
                    if (t2.action != t1.action) {
                        continue;
                    }
                    Expr g2 = t2.observation.substitute(v1);
                    Expr guard = Expr::conj(g1, g2).simplified();
                    if (guard.is_false()) {
                        continue;
                    }
                    add_transition(r, source, t1.action, guard, frame.index(t1.target, t2.target),
                                   mul(t1.probability.rehome(d), t2.probability.rehome(d)));
                }
            }
            for (auto const& t2 : second.transitions[s2]) {
                if (contains(first.actions, t2.action)) {
                    continue;
                }
                add_transition(r, source, t2.action, t2.observation.substitute(v1), frame.index(s1, t2.target),
                               t2.probability.rehome(d));
            }
        }
    }
    return options.prune ? prune_unreachable(r) : r;
}

Fmdp observer_product(Fmdp const& observed, Fmdp const& observer, CompositionOptions const& options) {
    require_disjoint(observed, observer);
    if (observer.actions.size() != 1) {
        throw ModelError("an observer must have exactly one action");
    }
    for (auto const& p : observer.observed_propositions()) {
        if (!observed.propositions.count(p)) {
            throw ModelError("observer guard reads '" + p + "', which the observed component does not declare");
        }
    }
    if (!is_complete(observer)) {
        throw ModelError("the observer is not complete");
    }
    ProductFrame frame = make_frame(observed, observer);
    Fmdp& r = frame.result;
    r.actions = observed.actions;
    DiagramPtr const& d = r.diagram;
    std::vector<Valuation> observed_labels;
    for (StateIndex s = 0; s < observed.states.size(); ++s) {
        observed_labels.push_back(label_valuation(observed, s));
    }
    for (StateIndex s1 = 0; s1 < observed.states.size(); ++s1) {
        for (StateIndex s2 = 0; s2 < observer.states.size(); ++s2) {
            Valuation v2 = label_valuation(observer, s2);
            StateIndex source = frame.index(s1, s2);
            for (auto const& t1 : observed.transitions[s1]) {
                Expr g1 = t1.observation.substitute(v2);
                if (g1.is_false()) {
                    continue;
                }
                Profile p1 = t1.probability.rehome(d);
                for (auto const& t2 : observer.transitions[s2]) {
                    Expr g2 = t2.observation.substitute(observed_labels[t1.target]);
                    if (!g2.is_true()) {
                        continue;
                    }
                    add_transition(r, source, t1.action, g1, frame.index(t1.target, t2.target),
                                   mul(p1, t2.probability.rehome(d)));
                }
            }
        }
    }
    return options.prune ? prune_unreachable(r) : r;
}

Fmdp fts_to_fmdp(Fts const& fts) {
    Fmdp r;
    r.diagram = fts.diagram;
    r.states = fts.states;
    r.initial.assign(fts.states.size(), Rational(0));
    r.initial.at(fts.initial) = 1;
    r.actions = fts.actions;
    r.propositions = fts.propositions;
    r.labels = fts.labels;
    r.transitions.resize(fts.states.size());
    for (StateIndex s = 0; s < fts.states.size(); ++s) {
        for (auto const& t : fts.transitions[s]) {
            r.transitions[s].push_back({t.action, t.observation, t.target, indicator(t.feature_guard, fts.diagram)});
        }
    }
    return r;
}

namespace {

Fmdp complete_rows(Fmdp const& model, bool deterministic) {
    Fmdp r = model;
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        for (auto const& action : model.actions) {
            std::set<std::string> referenced;
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < model.transitions[s].size(); ++i) {
                auto const& t = model.transitions[s][i];
                if (t.action == action) {
                    members.push_back(i);
                    for (auto const& v : t.observation.variables()) {
                        referenced.insert(v);
                    }
                }
            }
            std::vector<DenseProfile> dense;
            for (auto i : members) {
                dense.push_back(to_dense(model.transitions[s][i].probability, model.diagram));
            }
            std::vector<std::string> props(referenced.begin(), referenced.end());
            // Missing mass per product, grouped by identical vectors.
            std::vector<std::pair<DenseProfile, Expr>> groups;
            for (auto const& valuation : observation_valuations(props)) {
                DenseProfile sum(model.diagram, Rational(0));
                for (std::size_t k = 0; k < members.size(); ++k) {
                    auto const& t = model.transitions[s][members[k]];
                    if (!t.observation.substitute(valuation).is_true()) {
                        continue;
                    }
                    for (std::size_t p = 0; p < sum.size(); ++p) {
                        sum[p] += dense[k][p];
                    }
                }
                DenseProfile missing(model.diagram, Rational(0));
                bool any = false;
                std::string excess;
                for (std::size_t p = 0; p < sum.size(); ++p) {
                    if (sum[p] > 1) {
                        excess += (excess.empty() ? "" : ", ") + model.diagram->product(p).to_string();
                    }
                    missing[p] = 1 - sum[p];
                    any = any || missing[p] != 0;
                }
                if (!excess.empty()) {
                    std::string where = "state '" + model.states[s] + "', action '" + action + "'";
                    Expr observed = minterm(valuation);
                    if (!valuation.empty()) {
                        where += " observing " + observed.to_string();
                    }
                    throw ModelError(deterministic ? "nondeterminism at " + where + " under " + excess
                                                   : "outgoing probability exceeds 1 at " + where + " under " + excess);
                }
                if (!any) {
                    continue;
                }
                Expr term = minterm(valuation);
                bool merged = false;
                for (auto& [vector, guard] : groups) {
                    if (vector == missing) {
                        guard = Expr::disj(guard, term);
                        merged = true;
                        break;
                    }
                }
                if (!merged) {
                    groups.emplace_back(missing, term);
                }
            }
            for (auto& [vector, guard] : groups) {
                r.transitions[s].push_back({action, guard, s, from_dense(vector)});
            }
        }
    }
    return r;
}

}  // namespace

Fmdp complete_deterministic(Fmdp const& model) { return complete_rows(model, true); }

Fmdp complete_with_self_loops(Fmdp const& model) { return complete_rows(model, false); }

Fdtmc as_fdtmc(Fmdp const& model) {
    if (model.actions.size() != 1) {
        throw ModelError("only single-action models can be read as chains");
    }
    Fdtmc r;
    r.diagram = model.diagram;
    r.states = model.states;
    r.initial = model.initial;
    r.propositions = model.propositions;
    r.labels = model.labels;
    r.rewards = model.rewards;
    r.transitions.resize(model.states.size());
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        std::map<StateIndex, Profile> merged;
        for (auto const& t : model.transitions[s]) {
            Expr guard = t.observation.simplified();
            if (guard.is_false()) {
                continue;
            }
            if (!guard.is_true()) {
                throw ModelError("state '" + model.states[s] + "' has an unresolved observation guard '" +
                                 guard.to_string() + "'");
            }
            auto it = merged.find(t.target);
            if (it == merged.end()) {
                merged.emplace(t.target, t.probability);
            } else {
                it->second = add(it->second, t.probability);
            }
        }
        for (auto& [target, probability] : merged) {
            Profile p = probability.compacted();
            if (!is_constant_zero(p)) {
                r.transitions[s].push_back({target, p});
            }
        }
    }
    auto rows = validate_fdtmc(r).row_sum_findings();
    if (!rows.empty()) {
        throw ModelError("the composed model is not complete: " + rows.front().message);
    }
    return r;
}

Fmdp prune_unreachable(Fmdp const& model) {
    std::size_t n = model.states.size();
    std::size_t products = model.diagram->product_count();
    std::vector<std::vector<DenseProfile>> dense(n);
    for (StateIndex s = 0; s < n; ++s) {
        for (auto const& t : model.transitions[s]) {
            dense[s].push_back(to_dense(t.probability, model.diagram));
        }
    }
    std::vector<std::vector<char>> reach(n, std::vector<char>(products, 0));
    std::deque<StateIndex> work;
    for (StateIndex s = 0; s < n; ++s) {
        if (model.initial[s] > 0) {
            std::fill(reach[s].begin(), reach[s].end(), 1);
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        StateIndex s = work.front();
        work.pop_front();
        for (std::size_t i = 0; i < model.transitions[s].size(); ++i) {
            auto const& t = model.transitions[s][i];
            if (t.observation.is_false()) {
                continue;
            }
            bool changed = false;
            for (std::size_t p = 0; p < products; ++p) {
                if (reach[s][p] && dense[s][i][p] != 0 && !reach[t.target][p]) {
                    reach[t.target][p] = 1;
                    changed = true;
                }
            }
            if (changed) {
                work.push_back(t.target);
            }
        }
    }
    std::vector<std::optional<StateIndex>> remap(n);
    Fmdp r;
    r.diagram = model.diagram;
    r.actions = model.actions;
    r.propositions = model.propositions;
    for (StateIndex s = 0; s < n; ++s) {
        bool reachable = false;
        for (char c : reach[s]) {
            reachable = reachable || c;
        }
        if (reachable) {
            remap[s] = r.states.size();
            r.states.push_back(model.states[s]);
            r.initial.push_back(model.initial[s]);
            r.labels.push_back(model.labels[s]);
        }
    }
    r.transitions.resize(r.states.size());
    if (model.rewards) {
        r.rewards.emplace();
    }
    for (StateIndex s = 0; s < n; ++s) {
        if (!remap[s]) {
            continue;
        }
        for (auto const& t : model.transitions[s]) {
            // A dropped target is only entered under products that never
            // reach s; the mass becomes a self-loop to keep rows stochastic.
            StateIndex target = remap[t.target] ? *remap[t.target] : *remap[s];
            r.transitions[*remap[s]].push_back({t.action, t.observation, target, t.probability});
        }
        if (model.rewards) {
            r.rewards->push_back((*model.rewards)[s]);
        }
    }
    return r;
}

}  // namespace fpmc
