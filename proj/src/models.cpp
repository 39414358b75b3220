#include "fpmc/models.h"

#include <sstream>

#include "fpmc/errors.h"

namespace fpmc {

namespace {

template <typename Names>
std::optional<StateIndex> find_name(Names const& names, std::string const& name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

void check_common(std::vector<std::string> const& states, std::vector<Rational> const& initial,
                  std::size_t transition_rows, std::set<std::string> const& propositions,
                  std::vector<LabelSet> const& labels, std::optional<std::vector<Profile>> const& rewards,
                  ValidationReport& report) {
    auto structural = [&](std::optional<StateIndex> state, std::string message) {
        report.findings.push_back({Finding::Kind::Structure, state, std::nullopt, "", "", 0, std::move(message)});
    };
    if (states.empty()) {
        structural(std::nullopt, "model has no states");
    }
    if (initial.size() != states.size() || transition_rows != states.size() || labels.size() != states.size()) {
        structural(std::nullopt, "state vectors have inconsistent lengths");
        return;
    }
    Rational total = 0;
    for (StateIndex s = 0; s < states.size(); ++s) {
        if (initial[s] < 0) {
            report.findings.push_back({Finding::Kind::Initial, s, std::nullopt, "", "", initial[s],
                                       "negative initial probability"});
        }
        total += initial[s];
        for (auto const& label : labels[s]) {
            if (!propositions.count(label)) {
                structural(s, "label '" + label + "' is not a declared proposition");
            }
        }
    }
    if (total != 1) {
        report.findings.push_back({Finding::Kind::Initial, std::nullopt, std::nullopt, "", "", total,
                                   "initial distribution sums to " + to_string(total)});
    }
    if (rewards) {
        if (rewards->size() != states.size()) {
            structural(std::nullopt, "reward vector length does not match the state count");
            return;
        }
        for (StateIndex s = 0; s < states.size(); ++s) {
            DenseProfile dense = to_dense((*rewards)[s]);
            for (std::size_t p = 0; p < dense.size(); ++p) {
                if (dense[p] < 0) {
                    report.findings.push_back(
                        {Finding::Kind::Reward, s, p, "", "", dense[p], "negative reward"});
                }
            }
        }
    }
}

void check_bounds(Profile const& profile, StateIndex s, std::string const& action, ValidationReport& report) {
    for (auto const& message : probability_bound_violations(profile)) {
        report.findings.push_back({Finding::Kind::ProbabilityBound, s, std::nullopt, action, "", 0, message});
    }
}

std::string describe_valuation(std::map<std::string, bool> const& valuation) {
    if (valuation.empty()) {
        return "";
    }
    std::string out;
    for (auto const& [name, value] : valuation) {
        if (!out.empty()) {
            out += " & ";
        }
        out += value ? name : "!" + name;
    }
    return out;
}

// Calls `visit(action, valuation, sum)` for every (action, observation
// valuation) of state s; sum is the dense row sum of the enabled transitions.
template <typename Visit>
void for_each_row(Fmdp const& model, StateIndex s, Visit visit) {
    for (auto const& action : model.actions) {
        std::set<std::string> referenced;
        for (auto const& t : model.transitions[s]) {
            if (t.action == action) {
                for (auto const& v : t.observation.variables()) {
                    referenced.insert(v);
                }
            }
        }
        std::vector<std::string> props(referenced.begin(), referenced.end());
        if (props.size() > 20) {
            throw ModelError("state '" + model.states[s] + "' observes too many propositions");
        }
        for (auto const& valuation : observation_valuations(props)) {
            DenseProfile sum(model.diagram, Rational(0));
            for (auto const& t : model.transitions[s]) {
                if (t.action != action) {
                    continue;
                }
                bool enabled = t.observation.evaluate([&](std::string const& name) -> std::optional<bool> {
                    auto it = valuation.find(name);
                    if (it == valuation.end()) {
                        return std::nullopt;
                    }
                    return it->second;
                });
                if (enabled) {
                    DenseProfile d = to_dense(t.probability, model.diagram);
                    for (std::size_t p = 0; p < sum.size(); ++p) {
                        sum[p] += d[p];
                    }
                }
            }
            visit(action, valuation, sum);
        }
    }
}

}  // namespace

std::optional<StateIndex> Fdtmc::find_state(std::string const& name) const { return find_name(states, name); }

std::optional<StateIndex> Fmdp::find_state(std::string const& name) const { return find_name(states, name); }

std::set<std::string> Fmdp::observed_propositions() const {
    std::set<std::string> result;
    for (auto const& row : transitions) {
        for (auto const& t : row) {
            for (auto const& v : t.observation.variables()) {
                result.insert(v);
            }
        }
    }
    return result;
}

Fdtmc make_fdtmc(DiagramPtr diagram, std::vector<std::string> states, StateIndex initial) {
    Fdtmc m;
    m.diagram = std::move(diagram);
    m.states = std::move(states);
    m.initial.assign(m.states.size(), Rational(0));
    if (initial >= m.states.size()) {
        throw ModelError("initial state out of range");
    }
    m.initial[initial] = 1;
    m.transitions.resize(m.states.size());
    m.labels.resize(m.states.size());
    return m;
}

std::vector<Finding> ValidationReport::row_sum_findings() const {
    std::vector<Finding> result;
    for (auto const& f : findings) {
        if (f.kind == Finding::Kind::RowSum) {
            result.push_back(f);
        }
    }
    return result;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (auto const& f : findings) {
        out << f.message << '\n';
    }
    return out.str();
}

ValidationReport validate_fdtmc(Fdtmc const& model) {
    ValidationReport report;
    check_common(model.states, model.initial, model.transitions.size(), model.propositions, model.labels,
                 model.rewards, report);
    if (model.transitions.size() != model.states.size()) {
        return report;
    }
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        DenseProfile sum(model.diagram, Rational(0));
        for (auto const& t : model.transitions[s]) {
            if (t.target >= model.states.size()) {
                report.findings.push_back({Finding::Kind::Structure, s, std::nullopt, "", "", 0,
                                           "transition from '" + model.states[s] + "' to an unknown state"});
                continue;
            }
            check_bounds(t.probability, s, "", report);
            DenseProfile d = to_dense(t.probability, model.diagram);
            for (std::size_t p = 0; p < sum.size(); ++p) {
                sum[p] += d[p];
            }
        }
        for (std::size_t p = 0; p < sum.size(); ++p) {
            if (sum[p] != 1) {
                report.findings.push_back({Finding::Kind::RowSum, s, p, "", "", sum[p],
                                           "state '" + model.states[s] + "' under product " +
                                               model.diagram->product(p).to_string() + " has outgoing mass " +
                                               to_string(sum[p])});
            }
        }
    }
    return report;
}

ValidationReport validate_fmdp(Fmdp const& model) {
    ValidationReport report;
    check_common(model.states, model.initial, model.transitions.size(), model.propositions, model.labels,
                 model.rewards, report);
    if (model.transitions.size() != model.states.size()) {
        return report;
    }
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        for (auto const& t : model.transitions[s]) {
            if (t.target >= model.states.size()) {
                report.findings.push_back({Finding::Kind::Structure, s, std::nullopt, t.action, "", 0,
                                           "transition from '" + model.states[s] + "' to an unknown state"});
            }
            bool known_action = false;
            for (auto const& a : model.actions) {
                known_action = known_action || a == t.action;
            }
            if (!known_action) {
                report.findings.push_back({Finding::Kind::Structure, s, std::nullopt, t.action, "", 0,
                                           "undeclared action '" + t.action + "'"});
            }
            check_bounds(t.probability, s, t.action, report);
        }
        if (!report.ok()) {
            continue;
        }
        for_each_row(model, s, [&](std::string const& action, auto const& valuation, DenseProfile const& sum) {
            for (std::size_t p = 0; p < sum.size(); ++p) {
                if (sum[p] != 0 && sum[p] != 1) {
                    std::string obs = describe_valuation(valuation);
                    report.findings.push_back(
                        {Finding::Kind::RowSum, s, p, action, obs, sum[p],
                         "state '" + model.states[s] + "', action '" + action + "'" +
                             (obs.empty() ? "" : " observing " + obs) + " under product " +
                             model.diagram->product(p).to_string() + " has outgoing mass " + to_string(sum[p])});
                }
            }
        });
    }
    return report;
}

bool is_complete(Fmdp const& model) {
    if (!validate_fmdp(model).ok()) {
        return false;
    }
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        bool complete = true;
        for_each_row(model, s, [&](std::string const&, auto const&, DenseProfile const& sum) {
            for (std::size_t p = 0; p < sum.size(); ++p) {
                complete = complete && sum[p] == 1;
            }
        });
        if (!complete) {
            return false;
        }
    }
    return true;
}

Dtmc project(Fdtmc const& model, std::size_t product) {
    if (product >= model.diagram->product_count()) {
        throw ModelError("product index out of range");
    }
    Dtmc d;
    d.states = model.states;
    d.initial = model.initial;
    d.propositions = model.propositions;
    d.labels = model.labels;
    d.rows.resize(model.states.size());
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        for (auto const& t : model.transitions[s]) {
            Rational p = t.probability.eval(product);
            if (p == 0) {
                continue;
            }
            bool merged = false;
            for (auto& [target, value] : d.rows[s]) {
                if (target == t.target) {
                    value += p;
                    merged = true;
                }
            }
            if (!merged) {
                d.rows[s].emplace_back(t.target, p);
            }
        }
    }
    if (model.rewards) {
        d.rewards.emplace();
        for (auto const& r : *model.rewards) {
            d.rewards->push_back(r.eval(product));
        }
    }
    return d;
}

Dtmc project(Fdtmc const& model, Product const& product) {
    auto index = model.diagram->index_of(product);
    if (!index) {
        throw ModelError("product " + product.to_string() + " is not valid for the model's feature diagram");
    }
    return project(model, *index);
}

Fmdp project(Fmdp const& model, Product const& product) {
    auto index = model.diagram->index_of(product);
    if (!index) {
        throw ModelError("product " + product.to_string() + " is not valid for the model's feature diagram");
    }
    DiagramPtr single = single_product_diagram();
    Fmdp result;
    result.diagram = single;
    result.states = model.states;
    result.initial = model.initial;
    result.actions = model.actions;
    result.propositions = model.propositions;
    result.labels = model.labels;
    result.transitions.resize(model.states.size());
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        for (auto const& t : model.transitions[s]) {
            Rational p = t.probability.eval(*index);
            if (p == 0) {
                continue;
            }
            result.transitions[s].push_back({t.action, t.observation, t.target, Profile(single, p)});
        }
    }
    if (model.rewards) {
        result.rewards.emplace();
        for (auto const& r : *model.rewards) {
            result.rewards->push_back(Profile(single, r.eval(*index)));
        }
    }
    return result;
}

Profile path_probability(Fdtmc const& model, std::vector<StateIndex> const& path) {
    Profile result = constant_profile(model.diagram, 1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        Profile step = constant_profile(model.diagram, 0);
        for (auto const& t : model.transitions.at(path[i])) {
            if (t.target == path[i + 1]) {
                step = add(step, t.probability);
            }
        }
        result = mul(result, step);
    }
    return result;
}

std::vector<std::vector<DenseProfile>> dense_transitions(Fdtmc const& model) {
    std::vector<std::vector<DenseProfile>> result(model.states.size());
    for (StateIndex s = 0; s < model.states.size(); ++s) {
        for (auto const& t : model.transitions[s]) {
            result[s].push_back(to_dense(t.probability, model.diagram));
        }
    }
    return result;
}

std::vector<std::map<std::string, bool>> observation_valuations(std::vector<std::string> const& propositions) {
    std::vector<std::map<std::string, bool>> result;
    std::size_t count = std::size_t{1} << propositions.size();
    for (std::size_t bits = 0; bits < count; ++bits) {
        std::map<std::string, bool> valuation;
        for (std::size_t i = 0; i < propositions.size(); ++i) {
            valuation[propositions[i]] = (bits >> (propositions.size() - 1 - i)) & 1;
        }
        result.push_back(std::move(valuation));
    }
    return result;
}

}  // namespace fpmc
