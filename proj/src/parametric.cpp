#include "fpmc/parametric.h"

#include <chrono>
#include <deque>
#include <map>
#include <set>

#include "fpmc/dtmc_checker.h"
#include "fpmc/enumerative.h"
#include "fpmc/errors.h"

namespace fpmc {

namespace {

using Clock = std::chrono::steady_clock;

bool uniform(std::vector<char> const& row) {
    for (char c : row) {
        if (c != row.front()) {
            return false;
        }
    }
    return true;
}

Polynomial table_polynomial(FeatureDiagram const& diagram, std::vector<char> const& row) {
    if (row.empty() || uniform(row)) {
        return Polynomial(row.empty() || !row.front() ? 0 : 1);
    }
    std::vector<Rational> values(row.begin(), row.end());
    if (diagram.feature_count() <= kMaxInterpolationFeatures) {
        return epsilon_sum(diagram, values);
    }
    auto shared = std::make_shared<FeatureDiagram const>(diagram);
    return profile_to_polynomial(from_dense(DenseProfile(shared, values)));
}

SatisfactionTable constant_table(std::vector<char> const& per_state, std::size_t products) {
    SatisfactionTable table;
    for (char c : per_state) {
        table.emplace_back(products, c);
    }
    return table;
}

struct Edge {
    RationalFunction p;
    RationalFunction w;
};

// Working graph of state elimination. Nodes 0..n-1 are model states, n is
// the source carrying the initial distribution and n+1 the absorbing goal.
class EliminationGraph {
public:
    EliminationGraph(std::size_t states, bool rewards)
        : states_(states), rewards_(rewards), out_(states + 2), in_(states + 2), alive_(states, false) {}

    std::size_t source() const { return states_; }
    std::size_t sink() const { return states_ + 1; }

    void activate(std::size_t v) { alive_[v] = true; }

    void add(std::size_t from, std::size_t to, RationalFunction const& p, RationalFunction const& w) {
        if (p.numerator.is_zero() && w.numerator.is_zero()) {
            return;
        }
        auto it = out_[from].find(to);
        if (it == out_[from].end()) {
            out_[from].emplace(to, Edge{p, w});
            in_[to].insert(from);
        } else {
            it->second.p = it->second.p + p;
            if (rewards_) {
                it->second.w = it->second.w + w;
            }
        }
    }

    void eliminate_all() {
        for (;;) {
            std::size_t best = states_;
            std::size_t best_degree = 0;
            for (std::size_t v = 0; v < states_; ++v) {
                if (!alive_[v]) {
                    continue;
                }
                std::size_t degree = out_[v].size() + in_[v].size();
                if (out_[v].count(v)) {
                    degree -= 2;
                }
                if (best == states_ || degree < best_degree) {
                    best = v;
                    best_degree = degree;
                }
            }
            if (best == states_) {
                return;
            }
            eliminate(best);
        }
    }

    Edge result() const {
        auto it = out_[source()].find(sink());
        return it == out_[source()].end() ? Edge{} : it->second;
    }

private:
    void eliminate(std::size_t v) {
        alive_[v] = false;
        RationalFunction factor(Polynomial(1));
        RationalFunction loop_reward;
        bool has_loop = false;
        if (auto loop = out_[v].find(v); loop != out_[v].end()) {
            factor = geometric(loop->second.p);
            loop_reward = loop->second.w;
            has_loop = true;
            out_[v].erase(loop);
            in_[v].erase(v);
        }
        std::vector<std::pair<std::size_t, Edge>> preds;
        for (std::size_t s : in_[v]) {
            preds.emplace_back(s, out_[s].at(v));
            out_[s].erase(v);
        }
        std::vector<std::pair<std::size_t, Edge>> succs(out_[v].begin(), out_[v].end());
        for (auto const& [t, e] : succs) {
            in_[t].erase(v);
        }
        out_[v].clear();
        in_[v].clear();
        for (auto const& [s, into] : preds) {
            RationalFunction scaled_in = into.p * factor;
            for (auto const& [t, from] : succs) {
                RationalFunction p = scaled_in * from.p;
                RationalFunction w;
                if (rewards_) {
                    w = (into.w * from.p + into.p * from.w) * factor;
                    if (has_loop && !loop_reward.numerator.is_zero()) {
                        w = w + p * loop_reward * factor;
                    }
                }
                add(s, t, p, w);
            }
        }
    }

    std::size_t states_;
    bool rewards_;
    std::vector<std::map<std::size_t, Edge>> out_;
    std::vector<std::set<std::size_t>> in_;
    std::vector<bool> alive_;
};

class ParametricChecker {
public:
    explicit ParametricChecker(Fdtmc const& model) : model_(model), diagram_(*model.diagram) {
        std::size_t n = model.state_count();
        transitions_.resize(n);
        dense_ = dense_transitions(model);
        for (StateIndex s = 0; s < n; ++s) {
            std::map<StateIndex, Polynomial> merged;
            for (auto const& t : model.transitions[s]) {
                merged[t.target] = merged[t.target] + profile_to_polynomial(t.probability);
            }
            for (auto& [target, p] : merged) {
                if (!p.is_zero()) {
                    transitions_[s].emplace_back(target, std::move(p));
                }
            }
        }
    }

    std::size_t products() const { return diagram_.product_count(); }

    SatisfactionTable satisfaction(Formula const& f) {
        std::size_t n = model_.state_count();
        switch (f->kind) {
            case StateFormula::Kind::True:
                return constant_table(std::vector<char>(n, 1), products());
            case StateFormula::Kind::Atom: {
                std::vector<char> row(n);
                for (StateIndex s = 0; s < n; ++s) {
                    row[s] = model_.labels[s].count(f->atom) != 0;
                }
                return constant_table(row, products());
            }
            case StateFormula::Kind::Not: {
                SatisfactionTable t = satisfaction(f->left);
                for (auto& row : t) {
                    for (auto& c : row) {
                        c = !c;
                    }
                }
                return t;
            }
            case StateFormula::Kind::And: {
                SatisfactionTable a = satisfaction(f->left);
                SatisfactionTable b = satisfaction(f->right);
                for (StateIndex s = 0; s < n; ++s) {
                    for (std::size_t p = 0; p < products(); ++p) {
                        a[s][p] = a[s][p] && b[s][p];
                    }
                }
                return a;
            }
            case StateFormula::Kind::Probability: {
                auto values = state_values(*f->path);
                SatisfactionTable t(n, std::vector<char>(products()));
                for (StateIndex s = 0; s < n; ++s) {
                    for (std::size_t p = 0; p < products(); ++p) {
                        t[s][p] = f->quantitative || f->interval.contains(values[s][p]);
                    }
                }
                return t;
            }
        }
        return {};
    }

    std::vector<Polynomial> table_polynomials(SatisfactionTable const& table) {
        std::vector<Polynomial> result;
        for (auto const& row : table) {
            result.push_back(table_polynomial(diagram_, row));
        }
        return result;
    }

    // Per-state polynomial for Next and bounded Until.
    std::vector<Polynomial> unrolled(PathFormula const& path) {
        std::size_t n = model_.state_count();
        SatisfactionTable goal = satisfaction(path.right);
        std::vector<Polynomial> g = table_polynomials(goal);
        if (path.kind == PathFormula::Kind::Next) {
            return step(g);
        }
        SatisfactionTable left = satisfaction(path.left);
        for (StateIndex s = 0; s < n; ++s) {
            for (std::size_t p = 0; p < products(); ++p) {
                left[s][p] = left[s][p] && !goal[s][p];
            }
        }
        std::vector<Polynomial> h = table_polynomials(left);
        std::vector<Polynomial> x = g;
        for (std::uint64_t k = 0; k < *path.bound; ++k) {
            std::vector<Polynomial> next = step(x);
            for (StateIndex s = 0; s < n; ++s) {
                next[s] = g[s] + h[s] * next[s];
            }
            if (next == x) {
                break;
            }
            x = std::move(next);
        }
        return x;
    }

    std::vector<Polynomial> step(std::vector<Polynomial> const& x) const {
        std::vector<Polynomial> result(model_.state_count());
        for (StateIndex s = 0; s < model_.state_count(); ++s) {
            for (auto const& [target, p] : transitions_[s]) {
                if (!x[target].is_zero()) {
                    result[s] = result[s] + p * x[target];
                }
            }
        }
        return result;
    }

    // Exact per-state values at every product.
    std::vector<std::vector<Rational>> state_values(PathFormula const& path) {
        std::size_t n = model_.state_count();
        std::vector<std::vector<Rational>> values(n, std::vector<Rational>(products()));
        if (path.kind == PathFormula::Kind::Next || path.bound) {
            auto polys = unrolled(path);
            for (StateIndex s = 0; s < n; ++s) {
                for (std::size_t p = 0; p < products(); ++p) {
                    values[s][p] = polys[s].eval(diagram_.mask(p));
                }
            }
            return values;
        }
        SatisfactionTable left = satisfaction(path.left);
        SatisfactionTable right = satisfaction(path.right);
        for (StateIndex s = 0; s < n; ++s) {
            std::vector<Rational> initial(n, Rational(0));
            initial[s] = 1;
            RationalFunction f = reachability(initial, left, right);
            for (std::size_t p = 0; p < products(); ++p) {
                auto v = f.eval(diagram_.mask(p));
                if (!v) {
                    warnings_.push_back("denominator vanishes under " + diagram_.product(p).to_string() +
                                        "; value recomputed by projection");
                    DtmcChecker checker(project(model_, p));
                    v = checker.probabilities(path)[s];
                }
                values[s][p] = *v;
            }
        }
        return values;
    }

    RationalFunction reachability(std::vector<Rational> const& initial, SatisfactionTable const& path,
                                  SatisfactionTable const& goal) {
        return eliminate(initial, path, goal, false).p;
    }

    RationalFunction expected_reward(SatisfactionTable const& goal) {
        if (!model_.rewards) {
            throw ModelError("the model has no rewards");
        }
        SatisfactionTable all = constant_table(std::vector<char>(model_.state_count(), 1), products());
        RationalFunction reach = eliminate(model_.initial, all, goal, false).p;
        std::vector<std::string> missing;
        for (std::size_t p = 0; p < products(); ++p) {
            auto v = reach.eval(diagram_.mask(p));
            if (!v) {
                std::vector<char> target(model_.state_count());
                for (StateIndex s = 0; s < model_.state_count(); ++s) {
                    target[s] = goal[s][p];
                }
                Dtmc chain = project(model_, p);
                DtmcChecker checker(chain);
                std::vector<char> everywhere(chain.state_count(), 1);
                auto one = checker.prob1(everywhere, target);
                Rational mass = 0;
                for (StateIndex s = 0; s < chain.state_count(); ++s) {
                    mass += one[s] ? chain.initial[s] : Rational(0);
                }
                v = mass;
            }
            if (*v != 1) {
                missing.push_back(diagram_.product(p).to_string());
            }
        }
        if (!missing.empty()) {
            std::string list;
            for (auto const& m : missing) {
                list += (list.empty() ? "" : ", ") + m;
            }
            throw ModelError("the reward target is missed with positive probability under " + list);
        }
        return eliminate(model_.initial, all, goal, true).w;
    }

    std::vector<std::string> const& warnings() const { return warnings_; }

private:
    Edge eliminate(std::vector<Rational> const& initial, SatisfactionTable const& path,
                   SatisfactionTable const& goal, bool rewards) {
        std::size_t n = model_.state_count();
        std::size_t count = products();
        // Products under which each state can still reach the goal.
        SatisfactionTable can = goal;
        std::vector<std::vector<std::pair<StateIndex, std::size_t>>> incoming(n);
        for (StateIndex s = 0; s < n; ++s) {
            for (std::size_t i = 0; i < model_.transitions[s].size(); ++i) {
                incoming[model_.transitions[s][i].target].emplace_back(s, i);
            }
        }
        std::deque<StateIndex> work;
        for (StateIndex s = 0; s < n; ++s) {
            work.push_back(s);
        }
        while (!work.empty()) {
            StateIndex t = work.front();
            work.pop_front();
            for (auto const& [s, i] : incoming[t]) {
                bool changed = false;
                for (std::size_t p = 0; p < count; ++p) {
                    if (!can[s][p] && can[t][p] && path[s][p] && dense_[s][i][p] != 0) {
                        can[s][p] = 1;
                        changed = true;
                    }
                }
                if (changed) {
                    work.push_back(s);
                }
            }
        }
        std::vector<bool> keep(n);
        std::vector<Polynomial> z(n, Polynomial(1));
        for (StateIndex s = 0; s < n; ++s) {
            keep[s] = false;
            for (char c : can[s]) {
                keep[s] = keep[s] || c;
            }
            if (keep[s] && !uniform(can[s])) {
                z[s] = table_polynomial(diagram_, can[s]);
            }
        }
        std::vector<Polynomial> g = table_polynomials(goal);
        SatisfactionTable continuing = path;
        for (StateIndex s = 0; s < n; ++s) {
            for (std::size_t p = 0; p < count; ++p) {
                continuing[s][p] = continuing[s][p] && !goal[s][p];
            }
        }
        std::vector<Polynomial> h = table_polynomials(continuing);
        std::vector<Polynomial> reward(n);
        if (rewards) {
            for (StateIndex s = 0; s < n; ++s) {
                reward[s] = profile_to_polynomial((*model_.rewards)[s]);
            }
        }

        EliminationGraph graph(n, rewards);
        for (StateIndex s = 0; s < n; ++s) {
            if (!keep[s]) {
                continue;
            }
            graph.activate(s);
            if (initial[s] != 0) {
                graph.add(graph.source(), s, RationalFunction(Polynomial(initial[s])), RationalFunction());
            }
            graph.add(s, graph.sink(), RationalFunction(g[s]), RationalFunction());
            if (h[s].is_zero()) {
                continue;
            }
            Polynomial scale = z[s] * h[s];
            for (auto const& [target, p] : transitions_[s]) {
                if (!keep[target]) {
                    continue;
                }
                Polynomial probability = scale * p;
                RationalFunction w;
                if (rewards && !reward[target].is_zero()) {
                    w = RationalFunction(probability * (Polynomial(1) - g[target]) * reward[target]);
                }
                graph.add(s, target, RationalFunction(probability), w);
            }
        }
        graph.eliminate_all();
        return graph.result();
    }

    Fdtmc const& model_;
    FeatureDiagram const& diagram_;
    std::vector<std::vector<std::pair<StateIndex, Polynomial>>> transitions_;
    std::vector<std::vector<DenseProfile>> dense_;
    std::vector<std::string> warnings_;
};

SatisfactionTable table_of(std::vector<char> const& per_state, std::size_t products) {
    return constant_table(per_state, products);
}

}  // namespace

RationalFunction eliminate_reachability(Fdtmc const& model, SatisfactionTable const& path,
                                        SatisfactionTable const& goal) {
    return ParametricChecker(model).reachability(model.initial, path, goal);
}

RationalFunction eliminate_reachability(Fdtmc const& model, std::vector<char> const& target) {
    std::size_t products = model.diagram->product_count();
    return eliminate_reachability(model, table_of(std::vector<char>(model.state_count(), 1), products),
                                  table_of(target, products));
}

RationalFunction eliminate_expected_reward(Fdtmc const& model, SatisfactionTable const& target) {
    return ParametricChecker(model).expected_reward(target);
}

RationalFunction eliminate_expected_reward(Fdtmc const& model, std::vector<char> const& target) {
    return eliminate_expected_reward(model, table_of(target, model.diagram->product_count()));
}

ParametricResult check_family_parametric(Fdtmc const& model, Property const& property) {
    check_propositions(property, model.propositions);
    auto start = Clock::now();
    ParametricChecker checker(model);
    FeatureDiagram const& diagram = *model.diagram;
    std::size_t count = diagram.product_count();

    ParametricResult out;
    FamilyResult& family = out.family;
    family.engine = Engine::Parametric;
    family.diagram = model.diagram;
    family.property = to_string(property);
    family.results.resize(count);

    Formula const& root = property.formula;
    if (property.is_reward()) {
        out.function = checker.expected_reward(checker.satisfaction(root));
    } else if (root->kind == StateFormula::Kind::Probability) {
        PathFormula const& path = *root->path;
        if (path.kind == PathFormula::Kind::Next || path.bound) {
            auto polys = checker.unrolled(path);
            Polynomial total;
            for (StateIndex s = 0; s < model.state_count(); ++s) {
                if (model.initial[s] != 0) {
                    total = total + polys[s].scaled(model.initial[s]);
                }
            }
            out.function = RationalFunction(total);
        } else {
            out.function =
                checker.reachability(model.initial, checker.satisfaction(path.left), checker.satisfaction(path.right));
        }
    }

    if (out.function) {
        std::vector<Rational> direct;
        if (out.function->is_polynomial()) {
            direct = eval_products(out.function->numerator, diagram);
        }
        for (std::size_t p = 0; p < count; ++p) {
            ProductResult& r = family.results[p];
            r.product = p;
            auto v = direct.empty() ? out.function->eval(diagram.mask(p)) : std::optional<Rational>(direct[p]);
            if (!v) {
                family.warnings.push_back("denominator vanishes under " + diagram.product(p).to_string() +
                                          "; value recomputed by projection");
                ProductResult fallback = check_dtmc(project(model, p), property);
                fallback.product = p;
                r = fallback;
                continue;
            }
            r.value = Value::of(*v);
            r.verdict = decide(property, *v);
        }
    } else {
        SatisfactionTable sat = checker.satisfaction(root);
        for (std::size_t p = 0; p < count; ++p) {
            bool all = true;
            for (StateIndex s = 0; s < model.state_count(); ++s) {
                all = all && (model.initial[s] == 0 || sat[s][p]);
            }
            family.results[p].product = p;
            family.results[p].verdict = all ? Verdict::Satisfied : Verdict::Violated;
        }
    }
    for (auto const& w : checker.warnings()) {
        family.warnings.push_back(w);
    }
    family.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

std::string emit_expression(RationalFunction const& function, FeatureDiagram const& diagram,
                            std::vector<Rational> const* product_values) {
    auto const& signature = diagram.signature();
    if (function.is_polynomial() && diagram.feature_count() > kMaxInterpolationFeatures) {
        return integer_scaled(function.numerator, signature);
    }
    if (diagram.feature_count() <= kMaxInterpolationFeatures) {
        std::vector<Rational> values;
        for (std::size_t p = 0; p < diagram.product_count(); ++p) {
            auto v = function.eval(diagram.mask(p));
            if (!v) {
                if (!product_values) {
                    throw Error("cannot emit an expression: the denominator vanishes under " +
                                diagram.product(p).to_string());
                }
                v = (*product_values)[p];
            }
            values.push_back(*v);
        }
        return integer_scaled(epsilon_sum(diagram, values), signature);
    }
    return "(" + function.numerator.to_string(signature) + ") / (" + function.denominator.to_string(signature) + ")";
}

}  // namespace fpmc
