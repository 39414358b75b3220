#include "fpmc/bounded.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "fpmc/errors.h"

namespace fpmc {

namespace {

using Clock = std::chrono::steady_clock;
using BoolTable = std::vector<std::vector<char>>;

template <typename Scalar>
Scalar from_rational(Rational const& value);

template <>
double from_rational<double>(Rational const& value) {
    return to_double(value);
}

template <>
Rational from_rational<Rational>(Rational const& value) {
    return value;
}

double as_double(double value) { return value; }
double as_double(Rational const& value) { return to_double(value); }

template <typename Scalar>
Scalar tolerance_of(BoundedOptions const& options);

template <>
double tolerance_of<double>(BoundedOptions const& options) {
    return options.tolerance;
}

template <>
Rational tolerance_of<Rational>(BoundedOptions const&) {
    return 0;
}

bool any(std::vector<char> const& row) {
    for (char c : row) {
        if (c) {
            return true;
        }
    }
    return false;
}

}  // namespace

Verdict classify(Interval const& interval, Rational const& lower, Rational const& upper) {
    if (interval.contains(lower) && interval.contains(upper)) {
        return Verdict::Satisfied;
    }
    bool below = upper < interval.lower || (upper == interval.lower && interval.lower_open);
    bool above = lower > interval.upper || (lower == interval.upper && interval.upper_open);
    return below || above ? Verdict::Violated : Verdict::Unknown;
}

namespace {

constexpr double kRoundingSlack = 1e-9;

/// Floating-point bounds are widened by a relative slack before they are
/// compared against the interval; exact bounds are used as they are.
Verdict classify_bounds(Interval const& interval, double lower, double upper) {
    double down = lower - kRoundingSlack * std::max(1.0, std::abs(lower));
    double up = upper + kRoundingSlack * std::max(1.0, std::abs(upper));
    return classify(interval, Rational(down), Rational(up));
}

Verdict classify_bounds(Interval const& interval, Rational const& lower, Rational const& upper) {
    return classify(interval, lower, upper);
}

}  // namespace

template <typename Scalar>
BoundedEngine<Scalar>::BoundedEngine(Fdtmc const& model, BoundedOptions options)
    : model_(model),
      options_(options),
      products_(model.diagram->product_count()),
      steps_(model.state_count()),
      predecessors_(model.state_count()) {
    auto dense = dense_transitions(model);
    for (StateIndex s = 0; s < model.state_count(); ++s) {
        std::vector<std::pair<StateIndex, std::vector<Scalar>>> merged;
        for (std::size_t i = 0; i < model.transitions[s].size(); ++i) {
            StateIndex target = model.transitions[s][i].target;
            std::vector<Scalar>* row = nullptr;
            for (auto& [t, values] : merged) {
                if (t == target) {
                    row = &values;
                }
            }
            if (!row) {
                merged.emplace_back(target, std::vector<Scalar>(products_, Scalar(0)));
                row = &merged.back().second;
            }
            for (std::size_t p = 0; p < products_; ++p) {
                (*row)[p] += from_rational<Scalar>(dense[s][i][p]);
            }
        }
        for (auto& [target, values] : merged) {
            bool nonzero = false;
            for (auto const& v : values) {
                nonzero = nonzero || v != 0;
            }
            if (nonzero) {
                steps_[s].push_back({target, std::move(values)});
                predecessors_[target].push_back(s);
            }
        }
    }
}

template <typename Scalar>
BoolTable BoundedEngine<Scalar>::can_reach(BoolTable const& path, BoolTable const& goal) const {
    std::size_t n = model_.state_count();
    BoolTable can = goal;
    std::deque<StateIndex> work;
    for (StateIndex s = 0; s < n; ++s) {
        work.push_back(s);
    }
    while (!work.empty()) {
        StateIndex t = work.front();
        work.pop_front();
        for (StateIndex s : predecessors_[t]) {
            bool changed = false;
            for (auto const& step : steps_[s]) {
                if (step.target != t) {
                    continue;
                }
                for (std::size_t p = 0; p < products_; ++p) {
                    if (!can[s][p] && can[t][p] && path[s][p] && step.probability[p] != 0) {
                        can[s][p] = 1;
                        changed = true;
                    }
                }
            }
            if (changed) {
                work.push_back(s);
            }
        }
    }
    return can;
}

template <typename Scalar>
Approximation<Scalar> BoundedEngine<Scalar>::iterate(BoolTable const& path, BoolTable const& goal,
                                                     std::optional<std::uint64_t> rounds, double epsilon,
                                                     bool track_undecided, Observer const& observer) {
    std::size_t n = model_.state_count();
    Scalar const tau = tolerance_of<Scalar>(options_);
    BoolTable open(n, std::vector<char>(products_, 0));
    std::vector<char> active(n, 0);
    for (StateIndex s = 0; s < n; ++s) {
        for (std::size_t p = 0; p < products_; ++p) {
            open[s][p] = path[s][p] && !goal[s][p];
        }
        active[s] = any(open[s]);
    }
    BoolTable live;
    if (track_undecided) {
        BoolTable reach = can_reach(path, goal);
        live = open;
        for (StateIndex s = 0; s < n; ++s) {
            for (std::size_t p = 0; p < products_; ++p) {
                live[s][p] = live[s][p] && reach[s][p];
            }
        }
    }

    Approximation<Scalar> a;
    a.lower.assign(n, std::vector<Scalar>(products_, Scalar(0)));
    a.undecided.assign(n, std::vector<Scalar>(products_, Scalar(0)));
    std::vector<char> changed(n, 0);
    for (StateIndex s = 0; s < n; ++s) {
        for (std::size_t p = 0; p < products_; ++p) {
            if (goal[s][p]) {
                a.lower[s][p] = 1;
                changed[s] = 1;
            }
            if (track_undecided && live[s][p]) {
                a.undecided[s][p] = 1;
            }
        }
    }
    auto residual = [&](StateIndex* worst_state, std::size_t* worst_product) {
        double worst = 0;
        for (StateIndex s = 0; s < n; ++s) {
            for (std::size_t p = 0; p < products_; ++p) {
                double u = as_double(a.undecided[s][p]);
                if (u > worst) {
                    worst = u;
                    *worst_state = s;
                    *worst_product = p;
                }
            }
        }
        return worst;
    };
    if (observer) {
        observer(a);
    }
    StateIndex worst_state = 0;
    std::size_t worst_product = 0;
    if (!rounds && residual(&worst_state, &worst_product) < epsilon) {
        return a;
    }

    struct Update {
        StateIndex state;
        std::size_t product;
        Scalar value;
    };
    std::vector<Update> updates;
    ProfileTable<Scalar> next_undecided;
    for (std::uint64_t k = 1;; ++k) {
        if (rounds && k > *rounds) {
            break;
        }
        if (k > options_.max_depth) {
            double worst = residual(&worst_state, &worst_product);
            throw ConvergenceError("no convergence within " + std::to_string(options_.max_depth) +
                                   " rounds: undecided mass " + to_fixed(worst, 6) + " at state '" +
                                   model_.states[worst_state] + "' under product " +
                                   model_.diagram->product(worst_product).to_string());
        }
        updates.clear();
        std::vector<char> next_changed(n, 0);
        for (StateIndex s = 0; s < n; ++s) {
            if (!active[s]) {
                continue;
            }
            if (options_.frontier) {
                bool touched = false;
                for (auto const& step : steps_[s]) {
                    touched = touched || changed[step.target];
                }
                if (!touched) {
                    continue;
                }
            }
            for (std::size_t p = 0; p < products_; ++p) {
                if (!open[s][p]) {
                    continue;
                }
                Scalar value = 0;
                for (auto const& step : steps_[s]) {
                    if (step.probability[p] != 0 && a.lower[step.target][p] != 0) {
                        value += step.probability[p] * a.lower[step.target][p];
                    }
                }
                if (value > a.lower[s][p] + tau) {
                    updates.push_back({s, p, std::move(value)});
                }
            }
        }
        if (track_undecided) {
            next_undecided.assign(n, std::vector<Scalar>(products_, Scalar(0)));
            for (StateIndex s = 0; s < n; ++s) {
                if (!active[s]) {
                    continue;
                }
                for (std::size_t p = 0; p < products_; ++p) {
                    if (!live[s][p]) {
                        continue;
                    }
                    Scalar value = 0;
                    for (auto const& step : steps_[s]) {
                        if (step.probability[p] != 0 && a.undecided[step.target][p] != 0) {
                            value += step.probability[p] * a.undecided[step.target][p];
                        }
                    }
                    next_undecided[s][p] = std::move(value);
                }
            }
            a.undecided.swap(next_undecided);
        }
        for (auto& u : updates) {
            a.lower[u.state][u.product] = std::move(u.value);
            next_changed[u.state] = 1;
        }
        changed.swap(next_changed);
        a.depth = k;
        if (observer) {
            observer(a);
        }
        if (!rounds && residual(&worst_state, &worst_product) < epsilon) {
            break;
        }
        if (rounds && updates.empty() && !track_undecided) {
            break;
        }
    }
    return a;
}

template <typename Scalar>
BoolTable BoundedEngine<Scalar>::definite(Formula const& formula) {
    TriTable table = satisfaction(formula);
    for (StateIndex s = 0; s < table.size(); ++s) {
        for (std::size_t p = 0; p < products_; ++p) {
            if (table[s][p] == 2) {
                throw ConvergenceError("subformula " + to_string(formula) + " is undecided at state '" +
                                       model_.states[s] + "' under product " +
                                       model_.diagram->product(p).to_string());
            }
        }
    }
    return table;
}

template <typename Scalar>
TriTable BoundedEngine<Scalar>::threshold(PathFormula const& path, Interval const& interval, bool quantitative) {
    std::size_t n = model_.state_count();
    if (quantitative) {
        return TriTable(n, std::vector<char>(products_, 1));
    }
    auto classify_all = [&](ProfileTable<Scalar> const& lower, ProfileTable<Scalar> const* undecided) {
        TriTable t(n, std::vector<char>(products_, 0));
        bool unknown = false;
        for (StateIndex s = 0; s < n; ++s) {
            for (std::size_t p = 0; p < products_; ++p) {
                Scalar hi = undecided ? Scalar(lower[s][p] + (*undecided)[s][p]) : lower[s][p];
                Verdict v = classify_bounds(interval, lower[s][p], hi);
                t[s][p] = v == Verdict::Satisfied ? 1 : v == Verdict::Violated ? 0 : 2;
                unknown = unknown || v == Verdict::Unknown;
            }
        }
        return std::make_pair(t, unknown);
    };
    if (path.kind == PathFormula::Kind::Next) {
        return classify_all(next_profiles(path.right), nullptr).first;
    }
    if (path.bound) {
        return classify_all(bounded_until_profiles(path.left, path.right, *path.bound), nullptr).first;
    }
    auto approx = until_lower_approx(path.left, path.right, options_.epsilon);
    auto [table, unknown] = classify_all(approx.lower, &approx.undecided);
    if (unknown && options_.deepen && !options_.depth) {
        approx = until_lower_approx(path.left, path.right, options_.epsilon / 10);
        table = classify_all(approx.lower, &approx.undecided).first;
    }
    return table;
}

template <typename Scalar>
TriTable BoundedEngine<Scalar>::satisfaction(Formula const& formula) {
    std::size_t n = model_.state_count();
    std::unordered_map<StateFormula const*, TriTable> tables;
    for (Formula const& node : parse_tree(formula)) {
        TriTable t(n, std::vector<char>(products_, 0));
        switch (node->kind) {
            case StateFormula::Kind::True:
                t.assign(n, std::vector<char>(products_, 1));
                break;
            case StateFormula::Kind::Atom:
                for (StateIndex s = 0; s < n; ++s) {
                    t[s].assign(products_, model_.labels[s].count(node->atom) ? 1 : 0);
                }
                break;
            case StateFormula::Kind::Not: {
                TriTable const& inner = tables.at(node->left.get());
                for (StateIndex s = 0; s < n; ++s) {
                    for (std::size_t p = 0; p < products_; ++p) {
                        t[s][p] = inner[s][p] == 2 ? 2 : !inner[s][p];
                    }
                }
                break;
            }
            case StateFormula::Kind::And: {
                TriTable const& a = tables.at(node->left.get());
                TriTable const& b = tables.at(node->right.get());
                for (StateIndex s = 0; s < n; ++s) {
                    for (std::size_t p = 0; p < products_; ++p) {
                        bool false_a = a[s][p] == 0;
                        bool false_b = b[s][p] == 0;
                        t[s][p] = (false_a || false_b) ? 0 : (a[s][p] == 1 && b[s][p] == 1) ? 1 : 2;
                    }
                }
                break;
            }
            case StateFormula::Kind::Probability:
                t = threshold(*node->path, node->interval, node->quantitative);
                break;
        }
        tables[node.get()] = std::move(t);
    }
    return tables.at(formula.get());
}

template <typename Scalar>
ProfileTable<Scalar> BoundedEngine<Scalar>::next_profiles(Formula const& operand) {
    BoolTable goal = definite(operand);
    std::size_t n = model_.state_count();
    ProfileTable<Scalar> x(n, std::vector<Scalar>(products_, Scalar(0)));
    for (StateIndex s = 0; s < n; ++s) {
        for (auto const& step : steps_[s]) {
            for (std::size_t p = 0; p < products_; ++p) {
                if (goal[step.target][p]) {
                    x[s][p] += step.probability[p];
                }
            }
        }
    }
    return x;
}

template <typename Scalar>
ProfileTable<Scalar> BoundedEngine<Scalar>::bounded_until_profiles(Formula const& left, Formula const& right,
                                                                   std::uint64_t steps) {
    return iterate(definite(left), definite(right), steps, 0, false, {}).lower;
}

template <typename Scalar>
Approximation<Scalar> BoundedEngine<Scalar>::until_lower_approx(Formula const& left, Formula const& right,
                                                                double epsilon, Observer const& observer) {
    if (!options_.depth && !(epsilon > 0)) {
        throw Error("the residual stopping rule needs a positive epsilon");
    }
    return iterate(definite(left), definite(right), options_.depth, epsilon, true, observer);
}

template <typename Scalar>
std::vector<std::optional<std::pair<Scalar, Scalar>>> BoundedEngine<Scalar>::expected_reward(Formula const& target,
                                                                                            double epsilon) {
    if (!model_.rewards) {
        throw ModelError("the model has no rewards");
    }
    std::size_t n = model_.state_count();
    BoolTable goal = definite(target);
    BoolTable everywhere(n, std::vector<char>(products_, 1));
    BoolTable bad = can_reach(everywhere, goal);
    for (auto& row : bad) {
        for (auto& c : row) {
            c = !c;
        }
    }
    // Non-goal states with a positive step into a bad state are bad too.
    std::deque<StateIndex> work;
    for (StateIndex s = 0; s < n; ++s) {
        work.push_back(s);
    }
    while (!work.empty()) {
        StateIndex t = work.front();
        work.pop_front();
        for (StateIndex s : predecessors_[t]) {
            bool changed = false;
            for (auto const& step : steps_[s]) {
                if (step.target != t) {
                    continue;
                }
                for (std::size_t p = 0; p < products_; ++p) {
                    if (!bad[s][p] && !goal[s][p] && bad[t][p] && step.probability[p] != 0) {
                        bad[s][p] = 1;
                        changed = true;
                    }
                }
            }
            if (changed) {
                work.push_back(s);
            }
        }
    }
    BoolTable live(n, std::vector<char>(products_, 0));
    ProfileTable<Scalar> reward(n, std::vector<Scalar>(products_, Scalar(0)));
    for (StateIndex s = 0; s < n; ++s) {
        DenseProfile r = to_dense((*model_.rewards)[s], model_.diagram);
        for (std::size_t p = 0; p < products_; ++p) {
            live[s][p] = !bad[s][p] && !goal[s][p];
            reward[s][p] = goal[s][p] ? Scalar(0) : from_rational<Scalar>(r[p]);
        }
    }
    std::vector<std::optional<std::pair<Scalar, Scalar>>> result(products_);
    std::vector<char> finite(products_, 1);
    std::vector<char> pending(products_, 0);
    for (std::size_t p = 0; p < products_; ++p) {
        for (StateIndex s = 0; s < n; ++s) {
            if (model_.initial[s] != 0 && bad[s][p]) {
                finite[p] = 0;
            }
        }
        pending[p] = finite[p];
    }
    ProfileTable<Scalar> y(n, std::vector<Scalar>(products_, Scalar(0)));
    ProfileTable<Scalar> u(n, std::vector<Scalar>(products_, Scalar(0)));
    for (StateIndex s = 0; s < n; ++s) {
        for (std::size_t p = 0; p < products_; ++p) {
            u[s][p] = live[s][p] ? Scalar(1) : Scalar(0);
        }
    }
    for (std::uint64_t k = 1;; ++k) {
        bool open = false;
        for (char c : pending) {
            open = open || c;
        }
        if (!open) {
            break;
        }
        if (k > options_.max_depth) {
            throw ConvergenceError("expected reward bounds did not converge within " +
                                   std::to_string(options_.max_depth) + " rounds");
        }
        ProfileTable<Scalar> y2(n, std::vector<Scalar>(products_, Scalar(0)));
        ProfileTable<Scalar> u2(n, std::vector<Scalar>(products_, Scalar(0)));
        for (StateIndex s = 0; s < n; ++s) {
            for (std::size_t p = 0; p < products_; ++p) {
                if (!live[s][p] || !pending[p]) {
                    continue;
                }
                for (auto const& step : steps_[s]) {
                    Scalar const& prob = step.probability[p];
                    if (prob == 0) {
                        continue;
                    }
                    y2[s][p] += prob * (reward[step.target][p] + y[step.target][p]);
                    u2[s][p] += prob * u[step.target][p];
                }
            }
        }
        y.swap(y2);
        u.swap(u2);
        for (std::size_t p = 0; p < products_; ++p) {
            if (!pending[p]) {
                continue;
            }
            Scalar top = 0;
            Scalar q = 0;
            for (StateIndex s = 0; s < n; ++s) {
                if (live[s][p]) {
                    top = std::max(top, y[s][p]);
                    q = std::max(q, u[s][p]);
                }
            }
            if (!(q < 1)) {
                continue;
            }
            Scalar bound = top / (Scalar(1) - q);
            Scalar lo = 0;
            Scalar hi = 0;
            for (StateIndex s = 0; s < n; ++s) {
                if (model_.initial[s] != 0) {
                    Scalar weight = from_rational<Scalar>(model_.initial[s]);
                    lo += weight * y[s][p];
                    hi += weight * (y[s][p] + u[s][p] * bound);
                }
            }
            if (as_double(hi - lo) < epsilon) {
                result[p] = std::make_pair(lo, hi);
                pending[p] = 0;
            }
        }
    }
    return result;
}

template class BoundedEngine<double>;
template class BoundedEngine<Rational>;

namespace {

template <typename Scalar>
FamilyResult run_bounded(Fdtmc const& model, Property const& property, BoundedOptions const& options) {
    check_propositions(property, model.propositions);
    auto start = Clock::now();
    BoundedEngine<Scalar> engine(model, options);
    std::size_t count = engine.products();
    FamilyResult family;
    family.engine = Engine::Bounded;
    family.diagram = model.diagram;
    family.property = to_string(property);
    family.results.resize(count);
    for (std::size_t p = 0; p < count; ++p) {
        family.results[p].product = p;
    }
    auto make_value = [](Scalar const& lo, Scalar const& hi) {
        if constexpr (std::is_same_v<Scalar, Rational>) {
            if (lo == hi) {
                return Value::of(lo);
            }
        }
        return Value::interval(as_double(lo), as_double(hi));
    };
    Formula const& root = property.formula;
    if (property.is_reward()) {
        auto values = engine.expected_reward(root, options.epsilon);
        for (std::size_t p = 0; p < count; ++p) {
            family.results[p].value = values[p] ? make_value(values[p]->first, values[p]->second) : Value::infinite();
        }
    } else if (root->kind == StateFormula::Kind::Probability) {
        PathFormula const& path = *root->path;
        auto weighted = [&](ProfileTable<Scalar> const& lower, ProfileTable<Scalar> const* undecided) {
            std::vector<std::pair<Scalar, Scalar>> out(count);
            for (std::size_t p = 0; p < count; ++p) {
                Scalar lo = 0;
                Scalar width = 0;
                for (StateIndex s = 0; s < model.state_count(); ++s) {
                    if (model.initial[s] == 0) {
                        continue;
                    }
                    Scalar weight = from_rational<Scalar>(model.initial[s]);
                    lo += weight * lower[s][p];
                    if (undecided) {
                        width += weight * (*undecided)[s][p];
                    }
                }
                out[p] = {lo, lo + width};
            }
            return out;
        };
        auto decide_all = [&](std::vector<std::pair<Scalar, Scalar>> const& bounds) {
            bool unknown = false;
            for (std::size_t p = 0; p < count; ++p) {
                auto& r = family.results[p];
                r.value = make_value(bounds[p].first, bounds[p].second);
                r.verdict = root->quantitative
                                ? Verdict::NotApplicable
                                : classify_bounds(root->interval, bounds[p].first, bounds[p].second);
                unknown = unknown || r.verdict == Verdict::Unknown;
            }
            return unknown;
        };
        if (path.kind == PathFormula::Kind::Next) {
            decide_all(weighted(engine.next_profiles(path.right), nullptr));
        } else if (path.bound) {
            decide_all(weighted(engine.bounded_until_profiles(path.left, path.right, *path.bound), nullptr));
        } else {
            auto approx = engine.until_lower_approx(path.left, path.right, options.epsilon);
            bool unknown = decide_all(weighted(approx.lower, &approx.undecided));
            if (unknown && options.deepen && !options.depth) {
                family.warnings.push_back("undecided products at epsilon " + to_fixed(options.epsilon, 6) +
                                          "; rerun at epsilon / 10");
                approx = engine.until_lower_approx(path.left, path.right, options.epsilon / 10);
                decide_all(weighted(approx.lower, &approx.undecided));
            }
        }
    } else {
        TriTable sat = engine.satisfaction(root);
        for (std::size_t p = 0; p < count; ++p) {
            bool violated = false;
            bool undecided = false;
            for (StateIndex s = 0; s < model.state_count(); ++s) {
                if (model.initial[s] == 0) {
                    continue;
                }
                violated = violated || sat[s][p] == 0;
                undecided = undecided || sat[s][p] == 2;
            }
            family.results[p].verdict =
                violated ? Verdict::Violated : undecided ? Verdict::Unknown : Verdict::Satisfied;
        }
    }
    family.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return family;
}

}  // namespace

FamilyResult check_family_bounded(Fdtmc const& model, Property const& property, BoundedOptions const& options) {
    return run_bounded<double>(model, property, options);
}

FamilyResult check_family_bounded_exact(Fdtmc const& model, Property const& property,
                                        BoundedOptions const& options) {
    return run_bounded<Rational>(model, property, options);
}

}  // namespace fpmc
