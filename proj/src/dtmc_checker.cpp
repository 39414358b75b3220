#include "fpmc/dtmc_checker.h"

#include <cmath>
#include <deque>

#include "fpmc/errors.h"

namespace fpmc {

namespace {

template <typename T>
T convert(Rational const& value);

template <>
Rational convert<Rational>(Rational const& value) {
    return value;
}

template <>
double convert<double>(Rational const& value) {
    return to_double(value);
}

// Solves x(s) = b(s) + Σ_{s'∈U} P(s,s')·x(s') over the states in `unknown`.
// `position[s]` is the index of s in `unknown` or -1.
template <typename T>
std::vector<T> solve_system(Dtmc const& model, std::vector<StateIndex> const& unknown,
                            std::vector<long> const& position, std::vector<T> const& b,
                            DtmcOptions const& options);

template <>
std::vector<Rational> solve_system<Rational>(Dtmc const& model, std::vector<StateIndex> const& unknown,
                                             std::vector<long> const& position, std::vector<Rational> const& b,
                                             DtmcOptions const&) {
    std::size_t n = unknown.size();
    std::vector<std::vector<Rational>> matrix(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        matrix[i][i] = 1;
        for (auto const& [target, p] : model.rows[unknown[i]]) {
            if (position[target] >= 0) {
                matrix[i][position[target]] -= p;
            }
        }
    }
    return solve_linear(std::move(matrix), b);
}

template <>
std::vector<double> solve_system<double>(Dtmc const& model, std::vector<StateIndex> const& unknown,
                                         std::vector<long> const& position, std::vector<double> const& b,
                                         DtmcOptions const& options) {
    std::size_t n = unknown.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto const& [target, p] : model.rows[unknown[i]]) {
            if (position[target] >= 0) {
                rows[i].emplace_back(position[target], to_double(p));
            }
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t iteration = 0; iteration < options.max_iterations; ++iteration) {
        double change = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double value = b[i];
            for (auto const& [j, p] : rows[i]) {
                value += p * x[j];
            }
            change = std::max(change, std::fabs(value - x[i]));
            x[i] = value;
        }
        if (change < options.tolerance) {
            return x;
        }
    }
    throw ConvergenceError("value iteration did not converge within " + std::to_string(options.max_iterations) +
                           " sweeps");
}

}  // namespace

std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> matrix, std::vector<Rational> rhs) {
    std::size_t n = matrix.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = n;
        std::size_t best = 0;
        for (std::size_t row = col; row < n; ++row) {
            if (matrix[row][col] != 0) {
                std::size_t size = bit_size(matrix[row][col]);
                if (pivot == n || size < best) {
                    pivot = row;
                    best = size;
                }
            }
        }
        if (pivot == n) {
            throw Error("singular linear system");
        }
        std::swap(matrix[pivot], matrix[col]);
        std::swap(rhs[pivot], rhs[col]);
        Rational inverse = 1 / matrix[col][col];
        for (std::size_t row = col + 1; row < n; ++row) {
            if (matrix[row][col] == 0) {
                continue;
            }
            Rational factor = matrix[row][col] * inverse;
            for (std::size_t k = col; k < n; ++k) {
                if (matrix[col][k] != 0) {
                    matrix[row][k] -= factor * matrix[col][k];
                }
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rational value = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            if (matrix[i][k] != 0) {
                value -= matrix[i][k] * x[k];
            }
        }
        x[i] = value / matrix[i][i];
    }
    return x;
}

DtmcChecker::DtmcChecker(Dtmc const& model, DtmcOptions options)
    : model_(model), options_(options), predecessors_(model.state_count()) {
    for (StateIndex s = 0; s < model_.state_count(); ++s) {
        for (auto const& [target, p] : model_.rows[s]) {
            if (p != 0) {
                predecessors_[target].push_back(s);
            }
        }
    }
}

std::vector<char> DtmcChecker::satisfies(Formula const& formula) const {
    std::size_t n = model_.state_count();
    std::vector<char> result(n, 0);
    switch (formula->kind) {
        case StateFormula::Kind::True:
            std::fill(result.begin(), result.end(), 1);
            break;
        case StateFormula::Kind::Atom:
            for (StateIndex s = 0; s < n; ++s) {
                result[s] = model_.labels[s].count(formula->atom) != 0;
            }
            break;
        case StateFormula::Kind::Not: {
            auto inner = satisfies(formula->left);
            for (StateIndex s = 0; s < n; ++s) {
                result[s] = !inner[s];
            }
            break;
        }
        case StateFormula::Kind::And: {
            auto left = satisfies(formula->left);
            auto right = satisfies(formula->right);
            for (StateIndex s = 0; s < n; ++s) {
                result[s] = left[s] && right[s];
            }
            break;
        }
        case StateFormula::Kind::Probability: {
            if (formula->quantitative) {
                std::fill(result.begin(), result.end(), 1);
            } else if (options_.floating) {
                auto values = float_probabilities(*formula->path);
                for (StateIndex s = 0; s < n; ++s) {
                    result[s] = formula->interval.contains(values[s], 0.0);
                }
            } else {
                auto values = probabilities(*formula->path);
                for (StateIndex s = 0; s < n; ++s) {
                    result[s] = formula->interval.contains(values[s]);
                }
            }
            break;
        }
    }
    return result;
}

std::vector<char> DtmcChecker::prob0(std::vector<char> const& path, std::vector<char> const& goal) const {
    std::size_t n = model_.state_count();
    std::vector<char> reach(goal);
    std::deque<StateIndex> work;
    for (StateIndex s = 0; s < n; ++s) {
        if (goal[s]) {
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        StateIndex s = work.front();
        work.pop_front();
        for (StateIndex pred : predecessors_[s]) {
            if (!reach[pred] && path[pred]) {
                reach[pred] = 1;
                work.push_back(pred);
            }
        }
    }
    std::vector<char> result(n);
    for (StateIndex s = 0; s < n; ++s) {
        result[s] = !reach[s];
    }
    return result;
}

std::vector<char> DtmcChecker::prob1(std::vector<char> const& path, std::vector<char> const& goal) const {
    std::size_t n = model_.state_count();
    std::vector<char> bad = prob0(path, goal);
    std::deque<StateIndex> work;
    for (StateIndex s = 0; s < n; ++s) {
        if (bad[s]) {
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        StateIndex s = work.front();
        work.pop_front();
        for (StateIndex pred : predecessors_[s]) {
            if (!bad[pred] && path[pred] && !goal[pred]) {
                bad[pred] = 1;
                work.push_back(pred);
            }
        }
    }
    std::vector<char> result(n);
    for (StateIndex s = 0; s < n; ++s) {
        result[s] = !bad[s];
    }
    return result;
}

template <typename T>
std::vector<T> DtmcChecker::probabilities_impl(PathFormula const& path) const {
    std::size_t n = model_.state_count();
    std::vector<char> goal = satisfies(path.right);
    if (path.kind == PathFormula::Kind::Next) {
        std::vector<T> result(n, T(0));
        for (StateIndex s = 0; s < n; ++s) {
            for (auto const& [target, p] : model_.rows[s]) {
                if (goal[target]) {
                    result[s] += convert<T>(p);
                }
            }
        }
        return result;
    }
    std::vector<char> left = satisfies(path.left);
    if (path.bound) {
        std::vector<T> x(n, T(0));
        for (StateIndex s = 0; s < n; ++s) {
            x[s] = goal[s] ? T(1) : T(0);
        }
        for (std::uint64_t step = 0; step < *path.bound; ++step) {
            std::vector<T> next(n, T(0));
            bool changed = false;
            for (StateIndex s = 0; s < n; ++s) {
                if (goal[s]) {
                    next[s] = 1;
                } else if (left[s]) {
                    for (auto const& [target, p] : model_.rows[s]) {
                        next[s] += convert<T>(p) * x[target];
                    }
                }
                changed = changed || next[s] != x[s];
            }
            x = std::move(next);
            if (!changed) {
                break;
            }
        }
        return x;
    }
    std::vector<char> zero = prob0(left, goal);
    std::vector<char> one = prob1(left, goal);
    std::vector<StateIndex> unknown;
    std::vector<long> position(n, -1);
    for (StateIndex s = 0; s < n; ++s) {
        if (!zero[s] && !one[s]) {
            position[s] = static_cast<long>(unknown.size());
            unknown.push_back(s);
        }
    }
    std::vector<T> b(unknown.size(), T(0));
    for (std::size_t i = 0; i < unknown.size(); ++i) {
        for (auto const& [target, p] : model_.rows[unknown[i]]) {
            if (one[target]) {
                b[i] += convert<T>(p);
            }
        }
    }
    std::vector<T> solution = solve_system<T>(model_, unknown, position, b, options_);
    std::vector<T> result(n, T(0));
    for (StateIndex s = 0; s < n; ++s) {
        if (one[s]) {
            result[s] = 1;
        } else if (position[s] >= 0) {
            result[s] = solution[position[s]];
        }
    }
    return result;
}

template <typename T>
std::vector<std::optional<T>> DtmcChecker::reward_impl(Formula const& target) const {
    if (!model_.rewards) {
        throw ModelError("the model has no rewards");
    }
    std::size_t n = model_.state_count();
    std::vector<char> goal = satisfies(target);
    std::vector<char> all(n, 1);
    std::vector<char> one = prob1(all, goal);
    std::vector<StateIndex> unknown;
    std::vector<long> position(n, -1);
    for (StateIndex s = 0; s < n; ++s) {
        if (one[s] && !goal[s]) {
            position[s] = static_cast<long>(unknown.size());
            unknown.push_back(s);
        }
    }
    std::vector<T> b(unknown.size(), T(0));
    for (std::size_t i = 0; i < unknown.size(); ++i) {
        for (auto const& [next, p] : model_.rows[unknown[i]]) {
            if (!goal[next]) {
                b[i] += convert<T>(p) * convert<T>((*model_.rewards)[next]);
            }
        }
    }
    std::vector<T> solution = solve_system<T>(model_, unknown, position, b, options_);
    std::vector<std::optional<T>> result(n);
    for (StateIndex s = 0; s < n; ++s) {
        if (goal[s]) {
            result[s] = T(0);
        } else if (position[s] >= 0) {
            result[s] = solution[position[s]];
        }
    }
    return result;
}

std::vector<Rational> DtmcChecker::probabilities(PathFormula const& path) const {
    return probabilities_impl<Rational>(path);
}

std::vector<double> DtmcChecker::float_probabilities(PathFormula const& path) const {
    return probabilities_impl<double>(path);
}

std::vector<std::optional<Rational>> DtmcChecker::expected_reward(Formula const& target) const {
    return reward_impl<Rational>(target);
}

std::vector<std::optional<double>> DtmcChecker::float_expected_reward(Formula const& target) const {
    return reward_impl<double>(target);
}

}  // namespace fpmc
