#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fpmc/models.h"
#include "fpmc/pctl.h"

namespace fpmc {

struct DtmcOptions {
    /// Value iteration in double precision instead of exact linear solving.
    bool floating = false;
    /// Stopping threshold of value iteration (maximum change per sweep).
    double tolerance = 1e-9;
    std::size_t max_iterations = 10'000'000;
};

/// Exact (or float64) PCTL and expected-reward checking of one chain.
class DtmcChecker {
public:
    explicit DtmcChecker(Dtmc const& model, DtmcOptions options = {});

    Dtmc const& model() const { return model_; }

    /// Per-state satisfaction of a state formula. The probability operator
    /// of a P=? query is treated as [0,1].
    std::vector<char> satisfies(Formula const& formula) const;

    /// Per-state probability of the path formula.
    std::vector<Rational> probabilities(PathFormula const& path) const;
    std::vector<double> float_probabilities(PathFormula const& path) const;

    /// Per-state expected accumulated reward until `target`; nullopt when
    /// the target is missed with positive probability. Reward is earned on
    /// every transition into a non-target state.
    std::vector<std::optional<Rational>> expected_reward(Formula const& target) const;
    std::vector<std::optional<double>> float_expected_reward(Formula const& target) const;

    /// States that reach `goal` via `path` states with probability 0 / 1.
    std::vector<char> prob0(std::vector<char> const& path, std::vector<char> const& goal) const;
    std::vector<char> prob1(std::vector<char> const& path, std::vector<char> const& goal) const;

private:
    template <typename T>
    std::vector<T> probabilities_impl(PathFormula const& path) const;
    template <typename T>
    std::vector<std::optional<T>> reward_impl(Formula const& target) const;

    Dtmc model_;
    DtmcOptions options_;
    std::vector<std::vector<StateIndex>> predecessors_;
};

/// Solves A·x = b exactly by Gaussian elimination. A is square and
/// nonsingular; the pivot in each column is the nonzero entry of smallest
/// bit size.
std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> matrix, std::vector<Rational> rhs);

}  // namespace fpmc
