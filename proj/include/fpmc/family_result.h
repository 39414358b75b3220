#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fpmc/feature_model.h"
#include "fpmc/pctl.h"
#include "fpmc/rational.h"

namespace fpmc {

enum class Engine { Enumerative, Parametric, Bounded };

std::string engine_name(Engine engine);

enum class Verdict { Satisfied, Violated, Unknown, NotApplicable };

std::string verdict_name(Verdict verdict);

/// A per-product result value: exact, an enclosing interval, infinite
/// (expected reward with a reachable non-target sink) or absent (the root
/// formula is Boolean).
struct Value {
    enum class Kind { None, Exact, Approximate, Infinite };

    Kind kind = Kind::None;
    Rational exact;
    double lower = 0;
    double upper = 0;

    static Value none() { return {}; }
    static Value of(Rational v);
    static Value interval(double lower, double upper);
    static Value infinite();

    bool is_exact() const { return kind == Kind::Exact; }
    /// Exact value, interval midpoint, or +inf.
    double approx() const;
    double half_width() const { return kind == Kind::Approximate ? (upper - lower) / 2 : 0; }
    /// Exact values longer than a few digits are shown rounded with a '~'.
    std::string to_string() const;
    /// Full exact value, or empty when the value is not exact.
    std::string exact_string() const;
};

struct ProductResult {
    std::size_t product = 0;
    Value value;
    Verdict verdict = Verdict::NotApplicable;
    /// Wall time spent on this product alone; 0 when not measured.
    double seconds = 0;
};

/// Results of one engine for every valid product, in canonical order.
struct FamilyResult {
    Engine engine = Engine::Enumerative;
    DiagramPtr diagram;
    std::string property;
    std::vector<ProductResult> results;
    /// Total wall time of the engine run.
    double seconds = 0;
    std::vector<std::string> warnings;

    std::size_t unknown_count() const;
};

/// Root-level decision for an exact value of the property's top operator.
Verdict decide(Property const& property, Rational const& value);

}  // namespace fpmc
