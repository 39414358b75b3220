#include "fpmc/family_result.h"

#include <cmath>
#include <limits>

namespace fpmc {

namespace {
constexpr std::size_t kShortExact = 16;
}  // namespace

std::string engine_name(Engine engine) {
    switch (engine) {
        case Engine::Enumerative:
            return "enum";
        case Engine::Parametric:
            return "param";
        case Engine::Bounded:
            return "bounded";
    }
    return "";
}

std::string verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::Satisfied:
            return "satisfied";
        case Verdict::Violated:
            return "violated";
        case Verdict::Unknown:
            return "unknown";
        case Verdict::NotApplicable:
            return "-";
    }
    return "";
}

Value Value::of(Rational v) {
    Value value;
    value.kind = Kind::Exact;
    value.exact = std::move(v);
    return value;
}

Value Value::interval(double lower, double upper) {
    Value value;
    value.kind = Kind::Approximate;
    value.lower = lower;
    value.upper = upper;
    return value;
}

Value Value::infinite() {
    Value value;
    value.kind = Kind::Infinite;
    return value;
}

double Value::approx() const {
    switch (kind) {
        case Kind::Exact:
            return to_double(exact);
        case Kind::Approximate:
            return (lower + upper) / 2;
        case Kind::Infinite:
            return std::numeric_limits<double>::infinity();
        case Kind::None:
            break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string Value::exact_string() const { return kind == Kind::Exact ? fpmc::to_string(exact) : std::string(); }

std::string Value::to_string() const {
    switch (kind) {
        case Kind::Exact: {
            std::string text = fpmc::to_string(exact);
            if (text.size() <= kShortExact) {
                return text;
            }
            return "~" + to_fixed(to_double(exact), 12);
        }
        case Kind::Approximate:
            if (upper == lower) {
                return to_fixed(lower, 9);
            }
            return to_fixed(approx(), 9) + " +/- " + to_fixed(half_width(), 9);
        case Kind::Infinite:
            return "inf";
        case Kind::None:
            break;
    }
    return "-";
}

std::size_t FamilyResult::unknown_count() const {
    std::size_t count = 0;
    for (auto const& r : results) {
        count += r.verdict == Verdict::Unknown;
    }
    return count;
}

Verdict decide(Property const& property, Rational const& value) {
    if (property.quantitative() || property.formula->kind != StateFormula::Kind::Probability) {
        return Verdict::NotApplicable;
    }
    return property.formula->interval.contains(value) ? Verdict::Satisfied : Verdict::Violated;
}

}  // namespace fpmc
