#include "fpmc/profile.h"

#include <map>
#include <optional>

namespace fpmc {

Profile::Profile(DiagramPtr diagram, Rational constant) : diagram_(std::move(diagram)), default_(std::move(constant)) {}

Profile::Profile(DiagramPtr diagram, std::vector<ProfileCase> cases, Rational default_value)
    : diagram_(std::move(diagram)), cases_(std::move(cases)), default_(std::move(default_value)) {
    for (auto const& c : cases_) {
        for (auto const& name : c.guard.variables()) {
            if (!diagram_->feature_index(name)) {
                throw ModelError("profile guard references undeclared feature '" + name + "'");
            }
        }
    }
}

Rational Profile::eval(std::size_t product) const {
    std::uint64_t const mask = diagram_->mask(product);
    for (auto const& c : cases_) {
        if (diagram_->compile(c.guard)(mask)) {
            return c.value;
        }
    }
    return default_;
}

Profile Profile::rehome(DiagramPtr diagram) const { return Profile(std::move(diagram), cases_, default_); }

Profile Profile::compacted() const {
    std::vector<ProfileCase> kept;
    Rational fallback = default_;
    for (auto const& c : cases_) {
        Expr const guard = c.guard.simplified();
        if (guard.is_false()) {
            continue;
        }
        if (guard.is_true()) {
            fallback = c.value;
            break;
        }
        if (!kept.empty() && kept.back().value == c.value) {
            kept.back().guard = Expr::disj(kept.back().guard, guard);
            continue;
        }
        kept.push_back({guard, c.value});
    }
    while (!kept.empty() && kept.back().value == fallback) {
        kept.pop_back();
    }
    return Profile(diagram_, std::move(kept), std::move(fallback));
}

std::string Profile::to_string() const {
    std::string text;
    for (auto const& c : cases_) {
        text += "[" + c.guard.to_string() + "] " + fpmc::to_string(c.value) + ", ";
    }
    return text + fpmc::to_string(default_);
}

Rational eval_profile(Profile const& profile, Product const& product) {
    auto const index = profile.diagram()->index_of(product);
    if (!index) {
        throw ModelError("product " + product.to_string() + " is not a valid product of the diagram");
    }
    return profile.eval(*index);
}

Profile constant_profile(DiagramPtr diagram, Rational value) { return Profile(std::move(diagram), std::move(value)); }

Profile indicator(Expr const& expr, DiagramPtr diagram) {
    Expr const guard = expr.simplified();
    if (guard.is_true() || guard.is_false()) {
        return Profile(std::move(diagram), Rational(guard.is_true() ? 1 : 0));
    }
    return Profile(std::move(diagram), {{guard, Rational(1)}}, Rational(0));
}

namespace {

void require_same(Profile const& a, Profile const& b) {
    if (!same_diagram(*a.diagram(), *b.diagram())) {
        throw ModelError("profiles are defined over different feature diagrams");
    }
}

template <typename Op>
Profile combine(Profile const& a, Profile const& b, Op op) {
    require_same(a, b);
    if (a.is_constant() && b.is_constant()) {
        return Profile(a.diagram(), op(a.default_value(), b.default_value()));
    }
    DenseProfile const x = to_dense(a);
    DenseProfile const y = to_dense(b);
    return from_dense(pointwise(x, y, op));
}

// Index of the first case matching each valid product, cases().size() for the default.
std::vector<std::size_t> first_matches(Profile const& profile) {
    FeatureDiagram const& diagram = *profile.diagram();
    std::vector<MaskExpr> guards;
    guards.reserve(profile.cases().size());
    for (auto const& c : profile.cases()) {
        guards.push_back(diagram.compile(c.guard));
    }
    std::vector<std::size_t> matches;
    matches.reserve(diagram.product_count());
    for (std::uint64_t const mask : diagram.product_masks()) {
        std::size_t i = 0;
        while (i < guards.size() && !guards[i](mask)) {
            ++i;
        }
        matches.push_back(i);
    }
    return matches;
}

Expr cube_expr(FeatureDiagram const& diagram, std::uint64_t care, std::uint64_t bits) {
    std::optional<Expr> result;
    for (std::size_t i = 0; i < diagram.feature_count(); ++i) {
        if (!((care >> i) & 1U)) {
            continue;
        }
        Expr literal = Expr::variable(diagram.signature()[i]);
        if (!((bits >> i) & 1U)) {
            literal = Expr::negate(literal);
        }
        result = result ? Expr::conj(*result, literal) : literal;
    }
    return result.value_or(Expr::constant(true));
}

// Greedy cube cover of the products holding `value`; invalid masks are don't-cares.
Expr cover(DenseProfile const& dense, Rational const& value) {
    FeatureDiagram const& diagram = *dense.diagram;
    auto const& masks = diagram.product_masks();
    std::uint64_t const full =
        diagram.feature_count() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << diagram.feature_count()) - 1;
    std::vector<char> covered(masks.size(), 0);
    std::optional<Expr> result;
    for (std::size_t seed = 0; seed < masks.size(); ++seed) {
        if (dense[seed] != value || covered[seed]) {
            continue;
        }
        std::uint64_t care = full;
        std::uint64_t const bits = masks[seed];
        for (std::size_t i = 0; i < diagram.feature_count(); ++i) {
            std::uint64_t const trial = care & ~(std::uint64_t{1} << i);
            bool clash = false;
            for (std::size_t p = 0; p < masks.size() && !clash; ++p) {
                clash = dense[p] != value && (masks[p] & trial) == (bits & trial);
            }
            if (!clash) {
                care = trial;
            }
        }
        for (std::size_t p = 0; p < masks.size(); ++p) {
            if ((masks[p] & care) == (bits & care)) {
                covered[p] = 1;
            }
        }
        Expr cube = cube_expr(diagram, care, bits);
        result = result ? Expr::disj(*result, cube) : cube;
    }
    return result.value_or(Expr::constant(false));
}

constexpr std::size_t kCoverLimit = 4096;

template <typename Op>
Profile map_values(Profile const& a, Op op) {
    std::vector<ProfileCase> cases;
    cases.reserve(a.cases().size());
    for (auto const& c : a.cases()) {
        cases.push_back({c.guard, op(c.value)});
    }
    return Profile(a.diagram(), std::move(cases), op(a.default_value())).compacted();
}

}  // namespace

Profile mul(Profile const& a, Profile const& b) {
    return combine(a, b, [](Rational const& x, Rational const& y) { return Rational(x * y); });
}

Profile add(Profile const& a, Profile const& b) {
    return combine(a, b, [](Rational const& x, Rational const& y) { return Rational(x + y); });
}

Profile sub(Profile const& a, Profile const& b) {
    return combine(a, b, [](Rational const& x, Rational const& y) { return Rational(x - y); });
}

Profile complement(Profile const& a) {
    return map_values(a, [](Rational const& x) { return Rational(1 - x); });
}

Profile scale(Profile const& a, Rational const& factor) {
    return map_values(a, [&](Rational const& x) { return Rational(x * factor); });
}

Profile pointwise_max(Profile const& a, Profile const& b) {
    return combine(a, b, [](Rational const& x, Rational const& y) { return x < y ? y : x; });
}

DenseProfile to_dense(Profile const& profile) {
    FeatureDiagram const& diagram = *profile.diagram();
    std::vector<MaskExpr> guards;
    guards.reserve(profile.cases().size());
    for (auto const& c : profile.cases()) {
        guards.push_back(diagram.compile(c.guard));
    }
    std::vector<Rational> values;
    values.reserve(diagram.product_count());
    for (std::uint64_t const mask : diagram.product_masks()) {
        std::size_t i = 0;
        while (i < guards.size() && !guards[i](mask)) {
            ++i;
        }
        values.push_back(i < guards.size() ? profile.cases()[i].value : profile.default_value());
    }
    return DenseProfile(profile.diagram(), std::move(values));
}

DenseProfile to_dense(Profile const& profile, DiagramPtr const& diagram) {
    if (!same_diagram(*profile.diagram(), *diagram)) {
        throw ModelError("profile is defined over a different feature diagram");
    }
    return to_dense(profile);
}

bool exceeds(Profile const& a, Profile const& b, Rational const& tolerance) {
    require_same(a, b);
    DenseProfile const x = to_dense(a);
    DenseProfile const y = to_dense(b);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > y[i] + tolerance) {
            return true;
        }
    }
    return false;
}

bool pointwise_equal(Profile const& a, Profile const& b) {
    require_same(a, b);
    return to_dense(a) == to_dense(b);
}

bool is_zero(Profile const& a) {
    if (a.is_constant()) {
        return a.default_value() == 0;
    }
    for (auto const& v : to_dense(a).values) {
        if (v != 0) {
            return false;
        }
    }
    return true;
}

Expr product_minterm(FeatureDiagram const& diagram, std::uint64_t mask) {
    Expr result = Expr::constant(true);
    bool first = true;
    for (std::size_t i = 0; i < diagram.feature_count(); ++i) {
        Expr literal = Expr::variable(diagram.signature()[i]);
        if (!((mask >> i) & 1U)) {
            literal = Expr::negate(literal);
        }
        result = first ? literal : Expr::conj(result, literal);
        first = false;
    }
    return result;
}

Profile from_dense(DenseProfile const& dense) {
    std::map<Rational, std::size_t> frequency;
    for (auto const& v : dense.values) {
        ++frequency[v];
    }
    Rational fallback(0);
    std::size_t best = 0;
    for (auto const& [value, count] : frequency) {
        if (count > best) {
            best = count;
            fallback = value;
        }
    }
    std::vector<ProfileCase> cases;
    if (dense.size() <= kCoverLimit) {
        for (auto const& [value, count] : frequency) {
            if (value != fallback) {
                cases.push_back({cover(dense, value), value});
            }
        }
        return Profile(dense.diagram, std::move(cases), std::move(fallback));
    }
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != fallback) {
            cases.push_back({product_minterm(*dense.diagram, dense.diagram->mask(i)), dense[i]});
        }
    }
    return Profile(dense.diagram, std::move(cases), std::move(fallback)).compacted();
}

std::vector<std::string> probability_bound_violations(Profile const& profile) {
    std::vector<char> used(profile.cases().size() + 1, 0);
    for (std::size_t i : first_matches(profile)) {
        used[i] = 1;
    }
    std::vector<std::string> findings;
    auto check = [&](Rational const& v, std::string const& where) {
        if (v < 0 || v > 1) {
            findings.push_back(where + " has value " + to_string(v) + " outside [0,1]");
        }
    };
    for (std::size_t i = 0; i < profile.cases().size(); ++i) {
        if (used[i]) {
            check(profile.cases()[i].value, "case [" + profile.cases()[i].guard.to_string() + "]");
        }
    }
    if (used.back()) {
        check(profile.default_value(), "default");
    }
    return findings;
}

}  // namespace fpmc
