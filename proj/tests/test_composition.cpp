#include <gtest/gtest.h>

#include "fpmc/composition.h"
#include "fpmc/dsl.h"
#include "fpmc/errors.h"
#include "test_support.h"

using namespace fpmc;

namespace {

Fmdp methane() {
    auto d = make_diagram({"V"});
    Fmdp m;
    m.diagram = d;
    m.states = {"no_methane", "methane"};
    m.initial = {1, 0};
    m.actions = {"tick"};
    m.propositions = {"methane"};
    m.labels = {{}, {"methane"}};
    m.transitions.resize(2);
    m.transitions[0] = {{"tick", Expr(), 1, constant_profile(d, Rational(1, 8))},
                        {"tick", Expr(), 0, constant_profile(d, Rational(7, 8))}};
    Profile away(d, {{parse_expression("V"), Rational(9, 10)}}, Rational(3, 4));
    m.transitions[1] = {{"tick", Expr(), 0, away}, {"tick", Expr(), 1, complement(away)}};
    return m;
}

Fmdp water() {
    auto d = single_product_diagram();
    auto c = [&](Rational v) { return constant_profile(d, v); };
    Fmdp m;
    m.diagram = d;
    m.states = {"normal", "low", "high"};
    m.initial = {1, 0, 0};
    m.actions = {"tick"};
    m.propositions = {"low", "high"};
    m.labels = {{}, {"low"}, {"high"}};
    m.transitions.resize(3);
    m.transitions[0] = {{"tick", Expr(), 2, c(Rational(1, 4))},
                        {"tick", Expr(), 1, c(Rational(1, 10))},
                        {"tick", Expr(), 0, c(Rational(13, 20))}};
    m.transitions[1] = {{"tick", Expr(), 0, c(Rational(1, 4))}, {"tick", Expr(), 1, c(Rational(3, 4))}};
    m.transitions[2] = {{"tick", Expr(), 0, c(Rational(1, 10))}, {"tick", Expr(), 2, c(Rational(9, 10))}};
    return m;
}

Fts controller() {
    auto d = make_diagram({"W", "A"});
    Fts f;
    f.diagram = d;
    f.states = {"ready", "run", "emergency"};
    f.actions = {"react"};
    f.propositions = {"pump_on"};
    f.labels = {{}, {"pump_on"}, {}};
    f.transitions.resize(3);
    f.transitions[0] = {{"react", parse_expression("high"), 1, parse_expression("W & !A")},
                        {"react", parse_expression("methane"), 2, parse_expression("A")}};
    return f;
}

Rational row_value(Fmdp const& m, std::string const& from, std::string const& to, std::size_t product,
                   std::map<std::string, bool> const& valuation = {}) {
    StateIndex s = *m.find_state(from);
    StateIndex t = *m.find_state(to);
    Rational total = 0;
    for (auto const& tr : m.transitions[s]) {
        if (tr.target != t) {
            continue;
        }
        bool on = tr.observation.evaluate([&](std::string const& name) -> std::optional<bool> {
            auto it = valuation.find(name);
            return it == valuation.end() ? std::nullopt : std::optional<bool>(it->second);
        });
        if (on) {
            total += tr.probability.eval(product);
        }
    }
    return total;
}

}  // namespace

TEST(CompositionTest, SyncProductMultipliesIndependentChoices) {
    Fmdp env = sync_product(methane(), water(), {false});
    EXPECT_EQ(env.state_count(), 6U);
    EXPECT_TRUE(is_complete(env));
    std::size_t base = *env.diagram->index_of(Product({{"V", false}}));
    EXPECT_EQ(row_value(env, "no_methane,normal", "methane,high", base), Rational(1, 32));
}

TEST(CompositionTest, UnitComponentIsNeutral) {
    auto d = single_product_diagram();
    Fmdp unit;
    unit.diagram = d;
    unit.states = {"u"};
    unit.initial = {1};
    unit.actions = {"tick"};
    unit.labels = {{}};
    unit.transitions = {{{"tick", Expr(), 0, constant_profile(d, 1)}}};
    Fmdp m = methane();
    Fmdp both = sync_product(m, unit);
    ASSERT_EQ(both.state_count(), m.state_count());
    for (std::size_t p = 0; p < m.diagram->product_count(); ++p) {
        EXPECT_EQ(row_value(both, "methane,u", "no_methane,u", p), row_value(m, "methane", "no_methane", p));
    }
}

TEST(CompositionTest, FtsControllerReactsPerProduct) {
    Fmdp c = complete_deterministic(fts_to_fmdp(controller()));
    EXPECT_TRUE(is_complete(c));
    auto index = [&](bool w, bool a) { return *c.diagram->index_of(Product({{"W", w}, {"A", a}})); };
    std::map<std::string, bool> high = {{"high", true}, {"methane", false}};
    EXPECT_EQ(row_value(c, "ready", "run", index(true, false), high), 1);
    EXPECT_EQ(row_value(c, "ready", "ready", index(false, false), high), 1);
    std::map<std::string, bool> both = {{"high", true}, {"methane", true}};
    EXPECT_EQ(row_value(c, "ready", "emergency", index(true, true), both), 1);
    EXPECT_EQ(row_value(c, "ready", "run", index(true, false), both), 1);
}

TEST(CompositionTest, NondeterminismIsRejected) {
    Fts f = controller();
    f.transitions[0][1].feature_guard = parse_expression("W");
    EXPECT_THROW(complete_deterministic(fts_to_fmdp(f)), ModelError);
}

TEST(CompositionTest, ObserverSeesNextLabels) {
    Fmdp env = sync_product(methane(), water());
    Fmdp c = complete_deterministic(fts_to_fmdp(controller()));
    Fmdp all = observer_product(env, c, {false});
    EXPECT_TRUE(is_complete(all));
    std::size_t a_only = *all.diagram->index_of(Product({{"V", false}, {"W", false}, {"A", true}}));
    EXPECT_EQ(row_value(all, "no_methane,normal,ready", "methane,high,emergency", a_only), Rational(1, 32));
    EXPECT_EQ(row_value(all, "no_methane,normal,ready", "methane,high,ready", a_only), 0);
}

TEST(CompositionTest, ObserverMustBeComplete) {
    Fmdp env = sync_product(methane(), water());
    Fmdp incomplete = fts_to_fmdp(controller());
    EXPECT_THROW(observer_product(env, incomplete), ModelError);
}

TEST(CompositionTest, AsFdtmcRequiresSingleCompleteAction) {
    Fmdp env = sync_product(methane(), water());
    Fdtmc chain = as_fdtmc(env);
    EXPECT_EQ(chain.state_count(), 6U);
    EXPECT_TRUE(validate_fdtmc(chain).ok());

    Fmdp two = env;
    two.actions.push_back("other");
    EXPECT_THROW(as_fdtmc(two), ModelError);

    Fmdp partial = env;
    partial.transitions[0].pop_back();
    EXPECT_THROW(as_fdtmc(partial), ModelError);
}

TEST(CompositionTest, PruningDropsUnreachableStates) {
    Fmdp c = complete_deterministic(fts_to_fmdp(controller()));
    c.states.push_back("orphan");
    c.labels.push_back({});
    c.initial.push_back(0);
    c.transitions.push_back({{"react", Expr(), 3, constant_profile(c.diagram, 1)}});
    Fmdp pruned = prune_unreachable(c);
    EXPECT_FALSE(pruned.find_state("orphan").has_value());
    EXPECT_EQ(pruned.state_count(), 3U);
}

TEST(CompositionTest, MinepumpHasTwentyFourStates) {
    Fdtmc m = load_model_file(support::model_path("minepump.fdl")).chain;
    EXPECT_EQ(m.state_count(), 24U);
    EXPECT_EQ(m.diagram->product_count(), 8U);
    EXPECT_TRUE(validate_fdtmc(m).ok());
}

TEST(CompositionTest, RandomCompositionsStayComplete) {
    support::Rng rng(23);
    for (int i = 0; i < 40; ++i) {
        Fmdp a = support::random_fmdp(rng, {{"f", "g"}, {"a"}, {"tick", "x"}, {"b"}, "s"});
        Fmdp b = support::random_fmdp(rng, {{"g", "h"}, {"b"}, {"tick", "y"}, {"a"}, "t"});
        ASSERT_TRUE(is_complete(a));
        ASSERT_TRUE(is_complete(b));
        EXPECT_TRUE(is_complete(sync_product(a, b)));
        Fmdp o = support::random_fmdp(rng, {{"h"}, {"c"}, {"obs"}, {"a", "b"}, "o"});
        EXPECT_TRUE(is_complete(observer_product(sync_product(a, b), o)));
    }
}

TEST(CompositionTest, ProjectionDistributesOverComposition) {
    support::Rng rng(31);
    for (int i = 0; i < 30; ++i) {
        Fmdp a = support::random_fmdp(rng, {{"f", "g"}, {"a"}, {"tick", "x"}, {"b"}, "s"});
        Fmdp b = support::random_fmdp(rng, {{"g", "h"}, {"b"}, {"tick", "y"}, {"a"}, "t"});
        EXPECT_EQ(support::projection_mismatch(a, b, false), "");
        Fmdp o = support::random_fmdp(rng, {{"h"}, {"c"}, {"obs"}, {"a", "b"}, "o"});
        EXPECT_EQ(support::projection_mismatch(sync_product(a, b), o, true), "");
    }
}
