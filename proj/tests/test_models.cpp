#include <gtest/gtest.h>

#include "fpmc/dsl.h"
#include "fpmc/errors.h"
#include "fpmc/models.h"
#include "test_support.h"

using namespace fpmc;

namespace {

Fdtmc methane_chain() {
    auto d = make_diagram({"V"});
    Fdtmc m = make_fdtmc(d, {"no_methane", "methane"}, 0);
    m.propositions = {"methane"};
    m.labels[1].insert("methane");
    m.transitions[0] = {{1, constant_profile(d, Rational(1, 8))}, {0, constant_profile(d, Rational(7, 8))}};
    Profile away(d, {{parse_expression("V"), Rational(9, 10)}}, Rational(3, 4));
    m.transitions[1] = {{0, away}, {1, complement(away)}};
    return m;
}

}  // namespace

TEST(ModelsTest, WiperIsValidForAllProducts) {
    Fdtmc wiper = load_model_file(support::model_path("wiper.fdl")).chain;
    EXPECT_EQ(wiper.state_count(), 4U);
    EXPECT_EQ(wiper.diagram->product_count(), 8U);
    EXPECT_TRUE(validate_fdtmc(wiper).ok());
}

TEST(ModelsTest, WiperBaseProjection) {
    Fdtmc wiper = load_model_file(support::model_path("wiper.fdl")).chain;
    Dtmc base = project(wiper, Product({{"spd2", false}, {"very", false}, {"eco", false}}));
    StateIndex off = *wiper.find_state("off");
    StateIndex on = *wiper.find_state("on");
    StateIndex fast = *wiper.find_state("fast");
    Rational to_on = 0, to_fast = 0;
    for (auto const& [t, p] : base.rows[off]) {
        to_on += t == on ? p : Rational(0);
        to_fast += t == fast ? p : Rational(0);
    }
    EXPECT_EQ(to_on, Rational(4, 5));
    EXPECT_EQ(to_fast, 0);
    EXPECT_EQ((*base.rewards)[on], 3);
}

TEST(ModelsTest, PathProbability) {
    Fdtmc m = methane_chain();
    Profile p = path_probability(m, {0, 1, 0});
    EXPECT_EQ(eval_profile(p, Product({{"V", false}})), parse_rational("0.09375"));
    EXPECT_EQ(eval_profile(p, Product({{"V", true}})), parse_rational("0.1125"));
    EXPECT_EQ(eval_profile(path_probability(m, {1}), Product({{"V", false}})), 1);
    EXPECT_EQ(eval_profile(path_probability(m, {}), Product({{"V", false}})), 1);

    Fdtmc wiper = load_model_file(support::model_path("wiper.fdl")).chain;
    Profile off_on = path_probability(wiper, {*wiper.find_state("off"), *wiper.find_state("on")});
    EXPECT_EQ(eval_profile(off_on, Product({{"spd2", true}, {"very", false}, {"eco", false}})), Rational(1, 2));
}

TEST(ModelsTest, ValidatorNamesStateAndProduct) {
    Fdtmc m = methane_chain();
    m.transitions[1][0].probability =
        Profile(m.diagram, {{parse_expression("V"), Rational(11, 10)}}, Rational(3, 4));
    ValidationReport report = validate_fdtmc(m);
    ASSERT_FALSE(report.ok());
    auto rows = report.row_sum_findings();
    ASSERT_EQ(rows.size(), 1U);
    EXPECT_EQ(rows[0].state, 1U);
    EXPECT_EQ(rows[0].product, m.diagram->index_of(Product({{"V", true}})));
    EXPECT_NE(report.to_string().find("{V}"), std::string::npos);
}

TEST(ModelsTest, ValidatorChecksInitialDistribution) {
    Fdtmc m = methane_chain();
    m.initial = {Rational(1, 2), Rational(1, 4)};
    EXPECT_FALSE(validate_fdtmc(m).ok());
}

TEST(ModelsTest, FmdpRowsSumToZeroOrOne) {
    auto d = single_product_diagram();
    Fmdp m;
    m.diagram = d;
    m.states = {"x", "y"};
    m.initial = {1, 0};
    m.actions = {"go", "stay"};
    m.labels.resize(2);
    m.transitions.resize(2);
    m.transitions[0].push_back({"go", Expr::variable("p"), 1, constant_profile(d, 1)});
    EXPECT_TRUE(validate_fmdp(m).ok());
    EXPECT_FALSE(is_complete(m));
    m.transitions[0].push_back({"go", Expr::constant(true), 0, constant_profile(d, Rational(1, 2))});
    EXPECT_FALSE(validate_fmdp(m).ok());
}

TEST(ModelsTest, ObservationValuationsCountInBinary) {
    auto v = observation_valuations({"high", "methane"});
    ASSERT_EQ(v.size(), 4U);
    EXPECT_FALSE(v[0].at("high"));
    EXPECT_FALSE(v[0].at("methane"));
    EXPECT_FALSE(v[1].at("high"));
    EXPECT_TRUE(v[1].at("methane"));
    EXPECT_TRUE(v[3].at("high"));
}

TEST(ModelsTest, ProjectionMatchesOracleOnRandomChains) {
    support::Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        Fdtmc m = support::random_fdtmc(rng);
        ASSERT_TRUE(validate_fdtmc(m).ok()) << validate_fdtmc(m).to_string();
        for (std::size_t p = 0; p < m.diagram->product_count(); ++p) {
            Dtmc chain = project(m, p);
            Product product = m.diagram->product(p);
            for (StateIndex s = 0; s < m.state_count(); ++s) {
                std::map<StateIndex, Rational> expected;
                for (auto const& t : m.transitions[s]) {
                    expected[t.target] += support::oracle_eval(t.probability, product);
                }
                Rational total = 0;
                for (auto const& [t, value] : chain.rows[s]) {
                    EXPECT_EQ(value, expected[t]);
                    total += value;
                }
                EXPECT_EQ(total, 1);
            }
        }
    }
}
