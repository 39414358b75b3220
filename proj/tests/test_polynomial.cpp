#include <gtest/gtest.h>

#include "fpmc/dsl.h"
#include "fpmc/polynomial.h"
#include "test_support.h"

using namespace fpmc;

namespace {

Polynomial random_polynomial(support::Rng& rng, unsigned variables, unsigned terms) {
    std::vector<Polynomial::Term> list;
    std::uniform_int_distribution<std::uint64_t> mask(0, (std::uint64_t{1} << variables) - 1);
    std::uniform_int_distribution<long> coefficient(-9, 9);
    for (unsigned i = 0; i < terms; ++i) {
        list.emplace_back(mask(rng), support::ratio(coefficient(rng), 1 + static_cast<long>(i % 4)));
    }
    return Polynomial::from_terms(std::move(list));
}

}  // namespace

TEST(PolynomialTest, MultilinearArithmetic) {
    Polynomial f = Polynomial::variable(0), g = Polynomial::variable(1);
    EXPECT_EQ(f * f, f);
    Polynomial p = (f + g) * (f - g);
    // f² - g² reduces to f - g.
    EXPECT_EQ(p, f - g);
    EXPECT_EQ((f * g).eval(0b11), 1);
    EXPECT_EQ((f * g).eval(0b01), 0);
    EXPECT_TRUE((f - f).is_zero());
    EXPECT_EQ(Polynomial(Rational(3, 4)).constant_term(), Rational(3, 4));
    EXPECT_EQ((f * g + f).support(), 0b11U);
    EXPECT_EQ((Polynomial(2) - f * g.scaled(Rational(1, 2))).to_string({"x", "y"}), "-0.5*x*y + 2");
}

TEST(PolynomialTest, ProductMatchesPointwiseProduct) {
    support::Rng rng(5);
    for (int round = 0; round < 20; ++round) {
        unsigned variables = 6 + round % 5;
        Polynomial a = random_polynomial(rng, variables, 40);
        Polynomial b = random_polynomial(rng, variables, 40);
        Polynomial c = a * b;
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << variables); ++m) {
            ASSERT_EQ(c.eval(m), a.eval(m) * b.eval(m));
        }
    }
}

TEST(PolynomialTest, GeometricInvertsOnEveryPoint) {
    support::Rng rng(8);
    for (int round = 0; round < 30; ++round) {
        Polynomial a = random_polynomial(rng, 4, 5).scaled(Rational(1, 100));
        RationalFunction g = geometric(RationalFunction(a));
        for (std::uint64_t m = 0; m < 16; ++m) {
            auto value = g.eval(m);
            ASSERT_TRUE(value.has_value());
            EXPECT_EQ(*value, 1 / (1 - a.eval(m)));
        }
    }
}

TEST(PolynomialTest, VanishingDenominatorIsReported) {
    Polynomial f = Polynomial::variable(0);
    RationalFunction r(Polynomial(1), Polynomial(1) - f);
    EXPECT_FALSE(r.eval(1).has_value());
    EXPECT_EQ(*r.eval(0), 1);
}

TEST(PolynomialTest, EpsilonSelectsOneProduct) {
    DiagramPtr d = make_diagram({"a", "b", "c"}, parse_expression("a => b"));
    for (std::size_t i = 0; i < d->product_count(); ++i) {
        Polynomial e = epsilon(*d, d->mask(i));
        for (std::size_t j = 0; j < d->product_count(); ++j) {
            EXPECT_EQ(e.eval(d->mask(j)), i == j ? 1 : 0);
        }
    }
    std::vector<Rational> values;
    for (std::size_t i = 0; i < d->product_count(); ++i) {
        values.push_back(support::ratio(static_cast<long>(i) + 1, 7));
    }
    Polynomial sum = epsilon_sum(*d, values);
    EXPECT_EQ(eval_products(sum, *d), values);
    // Invalid points contribute zero.
    EXPECT_EQ(sum.eval(0b001), 0);
}

TEST(PolynomialTest, WiperSlowProbability) {
    Fdtmc wiper = load_model_file(support::model_path("wiper.fdl")).chain;
    StateIndex off = *wiper.find_state("off"), on = *wiper.find_state("on");
    Profile const* alpha = nullptr;
    for (auto const& t : wiper.transitions[off]) {
        if (t.target == on) {
            alpha = &t.probability;
        }
    }
    ASSERT_NE(alpha, nullptr);
    Polynomial p = profile_to_polynomial(*alpha);
    EXPECT_EQ(p.to_string(wiper.diagram->signature()), "-0.3*spd2*very - 0.3*spd2 + 0.8");
    EXPECT_EQ(integer_scaled(p, wiper.diagram->signature()), "(-3*spd2*very - 3*spd2 + 8) / 10");
}

TEST(PolynomialTest, ProfilesAndExpressionsAgreeWithOracle) {
    support::Rng rng(21);
    for (int round = 0; round < 100; ++round) {
        DiagramPtr d = make_diagram({"p", "q", "r", "s"}, round % 2 ? parse_expression("p | q") : Expr::constant(true));
        Profile profile = support::random_profile(rng, d, Rational(1, 4), 6);
        Expr guard = support::random_guard(rng, d->signature());
        Polynomial pp = profile_to_polynomial(profile);
        Polynomial gp = expr_to_polynomial(guard, *d);
        for (std::size_t i = 0; i < d->product_count(); ++i) {
            Product product = d->product(i);
            EXPECT_EQ(pp.eval(d->mask(i)), support::oracle_eval(profile, product));
            EXPECT_EQ(gp.eval(d->mask(i)), evaluate_expr(guard, product) ? 1 : 0);
        }
    }
}
