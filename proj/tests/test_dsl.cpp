#include <gtest/gtest.h>

#include "fpmc/dsl.h"
#include "fpmc/enumerative.h"
#include "fpmc/errors.h"
#include "fpmc/generators.h"
#include "test_support.h"

using namespace fpmc;

namespace {

std::string const kSmall = R"fdl(features a b;
constraint a => b;

fdtmc M {
    states s t;
    init s;
    props done;
    label t: done;
    s -> t : [a] 1/2, 1;
    s -> s : [a] 1/2, 0;
}

property reach = "P=?(F done)";
)fdl";

}  // namespace

TEST(DslTest, RoundTripsModelFiles) {
    for (char const* name : {"wiper.fdl", "minepump.fdl"}) {
        ModelFile file = parse_model_file(read_file(support::model_path(name)));
        std::string printed = print_model_file(file);
        ModelFile back = parse_model_file(printed);
        EXPECT_EQ(file, back) << name;
        EXPECT_EQ(print_model_file(back), printed) << name;
    }
}

TEST(DslTest, RoundTripsGeneratedModels) {
    for (unsigned n = 1; n <= 6; ++n) {
        for (std::string const& text : {generate_service_provider(n), generate_failure_recovery(n)}) {
            ModelFile file = parse_model_file(text);
            EXPECT_EQ(parse_model_file(print_model_file(file)), file);
        }
    }
}

TEST(DslTest, BuildsSmallModel) {
    BuiltModel m = load_model(kSmall);
    EXPECT_EQ(m.chain.diagram->product_count(), 3U);
    EXPECT_EQ(m.property_order, std::vector<std::string>{"reach"});
    FamilyResult r = check_family_enumerative(m.chain, m.properties.at("reach"));
    for (auto const& pr : r.results) {
        EXPECT_EQ(pr.value.exact, 1);
    }
}

TEST(DslTest, RowSumErrorNamesStateAndProduct) {
    std::string text = kSmall;
    text.replace(text.find("[a] 1/2, 0"), 10, "[a] 6/10, 0");
    try {
        load_model(text);
        FAIL() << "expected a model error";
    } catch (ModelError const& e) {
        std::string message = e.what();
        EXPECT_NE(message.find("s"), std::string::npos) << message;
        EXPECT_NE(message.find("1.1"), std::string::npos) << message;
        EXPECT_NE(message.find("a"), std::string::npos) << message;
    }
}

TEST(DslTest, SyntaxErrorsCarryLines) {
    std::string text = kSmall;
    text.replace(text.find("s -> t"), 6, "s -> ");
    try {
        parse_model_file(text);
        FAIL() << "expected a parse error";
    } catch (ParseError const& e) {
        EXPECT_EQ(e.line(), 9U);
    }
}

TEST(DslTest, PropertyErrorsPointIntoTheFile) {
    std::string text = kSmall;
    text.replace(text.find("P=?(F done)"), 11, "P=?(F & done)");
    try {
        parse_model_file(text);
        FAIL() << "expected a parse error";
    } catch (ParseError const& e) {
        EXPECT_EQ(e.line(), 13U);
        EXPECT_GT(e.column(), 17U);
    }
}

TEST(DslTest, UnknownNamesAreRejected) {
    std::string text = kSmall;
    text.replace(text.find("s -> t"), 6, "s -> u");
    EXPECT_THROW(load_model(text), ModelError);
    text = kSmall;
    text.replace(text.find("[a] 1/2, 1"), 3, "[c]");
    EXPECT_THROW(load_model(text), Error);
}

TEST(DslTest, XorPairIsAnAlias) {
    ModelFile file = parse_model_file(read_file(support::model_path("wiper.fdl")));
    std::map<std::string, Expr> aliases;
    DiagramPtr d = build_diagram(file, &aliases);
    EXPECT_EQ(d->signature(), (std::vector<std::string>{"spd2", "very", "eco"}));
    EXPECT_EQ(aliases.size(), 2U);
    EXPECT_TRUE(aliases.count("spd1"));
    EXPECT_TRUE(aliases.count("std"));
}

TEST(DslTest, GeneratorSizes) {
    for (unsigned n = 1; n <= 5; ++n) {
        Fdtmc sp = load_model(generate_service_provider(n)).chain;
        EXPECT_EQ(sp.state_count(), 3 * n + 3);
        EXPECT_EQ(sp.diagram->product_count(), std::size_t{1} << n);
        Fdtmc fr = load_model(generate_failure_recovery(n)).chain;
        EXPECT_EQ(fr.state_count(), n + 3);
        EXPECT_EQ(fr.diagram->product_count(), std::size_t{1} << n);
    }
}
