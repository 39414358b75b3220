#include <gtest/gtest.h>

#include "json.hpp"

#include "fpmc/bounded.h"
#include "fpmc/dsl.h"
#include "fpmc/enumerative.h"
#include "fpmc/parametric.h"
#include "fpmc/report.h"
#include "test_support.h"

using namespace fpmc;

namespace {

std::vector<FamilyResult> wiper_results(std::string const& property) {
    Fdtmc wiper = load_model_file(support::model_path("wiper.fdl")).chain;
    Property p = parse_property(property);
    return {check_family_enumerative(wiper, p), check_family_parametric(wiper, p).family,
            check_family_bounded(wiper, p)};
}

}  // namespace

TEST(ReportTest, OutputIsDeterministicWithoutTiming) {
    Report a = make_report(wiper_results("R=?[F end]"), true);
    Report b = make_report(wiper_results("R=?[F end]"), true);
    EXPECT_EQ(format_table(a, false), format_table(b, false));
    EXPECT_EQ(format_csv(a, false), format_csv(b, false));
    EXPECT_EQ(format_json(a, false), format_json(b, false));
    EXPECT_EQ(a.rows.size(), 24U);
    for (auto const& row : a.rows) {
        EXPECT_EQ(row.agreement, "yes");
    }
}

TEST(ReportTest, CsvHeader) {
    Report r = make_report(wiper_results("P=?(F end)"), true);
    std::string csv = format_csv(r, true);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "product,engine,property,value,verdict,seconds,agreement");
    std::string plain = format_csv(make_report(wiper_results("P=?(F end)"), false), false);
    EXPECT_EQ(plain.substr(0, plain.find('\n')), "product,engine,property,value,verdict");
}

TEST(ReportTest, JsonRowsCarryExactValues) {
    Report r = make_report(wiper_results("R=?[F end]"), true);
    auto json = nlohmann::json::parse(format_json(r, false));
    ASSERT_TRUE(json.is_array() || json.contains("rows"));
    auto rows = json.is_array() ? json : json["rows"];
    ASSERT_EQ(rows.size(), 24U);
    EXPECT_EQ(rows[0]["engine"], "enum");
    EXPECT_EQ(rows[0]["value"], "15");
    EXPECT_EQ(rows[0]["exact"], "15");
    EXPECT_FALSE(rows[0].contains("seconds"));
}

TEST(ReportTest, AgreementDetectsDisagreement) {
    ProductResult exact;
    exact.value = Value::of(Rational(1, 2));
    ProductResult close;
    close.value = Value::interval(0.49, 0.51);
    ProductResult far;
    far.value = Value::interval(0.6, 0.7);
    ProductResult other;
    other.value = Value::of(Rational(1, 3));
    EXPECT_TRUE(results_agree({&exact, &close}));
    EXPECT_FALSE(results_agree({&exact, &far}));
    EXPECT_FALSE(results_agree({&exact, &other}));
    ProductResult unknown = close;
    unknown.verdict = Verdict::Unknown;
    ProductResult satisfied = exact;
    satisfied.verdict = Verdict::Satisfied;
    EXPECT_TRUE(results_agree({&satisfied, &unknown}));
    ProductResult violated = close;
    violated.verdict = Verdict::Violated;
    EXPECT_FALSE(results_agree({&satisfied, &violated}));
}

TEST(ReportTest, LongValuesAreShortenedForDisplay) {
    Value v = Value::of(Rational(1, 3));
    EXPECT_EQ(v.exact_string(), "1/3");
    EXPECT_EQ(Value::of(Rational(1, 8)).to_string(), "0.125");
    Value w = Value::of(support::ratio(123456789, 987654321));
    EXPECT_EQ(w.to_string(), "~0.124999998861");
    EXPECT_EQ(w.exact_string(), "13717421/109739369");
}
