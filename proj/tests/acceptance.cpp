#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fpmc/bounded.h"
#include "fpmc/composition.h"
#include "fpmc/dsl.h"
#include "fpmc/dtmc_checker.h"
#include "fpmc/enumerative.h"
#include "fpmc/errors.h"
#include "fpmc/generators.h"
#include "fpmc/parametric.h"
#include "fpmc/report.h"
#include "test_support.h"

using namespace fpmc;

namespace {

constexpr double kEpsilon = 1e-3;
constexpr double kFloatSlack = 1e-9;
constexpr double kWiperBudgetSeconds = 1.0;
constexpr double kCrossEngineBudgetSeconds = 60.0;
constexpr double kScalingBudgetSeconds = 300.0;
constexpr int kRandomChains = 200;
constexpr int kRandomFmdpPairs = 100;
constexpr int kMutations = 50;
constexpr int kTimingRepeats = 3;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(std::string const& why) {
        if (pass) {
            detail = why;
        }
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double value) {
    std::ostringstream out;
    out.precision(3);
    out << value;
    return out.str();
}

Rational wiper_formula(bool s, bool v, bool e) {
    int si = s, vi = v, ei = e;
    return support::ratio(-15 * si * ei * vi - 15 * si * ei + 45 * si * vi + 45 * si - 40 * ei + 120, 8);
}

Outcome wiper_golden() {
    Outcome out;
    auto start = Clock::now();
    Fdtmc wiper = load_model_file(support::model_path("wiper.fdl")).chain;
    Property p = parse_property("R=?[F end]");
    FamilyResult enumerative = check_family_enumerative(wiper, p);
    ParametricResult parametric = check_family_parametric(wiper, p);
    BoundedOptions options;
    options.epsilon = kEpsilon;
    FamilyResult bounded = check_family_bounded(wiper, p, options);
    double elapsed = seconds_since(start);

    if (wiper.diagram->product_count() != 8) {
        out.fail("expected 8 products");
        return out;
    }
    for (std::size_t i = 0; i < 8; ++i) {
        Product product = wiper.diagram->product(i);
        Rational expected = wiper_formula(*product.value("spd2"), *product.value("very"), *product.value("eco"));
        Rational param = parametric.family.results[i].value.exact;
        if (param != expected) {
            out.fail("parametric " + to_string(param) + " at " + product.to_string());
        }
        if (parametric.function && parametric.function->eval(wiper.diagram->mask(i)) != expected) {
            out.fail("closed form differs at " + product.to_string());
        }
        if (enumerative.results[i].value.exact != param) {
            out.fail("enumerative differs at " + product.to_string());
        }
        Value const& b = bounded.results[i].value;
        double exact = to_double(expected);
        if (std::abs(b.approx() - exact) > kEpsilon || b.lower > exact + kFloatSlack ||
            b.upper < exact - kFloatSlack) {
            out.fail("bounded " + b.to_string() + " at " + product.to_string());
        }
    }
    auto at = [&](bool s, bool v, bool e) {
        std::uint64_t mask = wiper.diagram->mask_of(Product({{"spd2", s}, {"very", v}, {"eco", e}}));
        return parametric.family.results[*wiper.diagram->index_of(mask)].value.exact;
    };
    if (at(true, true, false) != Rational(105, 4) || at(true, true, true) != Rational(35, 2) ||
        at(false, false, false) != 15) {
        out.fail("pinned values 26.25 / 17.5 / 15 not reproduced");
    }
    if (elapsed >= kWiperBudgetSeconds) {
        out.fail("took " + fmt(elapsed) + " s");
    }
    if (out.pass) {
        out.detail = "8 products match the closed form, " + fmt(elapsed) + " s";
    }
    return out;
}

Outcome minepump_structure() {
    Outcome out;
    BuiltModel model = load_model_file(support::model_path("minepump.fdl"));
    Fdtmc const& pump = model.chain;
    if (pump.state_count() != 24) {
        out.fail(std::to_string(pump.state_count()) + " states");
    }
    if (pump.diagram->product_count() != 8) {
        out.fail(std::to_string(pump.diagram->product_count()) + " products");
    }
    ValidationReport report = validate_fdtmc(pump);
    if (!report.ok()) {
        out.fail("validation: " + report.to_string());
    }
    Property p = parse_property("P=?(X methane)");
    std::vector<FamilyResult> runs = {check_family_enumerative(pump, p), check_family_parametric(pump, p).family,
                                      check_family_bounded(pump, p)};
    for (auto const& run : runs) {
        for (auto const& r : run.results) {
            if (std::abs(r.value.approx() - 0.125) > kFloatSlack ||
                (r.value.is_exact() && r.value.exact != Rational(1, 8))) {
                out.fail(engine_name(run.engine) + " gives " + r.value.to_string());
            }
        }
    }
    if (out.pass) {
        out.detail = "24 states, 8 products, X methane = 0.125 on all engines";
    }
    return out;
}

struct CorpusItem {
    Fdtmc model;
    Property query;
};

std::vector<CorpusItem> random_corpus() {
    support::Rng rng(20240601);
    std::vector<CorpusItem> corpus;
    for (int i = 0; i < kRandomChains; ++i) {
        Fdtmc m = support::random_fdtmc(rng);
        Property q = support::random_query(rng, {"a", "b"});
        corpus.push_back({std::move(m), std::move(q)});
    }
    return corpus;
}

Outcome cross_engine(std::vector<CorpusItem> const& corpus) {
    Outcome out;
    auto start = Clock::now();
    std::size_t products = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto const& [m, q] = corpus[i];
        FamilyResult e = check_family_enumerative(m, q);
        ParametricResult p = check_family_parametric(m, q);
        BoundedOptions options;
        options.epsilon = kEpsilon;
        FamilyResult b = check_family_bounded(m, q, options);
        std::string where = "chain " + std::to_string(i) + " " + to_string(q);
        for (std::size_t j = 0; j < e.results.size(); ++j) {
            ++products;
            Rational exact = e.results[j].value.exact;
            if (p.family.results[j].value.exact != exact) {
                out.fail("parametric differs on " + where);
            }
            double x = to_double(exact);
            Value const& v = b.results[j].value;
            if (v.lower > x + kFloatSlack || v.upper < x - kFloatSlack) {
                out.fail("bounded interval misses exact value on " + where);
            }
            if (std::abs(v.approx() - x) > kEpsilon) {
                out.fail("bounded off by more than epsilon on " + where);
            }
        }
    }
    double elapsed = seconds_since(start);
    if (elapsed >= kCrossEngineBudgetSeconds) {
        out.fail("took " + fmt(elapsed) + " s");
    }
    if (out.pass) {
        out.detail = std::to_string(corpus.size()) + " chains, " + std::to_string(products) + " products, " +
                     fmt(elapsed) + " s";
    }
    return out;
}

Outcome composition_properties() {
    Outcome out;
    support::Rng rng(777);
    for (int i = 0; i < kRandomFmdpPairs; ++i) {
        Fmdp a = support::random_fmdp(rng, {{"f", "g"}, {"a"}, {"tick", "x"}, {"b"}, "s"});
        Fmdp b = support::random_fmdp(rng, {{"g", "h"}, {"b"}, {"tick", "y"}, {"a"}, "t"});
        Fmdp o = support::random_fmdp(rng, {{"h", "k"}, {"c"}, {"obs"}, {"a", "b"}, "o"});
        std::string pair = "pair " + std::to_string(i);
        Fmdp sync = sync_product(a, b);
        if (!is_complete(sync)) {
            out.fail("sync product incomplete for " + pair);
        }
        if (!is_complete(observer_product(sync, o))) {
            out.fail("observer product incomplete for " + pair);
        }
        if (auto m = support::projection_mismatch(a, b, false); !m.empty()) {
            out.fail("sync projection: " + m + " for " + pair);
        }
        if (auto m = support::projection_mismatch(sync, o, true); !m.empty()) {
            out.fail("observer projection: " + m + " for " + pair);
        }
    }
    if (out.pass) {
        out.detail = std::to_string(kRandomFmdpPairs) + " pairs, zero failures";
    }
    return out;
}

Outcome bounded_soundness(std::vector<CorpusItem> const& corpus) {
    Outcome out;
    std::size_t rounds = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto const& [m, q] = corpus[i];
        PathFormula const& path = *q.formula->path;
        Formula left = path.left ? path.left : formula_true();
        PathFormula until{PathFormula::Kind::Until, left, path.right, {}};
        std::vector<std::vector<double>> exact(m.state_count(), std::vector<double>(m.diagram->product_count()));
        for (std::size_t p = 0; p < m.diagram->product_count(); ++p) {
            auto values = DtmcChecker(project(m, p)).probabilities(until);
            for (StateIndex s = 0; s < m.state_count(); ++s) {
                exact[s][p] = to_double(values[s]);
            }
        }
        BoundedEngine<double> engine(m);
        ProfileTable<double> previous;
        engine.until_lower_approx(left, path.right, kEpsilon * kEpsilon, [&](Approximation<double> const& a) {
            ++rounds;
            for (StateIndex s = 0; s < m.state_count(); ++s) {
                for (std::size_t p = 0; p < exact[s].size(); ++p) {
                    double x = a.lower[s][p];
                    if (!previous.empty() && x < previous[s][p] - kFloatSlack) {
                        out.fail("not monotone on chain " + std::to_string(i));
                    }
                    if (exact[s][p] < x - kFloatSlack || exact[s][p] > x + a.undecided[s][p] + kFloatSlack) {
                        out.fail("exact value outside [x, x + undecided] on chain " + std::to_string(i) +
                                 " at depth " + std::to_string(a.depth));
                    }
                }
            }
            previous = a.lower;
        });
    }
    if (out.pass) {
        out.detail = std::to_string(rounds) + " rounds checked, zero violations";
    }
    return out;
}

Outcome scaling_trend() {
    Outcome out;
    auto start = Clock::now();
    std::vector<unsigned> sizes = {2, 4, 6, 8, 10};
    Property p = parse_property("P[<0.1](F failure)");
    std::vector<double> enumerative;
    double parametric_last = 0, bounded_last = 0;
    auto best_of = [](std::function<double()> const& run) {
        double best = run();
        for (int i = 1; i < kTimingRepeats; ++i) {
            best = std::min(best, run());
        }
        return best;
    };
    for (unsigned n : sizes) {
        Fdtmc m = load_model(generate_service_provider(n)).chain;
        enumerative.push_back(best_of([&] { return check_family_enumerative(m, p).seconds; }));
        double param = best_of([&] { return check_family_parametric(m, p).family.seconds; });
        double bound = best_of([&] { return check_family_bounded(m, p).seconds; });
        if (n == sizes.back()) {
            parametric_last = param;
            bounded_last = bound;
        }
    }
    for (std::size_t i = 1; i < enumerative.size(); ++i) {
        if (enumerative[i] <= enumerative[i - 1]) {
            out.fail("enumerative time not increasing at n = " + std::to_string(sizes[i]));
        }
    }
    double last = enumerative.back();
    if (last <= parametric_last || last <= bounded_last) {
        out.fail("enumerative " + fmt(last) + " s does not exceed parametric " + fmt(parametric_last) +
                 " s and bounded " + fmt(bounded_last) + " s at n = 10");
    }
    double elapsed = seconds_since(start);
    if (elapsed >= kScalingBudgetSeconds) {
        out.fail("took " + fmt(elapsed) + " s");
    }
    if (out.pass) {
        out.detail = "n = 10: enum " + fmt(last) + " s, param " + fmt(parametric_last) + " s, bounded " +
                     fmt(bounded_last) + " s";
    }
    return out;
}

/// Rows whose brute-force sum is not 1, as (state, product) pairs.
std::set<std::pair<StateIndex, std::size_t>> bad_rows(Fdtmc const& m) {
    std::set<std::pair<StateIndex, std::size_t>> bad;
    for (std::size_t p = 0; p < m.diagram->product_count(); ++p) {
        Product product = m.diagram->product(p);
        for (StateIndex s = 0; s < m.state_count(); ++s) {
            Rational sum = 0;
            for (auto const& t : m.transitions[s]) {
                sum += support::oracle_eval(t.probability, product);
            }
            if (sum != 1) {
                bad.insert({s, p});
            }
        }
    }
    return bad;
}

Outcome validator_sensitivity() {
    Outcome out;
    support::Rng rng(4242);
    std::vector<Fdtmc> bases = {load_model_file(support::model_path("wiper.fdl")).chain,
                                load_model_file(support::model_path("minepump.fdl")).chain,
                                load_model(generate_service_provider(3)).chain,
                                load_model(generate_failure_recovery(3)).chain};
    int rejected = 0, consistent = 0;
    for (int i = 0; i < kMutations; ++i) {
        Fdtmc m = bases[i % bases.size()];
        std::vector<std::pair<StateIndex, std::size_t>> edges;
        for (StateIndex s = 0; s < m.state_count(); ++s) {
            for (std::size_t j = 0; j < m.transitions[s].size(); ++j) {
                edges.emplace_back(s, j);
            }
        }
        auto [s, j] = edges[std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng)];
        Profile const& old = m.transitions[s][j].probability;
        std::vector<ProfileCase> cases = old.cases();
        Rational fallback = old.default_value();
        std::size_t slot = std::uniform_int_distribution<std::size_t>(0, cases.size())(rng);
        Rational& target = slot < cases.size() ? cases[slot].value : fallback;
        Rational shifted;
        do {
            shifted = support::ratio(static_cast<long>(std::uniform_int_distribution<int>(0, 20)(rng)), 20);
        } while (shifted == target);
        target = shifted;
        m.transitions[s][j].probability = Profile(m.diagram, cases, fallback);

        auto bad = bad_rows(m);
        ValidationReport report = validate_fdtmc(m);
        std::set<std::pair<StateIndex, std::size_t>> found;
        for (auto const& f : report.row_sum_findings()) {
            if (f.state && f.product) {
                found.insert({*f.state, *f.product});
            }
        }
        std::string where = "mutation " + std::to_string(i) + " of " + m.states[s];
        if (bad.empty()) {
            ++consistent;
            if (!report.ok()) {
                out.fail(where + " rejected although every row sums to 1");
            }
        } else {
            ++rejected;
            if (report.ok()) {
                out.fail(where + " accepted with " + std::to_string(bad.size()) + " bad rows");
            } else if (found != bad) {
                out.fail(where + " reported the wrong (state, product) pairs");
            }
        }
    }
    if (out.pass) {
        out.detail = std::to_string(rejected) + " rejected with exact locations, " + std::to_string(consistent) +
                     " still consistent";
    }
    return out;
}

Outcome round_trip() {
    Outcome out;
    std::size_t fixtures = 0;
    for (auto const& entry : std::filesystem::directory_iterator(support::models_dir())) {
        if (entry.path().extension() != ".fdl") {
            continue;
        }
        ++fixtures;
        std::string name = entry.path().filename().string();
        ModelFile file = parse_model_file(read_file(entry.path().string()));
        std::string printed = print_model_file(file);
        ModelFile back = parse_model_file(printed);
        if (!(back == file) || print_model_file(back) != printed) {
            out.fail("round trip changes " + name);
        }
        BuiltModel model = build_model(file);
        for (auto const& prop : model.property_order) {
            auto run = [&] {
                Property const& p = model.properties.at(prop);
                return make_report({check_family_enumerative(model.chain, p),
                                    check_family_parametric(model.chain, p).family,
                                    check_family_bounded(model.chain, p)},
                                   true);
            };
            Report a = run(), b = run();
            if (format_table(a, false) != format_table(b, false) || format_csv(a, false) != format_csv(b, false) ||
                format_json(a, false) != format_json(b, false)) {
                out.fail("report for " + name + " property " + prop + " is not deterministic");
            }
        }
    }
    if (fixtures == 0) {
        out.fail("no fixtures found in " + support::models_dir());
    }
    if (out.pass) {
        out.detail = std::to_string(fixtures) + " fixtures round-trip, reports byte-identical";
    }
    return out;
}

}  // namespace

int main() {
    std::vector<CorpusItem> corpus = random_corpus();
    std::vector<std::function<Outcome()>> criteria = {
        wiper_golden,
        minepump_structure,
        [&] { return cross_engine(corpus); },
        composition_properties,
        [&] { return bounded_soundness(corpus); },
        scaling_trend,
        validator_sensitivity,
        round_trip,
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (std::exception const& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failures += o.pass ? 0 : 1;
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")"
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
