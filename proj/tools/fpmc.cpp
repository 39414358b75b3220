#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fpmc/bounded.h"
#include "fpmc/dsl.h"
#include "fpmc/enumerative.h"
#include "fpmc/errors.h"
#include "fpmc/generators.h"
#include "fpmc/parametric.h"
#include "fpmc/report.h"

namespace {

using namespace fpmc;

constexpr int kOk = 0;
constexpr int kUnknown = 1;
constexpr int kError = 2;

struct CheckArgs {
    std::string model;
    std::string property;
    std::string engine = "all";
    double epsilon = 1e-3;
    std::optional<std::uint64_t> bound;
    std::uint64_t max_depth = 100000;
    unsigned workers = 1;
    std::string format = "table";
    std::string emit_expression;
    bool floating = false;
    bool no_timing = false;
};

struct BenchArgs {
    std::string family = "service-provider";
    std::vector<unsigned> sizes = {2, 4, 6, 8, 10};
    std::vector<std::string> engines = {"enum", "param", "bounded"};
    std::string property;
    double epsilon = 1e-3;
    unsigned workers = 1;
};

struct GenerateArgs {
    std::string family;
    unsigned size = 2;
    std::string output;
};

Property resolve_property(BuiltModel const& model, std::string const& text) {
    auto it = model.properties.find(text);
    if (it != model.properties.end()) {
        return it->second;
    }
    return parse_property(text);
}

std::string generate(std::string const& family, unsigned n) {
    if (family == "service-provider") {
        return generate_service_provider(n);
    }
    if (family == "failure-recovery") {
        return generate_failure_recovery(n);
    }
    throw Error("unknown family '" + family + "' (expected service-provider or failure-recovery)");
}

std::vector<FamilyResult> run_engines(Fdtmc const& chain, Property const& property, CheckArgs const& args,
                                      std::optional<RationalFunction>* function) {
    bool all = args.engine == "all";
    std::vector<FamilyResult> results;
    if (all || args.engine == "enum") {
        EnumerativeOptions options;
        options.workers = args.workers;
        options.dtmc.floating = args.floating;
        results.push_back(check_family_enumerative(chain, property, options));
    }
    if (all || args.engine == "param") {
        ParametricResult r = check_family_parametric(chain, property);
        *function = r.function;
        results.push_back(std::move(r.family));
    }
    if (all || args.engine == "bounded") {
        BoundedOptions options;
        options.epsilon = args.epsilon;
        options.depth = args.bound;
        options.max_depth = args.max_depth;
        results.push_back(check_family_bounded(chain, property, options));
    }
    if (results.empty()) {
        throw Error("unknown engine '" + args.engine + "' (expected enum, param, bounded or all)");
    }
    return results;
}

int run_check(CheckArgs const& args) {
    BuiltModel model = load_model_file(args.model);
    Property property = resolve_property(model, args.property);
    std::optional<RationalFunction> function;
    std::vector<FamilyResult> results = run_engines(model.chain, property, args, &function);
    Report report = make_report(results, results.size() > 1);
    bool timing = !args.no_timing;
    if (args.format == "table") {
        std::cout << format_table(report, timing);
    } else if (args.format == "csv") {
        std::cout << format_csv(report, timing);
    } else if (args.format == "json") {
        std::cout << format_json(report, timing);
    } else {
        throw Error("unknown format '" + args.format + "' (expected table, csv or json)");
    }
    for (auto const& family : results) {
        for (auto const& warning : family.warnings) {
            std::cerr << "warning (" << engine_name(family.engine) << "): " << warning << '\n';
        }
    }
    if (!args.emit_expression.empty()) {
        if (!function) {
            throw Error("--emit-expression needs the parametric engine and a quantitative property");
        }
        std::ofstream out(args.emit_expression);
        if (!out) {
            throw Error("cannot write '" + args.emit_expression + "'");
        }
        out << emit_expression(*function, *model.chain.diagram) << '\n';
    }
    bool unknown = false;
    bool disagree = false;
    for (auto const& family : results) {
        unknown = unknown || family.unknown_count() > 0;
    }
    for (auto const& row : report.rows) {
        disagree = disagree || row.agreement == "no";
    }
    if (disagree) {
        std::cerr << "error: engines disagree on at least one product\n";
        return kError;
    }
    return unknown ? kUnknown : kOk;
}

int run_bench(BenchArgs const& args) {
    std::cout << "family,n,engine,products,seconds\n";
    for (unsigned n : args.sizes) {
        BuiltModel model = load_model(generate(args.family, n));
        std::string text = args.property.empty() ? model.property_order.front() : args.property;
        Property property = resolve_property(model, text);
        std::size_t products = model.chain.diagram->product_count();
        for (auto const& engine : args.engines) {
            double seconds = 0;
            if (engine == "enum") {
                EnumerativeOptions options;
                options.workers = args.workers;
                seconds = check_family_enumerative(model.chain, property, options).seconds;
            } else if (engine == "param") {
                seconds = check_family_parametric(model.chain, property).family.seconds;
            } else if (engine == "bounded") {
                BoundedOptions options;
                options.epsilon = args.epsilon;
                seconds = check_family_bounded(model.chain, property, options).seconds;
            } else {
                throw Error("unknown engine '" + engine + "'");
            }
            std::cout << args.family << ',' << n << ',' << engine << ',' << products << ',' << to_fixed(seconds, 6)
                      << '\n'
                      << std::flush;
        }
    }
    return kOk;
}

int run_generate(GenerateArgs const& args) {
    std::string text = generate(args.family, args.size);
    if (args.output.empty()) {
        std::cout << text;
        return kOk;
    }
    std::ofstream out(args.output);
    if (!out) {
        throw Error("cannot write '" + args.output + "'");
    }
    out << text;
    return kOk;
}

int run_validate(std::string const& path, bool list_states) {
    BuiltModel model = load_model_file(path);
    Fdtmc const& chain = model.chain;
    std::size_t transitions = 0;
    for (auto const& row : chain.transitions) {
        transitions += row.size();
    }
    std::cout << "states: " << chain.state_count() << '\n'
              << "transitions: " << transitions << '\n'
              << "features: " << chain.diagram->feature_count() << '\n'
              << "products: " << chain.diagram->product_count() << '\n'
              << "properties:";
    for (auto const& name : model.property_order) {
        std::cout << ' ' << name;
    }
    std::cout << "\nvalid: yes\n";
    if (list_states) {
        for (StateIndex s = 0; s < chain.state_count(); ++s) {
            std::cout << chain.states[s];
            for (auto const& label : chain.labels[s]) {
                std::cout << ' ' << label;
            }
            std::cout << '\n';
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic model checker for product lines"};
    app.require_subcommand(1);

    CheckArgs check;
    auto* check_cmd = app.add_subcommand("check", "Check a property for every product of a model");
    check_cmd->add_option("model", check.model, "Model file (.fdl)")->required();
    check_cmd->add_option("--prop", check.property, "Property name from the model file, or property text")
        ->required();
    check_cmd->add_option("--engine", check.engine, "enum, param, bounded or all")
        ->check(CLI::IsMember({"enum", "param", "bounded", "all"}));
    check_cmd->add_option("--epsilon", check.epsilon, "Residual precision of the bounded engine");
    check_cmd->add_option("--bound", check.bound, "Fixed number of rounds for the bounded engine");
    check_cmd->add_option("--max-depth", check.max_depth, "Round ceiling of the bounded engine");
    check_cmd->add_option("--workers", check.workers, "Threads for per-product checking");
    check_cmd->add_option("--format", check.format, "table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    check_cmd->add_option("--emit-expression", check.emit_expression, "Write the parametric closed form here");
    check_cmd->add_flag("--float", check.floating, "Double-precision value iteration in the enumerative engine");
    check_cmd->add_flag("--no-timing", check.no_timing, "Omit the timing column");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time the engines on a generated model family");
    bench_cmd->add_option("--family", bench.family, "service-provider or failure-recovery");
    bench_cmd->add_option("--sizes", bench.sizes, "Family sizes")->delimiter(',');
    bench_cmd->add_option("--engines", bench.engines, "Engines to time")->delimiter(',');
    bench_cmd->add_option("--prop", bench.property, "Property name or text (default: first in the model)");
    bench_cmd->add_option("--epsilon", bench.epsilon, "Residual precision of the bounded engine");
    bench_cmd->add_option("--workers", bench.workers, "Threads for per-product checking");

    GenerateArgs gen;
    auto* gen_cmd = app.add_subcommand("generate", "Print a generated benchmark model");
    gen_cmd->add_option("family", gen.family, "service-provider or failure-recovery")->required();
    gen_cmd->add_option("size", gen.size, "Number of features")->required();
    gen_cmd->add_option("-o,--output", gen.output, "Output file");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Build and validate a model");
    bool list_states = false;
    validate_cmd->add_option("model", validate_path, "Model file (.fdl)")->required();
    validate_cmd->add_flag("--states", list_states, "List the states with their labels");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kError;
    }

    try {
        if (*check_cmd) {
            return run_check(check);
        }
        if (*bench_cmd) {
            return run_bench(bench);
        }
        if (*gen_cmd) {
            return run_generate(gen);
        }
        return run_validate(validate_path, list_states);
    } catch (ParseError const& e) {
        std::cerr << "parse error: " << e.what() << '\n';
    } catch (ConvergenceError const& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
    } catch (ModelError const& e) {
        std::cerr << "model error: " << e.what() << '\n';
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kError;
}
