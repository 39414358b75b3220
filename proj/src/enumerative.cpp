#include "fpmc/enumerative.h"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "fpmc/errors.h"

namespace fpmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void rethrow_for_product(std::exception_ptr error, std::string const& product) {
    std::string prefix = "product " + product + ": ";
    try {
        std::rethrow_exception(error);
    } catch (ConvergenceError const& e) {
        throw ConvergenceError(prefix + e.what());
    } catch (ModelError const& e) {
        throw ModelError(prefix + e.what());
    } catch (std::exception const& e) {
        throw Error(prefix + e.what());
    }
}

}  // namespace

ProductResult check_dtmc(Dtmc const& chain, Property const& property, DtmcOptions const& options) {
    DtmcChecker checker(chain, options);
    ProductResult result;
    Formula const& root = property.formula;
    if (property.is_reward()) {
        if (options.floating) {
            auto values = checker.float_expected_reward(root);
            double total = 0;
            for (StateIndex s = 0; s < chain.state_count(); ++s) {
                if (chain.initial[s] == 0) {
                    continue;
                }
                if (!values[s]) {
                    result.value = Value::infinite();
                    return result;
                }
                total += to_double(chain.initial[s]) * *values[s];
            }
            result.value = Value::interval(total, total);
        } else {
            auto values = checker.expected_reward(root);
            Rational total = 0;
            for (StateIndex s = 0; s < chain.state_count(); ++s) {
                if (chain.initial[s] == 0) {
                    continue;
                }
                if (!values[s]) {
                    result.value = Value::infinite();
                    return result;
                }
                total += chain.initial[s] * *values[s];
            }
            result.value = Value::of(total);
        }
        return result;
    }
    if (root->kind == StateFormula::Kind::Probability) {
        if (options.floating) {
            auto values = checker.float_probabilities(*root->path);
            double total = 0;
            for (StateIndex s = 0; s < chain.state_count(); ++s) {
                total += to_double(chain.initial[s]) * values[s];
            }
            result.value = Value::interval(total, total);
            if (!root->quantitative) {
                result.verdict = root->interval.contains(total, 0.0) ? Verdict::Satisfied : Verdict::Violated;
            }
        } else {
            auto values = checker.probabilities(*root->path);
            Rational total = 0;
            for (StateIndex s = 0; s < chain.state_count(); ++s) {
                total += chain.initial[s] * values[s];
            }
            result.value = Value::of(total);
            result.verdict = decide(property, total);
        }
        return result;
    }
    auto sat = checker.satisfies(root);
    bool all = true;
    for (StateIndex s = 0; s < chain.state_count(); ++s) {
        all = all && (chain.initial[s] == 0 || sat[s]);
    }
    result.verdict = all ? Verdict::Satisfied : Verdict::Violated;
    return result;
}

FamilyResult check_family_enumerative(Fdtmc const& model, Property const& property,
                                      EnumerativeOptions const& options) {
    check_propositions(property, model.propositions);
    auto start = Clock::now();
    FamilyResult family;
    family.engine = Engine::Enumerative;
    family.diagram = model.diagram;
    family.property = to_string(property);
    std::size_t count = model.diagram->product_count();
    family.results.resize(count);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_product = count;
    auto work = [&] {
        for (;;) {
            std::size_t p = next.fetch_add(1);
            if (p >= count) {
                return;
            }
            try {
                auto product_start = Clock::now();
                ProductResult r = check_dtmc(project(model, p), property, options.dtmc);
                r.product = p;
                r.seconds = seconds_since(product_start);
                family.results[p] = std::move(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (p < error_product) {
                    error = std::current_exception();
                    error_product = p;
                }
            }
        }
    };
    unsigned workers = std::max(1u, options.workers);
    if (workers == 1 || count == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (unsigned i = 0; i < std::min<std::size_t>(workers, count); ++i) {
            threads.emplace_back(work);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    if (error) {
        rethrow_for_product(error, model.diagram->product(error_product).to_string());
    }
    family.seconds = seconds_since(start);
    return family;
}

}  // namespace fpmc
