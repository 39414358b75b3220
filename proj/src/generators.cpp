#include "fpmc/generators.h"

#include <sstream>

#include "fpmc/errors.h"
#include "fpmc/feature_model.h"

namespace fpmc {

namespace {

void check_size(unsigned n, char const* what) {
    if (n > kDefaultEnumerationLimit) {
        throw ModelError(std::string(what) + " supports at most " + std::to_string(kDefaultEnumerationLimit) +
                         " features");
    }
}

std::string features_line(unsigned n) {
    std::string out = "features";
    for (unsigned i = 1; i <= n; ++i) {
        out += " f" + std::to_string(i);
    }
    return out + ";\n";
}

}  // namespace

std::string generate_service_provider(unsigned services) {
    check_size(services, "service-provider");
    unsigned n = services;
    std::ostringstream out;
    out << "// service-provider family, " << n << " services\n"
        << "//\n"
        << "// Probability schedule:\n"
        << "//   hub: failure 1/100, done 1/10, each service entry 1/(2n), remainder stays\n"
        << "//   s<i>_1: without f<i> back to hub; with f<i> failure q_i, else s<i>_2\n"
        << "//   s<i>_2: failure q_i, else s<i>_3\n"
        << "//   s<i>_3: failure 1/100, hub 69/100, done 3/10\n"
        << "//   q_i = ((i mod 3) + 1) / 100\n\n";
    out << features_line(n) << "\n";
    out << "fdtmc provider {\n    states hub";
    for (unsigned i = 1; i <= n; ++i) {
        out << " s" << i << "_1 s" << i << "_2 s" << i << "_3";
    }
    out << " failure done;\n    init hub;\n    label failure: failure;\n    label done: done;\n";
    out << "    hub -> failure : 1/100;\n    hub -> done : 1/10;\n";
    for (unsigned i = 1; i <= n; ++i) {
        out << "    hub -> s" << i << "_1 : 1/" << 2 * n << ";\n";
    }
    for (unsigned i = 1; i <= n; ++i) {
        std::string f = "f" + std::to_string(i);
        std::string s = "s" + std::to_string(i) + "_";
        unsigned q = i % 3 + 1;
        out << "    " << s << "1 -> hub : [!" << f << "] 1;\n"
            << "    " << s << "1 -> " << s << "2 : [" << f << "] " << 100 - q << "/100;\n"
            << "    " << s << "1 -> failure : [" << f << "] " << q << "/100;\n"
            << "    " << s << "2 -> " << s << "3 : " << 100 - q << "/100;\n"
            << "    " << s << "2 -> failure : " << q << "/100;\n"
            << "    " << s << "3 -> failure : 1/100;\n"
            << "    " << s << "3 -> hub : 69/100;\n"
            << "    " << s << "3 -> done : 3/10;\n";
    }
    out << "}\n\n"
        << "property failure = \"P[<0.1](F failure)\";\n"
        << "property failure_probability = \"P=?(F failure)\";\n"
        << "property done = \"P=?(F done)\";\n";
    return out.str();
}

std::string generate_failure_recovery(unsigned stages) {
    check_size(stages, "failure-recovery");
    unsigned n = stages;
    auto stage = [&](unsigned i) { return i == 0 ? std::string("ok") : i > n ? std::string("worn_out") : "d" + std::to_string(i); };
    std::ostringstream out;
    out << "// failure-recovery family, " << n << " degradation stages\n"
        << "//\n"
        << "// Probability schedule:\n"
        << "//   ok: forward 1/10, break 1/100, remainder stays\n"
        << "//   d<i> with f<i>: forward 1/10, break 1/100, recover 1/2\n"
        << "//   d<i> without f<i>: forward 1/4, break 1/20, recover 1/5\n"
        << "//   forward from d<n> reaches worn_out, recover from d1 reaches ok;\n"
        << "//   worn_out and broken are absorbing failure states\n\n";
    out << features_line(n) << "\n";
    out << "fdtmc machine {\n    states ok";
    for (unsigned i = 1; i <= n; ++i) {
        out << " " << stage(i);
    }
    out << " worn_out broken;\n    init ok;\n"
        << "    label worn_out: failure worn;\n    label broken: failure broken;\n"
        << "    ok -> " << stage(1) << " : 1/10;\n    ok -> broken : 1/100;\n";
    for (unsigned i = 1; i <= n; ++i) {
        std::string f = "f" + std::to_string(i);
        out << "    " << stage(i) << " -> " << stage(i + 1) << " : [" << f << "] 1/10, 1/4;\n"
            << "    " << stage(i) << " -> broken : [" << f << "] 1/100, 1/20;\n"
            << "    " << stage(i) << " -> " << stage(i - 1) << " : [" << f << "] 1/2, 1/5;\n";
    }
    out << "}\n\n"
        << "property failure = \"P=?(F failure)\";\n"
        << "property broken = \"P=?(F broken)\";\n"
        << "property early_failure = \"P[<0.1](F<=20 failure)\";\n";
    return out.str();
}

}  // namespace fpmc
