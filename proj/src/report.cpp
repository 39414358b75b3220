#include "fpmc/report.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace fpmc {

namespace {

std::string csv_field(std::string const& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char c : text) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

std::vector<std::string> headers(Report const& report, bool timing) {
    std::vector<std::string> h = {"product", "engine", "property", "value", "verdict"};
    if (timing) {
        h.push_back("seconds");
    }
    if (report.has_agreement) {
        h.push_back("agreement");
    }
    return h;
}

std::vector<std::string> cells(ReportRow const& row, Report const& report, bool timing) {
    std::vector<std::string> c = {row.product, row.engine, row.property, row.value, row.verdict};
    if (timing) {
        c.push_back(to_fixed(row.seconds, 6));
    }
    if (report.has_agreement) {
        c.push_back(row.agreement);
    }
    return c;
}

bool value_agrees(Value const& a, Value const& b, double slack) {
    using Kind = Value::Kind;
    if (a.kind == Kind::None || b.kind == Kind::None) {
        return a.kind == b.kind;
    }
    if (a.kind == Kind::Infinite || b.kind == Kind::Infinite) {
        return a.kind == b.kind;
    }
    if (a.kind == Kind::Exact && b.kind == Kind::Exact) {
        return a.exact == b.exact;
    }
    double lo = std::max(a.kind == Kind::Exact ? a.approx() : a.lower, b.kind == Kind::Exact ? b.approx() : b.lower);
    double hi = std::min(a.kind == Kind::Exact ? a.approx() : a.upper, b.kind == Kind::Exact ? b.approx() : b.upper);
    return lo <= hi + slack;
}

}  // namespace

bool results_agree(std::vector<ProductResult const*> const& results, double slack) {
    for (std::size_t i = 0; i < results.size(); ++i) {
        for (std::size_t j = i + 1; j < results.size(); ++j) {
            Verdict a = results[i]->verdict;
            Verdict b = results[j]->verdict;
            if (a != Verdict::Unknown && b != Verdict::Unknown && a != b) {
                return false;
            }
            if (!value_agrees(results[i]->value, results[j]->value, slack)) {
                return false;
            }
        }
    }
    return true;
}

Report make_report(std::vector<FamilyResult> const& results, bool agreement) {
    Report report;
    report.has_agreement = agreement;
    if (results.empty()) {
        return report;
    }
    std::size_t count = results.front().results.size();
    for (std::size_t p = 0; p < count; ++p) {
        std::string agrees;
        if (agreement) {
            std::vector<ProductResult const*> row;
            for (auto const& family : results) {
                row.push_back(&family.results[p]);
            }
            agrees = results_agree(row) ? "yes" : "no";
        }
        for (auto const& family : results) {
            ProductResult const& r = family.results[p];
            ReportRow row;
            row.product = family.diagram->product(r.product).to_string();
            row.engine = engine_name(family.engine);
            row.property = family.property;
            row.value = r.value.to_string();
            row.exact = r.value.exact_string();
            row.verdict = verdict_name(r.verdict);
            row.seconds = family.engine == Engine::Enumerative ? r.seconds
                                                               : family.seconds / static_cast<double>(count);
            row.agreement = agrees;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string format_table(Report const& report, bool timing) {
    std::vector<std::vector<std::string>> grid = {headers(report, timing)};
    for (auto const& row : report.rows) {
        grid.push_back(cells(row, report, timing));
    }
    std::vector<std::size_t> width(grid.front().size(), 0);
    for (auto const& line : grid) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            width[i] = std::max(width[i], line[i].size());
        }
    }
    std::ostringstream out;
    for (std::size_t r = 0; r < grid.size(); ++r) {
        for (std::size_t i = 0; i < grid[r].size(); ++i) {
            std::string cell = grid[r][i];
            if (i + 1 < grid[r].size()) {
                cell.resize(width[i], ' ');
                cell += "  ";
            }
            out << cell;
        }
        out << '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (auto w : width) {
                total += w + 2;
            }
            out << std::string(total - 2, '-') << '\n';
        }
    }
    return out.str();
}

std::string format_csv(Report const& report, bool timing) {
    std::ostringstream out;
    auto line = [&](std::vector<std::string> const& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            out << (i ? "," : "") << csv_field(fields[i]);
        }
        out << '\n';
    };
    line(headers(report, timing));
    for (auto const& row : report.rows) {
        line(cells(row, report, timing));
    }
    return out.str();
}

std::string format_json(Report const& report, bool timing) {
    nlohmann::ordered_json doc;
    doc["schema"] = 1;
    doc["rows"] = nlohmann::ordered_json::array();
    for (auto const& row : report.rows) {
        nlohmann::ordered_json r;
        r["product"] = row.product;
        r["engine"] = row.engine;
        r["property"] = row.property;
        r["value"] = row.value;
        if (!row.exact.empty()) {
            r["exact"] = row.exact;
        }
        r["verdict"] = row.verdict;
        if (timing) {
            r["seconds"] = row.seconds;
        }
        if (report.has_agreement) {
            r["agreement"] = row.agreement;
        }
        doc["rows"].push_back(std::move(r));
    }
    return doc.dump(2) + "\n";
}

}  // namespace fpmc
