#pragma once

#include <string>
#include <vector>

#include "fpmc/family_result.h"

namespace fpmc {

struct ReportRow {
    std::string product;
    std::string engine;
    std::string property;
    std::string value;
    /// Full exact value, empty for approximations.
    std::string exact;
    std::string verdict;
    /// Per-product time: measured for enumeration, amortized otherwise.
    double seconds = 0;
    /// "yes"/"no" when several engines ran, else empty.
    std::string agreement;
};

struct Report {
    std::vector<ReportRow> rows;
    bool has_agreement = false;
};

/// One row per (product, engine), products in canonical order. With
/// `agreement`, every row carries whether all engines agree on its product.
Report make_report(std::vector<FamilyResult> const& results, bool agreement);

/// Exact values must match exactly; an interval must contain the exact
/// value up to `slack`; decided verdicts must coincide.
bool results_agree(std::vector<ProductResult const*> const& results, double slack = 1e-9);

std::string format_table(Report const& report, bool timing = true);
std::string format_csv(Report const& report, bool timing = true);
std::string format_json(Report const& report, bool timing = true);

}  // namespace fpmc
