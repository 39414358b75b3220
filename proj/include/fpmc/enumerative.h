#pragma once

#include "fpmc/dtmc_checker.h"
#include "fpmc/family_result.h"
#include "fpmc/models.h"
#include "fpmc/pctl.h"

namespace fpmc {

struct EnumerativeOptions {
    unsigned workers = 1;
    DtmcOptions dtmc;
};

/// Root value and verdict of a property on one chain, weighted by its
/// initial distribution.
ProductResult check_dtmc(Dtmc const& chain, Property const& property, DtmcOptions const& options = {});

/// Projects every valid product and checks the resulting chains one by one.
FamilyResult check_family_enumerative(Fdtmc const& model, Property const& property,
                                      EnumerativeOptions const& options = {});

}  // namespace fpmc
