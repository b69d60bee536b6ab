#pragma once

#include "json.hpp"
#include "xbar/mapping/plan.hpp"

namespace xbar::mapping {

nlohmann::json budget_to_json(const CellBudget& b);
// Tiles, placements (layer, index, copy, tile, row, col+, col-), pass
// schedule and budgets.
nlohmann::json plan_to_json(const MappingPlan& plan);

}  // namespace xbar::mapping
