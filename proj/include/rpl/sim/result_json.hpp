#pragma once

#include "rpl/sim/simulator.hpp"

#include <json.hpp>

namespace rpl::sim {

/// The fixed AggregateResult schema consumed by the service and the UI.
nlohmann::ordered_json to_json(const AggregateResult& result);

nlohmann::ordered_json to_json(const SimRunResult& run);

} // namespace rpl::sim
