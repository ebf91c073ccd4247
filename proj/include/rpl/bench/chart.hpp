#pragma once

#include "rpl/bench/store.hpp"
#include "rpl/lang/rational.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace rpl::bench {

/// "n" or "n/d". Throws rpl::Error.
lang::Rational parse_rational(std::string_view text);

struct SeriesPoint {
    std::string exec_id;
    double value = 0;
    double millions = 0;
};

/// Bar chart data for the overview: average time and average cost per run,
/// in store order. Runs without time/cost stats are left out.
struct ChartSeries {
    std::vector<SeriesPoint> time;
    std::vector<SeriesPoint> cost;
};

ChartSeries chart_series(const std::vector<RunRecord>& records);

/// {time:[{execId,value}], cost:[{execId,value,millions}], costUnit:"millions"}
nlohmann::ordered_json to_json(const ChartSeries& series);

} // namespace rpl::bench
