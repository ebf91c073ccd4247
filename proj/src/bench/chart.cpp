#include "rpl/bench/chart.hpp"

#include <charconv>

namespace rpl::bench {

lang::Rational parse_rational(std::string_view text)
{
    auto number = [&](std::string_view s) {
        std::int64_t v = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || end != s.data() + s.size() || s.empty())
            throw Error("not a rational: " + std::string(text));
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return number(text);
    std::int64_t den = number(text.substr(slash + 1));
    if (den == 0)
        throw Error("not a rational: " + std::string(text));
    return {number(text.substr(0, slash)), den};
}

namespace {

double to_double(const lang::Rational& r)
{
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

} // namespace

ChartSeries chart_series(const std::vector<RunRecord>& records)
{
    ChartSeries out;
    for (const auto& r : records) {
        if (r.time_stats.is_null() || r.cost_stats.is_null())
            continue;
        lang::Rational time = parse_rational(r.time_stats.at("avg").get<std::string>());
        lang::Rational cost = parse_rational(r.cost_stats.at("avg").get<std::string>());
        out.time.push_back({r.exec_id, to_double(time), to_double(time / lang::Rational(1000000))});
        out.cost.push_back({r.exec_id, to_double(cost), to_double(cost / lang::Rational(1000000))});
    }
    return out;
}

nlohmann::ordered_json to_json(const ChartSeries& series)
{
    nlohmann::ordered_json j;
    j["time"] = nlohmann::ordered_json::array();
    for (const auto& p : series.time)
        j["time"].push_back({{"execId", p.exec_id}, {"value", p.value}});
    j["cost"] = nlohmann::ordered_json::array();
    for (const auto& p : series.cost)
        j["cost"].push_back({{"execId", p.exec_id}, {"value", p.value}, {"millions", p.millions}});
    j["costUnit"] = "millions";
    return j;
}

} // namespace rpl::bench
