#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace orlicz::cli {

using nlohmann::json;

/// Scenario output: JSON sections plus an optional CSV series.
struct Report {
    json data = json::object();
    std::vector<std::string> csv_header;
    std::vector<std::vector<json>> csv_rows;

    /// Records the verdict of one asserted invariant.
    void check(const std::string& name, bool ok);
    bool pass() const;
    std::string csv() const;
};

const std::vector<std::string>& scenario_names();

/// Dispatches on the scenario name; throws InputError for unknown names and
/// lets module errors propagate. Sets "wall_time_s" last.
Report run_scenario(const std::string& name, const json& config);

} // namespace orlicz::cli
