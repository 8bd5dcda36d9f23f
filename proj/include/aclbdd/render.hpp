/// @file  render.hpp
/// @brief Text and structured renderings of tables
///
/// Structured output is line-delimited JSON, one record per line:
///
///     {"record":"table","name":"accept","columns":["Proto","Port",...]}
///     {"record":"row","table":"accept","cells":[{"lo":1,"hi":1},...],"elided":[false,...]}
///     {"record":"end","table":"accept","rows":2}
///
/// Other record kinds ("stats", "redundant", "summary") carry command
/// results and are ignored by `parse_structured`.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aclbdd/analysis.hpp"

namespace aclbdd {

/// `lo--hi`, or the bare value when lo == hi.
std::string format_interval(const Interval &iv);

/// Header row of column titles, then one line per row with cells separated
/// by `|`; cells shared with the row above are left blank.
std::string render_text(const Table &table);

std::string render_structured(const Table &table, std::string_view name);

nlohmann::json table_to_json(const Table &table);
/// Throws std::invalid_argument on a malformed document.
Table table_from_json(const nlohmann::json &j);

/// Tables from a structured stream, in order, keyed by name.
std::vector<std::pair<std::string, Table>> parse_structured(std::string_view text);

} // namespace aclbdd
