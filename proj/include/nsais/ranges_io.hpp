#pragma once

#include "json.hpp"

#include "nsais/metric.hpp"
#include "nsais/point.hpp"

namespace nsais {

// Points serialize as arrays of numbers; a bare number reads as a 1-d point.
nlohmann::json to_json(const Point& p);
Point point_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FinitePointSet& s);
FinitePointSet point_set_from_json(const nlohmann::json& j);

// {"kind": "manhattan"} and friends; a custom table is either
// {"kind": "table", "points": [...], "distances": [[...]]} or the bare
// {"points": [...], "distances": [[...]]} object.
nlohmann::json to_json(const Metric& m);
Metric metric_from_json(const nlohmann::json& j);

}  // namespace nsais
