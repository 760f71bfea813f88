#include "nsais/ranges_io.hpp"

#include "nsais/errors.hpp"

namespace nsais {

using nlohmann::json;

json to_json(const Point& p) {
    json j = json::array();
    for (double c : p.coords()) {
        if (c == static_cast<double>(static_cast<long long>(c)))
            j.push_back(static_cast<long long>(c));
        else
            j.push_back(c);
    }
    return j;
}

Point point_from_json(const json& j) {
    if (j.is_number()) return Point{j.get<double>()};
    if (!j.is_array()) throw SchemaError("point must be a number or an array of numbers");
    std::vector<double> c;
    for (const auto& v : j) {
        if (!v.is_number()) throw SchemaError("point coordinates must be numbers");
        c.push_back(v.get<double>());
    }
    return Point(std::move(c));
}

json to_json(const FinitePointSet& s) {
    json j = json::array();
    for (const auto& p : s) j.push_back(to_json(p));
    return j;
}

FinitePointSet point_set_from_json(const json& j) {
    if (!j.is_array()) throw SchemaError("point set must be an array");
    std::vector<Point> pts;
    for (const auto& v : j) pts.push_back(point_from_json(v));
    return FinitePointSet(std::move(pts));
}

json to_json(const Metric& m) {
    json j{{"kind", to_string(m.kind())}};
    switch (m.kind()) {
        case MetricKind::shortest_path:
            j["cells"] = to_json(m.carrier());
            break;
        case MetricKind::table: {
            const auto& c = m.carrier();
            j["points"] = to_json(c);
            json rows = json::array();
            for (const auto& a : c) {
                json row = json::array();
                for (const auto& b : c) row.push_back(m(a, b));
                rows.push_back(row);
            }
            j["distances"] = rows;
            break;
        }
        case MetricKind::product: {
            json blocks = json::array();
            for (const auto& b : m.blocks())
                blocks.push_back(
                    {{"offset", b.offset}, {"length", b.length}, {"metric", to_json(*b.metric)}});
            j["blocks"] = blocks;
            break;
        }
        default:
            break;
    }
    return j;
}

Metric metric_from_json(const json& j) {
    if (j.is_string()) return metric_from_json(json{{"kind", j}});
    if (!j.is_object()) throw SchemaError("metric must be an object or a kind name");
    std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "table";
    if (kind == "euclidean") return Metric::euclidean();
    if (kind == "manhattan" || kind == "absolute") return Metric::manhattan();
    if (kind == "chebyshev") return Metric::chebyshev();
    if (kind == "discrete") return Metric::discrete();
    if (kind == "shortest_path") return Metric::shortest_path(point_set_from_json(j.at("cells")));
    if (kind == "table") {
        if (!j.contains("points") || !j.contains("distances"))
            throw SchemaError("table metric needs points and distances");
        std::vector<Point> pts;
        for (const auto& v : j.at("points")) pts.push_back(point_from_json(v));
        auto rows = j.at("distances").get<std::vector<std::vector<double>>>();
        // Rows follow the order the points were listed in; reorder to canonical.
        FinitePointSet carrier(pts);
        if (carrier.size() != pts.size()) throw SchemaError("duplicate points in table metric");
        if (rows.size() != pts.size()) throw SchemaError("distance table rows != point count");
        std::vector<std::vector<double>> canon(pts.size(), std::vector<double>(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (rows[i].size() != pts.size()) throw SchemaError("distance table is not square");
            for (std::size_t k = 0; k < pts.size(); ++k)
                canon[carrier.require_index(pts[i])][carrier.require_index(pts[k])] = rows[i][k];
        }
        return Metric::table(std::move(carrier), std::move(canon));
    }
    if (kind == "product") {
        std::vector<MetricBlock> blocks;
        for (const auto& b : j.at("blocks"))
            blocks.push_back(block(b.at("offset").get<std::size_t>(),
                                   b.at("length").get<std::size_t>(),
                                   metric_from_json(b.at("metric"))));
        return Metric::product(std::move(blocks));
    }
    throw SchemaError("unknown metric kind '" + kind + "'");
}

}  // namespace nsais
