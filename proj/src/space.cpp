#include "csense/space.h"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace csense {

using nlohmann::json;

std::string_view to_string(ZoneKind k) {
    switch (k) {
        case ZoneKind::Entrance: return "entrance";
        case ZoneKind::Corridor: return "corridor";
        case ZoneKind::Room: return "room";
        case ZoneKind::Exit: return "exit";
    }
    return "corridor";
}

ZoneKind zone_kind_from_string(std::string_view s) {
    if (s == "entrance") return ZoneKind::Entrance;
    if (s == "corridor") return ZoneKind::Corridor;
    if (s == "room") return ZoneKind::Room;
    if (s == "exit") return ZoneKind::Exit;
    throw ValidationError(Diagnostic{"kind", "unknown zone kind '" + std::string(s) + "'"});
}

FloorPlan::FloorPlan(std::vector<Zone> zones, std::vector<Portal> portals,
                     std::vector<std::string> entrances, std::vector<std::string> exits)
    : zones_(std::move(zones)),
      portals_(std::move(portals)),
      entrances_(std::move(entrances)),
      exits_(std::move(exits)) {
    out_portals_.resize(zones_.size());
    for (std::size_t p = 0; p < portals_.size(); ++p) {
        out_portals_[zone_index(portals_[p].from_zone)].push_back(p);
    }
}

bool FloorPlan::has_zone(std::string_view id) const {
    return std::any_of(zones_.begin(), zones_.end(), [&](const Zone& z) { return z.id == id; });
}

bool FloorPlan::has_portal(std::string_view id) const {
    return std::any_of(portals_.begin(), portals_.end(),
                       [&](const Portal& p) { return p.id == id; });
}

std::size_t FloorPlan::zone_index(std::string_view id) const {
    for (std::size_t i = 0; i < zones_.size(); ++i)
        if (zones_[i].id == id) return i;
    throw DomainError("unknown zone '" + std::string(id) + "'");
}

std::size_t FloorPlan::portal_index(std::string_view id) const {
    for (std::size_t i = 0; i < portals_.size(); ++i)
        if (portals_[i].id == id) return i;
    throw DomainError("unknown portal '" + std::string(id) + "'");
}

const Zone& FloorPlan::zone(std::string_view id) const { return zones_[zone_index(id)]; }
const Portal& FloorPlan::portal(std::string_view id) const { return portals_[portal_index(id)]; }

const std::vector<std::size_t>& FloorPlan::portals_from(std::string_view zone_id) const {
    return out_portals_[zone_index(zone_id)];
}

bool FloorPlan::is_entrance_portal(const Portal& p) const {
    return std::find(entrances_.begin(), entrances_.end(), p.from_zone) != entrances_.end();
}

bool FloorPlan::is_exit_portal(const Portal& p) const {
    return std::find(exits_.begin(), exits_.end(), p.to_zone) != exits_.end();
}

bool FloorPlan::operator==(const FloorPlan& other) const {
    return zones_ == other.zones_ && portals_ == other.portals_ &&
           entrances_ == other.entrances_ && exits_ == other.exits_;
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where, std::vector<Diagnostic>& diags) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key))
            diags.push_back({where, "unknown key '" + key + "'"});
    }
}

double require_positive_number(const json& obj, const char* key, const std::string& where,
                               std::vector<Diagnostic>& diags) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        diags.push_back({where, std::string("missing or non-numeric '") + key + "'"});
        return 0.0;
    }
    const double v = obj[key].get<double>();
    if (!(v > 0.0)) diags.push_back({where, std::string(key) + " must be > 0"});
    return v;
}

std::string require_string(const json& obj, const char* key, const std::string& where,
                           std::vector<Diagnostic>& diags) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        diags.push_back({where, std::string("missing or non-string '") + key + "'"});
        return {};
    }
    return obj[key].get<std::string>();
}

struct ParsedPlan {
    std::vector<Zone> zones;
    std::vector<Portal> portals;
    std::vector<std::string> entrances;
    std::vector<std::string> exits;
};

ParsedPlan parse_plan(const json& doc, std::vector<Diagnostic>& diags) {
    ParsedPlan out;
    if (!doc.is_object()) {
        diags.push_back({"", "top level must be an object"});
        return out;
    }
    reject_unknown_keys(doc, {"zones", "portals", "entrances", "exits"}, "plan", diags);
    for (const char* key : {"zones", "portals", "entrances", "exits"}) {
        if (!doc.contains(key) || !doc[key].is_array())
            diags.push_back({"plan", std::string("missing array '") + key + "'"});
    }
    if (!diags.empty()) return out;

    std::size_t zi = 0;
    for (const auto& jz : doc["zones"]) {
        const std::string where = "zones[" + std::to_string(zi++) + "]";
        reject_unknown_keys(jz, {"id", "kind", "length_m", "area_m2", "visit_order"}, where, diags);
        Zone z;
        z.id = require_string(jz, "id", where, diags);
        try {
            z.kind = zone_kind_from_string(require_string(jz, "kind", where, diags));
        } catch (const ValidationError& e) {
            diags.push_back({where, e.what()});
        }
        z.length_m = require_positive_number(jz, "length_m", where, diags);
        z.area_m2 = require_positive_number(jz, "area_m2", where, diags);
        if (jz.contains("visit_order")) {
            if (!jz["visit_order"].is_number_integer() || jz["visit_order"].get<int>() < 0)
                diags.push_back({where, "visit_order must be a non-negative integer"});
            else
                z.visit_order = jz["visit_order"].get<int>();
        }
        out.zones.push_back(std::move(z));
    }
    std::size_t pi = 0;
    for (const auto& jp : doc["portals"]) {
        const std::string where = "portals[" + std::to_string(pi++) + "]";
        reject_unknown_keys(jp, {"id", "from", "to", "width_m", "service_rate"}, where, diags);
        Portal p;
        p.id = require_string(jp, "id", where, diags);
        p.from_zone = require_string(jp, "from", where, diags);
        p.to_zone = require_string(jp, "to", where, diags);
        p.width_m = require_positive_number(jp, "width_m", where, diags);
        p.service_rate = require_positive_number(jp, "service_rate", where, diags);
        out.portals.push_back(std::move(p));
    }
    for (const auto& je : doc["entrances"]) out.entrances.push_back(je.get<std::string>());
    for (const auto& je : doc["exits"]) out.exits.push_back(je.get<std::string>());
    return out;
}

void validate_semantics(const ParsedPlan& p, std::vector<Diagnostic>& diags) {
    std::set<std::string> zone_ids;
    for (const auto& z : p.zones) {
        if (!zone_ids.insert(z.id).second)
            diags.push_back({"zones", "duplicate zone id '" + z.id + "'"});
    }
    std::set<std::string> portal_ids;
    for (const auto& pt : p.portals) {
        if (!portal_ids.insert(pt.id).second)
            diags.push_back({"portals", "duplicate portal id '" + pt.id + "'"});
        if (pt.from_zone == pt.to_zone)
            diags.push_back({"portals", "portal '" + pt.id + "' endpoints must differ"});
        if (!zone_ids.contains(pt.from_zone))
            diags.push_back({"portals", "portal '" + pt.id + "' references unknown zone '" +
                                            pt.from_zone + "'"});
        if (!zone_ids.contains(pt.to_zone))
            diags.push_back(
                {"portals", "portal '" + pt.id + "' references unknown zone '" + pt.to_zone + "'"});
    }
    if (p.entrances.empty()) diags.push_back({"entrances", "at least one entrance required"});
    if (p.exits.empty()) diags.push_back({"exits", "at least one exit required"});
    for (const auto& e : p.entrances) {
        if (!zone_ids.contains(e))
            diags.push_back({"entrances", "unknown zone '" + e + "'"});
        else if (std::find_if(p.zones.begin(), p.zones.end(), [&](const Zone& z) {
                     return z.id == e && z.kind == ZoneKind::Entrance;
                 }) == p.zones.end())
            diags.push_back({"entrances", "zone '" + e + "' is not of kind entrance"});
    }
    for (const auto& x : p.exits) {
        if (!zone_ids.contains(x))
            diags.push_back({"exits", "unknown zone '" + x + "'"});
        else if (std::find_if(p.zones.begin(), p.zones.end(), [&](const Zone& z) {
                     return z.id == x && z.kind == ZoneKind::Exit;
                 }) == p.zones.end())
            diags.push_back({"exits", "zone '" + x + "' is not of kind exit"});
    }
    if (!diags.empty()) return;

    // Reachability over directed portal edges.
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& pt : p.portals) adj[pt.from_zone].push_back(pt.to_zone);
    auto reachable_from = [&](const std::string& start) {
        std::set<std::string> seen{start};
        std::deque<std::string> queue{start};
        while (!queue.empty()) {
            const std::string cur = queue.front();
            queue.pop_front();
            for (const auto& next : adj[cur])
                if (seen.insert(next).second) queue.push_back(next);
        }
        return seen;
    };
    std::set<std::string> from_any_entrance;
    for (const auto& e : p.entrances) {
        auto seen = reachable_from(e);
        for (const auto& x : p.exits)
            if (!seen.contains(x))
                diags.push_back(
                    {"plan", "entrance '" + e + "' is not connected to exit '" + x + "'"});
        from_any_entrance.insert(seen.begin(), seen.end());
    }
    for (const auto& z : p.zones)
        if (!from_any_entrance.contains(z.id))
            diags.push_back({"plan", "unreachable zone '" + z.id + "'"});
}

json parse_document(const std::string& document) {
    try {
        return json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());  // carries line/byte position
    }
}

}  // namespace

std::vector<Diagnostic> validate_floor_plan_document(const std::string& document) {
    std::vector<Diagnostic> diags;
    json doc;
    try {
        doc = parse_document(document);
    } catch (const ParseError& e) {
        diags.push_back({"plan", e.what()});
        return diags;
    }
    ParsedPlan parsed = parse_plan(doc, diags);
    if (diags.empty()) validate_semantics(parsed, diags);
    return diags;
}

FloorPlan load_floor_plan(const std::string& document) {
    const json doc = parse_document(document);
    std::vector<Diagnostic> diags;
    ParsedPlan parsed = parse_plan(doc, diags);
    if (diags.empty()) validate_semantics(parsed, diags);
    if (!diags.empty()) throw ValidationError(std::move(diags));
    return FloorPlan(std::move(parsed.zones), std::move(parsed.portals),
                     std::move(parsed.entrances), std::move(parsed.exits));
}

FloorPlan load_floor_plan_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open floor plan file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_floor_plan(buf.str());
}

std::string serialize_floor_plan(const FloorPlan& plan) {
    json doc;
    doc["zones"] = json::array();
    for (const auto& z : plan.zones()) {
        json jz{{"id", z.id},
                {"kind", std::string(to_string(z.kind))},
                {"length_m", z.length_m},
                {"area_m2", z.area_m2}};
        if (z.visit_order) jz["visit_order"] = *z.visit_order;
        doc["zones"].push_back(std::move(jz));
    }
    doc["portals"] = json::array();
    for (const auto& p : plan.portals()) {
        doc["portals"].push_back(json{{"id", p.id},
                                      {"from", p.from_zone},
                                      {"to", p.to_zone},
                                      {"width_m", p.width_m},
                                      {"service_rate", p.service_rate}});
    }
    doc["entrances"] = plan.entrances();
    doc["exits"] = plan.exits();
    return doc.dump(2) + "\n";
}

namespace {

/// BFS shortest path; neighbor expansion follows portal declaration order, so
/// the result is deterministic for a fixed plan.
std::vector<std::string> shortest_path(const FloorPlan& plan, const std::string& from,
                                       const std::string& to) {
    if (from == to) return {from};
    std::map<std::string, std::string> parent;
    std::deque<std::string> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
        const std::string cur = queue.front();
        queue.pop_front();
        for (std::size_t pi : plan.portals_from(cur)) {
            const std::string& next = plan.portals()[pi].to_zone;
            if (parent.contains(next)) continue;
            parent[next] = cur;
            if (next == to) {
                std::vector<std::string> path{to};
                for (std::string at = to; at != from;) {
                    at = parent[at];
                    path.push_back(at);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            queue.push_back(next);
        }
    }
    return {};
}

}  // namespace

std::vector<std::string> tour_route(const FloorPlan& plan, std::string_view entrance,
                                    std::string_view exit) {
    if (!plan.has_zone(entrance) || plan.zone(entrance).kind != ZoneKind::Entrance)
        throw DomainError("'" + std::string(entrance) + "' is not an entrance zone");
    if (!plan.has_zone(exit) || plan.zone(exit).kind != ZoneKind::Exit)
        throw DomainError("'" + std::string(exit) + "' is not an exit zone");

    std::vector<const Zone*> waypoints;
    for (const auto& z : plan.zones())
        if (z.visit_order) waypoints.push_back(&z);
    std::sort(waypoints.begin(), waypoints.end(), [](const Zone* a, const Zone* b) {
        if (*a->visit_order != *b->visit_order) return *a->visit_order < *b->visit_order;
        return a->id < b->id;
    });

    std::vector<std::string> stops{std::string(entrance)};
    for (const Zone* w : waypoints)
        if (w->id != stops.back()) stops.push_back(w->id);
    if (stops.back() != exit) stops.push_back(std::string(exit));

    std::vector<std::string> route{stops.front()};
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        auto leg = shortest_path(plan, stops[i], stops[i + 1]);
        if (leg.empty())
            throw ValidationError(Diagnostic{
                "tour", "no path from '" + stops[i] + "' to '" + stops[i + 1] + "'"});
        route.insert(route.end(), leg.begin() + 1, leg.end());
    }
    return route;
}

}  // namespace csense
