#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csense/error.h"

namespace csense {

enum class ZoneKind { Entrance, Corridor, Room, Exit };

std::string_view to_string(ZoneKind k);
ZoneKind zone_kind_from_string(std::string_view s);

/// A walkable region of the building. `visit_order`, when present, is the
/// zone's position in the canonical tour; zones without it are pass-through.
struct Zone {
    std::string id;
    ZoneKind kind = ZoneKind::Corridor;
    double length_m = 0.0;
    double area_m2 = 0.0;
    std::optional<int> visit_order;

    bool operator==(const Zone&) const = default;
};

/// Directed doorway between two zones. `service_rate` is the maximum
/// throughput in persons per second.
struct Portal {
    std::string id;
    std::string from_zone;
    std::string to_zone;
    double width_m = 0.0;
    double service_rate = 0.0;

    bool operator==(const Portal&) const = default;
};

/// The physical space as a zone graph. Immutable after load; safe to share
/// across concurrent simulation runs.
class FloorPlan {
public:
    FloorPlan() = default;
    FloorPlan(std::vector<Zone> zones, std::vector<Portal> portals,
              std::vector<std::string> entrances, std::vector<std::string> exits);

    const std::vector<Zone>& zones() const { return zones_; }
    const std::vector<Portal>& portals() const { return portals_; }
    const std::vector<std::string>& entrances() const { return entrances_; }
    const std::vector<std::string>& exits() const { return exits_; }

    bool has_zone(std::string_view id) const;
    bool has_portal(std::string_view id) const;
    const Zone& zone(std::string_view id) const;
    const Portal& portal(std::string_view id) const;
    std::size_t zone_index(std::string_view id) const;
    std::size_t portal_index(std::string_view id) const;

    /// Portal indices leaving `zone_id`, in declaration order.
    const std::vector<std::size_t>& portals_from(std::string_view zone_id) const;

    /// A portal out of an entrance zone ("entrance portal") or into an exit
    /// zone ("exit portal"); device placement sites are classified this way.
    bool is_entrance_portal(const Portal& p) const;
    bool is_exit_portal(const Portal& p) const;

    bool operator==(const FloorPlan& other) const;

private:
    std::vector<Zone> zones_;
    std::vector<Portal> portals_;
    std::vector<std::string> entrances_;
    std::vector<std::string> exits_;
    std::vector<std::vector<std::size_t>> out_portals_;  // per zone index
};

/// Parses and validates a floor-plan document (JSON text).
/// Throws ParseError with line/position on syntax errors and ValidationError
/// naming the violated invariant otherwise.
FloorPlan load_floor_plan(const std::string& document);
FloorPlan load_floor_plan_file(const std::filesystem::path& path);

/// Collects every invariant violation of an already-parsed document instead
/// of throwing on the first; used by the CLI validate command.
std::vector<Diagnostic> validate_floor_plan_document(const std::string& document);

/// Serializes back to the document format; load_floor_plan is its inverse.
std::string serialize_floor_plan(const FloorPlan& plan);

/// Portal-connected path from `entrance` to `exit` visiting every zone that
/// carries a visit_order, in ascending order. Deterministic for a fixed plan.
/// Throws DomainError on bad endpoints and ValidationError (no-path) when the
/// ordering is not realizable on the portal graph.
std::vector<std::string> tour_route(const FloorPlan& plan, std::string_view entrance,
                                    std::string_view exit);

}  // namespace csense
