#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csense/population.h"
#include "csense/space.h"

namespace csense {

/// One traversal of a portal by one agent; the atomic movement unit shared
/// by the crowd and IoT layers.
struct CrossingEvent {
    double time_s = 0.0;
    AgentId agent = 0;
    std::string portal;
    double speed_mps = 0.0;  // walking speed through the portal, > 0
};

struct PortalWaitStats {
    double mean_s = 0.0;
    double max_s = 0.0;
    std::uint32_t released = 0;
};

/// Full output of one crowd-simulation run.
///
/// `occupancy[z][k]` is the number of agents in zone `zone_ids[z]` at the end
/// of step k (walking, dwelling or queued there). `entered_cum`/`exited_cum`
/// are sampled at the same instants, so at every step
/// entered_cum[k] == sum_z occupancy[z][k] + exited_cum[k].
struct Trace {
    double dt_s = 0.0;
    double horizon_s = 0.0;
    std::vector<std::string> zone_ids;
    std::vector<std::string> portal_ids;
    std::vector<CrossingEvent> crossings;  // time-ordered
    std::vector<std::vector<std::uint32_t>> occupancy;  // [zone][step]
    std::vector<std::uint32_t> entered_cum;             // [step]
    std::vector<std::uint32_t> exited_cum;              // [step]
    std::map<std::string, PortalWaitStats> wait_stats;
    std::uint32_t entered = 0;
    std::uint32_t exited = 0;
    std::uint32_t remaining = 0;

    std::size_t steps() const { return entered_cum.size(); }
    std::size_t zone_column(std::string_view zone_id) const;
};

/// Density-dependent walking speed factor: linear fundamental diagram with a
/// floor so heavily crowded zones still drain.
constexpr double kDensityMax = 5.0;   // persons / m^2
constexpr double kSpeedFloor = 0.05;  // fraction of desired speed

double density_speed_factor(double occupants, double area_m2);

/// Runs the time-stepped crowd simulation.
///
/// Per step: in-zone agents walk at desired_speed x density factor; agents
/// that finished a zone (walk + sampled dwell) join the FIFO queue of the
/// next portal on the tour; each portal releases through a fractional
/// service-rate accumulator; grouped agents cross only when the whole group
/// is queued at the portal, and then cross together. Deterministic given
/// identical inputs and seed.
Trace run_abss(const FloorPlan& plan, const std::vector<AgentProfile>& agents,
               const std::vector<Group>& groups, double dt_s, double horizon_s,
               std::uint64_t seed);

/// Trace exports (stable column order; one crossing per row).
std::string trace_crossings_csv(const Trace& trace);
std::string trace_occupancy_csv(const Trace& trace);
std::string trace_to_json(const Trace& trace);

}  // namespace csense
