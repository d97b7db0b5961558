#include "csense/engine.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace csense {

std::size_t Trace::zone_column(std::string_view zone_id) const {
    for (std::size_t i = 0; i < zone_ids.size(); ++i)
        if (zone_ids[i] == zone_id) return i;
    throw DomainError("zone '" + std::string(zone_id) + "' not in trace");
}

double density_speed_factor(double occupants, double area_m2) {
    const double density = occupants / area_m2;
    return std::max(kSpeedFloor, 1.0 - density / kDensityMax);
}

namespace {

enum class Phase : std::uint8_t { Pending, Walking, Dwelling, Queued, Exited };

struct AgentRuntime {
    Phase phase = Phase::Pending;
    std::uint32_t zone = 0;       // index into plan zones
    std::uint32_t route_pos = 0;  // index into the shared route
    double walk_remaining_m = 0.0;
    double dwell_remaining_s = 0.0;
    std::uint32_t queued_portal = 0;
    std::uint32_t join_step = 0;
};

struct PortalRuntime {
    std::deque<AgentId> queue;
    double credit = 0.0;
    double wait_sum_s = 0.0;
    double wait_max_s = 0.0;
    std::uint32_t released = 0;
};

constexpr double kCreditEps = 1e-9;

void validate_run_inputs(const std::vector<AgentProfile>& agents,
                         const std::vector<Group>& groups, double dt_s, double horizon_s) {
    std::vector<Diagnostic> diags;
    if (!(dt_s > 0.0) || dt_s > 2.0) diags.push_back({"dt", "dt must be in (0, 2] seconds"});
    if (!(horizon_s > 0.0)) diags.push_back({"horizon", "horizon must be > 0"});
    if (dt_s > 0.0) {
        const double steps = horizon_s / dt_s;
        if (std::abs(steps - std::llround(steps)) > 1e-9)
            diags.push_back({"horizon", "horizon must be a multiple of dt"});
    }
    for (const auto& a : agents) {
        if (a.desired_speed_mps < 0.3 || a.desired_speed_mps > 2.5)
            diags.push_back({"agents[" + std::to_string(a.id) + "]",
                             "desired_speed outside [0.3, 2.5] m/s"});
        if (a.arrival_time_s < 0.0 || a.arrival_time_s > horizon_s)
            diags.push_back(
                {"agents[" + std::to_string(a.id) + "]", "arrival_time outside horizon"});
    }
    for (const auto& g : groups)
        if (g.members.size() < 2)
            diags.push_back({"groups[" + std::to_string(g.id) + "]", "group size must be >= 2"});
    if (!diags.empty()) throw ValidationError(std::move(diags));
}

}  // namespace

Trace run_abss(const FloorPlan& plan, const std::vector<AgentProfile>& agents,
               const std::vector<Group>& groups, double dt_s, double horizon_s,
               std::uint64_t /*seed: reserved; the movement model is deterministic*/) {
    validate_run_inputs(agents, groups, dt_s, horizon_s);

    const auto route_ids = tour_route(plan, plan.entrances().front(), plan.exits().front());
    std::vector<std::uint32_t> route;  // zone indices along the shared tour
    route.reserve(route_ids.size());
    for (const auto& id : route_ids) route.push_back(static_cast<std::uint32_t>(plan.zone_index(id)));
    const std::uint32_t final_pos = static_cast<std::uint32_t>(route.size() - 1);

    const std::size_t n_zones = plan.zones().size();
    const std::size_t n_portals = plan.portals().size();
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(horizon_s / dt_s));

    // Candidate portals per route transition, in declaration order.
    std::vector<std::vector<std::uint32_t>> transition_portals(route.size());
    for (std::size_t pos = 0; pos + 1 < route.size(); ++pos) {
        for (std::size_t pi : plan.portals_from(plan.zones()[route[pos]].id))
            if (plan.portals()[pi].to_zone == plan.zones()[route[pos + 1]].id)
                transition_portals[pos].push_back(static_cast<std::uint32_t>(pi));
        if (transition_portals[pos].empty())
            throw ValidationError(Diagnostic{"plan", "tour transition without portal"});
    }

    std::vector<AgentRuntime> state(agents.size());
    std::vector<PortalRuntime> portals(n_portals);
    std::vector<std::uint32_t> zone_count(n_zones, 0);

    // Group bookkeeping: size, members, members currently queued, and the
    // portal the group committed to for its current transition.
    std::vector<std::uint32_t> group_of(agents.size(), UINT32_MAX);
    std::vector<std::vector<AgentId>> group_members(groups.size());
    std::vector<std::uint32_t> group_queued(groups.size(), 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> group_choice(
        groups.size(), {UINT32_MAX, UINT32_MAX});  // (route_pos, portal)
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        group_members[gi] = groups[gi].members;
        for (AgentId m : groups[gi].members) group_of.at(m) = static_cast<std::uint32_t>(gi);
    }

    // Arrival processing order: by arrival time, ties by id.
    std::vector<AgentId> by_arrival(agents.size());
    std::iota(by_arrival.begin(), by_arrival.end(), 0);
    std::stable_sort(by_arrival.begin(), by_arrival.end(), [&](AgentId a, AgentId b) {
        return agents[a].arrival_time_s < agents[b].arrival_time_s;
    });
    std::size_t next_arrival = 0;

    Trace trace;
    trace.dt_s = dt_s;
    trace.horizon_s = horizon_s;
    for (const auto& z : plan.zones()) trace.zone_ids.push_back(z.id);
    for (const auto& p : plan.portals()) trace.portal_ids.push_back(p.id);
    trace.occupancy.assign(n_zones, std::vector<std::uint32_t>(n_steps, 0));
    trace.entered_cum.resize(n_steps);
    trace.exited_cum.resize(n_steps);

    std::uint32_t entered = 0;
    std::uint32_t exited = 0;

    const auto dwell_of = [&](const AgentProfile& a, std::uint32_t zone_idx) {
        const auto it = a.zone_dwell_s.find(plan.zones()[zone_idx].id);
        return it == a.zone_dwell_s.end() ? 0.0 : it->second;
    };

    // Joins the queue of the portal for the agent's current transition.
    // Groups commit to one portal per transition (chosen by the first member
    // to arrive, by shortest queue); singles always take the shortest queue.
    const auto join_queue = [&](AgentId id, std::uint32_t step) {
        AgentRuntime& s = state[id];
        const auto& candidates = transition_portals[s.route_pos];
        std::uint32_t chosen = candidates.front();
        const std::uint32_t gi = group_of[id];
        if (gi != UINT32_MAX && group_choice[gi].first == s.route_pos) {
            chosen = group_choice[gi].second;
        } else {
            for (std::uint32_t c : candidates)
                if (portals[c].queue.size() < portals[chosen].queue.size()) chosen = c;
            if (gi != UINT32_MAX) group_choice[gi] = {s.route_pos, chosen};
        }
        portals[chosen].queue.push_back(id);
        s.phase = Phase::Queued;
        s.queued_portal = chosen;
        s.join_step = step;
        if (gi != UINT32_MAX) ++group_queued[gi];
    };

    std::vector<double> factor(n_zones, 1.0);

    for (std::size_t step = 0; step < n_steps; ++step) {
        const double now = static_cast<double>(step) * dt_s;

        // Arrivals enter the first tour zone.
        while (next_arrival < by_arrival.size() &&
               agents[by_arrival[next_arrival]].arrival_time_s <= now) {
            const AgentId id = by_arrival[next_arrival++];
            AgentRuntime& s = state[id];
            s.phase = Phase::Walking;
            s.zone = route.front();
            s.route_pos = 0;
            s.walk_remaining_m = plan.zones()[s.zone].length_m;
            ++zone_count[s.zone];
            ++entered;
        }

        // Density factors from the occupancy at the start of the step.
        for (std::size_t z = 0; z < n_zones; ++z)
            factor[z] = density_speed_factor(zone_count[z], plan.zones()[z].area_m2);

        // Movement. Agents are updated in id order; a finished walk rolls
        // into the dwell, and a finished dwell joins the next portal queue
        // within the same step.
        for (AgentId id = 0; id < state.size(); ++id) {
            AgentRuntime& s = state[id];
            if (s.phase == Phase::Walking) {
                s.walk_remaining_m -= agents[id].desired_speed_mps * factor[s.zone] * dt_s;
                if (s.walk_remaining_m <= 0.0) {
                    s.phase = Phase::Dwelling;
                    s.dwell_remaining_s = dwell_of(agents[id], s.zone);
                    if (s.dwell_remaining_s <= 0.0) join_queue(id, static_cast<std::uint32_t>(step));
                }
            } else if (s.phase == Phase::Dwelling) {
                s.dwell_remaining_s -= dt_s;
                if (s.dwell_remaining_s <= 0.0) join_queue(id, static_cast<std::uint32_t>(step));
            }
        }

        // Portal releases, in declaration order.
        for (std::size_t pi = 0; pi < n_portals; ++pi) {
            PortalRuntime& p = portals[pi];
            if (p.queue.empty()) {
                p.credit = 0.0;  // idle portals do not bank capacity
                continue;
            }
            const Portal& meta = plan.portals()[pi];
            const auto head_need = [&]() -> double {
                const std::uint32_t gi = group_of[p.queue.front()];
                return gi == UINT32_MAX ? 1.0 : static_cast<double>(group_members[gi].size());
            };
            p.credit = std::min(p.credit + meta.service_rate * dt_s,
                                std::max({1.0, meta.service_rate * dt_s, head_need()}));
            while (!p.queue.empty()) {
                const AgentId head = p.queue.front();
                const std::uint32_t gi = group_of[head];
                std::vector<AgentId> crossing;
                if (gi == UINT32_MAX) {
                    crossing.push_back(head);
                } else {
                    // Regroup rule: the group crosses as a unit, and only
                    // once every member is queued here.
                    if (group_queued[gi] < group_members[gi].size()) break;
                    crossing = group_members[gi];
                }
                if (p.credit + kCreditEps < static_cast<double>(crossing.size())) break;
                p.credit -= static_cast<double>(crossing.size());
                for (AgentId id : crossing) {
                    AgentRuntime& s = state[id];
                    std::erase(p.queue, id);
                    if (gi != UINT32_MAX) --group_queued[gi];
                    const double wait = (static_cast<double>(step) - s.join_step) * dt_s;
                    p.wait_sum_s += wait;
                    p.wait_max_s = std::max(p.wait_max_s, wait);
                    ++p.released;
                    trace.crossings.push_back(
                        {now, id, meta.id, agents[id].desired_speed_mps * factor[s.zone]});
                    --zone_count[s.zone];
                    ++s.route_pos;
                    if (s.route_pos == final_pos) {
                        s.phase = Phase::Exited;
                        ++exited;
                    } else {
                        s.zone = route[s.route_pos];
                        s.phase = Phase::Walking;
                        s.walk_remaining_m = plan.zones()[s.zone].length_m;
                        ++zone_count[s.zone];
                    }
                }
            }
        }

        for (std::size_t z = 0; z < n_zones; ++z) trace.occupancy[z][step] = zone_count[z];
        trace.entered_cum[step] = entered;
        trace.exited_cum[step] = exited;
    }

    trace.entered = entered;
    trace.exited = exited;
    trace.remaining = entered - exited;
    for (std::size_t pi = 0; pi < n_portals; ++pi) {
        const PortalRuntime& p = portals[pi];
        trace.wait_stats[plan.portals()[pi].id] = {
            p.released > 0 ? p.wait_sum_s / p.released : 0.0, p.wait_max_s, p.released};
    }
    return trace;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string trace_crossings_csv(const Trace& trace) {
    std::string out = "time_s,agent_id,portal_id,speed_mps\n";
    for (const auto& c : trace.crossings) {
        out += format_double(c.time_s);
        out += ',';
        out += std::to_string(c.agent);
        out += ',';
        out += c.portal;
        out += ',';
        out += format_double(c.speed_mps);
        out += '\n';
    }
    return out;
}

std::string trace_occupancy_csv(const Trace& trace) {
    std::string out = "time_s";
    for (const auto& id : trace.zone_ids) out += "," + id;
    out += '\n';
    for (std::size_t k = 0; k < trace.steps(); ++k) {
        out += format_double(static_cast<double>(k + 1) * trace.dt_s);
        for (const auto& col : trace.occupancy) out += "," + std::to_string(col[k]);
        out += '\n';
    }
    return out;
}

std::string trace_to_json(const Trace& trace) {
    nlohmann::json doc;
    doc["dt_s"] = trace.dt_s;
    doc["horizon_s"] = trace.horizon_s;
    doc["totals"] = {{"entered", trace.entered},
                     {"exited", trace.exited},
                     {"remaining", trace.remaining}};
    doc["crossings"] = nlohmann::json::array();
    for (const auto& c : trace.crossings)
        doc["crossings"].push_back({{"time_s", c.time_s},
                                    {"agent_id", c.agent},
                                    {"portal_id", c.portal},
                                    {"speed_mps", c.speed_mps}});
    doc["wait_stats"] = nlohmann::json::object();
    for (const auto& [portal, w] : trace.wait_stats)
        doc["wait_stats"][portal] = {
            {"mean_s", w.mean_s}, {"max_s", w.max_s}, {"released", w.released}};
    return doc.dump(2) + "\n";
}

}  // namespace csense
