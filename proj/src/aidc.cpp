#include "csense/aidc.h"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace csense {

std::string_view to_string(DeviceType t) {
    switch (t) {
        case DeviceType::Camera: return "camera";
        case DeviceType::Rfid: return "rfid";
        case DeviceType::Counter: return "counter";
        case DeviceType::Qr: return "qr";
    }
    return "counter";
}

DeviceType device_type_from_string(std::string_view s) {
    if (s == "camera") return DeviceType::Camera;
    if (s == "rfid") return DeviceType::Rfid;
    if (s == "counter") return DeviceType::Counter;
    if (s == "qr") return DeviceType::Qr;
    throw ValidationError(Diagnostic{"device_type", "unknown device type '" + std::string(s) + "'"});
}

double default_coverage_m(DeviceType t) {
    switch (t) {
        case DeviceType::Camera: return 3.0;
        case DeviceType::Rfid: return 2.0;
        case DeviceType::Counter: return 0.3;
        case DeviceType::Qr: return 1.0;
    }
    return 1.0;
}

SensingStreams compose(const Trace& trace, const std::vector<DevicePlacement>& placements,
                       const FloorPlan& plan) {
    std::vector<Diagnostic> diags;
    for (const auto& p : placements) {
        if (!plan.has_portal(p.portal))
            diags.push_back({"placements." + p.device_id,
                             "unknown portal '" + p.portal + "'"});
        if (p.coverage_m < 0.0)
            diags.push_back({"placements." + p.device_id, "coverage must be >= 0"});
    }
    if (!diags.empty()) throw ValidationError(std::move(diags));

    SensingStreams streams;
    std::map<std::string, std::vector<const DevicePlacement*>> by_portal;
    for (const auto& p : placements) {
        streams[p.device_id];  // devices at unvisited portals keep empty streams
        by_portal[p.portal].push_back(&p);
    }

    for (std::size_t ci = 0; ci < trace.crossings.size(); ++ci) {
        const auto& c = trace.crossings[ci];
        const auto it = by_portal.find(c.portal);
        if (it == by_portal.end()) continue;
        for (const DevicePlacement* p : it->second) {
            const double coverage = p->coverage_m > 0.0 ? p->coverage_m : default_coverage_m(p->type);
            double dwell = coverage / c.speed_mps;
            if (p->type == DeviceType::Qr) dwell = std::max(dwell, kQrMinDwellS);
            streams[p->device_id].push_back({p->device_id, c.agent, c.time_s, dwell, ci});
        }
    }
    // Trace crossings are time-ordered, so each stream already is.
    return streams;
}

std::string streams_to_json(const SensingStreams& streams) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [device, opportunities] : streams) {
        auto arr = nlohmann::json::array();
        for (const auto& o : opportunities)
            arr.push_back({{"agent_id", o.agent},
                           {"start_s", o.start_s},
                           {"dwell_s", o.dwell_s},
                           {"crossing_index", o.crossing_index}});
        doc[device] = std::move(arr);
    }
    return doc.dump(2) + "\n";
}

}  // namespace csense
