#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csense/engine.h"

namespace csense {

enum class DeviceType { Camera, Rfid, Counter, Qr };

std::string_view to_string(DeviceType t);
DeviceType device_type_from_string(std::string_view s);

/// Default sensing footprint along the walking direction, by device type.
double default_coverage_m(DeviceType t);

/// QR scans model a deliberate stop, so their dwell never drops below this.
constexpr double kQrMinDwellS = 2.0;

/// One device instance observing one portal.
struct DevicePlacement {
    std::string device_id;
    DeviceType type = DeviceType::Counter;
    std::string portal;
    double coverage_m = 0.0;  // 0 = use the type default
};

/// A window during which one agent is observable by one device:
/// starts at the portal crossing and lasts coverage / crossing speed.
struct SensingOpportunity {
    std::string device_id;
    AgentId agent = 0;
    double start_s = 0.0;
    double dwell_s = 0.0;
    std::size_t crossing_index = 0;  // back-reference into Trace::crossings
};

using SensingStreams = std::map<std::string, std::vector<SensingOpportunity>>;

/// Composes movement traces with device placements into per-device streams
/// of sensing opportunities (one per co-located device per crossing). Devices
/// at unvisited portals get empty streams. Pure function of its inputs;
/// throws ValidationError naming any placement whose portal does not exist.
SensingStreams compose(const Trace& trace, const std::vector<DevicePlacement>& placements,
                       const FloorPlan& plan);

std::string streams_to_json(const SensingStreams& streams);

}  // namespace csense
