#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "csense/aidc.h"

namespace csense {

/// Sampling/transmission frequencies for the two duty states. Critical is
/// the higher-frequency state triggered by high queuing.
struct ModeConfig {
    double f_normal_hz = 0.0;
    double f_critical_hz = 0.0;
};

/// Per-device-type operating parameters plus the occupancy thresholds that
/// drive the normal/critical mode switch.
struct Configuration {
    std::string name;
    std::map<DeviceType, ModeConfig> modes;
    double theta = 40.0;      // persons; critical when occupancy > theta
    double hysteresis = 10.0; // revert to normal only below theta - hysteresis
};

/// A named placement of device instances over the floor plan.
struct ArchitectureModel {
    std::string name;
    std::vector<DevicePlacement> placements;
};

struct DeviceEnergy {
    double e_read_j = 0.0;
    double e_tx_j = 0.0;
    std::uint32_t c_max = 1;  // captures a single sample can resolve
};

struct EnergyModel {
    std::map<DeviceType, DeviceEnergy> devices;
};

/// Shipped default energy/capacity calibration (config-overridable).
EnergyModel default_energy_model();

enum class Mode : std::uint8_t { Normal, Critical };

struct ModeInterval {
    double begin_s = 0.0;
    double end_s = 0.0;
    Mode mode = Mode::Normal;
};

/// Canonical sample time: the k-th sample of a grid that starts at the
/// interval begin `a` and runs at frequency `f`. Every piece of capture
/// logic (and the test oracle) evaluates this same expression, so grid
/// points are bit-identical everywhere.
inline double sample_time(double a, long long k, double f) {
    return a + static_cast<double>(k) / f;
}

/// Hysteresis automaton over one zone's occupancy series (one sample per
/// simulation step, sample k observed at (k+1)*dt). Starts normal; goes
/// critical when occupancy > theta, reverts when occupancy < theta - h.
/// The returned intervals partition [0, horizon].
std::vector<ModeInterval> mode_timeline(std::span<const std::uint32_t> occupancy, double dt_s,
                                        double horizon_s, double theta, double hysteresis);

struct DeviceResult {
    std::string device_id;
    DeviceType type = DeviceType::Counter;
    std::uint64_t samples = 0;
    std::uint64_t packets = 0;  // one per sample
    std::uint64_t captures = 0;
    double energy_j = 0.0;
    double critical_s = 0.0;
};

/// Simulates one device over its mode timeline.
///
/// Within each interval the device samples at interval_start + k/f with f
/// taken from the interval's mode; adjacent intervals with equal frequency
/// share one grid (so when f_critical == f_normal the thresholds have no
/// effect). An opportunity is captured iff some sample time falls inside
/// [start, start + dwell], each sample resolving at most c_max opportunities
/// and each opportunity captured at most once (earliest eligible sample,
/// opportunities served in stream order). Every sample emits one packet;
/// energy = samples * (e_read + e_tx).
///
/// `captured`, when given, receives one flag per opportunity.
DeviceResult simulate_device(const std::vector<SensingOpportunity>& opportunities,
                             const std::vector<ModeInterval>& timeline, const ModeConfig& modes,
                             const DeviceEnergy& energy, std::vector<char>* captured = nullptr);

/// Aggregated result of one IoT simulation run.
struct IoTResult {
    double total_energy_j = 0.0;
    std::vector<std::uint32_t> captures_per_window;  // distinct movements per window
    std::vector<DeviceResult> devices;
    std::uint64_t movements_captured = 0;
};

/// Full stage-three pipeline: composes the trace with the model's
/// placements, runs every device (mode driven by the occupancy of the
/// portal's upstream zone), and buckets distinct captured movements into
/// consecutive windows by crossing time. Deterministic.
IoTResult simulate(const Trace& trace, const FloorPlan& plan, const ArchitectureModel& model,
                   const Configuration& config, const EnergyModel& energy,
                   double window_s = 900.0);

std::vector<Diagnostic> validate_model(const ArchitectureModel& model, const FloorPlan& plan);
std::vector<Diagnostic> validate_configuration(const Configuration& config);
std::vector<Diagnostic> validate_energy_model(const EnergyModel& energy);

std::vector<ArchitectureModel> load_model_catalog(const std::string& document);
std::vector<ArchitectureModel> load_model_catalog_file(const std::filesystem::path& path);
std::vector<Configuration> load_configuration_catalog(const std::string& document);
std::vector<Configuration> load_configuration_catalog_file(const std::filesystem::path& path);
EnergyModel load_energy_model(const std::string& document);
EnergyModel load_energy_model_file(const std::filesystem::path& path);

std::string iot_result_to_json(const IoTResult& result);

}  // namespace csense
