#include "csense/iotsim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace csense {

using nlohmann::json;

EnergyModel default_energy_model() {
    EnergyModel em;
    em.devices[DeviceType::Camera] = {100e-6, 50e-6, 20};
    em.devices[DeviceType::Rfid] = {20e-6, 50e-6, 50};
    em.devices[DeviceType::Counter] = {5e-6, 50e-6, 1};
    em.devices[DeviceType::Qr] = {10e-6, 50e-6, 1};
    return em;
}

std::vector<ModeInterval> mode_timeline(std::span<const std::uint32_t> occupancy, double dt_s,
                                        double horizon_s, double theta, double hysteresis) {
    std::vector<ModeInterval> intervals;
    Mode mode = Mode::Normal;
    double begin = 0.0;
    for (std::size_t k = 0; k < occupancy.size(); ++k) {
        const double t = static_cast<double>(k + 1) * dt_s;
        if (t >= horizon_s) break;
        const double occ = occupancy[k];
        Mode next = mode;
        if (mode == Mode::Normal && occ > theta)
            next = Mode::Critical;
        else if (mode == Mode::Critical && occ < theta - hysteresis)
            next = Mode::Normal;
        if (next != mode) {
            intervals.push_back({begin, t, mode});
            begin = t;
            mode = next;
        }
    }
    intervals.push_back({begin, horizon_s, mode});
    return intervals;
}

namespace {

/// Smallest k >= 0 with sample_time(a, k, f) >= s. The initial estimate comes
/// from plain arithmetic; the adjustment loops step it to agreement with the
/// canonical expression so search and enumeration can never disagree.
long long first_sample_at_or_after(double a, double f, double s) {
    if (s <= a) return 0;
    long long k = static_cast<long long>(std::ceil((s - a) * f));
    if (k < 0) k = 0;
    while (k > 0 && sample_time(a, k - 1, f) >= s) --k;
    while (sample_time(a, k, f) < s) ++k;
    return k;
}

/// Number of samples in [a, b): the smallest n with sample_time(a, n, f) >= b.
long long samples_in_interval(double a, double b, double f) {
    if (b <= a) return 0;
    long long n = static_cast<long long>(std::floor((b - a) * f)) + 1;
    if (n < 1) n = 1;
    while (n > 0 && sample_time(a, n - 1, f) >= b) --n;
    while (sample_time(a, n, f) < b) ++n;
    return n;
}

struct FreqInterval {
    double begin_s;
    double end_s;
    double f_hz;
};

/// Mode timeline -> frequency timeline. Adjacent intervals with the same
/// frequency are merged so the sample grid's phase only resets when the
/// frequency actually changes; this is what makes results independent of
/// theta and hysteresis when f_critical == f_normal.
std::vector<FreqInterval> frequency_timeline(const std::vector<ModeInterval>& timeline,
                                             const ModeConfig& modes) {
    std::vector<FreqInterval> out;
    for (const auto& iv : timeline) {
        const double f = iv.mode == Mode::Critical ? modes.f_critical_hz : modes.f_normal_hz;
        if (!out.empty() && out.back().f_hz == f)
            out.back().end_s = iv.end_s;
        else
            out.push_back({iv.begin_s, iv.end_s, f});
    }
    return out;
}

}  // namespace

DeviceResult simulate_device(const std::vector<SensingOpportunity>& opportunities,
                             const std::vector<ModeInterval>& timeline, const ModeConfig& modes,
                             const DeviceEnergy& energy, std::vector<char>* captured) {
    DeviceResult result;
    if (captured) captured->assign(opportunities.size(), 0);

    const auto grid = frequency_timeline(timeline, modes);
    std::vector<long long> grid_samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid_samples[i] = samples_in_interval(grid[i].begin_s, grid[i].end_s, grid[i].f_hz);
        result.samples += static_cast<std::uint64_t>(grid_samples[i]);
    }
    for (const auto& iv : timeline)
        if (iv.mode == Mode::Critical) result.critical_s += iv.end_s - iv.begin_s;

    // Residual capture capacity per sample, keyed by (interval, k); samples
    // start full and only touched ones are stored.
    std::unordered_map<std::uint64_t, std::uint32_t> used;
    const auto sample_key = [](std::size_t interval, long long k) {
        return (static_cast<std::uint64_t>(interval) << 40) | static_cast<std::uint64_t>(k);
    };

    for (std::size_t oi = 0; oi < opportunities.size(); ++oi) {
        const double s = opportunities[oi].start_s;
        const double e = s + opportunities[oi].dwell_s;
        bool hit = false;
        for (std::size_t gi = 0; gi < grid.size() && !hit; ++gi) {
            const auto& iv = grid[gi];
            if (iv.end_s <= s || iv.begin_s > e) continue;
            for (long long k = first_sample_at_or_after(iv.begin_s, iv.f_hz, s);
                 k < grid_samples[gi] && sample_time(iv.begin_s, k, iv.f_hz) <= e; ++k) {
                auto& count = used[sample_key(gi, k)];
                if (count < energy.c_max) {
                    ++count;
                    hit = true;
                    break;
                }
            }
        }
        if (hit) {
            ++result.captures;
            if (captured) (*captured)[oi] = 1;
        }
    }

    result.packets = result.samples;
    result.energy_j = static_cast<double>(result.samples) * (energy.e_read_j + energy.e_tx_j);
    return result;
}

std::vector<Diagnostic> validate_model(const ArchitectureModel& model, const FloorPlan& plan) {
    std::vector<Diagnostic> diags;
    const std::string where = "model." + model.name;
    if (model.placements.empty()) diags.push_back({where, "placements must not be empty"});
    std::set<std::string> ids;
    bool entrance_covered = false;
    bool exit_covered = false;
    for (const auto& p : model.placements) {
        if (!ids.insert(p.device_id).second)
            diags.push_back({where, "duplicate device id '" + p.device_id + "'"});
        if (!plan.has_portal(p.portal)) {
            diags.push_back({where, "device '" + p.device_id + "' placed at unknown portal '" +
                                        p.portal + "'"});
            continue;
        }
        const Portal& portal = plan.portal(p.portal);
        entrance_covered |= plan.is_entrance_portal(portal);
        exit_covered |= plan.is_exit_portal(portal);
        if (p.coverage_m < 0.0)
            diags.push_back({where, "device '" + p.device_id + "' coverage must be >= 0"});
    }
    if (!model.placements.empty() && !entrance_covered)
        diags.push_back({where, "no device at an entrance portal"});
    if (!model.placements.empty() && !exit_covered)
        diags.push_back({where, "no device at an exit portal"});
    return diags;
}

std::vector<Diagnostic> validate_configuration(const Configuration& config) {
    std::vector<Diagnostic> diags;
    const std::string where = "configuration." + config.name;
    for (const auto& [type, mc] : config.modes) {
        const std::string mode_where = where + ".ModeConfig." + std::string(to_string(type));
        if (!(mc.f_normal_hz > 0.0)) diags.push_back({mode_where, "f_normal must be > 0"});
        if (mc.f_critical_hz < mc.f_normal_hz)
            diags.push_back({mode_where, "f_critical must be >= f_normal"});
    }
    if (!(config.theta > 0.0)) diags.push_back({where, "theta must be > 0"});
    if (config.hysteresis < 0.0 || config.hysteresis >= config.theta)
        diags.push_back({where, "hysteresis must satisfy 0 <= h < theta"});
    return diags;
}

std::vector<Diagnostic> validate_energy_model(const EnergyModel& energy) {
    std::vector<Diagnostic> diags;
    for (const auto& [type, e] : energy.devices) {
        const std::string where = "energy_model." + std::string(to_string(type));
        if (e.e_read_j < 0.0 || e.e_tx_j < 0.0)
            diags.push_back({where, "energies must be >= 0"});
        if (e.c_max < 1) diags.push_back({where, "c_max must be >= 1"});
    }
    return diags;
}

IoTResult simulate(const Trace& trace, const FloorPlan& plan, const ArchitectureModel& model,
                   const Configuration& config, const EnergyModel& energy, double window_s) {
    std::vector<Diagnostic> diags = validate_model(model, plan);
    for (auto& d : validate_configuration(config)) diags.push_back(std::move(d));
    for (auto& d : validate_energy_model(energy)) diags.push_back(std::move(d));
    for (const auto& p : model.placements) {
        if (!config.modes.contains(p.type))
            diags.push_back({"configuration." + config.name,
                             "no ModeConfig for device type '" +
                                 std::string(to_string(p.type)) + "'"});
        if (!energy.devices.contains(p.type))
            diags.push_back({"energy_model", "no entry for device type '" +
                                                 std::string(to_string(p.type)) + "'"});
    }
    if (!(window_s > 0.0)) diags.push_back({"window", "window must be > 0"});
    if (!diags.empty()) throw ValidationError(std::move(diags));

    const SensingStreams streams = compose(trace, model.placements, plan);

    IoTResult result;
    const std::size_t n_windows =
        static_cast<std::size_t>(std::ceil(trace.horizon_s / window_s));
    result.captures_per_window.assign(n_windows, 0);
    std::vector<char> movement_captured(trace.crossings.size(), 0);

    for (const auto& placement : model.placements) {
        const std::size_t upstream = trace.zone_column(plan.portal(placement.portal).from_zone);
        const auto timeline = mode_timeline(trace.occupancy[upstream], trace.dt_s,
                                            trace.horizon_s, config.theta, config.hysteresis);
        const auto& stream = streams.at(placement.device_id);
        std::vector<char> captured;
        DeviceResult dr = simulate_device(stream, timeline, config.modes.at(placement.type),
                                          energy.devices.at(placement.type), &captured);
        dr.device_id = placement.device_id;
        dr.type = placement.type;
        result.total_energy_j += dr.energy_j;
        for (std::size_t oi = 0; oi < stream.size(); ++oi)
            if (captured[oi]) movement_captured[stream[oi].crossing_index] = 1;
        result.devices.push_back(std::move(dr));
    }

    for (std::size_t ci = 0; ci < trace.crossings.size(); ++ci) {
        if (!movement_captured[ci]) continue;
        auto w = static_cast<std::size_t>(trace.crossings[ci].time_s / window_s);
        if (w >= n_windows) w = n_windows - 1;
        ++result.captures_per_window[w];
        ++result.movements_captured;
    }
    return result;
}

namespace {

DevicePlacement parse_placement(const json& jp) {
    DevicePlacement p;
    p.device_id = jp.value("device_id", std::string{});
    p.type = device_type_from_string(jp.value("type", std::string{}));
    p.portal = jp.value("portal", std::string{});
    p.coverage_m = jp.value("coverage_m", 0.0);
    return p;
}

json parse_or_throw(const std::string& document) {
    try {
        return json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::vector<ArchitectureModel> load_model_catalog(const std::string& document) {
    const json doc = parse_or_throw(document);
    if (!doc.is_object() || !doc.contains("models") || !doc["models"].is_array())
        throw ValidationError(Diagnostic{"models", "expected top-level 'models' array"});
    std::vector<ArchitectureModel> out;
    for (const auto& jm : doc["models"]) {
        ArchitectureModel m;
        m.name = jm.value("name", std::string{});
        if (m.name.empty()) throw ValidationError(Diagnostic{"models", "model without a name"});
        if (jm.contains("placements"))
            for (const auto& jp : jm["placements"]) m.placements.push_back(parse_placement(jp));
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Configuration> load_configuration_catalog(const std::string& document) {
    const json doc = parse_or_throw(document);
    if (!doc.is_object() || !doc.contains("configurations") || !doc["configurations"].is_array())
        throw ValidationError(
            Diagnostic{"configurations", "expected top-level 'configurations' array"});
    std::vector<Configuration> out;
    for (const auto& jc : doc["configurations"]) {
        Configuration c;
        c.name = jc.value("name", std::string{});
        if (c.name.empty())
            throw ValidationError(Diagnostic{"configurations", "configuration without a name"});
        if (jc.contains("modes") && jc["modes"].is_object()) {
            for (const auto& [type, jm] : jc["modes"].items())
                c.modes[device_type_from_string(type)] = {jm.value("f_normal_hz", 0.0),
                                                          jm.value("f_critical_hz", 0.0)};
        }
        c.theta = jc.value("theta", 40.0);
        c.hysteresis = jc.value("hysteresis", 10.0);
        out.push_back(std::move(c));
    }
    return out;
}

EnergyModel load_energy_model(const std::string& document) {
    const json doc = parse_or_throw(document);
    if (!doc.is_object() || !doc.contains("devices") || !doc["devices"].is_object())
        throw ValidationError(Diagnostic{"energy_model", "expected top-level 'devices' object"});
    EnergyModel em;
    for (const auto& [type, je] : doc["devices"].items()) {
        em.devices[device_type_from_string(type)] = {je.value("e_read_j", -1.0),
                                                     je.value("e_tx_j", -1.0),
                                                     je.value("c_max", std::uint32_t{0})};
    }
    if (auto diags = validate_energy_model(em); !diags.empty())
        throw ValidationError(std::move(diags));
    return em;
}

std::vector<ArchitectureModel> load_model_catalog_file(const std::filesystem::path& path) {
    return load_model_catalog(slurp(path));
}
std::vector<Configuration> load_configuration_catalog_file(const std::filesystem::path& path) {
    return load_configuration_catalog(slurp(path));
}
EnergyModel load_energy_model_file(const std::filesystem::path& path) {
    return load_energy_model(slurp(path));
}

std::string iot_result_to_json(const IoTResult& result) {
    json doc;
    doc["total_energy_j"] = result.total_energy_j;
    doc["movements_captured"] = result.movements_captured;
    doc["captures_per_window"] = result.captures_per_window;
    doc["devices"] = json::array();
    for (const auto& d : result.devices)
        doc["devices"].push_back({{"device_id", d.device_id},
                                  {"type", std::string(to_string(d.type))},
                                  {"samples", d.samples},
                                  {"packets", d.packets},
                                  {"captures", d.captures},
                                  {"energy_j", d.energy_j},
                                  {"critical_s", d.critical_s}});
    return doc.dump(2) + "\n";
}

}  // namespace csense
