#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csense/space.h"

namespace csense {

enum class AgeClass { Child, Adult, Senior };
enum class Gender { Female, Male };
enum class PhysicalCondition { Unimpaired, Impaired };

std::string_view to_string(AgeClass a);
std::string_view to_string(Gender g);
std::string_view to_string(PhysicalCondition c);

using AgentId = std::uint32_t;
using GroupId = std::uint32_t;

/// Free-flow walking speed in m/s for an age class and physical condition,
/// from the shipped calibration table (standard pedestrian free-flow speeds).
double desired_speed(AgeClass age, PhysicalCondition condition);

struct AgentProfile {
    AgentId id = 0;
    AgeClass age = AgeClass::Adult;
    Gender gender = Gender::Female;
    std::string origin;
    PhysicalCondition condition = PhysicalCondition::Unimpaired;
    double desired_speed_mps = 0.0;
    std::optional<GroupId> group_id;
    double arrival_time_s = 0.0;
    std::map<std::string, double> zone_dwell_s;  // zone id -> sampled dwell
};

/// Visitors bound by social attachment; they arrive together, share the
/// itinerary, and regroup at every portal before crossing.
struct Group {
    GroupId id = 0;
    std::vector<AgentId> members;  // size >= 2
};

/// One piece of the piecewise-constant arrival rate: `rate` persons/second
/// from `t_start` until the next piece (or the horizon).
struct RatePiece {
    double t_start_s = 0.0;
    double rate = 0.0;
};

struct DwellParams {
    double mean_s = 0.0;
    double cv = 0.0;  // coefficient of variation; 0 = deterministic
};

struct ScenarioSpec {
    std::string name;
    std::vector<std::pair<std::string, double>> age_dist;        // child/adult/senior
    std::vector<std::pair<std::string, double>> gender_dist;     // female/male
    std::vector<std::pair<std::string, double>> origin_dist;     // free-form labels
    std::vector<std::pair<std::string, double>> condition_dist;  // unimpaired/impaired
    std::vector<RatePiece> arrival_rate;
    std::array<double, 6> group_size_p{};  // P(size = 1..6)
    std::map<ZoneKind, DwellParams> dwell;
    double horizon_s = 0.0;
    std::uint64_t seed = 0;
};

struct Population {
    std::vector<AgentProfile> agents;
    std::vector<Group> groups;
};

/// Checks the scenario invariants (probability sums, non-negative rates,
/// positive horizon); empty result means valid.
std::vector<Diagnostic> validate_scenario(const ScenarioSpec& spec);

/// Synthesizes the agent population for one scenario on the given plan.
///
/// Arrival times follow a non-homogeneous Poisson process with rate lambda(t)
/// (thinning against the max rate). Demographics are i.i.d. draws. Agents are
/// partitioned into groups by the group-size distribution, and members of a
/// group share the first member's arrival time. Output is fully determined by
/// spec.seed. The plan supplies zone identities for itinerary dwell sampling.
Population sample_population(const ScenarioSpec& spec, const FloorPlan& plan);

ScenarioSpec load_scenario(const std::string& document);
ScenarioSpec load_scenario_file(const std::filesystem::path& path);

}  // namespace csense
