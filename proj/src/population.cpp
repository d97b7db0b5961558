#include "csense/population.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csense/rng.h"

namespace csense {

using nlohmann::json;

std::string_view to_string(AgeClass a) {
    switch (a) {
        case AgeClass::Child: return "child";
        case AgeClass::Adult: return "adult";
        case AgeClass::Senior: return "senior";
    }
    return "adult";
}

std::string_view to_string(Gender g) { return g == Gender::Female ? "female" : "male"; }

std::string_view to_string(PhysicalCondition c) {
    return c == PhysicalCondition::Unimpaired ? "unimpaired" : "impaired";
}

double desired_speed(AgeClass age, PhysicalCondition condition) {
    double base = 1.34;  // adult free-flow
    switch (age) {
        case AgeClass::Child: base = 0.9; break;
        case AgeClass::Adult: base = 1.34; break;
        case AgeClass::Senior: base = 1.0; break;
    }
    const double modifier = condition == PhysicalCondition::Impaired ? 0.6 : 1.0;
    return base * modifier;
}

namespace {

constexpr double kProbTolerance = 1e-9;

double dist_sum(const std::vector<std::pair<std::string, double>>& d) {
    double s = 0.0;
    for (const auto& [_, p] : d) s += p;
    return s;
}

void check_dist(const std::vector<std::pair<std::string, double>>& d, const char* name,
                std::vector<Diagnostic>& diags) {
    if (d.empty()) {
        diags.push_back({name, "distribution must not be empty"});
        return;
    }
    for (const auto& [label, p] : d)
        if (p < 0.0) diags.push_back({name, "negative probability for '" + label + "'"});
    if (std::abs(dist_sum(d) - 1.0) > kProbTolerance)
        diags.push_back({name, "probabilities must sum to 1"});
}

std::size_t draw(Rng& rng, const std::vector<std::pair<std::string, double>>& dist) {
    std::vector<double> probs;
    probs.reserve(dist.size());
    for (const auto& [_, p] : dist) probs.push_back(p);
    return rng.categorical(probs);
}

double rate_at(const std::vector<RatePiece>& pieces, double t) {
    double rate = 0.0;
    for (const auto& piece : pieces) {
        if (piece.t_start_s > t) break;
        rate = piece.rate;
    }
    return rate;
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const ScenarioSpec& spec) {
    std::vector<Diagnostic> diags;
    if (spec.name.empty()) diags.push_back({"name", "scenario name must not be empty"});
    check_dist(spec.age_dist, "age_dist", diags);
    check_dist(spec.gender_dist, "gender_dist", diags);
    check_dist(spec.origin_dist, "origin_dist", diags);
    check_dist(spec.condition_dist, "condition_dist", diags);
    if (spec.arrival_rate.empty())
        diags.push_back({"arrival_rate", "at least one rate piece required"});
    double prev = -1.0;
    for (std::size_t i = 0; i < spec.arrival_rate.size(); ++i) {
        const auto& piece = spec.arrival_rate[i];
        const std::string where = "arrival_rate[" + std::to_string(i) + "]";
        if (piece.rate < 0.0) diags.push_back({where, "rate must be >= 0"});
        if (piece.t_start_s < 0.0) diags.push_back({where, "t_start must be >= 0"});
        if (piece.t_start_s <= prev && i > 0) diags.push_back({where, "t_start not increasing"});
        prev = piece.t_start_s;
    }
    double gsum = 0.0;
    for (double p : spec.group_size_p) {
        if (p < 0.0) diags.push_back({"group_size_p", "negative probability"});
        gsum += p;
    }
    if (std::abs(gsum - 1.0) > kProbTolerance)
        diags.push_back({"group_size_p", "probabilities must sum to 1"});
    for (const auto& [kind, params] : spec.dwell) {
        if (params.mean_s < 0.0 || params.cv < 0.0)
            diags.push_back({"dwell." + std::string(to_string(kind)), "parameters must be >= 0"});
    }
    if (!(spec.horizon_s > 0.0)) diags.push_back({"horizon_s", "horizon must be > 0"});
    return diags;
}

Population sample_population(const ScenarioSpec& spec, const FloorPlan& plan) {
    if (auto diags = validate_scenario(spec); !diags.empty())
        throw ValidationError(std::move(diags));

    const Rng root(spec.seed);
    Population out;

    // Arrival times: thinning against the maximum rate.
    double lambda_max = 0.0;
    for (const auto& piece : spec.arrival_rate) lambda_max = std::max(lambda_max, piece.rate);
    std::vector<double> arrivals;
    if (lambda_max > 0.0) {
        Rng rng = root.substream("arrivals");
        double t = rng.exponential(lambda_max);
        while (t < spec.horizon_s) {
            if (rng.next_double() * lambda_max < rate_at(spec.arrival_rate, t))
                arrivals.push_back(t);
            t += rng.exponential(lambda_max);
        }
    }

    const auto route = tour_route(plan, plan.entrances().front(), plan.exits().front());

    Rng demo = root.substream("demographics");
    Rng dwell = root.substream("dwell");
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        AgentProfile agent;
        agent.id = static_cast<AgentId>(i);
        agent.arrival_time_s = arrivals[i];
        agent.age = static_cast<AgeClass>(draw(demo, spec.age_dist));
        agent.gender = static_cast<Gender>(draw(demo, spec.gender_dist));
        agent.origin = spec.origin_dist[draw(demo, spec.origin_dist)].first;
        agent.condition = static_cast<PhysicalCondition>(draw(demo, spec.condition_dist));
        agent.desired_speed_mps = desired_speed(agent.age, agent.condition);
        for (const auto& zone_id : route) {
            const auto it = spec.dwell.find(plan.zone(zone_id).kind);
            if (it == spec.dwell.end()) continue;
            const double d = dwell.lognormal_mean_cv(it->second.mean_s, it->second.cv);
            if (d > 0.0) agent.zone_dwell_s[zone_id] = d;
        }
        out.agents.push_back(std::move(agent));
    }

    // Partition the arrival sequence into groups; members adopt the first
    // member's arrival time so the group enters together.
    Rng grp = root.substream("groups");
    GroupId next_group = 0;
    std::size_t i = 0;
    while (i < out.agents.size()) {
        std::size_t size = grp.categorical(spec.group_size_p) + 1;
        size = std::min(size, out.agents.size() - i);
        if (size >= 2) {
            Group g;
            g.id = next_group++;
            for (std::size_t m = i; m < i + size; ++m) {
                out.agents[m].group_id = g.id;
                out.agents[m].arrival_time_s = out.agents[i].arrival_time_s;
                g.members.push_back(out.agents[m].id);
            }
            out.groups.push_back(std::move(g));
        }
        i += size;
    }
    return out;
}

namespace {

std::vector<std::pair<std::string, double>> parse_dist(const json& obj, const char* key,
                                                       std::vector<Diagnostic>& diags) {
    std::vector<std::pair<std::string, double>> out;
    if (!obj.contains(key) || !obj[key].is_object()) {
        diags.push_back({key, "missing distribution object"});
        return out;
    }
    for (const auto& [label, p] : obj[key].items()) {
        if (!p.is_number()) {
            diags.push_back({key, "non-numeric probability for '" + label + "'"});
            continue;
        }
        out.emplace_back(label, p.get<double>());
    }
    return out;
}

/// Reorders a parsed distribution to a fixed label order so that enum
/// casting by index is well defined.
std::vector<std::pair<std::string, double>> ordered(
    std::vector<std::pair<std::string, double>> dist, const std::vector<std::string>& order,
    const char* key, std::vector<Diagnostic>& diags) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& label : order) {
        const auto it = std::find_if(dist.begin(), dist.end(),
                                     [&](const auto& kv) { return kv.first == label; });
        if (it == dist.end()) {
            diags.push_back({key, "missing category '" + label + "'"});
            out.emplace_back(label, 0.0);
        } else {
            out.push_back(*it);
            dist.erase(it);
        }
    }
    for (const auto& kv : dist)
        diags.push_back({key, "unknown category '" + kv.first + "'"});
    return out;
}

}  // namespace

ScenarioSpec load_scenario(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    std::vector<Diagnostic> diags;
    ScenarioSpec spec;
    if (!doc.is_object()) throw ValidationError(Diagnostic{"scenario", "top level must be an object"});
    spec.name = doc.value("name", std::string{});
    spec.age_dist = ordered(parse_dist(doc, "age_dist", diags), {"child", "adult", "senior"},
                            "age_dist", diags);
    spec.gender_dist =
        ordered(parse_dist(doc, "gender_dist", diags), {"female", "male"}, "gender_dist", diags);
    spec.origin_dist = parse_dist(doc, "origin_dist", diags);
    spec.condition_dist = ordered(parse_dist(doc, "condition_dist", diags),
                                  {"unimpaired", "impaired"}, "condition_dist", diags);
    if (doc.contains("arrival_rate") && doc["arrival_rate"].is_array()) {
        for (const auto& jp : doc["arrival_rate"])
            spec.arrival_rate.push_back(
                {jp.value("t_start_s", 0.0), jp.value("rate", -1.0)});
    } else {
        diags.push_back({"arrival_rate", "missing array"});
    }
    if (doc.contains("group_size_p") && doc["group_size_p"].is_array() &&
        doc["group_size_p"].size() == spec.group_size_p.size()) {
        for (std::size_t i = 0; i < spec.group_size_p.size(); ++i)
            spec.group_size_p[i] = doc["group_size_p"][i].get<double>();
    } else {
        diags.push_back({"group_size_p", "expected array of 6 probabilities (sizes 1..6)"});
    }
    if (doc.contains("dwell") && doc["dwell"].is_object()) {
        for (const auto& [kind, params] : doc["dwell"].items()) {
            try {
                spec.dwell[zone_kind_from_string(kind)] = {params.value("mean_s", -1.0),
                                                           params.value("cv", 0.0)};
            } catch (const ValidationError&) {
                diags.push_back({"dwell", "unknown zone kind '" + kind + "'"});
            }
        }
    }
    spec.horizon_s = doc.value("horizon_s", 0.0);
    spec.seed = doc.value("seed", std::uint64_t{0});
    if (!diags.empty()) throw ValidationError(std::move(diags));
    if (auto sem = validate_scenario(spec); !sem.empty()) throw ValidationError(std::move(sem));
    return spec;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

}  // namespace csense
