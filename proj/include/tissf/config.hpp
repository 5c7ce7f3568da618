#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tissf/cert.hpp"
#include "tissf/core.hpp"
#include "tissf/filters.hpp"
#include "tissf/sim.hpp"
#include "tissf/systems.hpp"

namespace tissf {

struct ConfigError : Error {
    using Error::Error;
};

struct SynthLeadConfig {
    double v0 = 15.0;
    double a_min = -8.0;
    double t_start = 1.0;
    std::optional<double> jerk_limit;
    double sample_dt = 0.01;
    double tail = 5.0;
};

struct LeadConfig {
    enum class Kind { none, synthetic, csv };
    Kind kind = Kind::none;
    SynthLeadConfig synth;
    std::string csv_path;
};

/// Initial conditions placed on barrier level sets: for each level l and
/// offset o the double integrator starts at (l + o, o).
struct X0GridConfig {
    std::vector<double> h_levels;
    std::vector<double> offsets;
};

/// Schema-validated scenario description. Parsing rejects unknown keys and
/// re-serialization produces the normalized form of the same scenario.
struct ScenarioConfig {
    int schema_version = 1;
    std::string system_type;  // "double_integrator" | "truck_ccc"
    TruckParams truck;

    FilterKind filter_kind = FilterKind::nominal;
    EpsilonSchedule schedule = EpsilonSchedule::constant(1.0);
    double alpha_gain = 1.0;
    double margin = 0.0;

    DisturbanceSignal disturbance = DisturbanceSignal::zero();
    LeadConfig lead;

    std::optional<Vec> x0;
    std::optional<X0GridConfig> x0_grid;

    double dt = 1e-3;
    double horizon = 20.0;

    std::optional<InputBounds> input_bounds;  // resolved, including plant defaults
    double tol = 1e-3;
    double fd_tol = 1e-2;

    std::optional<GridSpec> certify;

    bool sweep_given = false;
    SweepGrid sweep;

    std::optional<Vec> eval_x;
    std::optional<Vec> eval_e;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

/// Runtime objects assembled from a config.
struct BuiltScenario {
    Scenario scenario;         // x0 left empty; use x0s
    std::vector<Vec> x0s;
    ClassKappaFn alpha = ClassKappaFn::linear(1.0);
    EpsilonSchedule sched = EpsilonSchedule::constant(1.0);
    double d_inf = 0.0;
    double tol = 1e-3;
    double fd_tol = 1e-2;
    std::string system_type;
};

BuiltScenario build_scenario(const ScenarioConfig& cfg);

}  // namespace tissf
