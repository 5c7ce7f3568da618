#include "tissf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tissf {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown key '" + path + it.key() + "'");
        }
    }
}

const json& require_key(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing key '" + path + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError("'" + where + "' must be a number");
    return v.get<double>();
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
    return as_number(require_key(obj, key, path), path + key);
}

double number_or(const json& obj, const std::string& key, const std::string& path,
                 double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return as_number(*it, path + key);
}

std::string string_at(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require_key(obj, key, path);
    if (!v.is_string()) throw ConfigError("'" + path + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError("'" + where + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& item : v) out.push_back(as_number(item, where));
    return out;
}

Vec vec_at(const json& v, const std::string& where) {
    auto nums = number_list(v, where);
    Vec out(static_cast<int>(nums.size()));
    for (size_t i = 0; i < nums.size(); ++i) out[static_cast<int>(i)] = nums[i];
    return out;
}

std::vector<int> int_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError("'" + where + "' must be an array of integers");
    std::vector<int> out;
    for (const auto& item : v) {
        if (!item.is_number_integer()) {
            throw ConfigError("'" + where + "' must contain integers");
        }
        out.push_back(item.get<int>());
    }
    return out;
}

EpsilonSchedule parse_schedule(const json& obj, const std::string& path) {
    check_keys(obj, {"type", "eps0", "lambda1", "lambda0"}, path);
    std::string type = string_at(obj, "type", path);
    double eps0 = number_at(obj, "eps0", path);
    try {
        if (type == "constant") {
            return EpsilonSchedule::constant(eps0);
        }
        if (type == "exponential") {
            return EpsilonSchedule::exponential(eps0, number_at(obj, "lambda1", path),
                                                number_at(obj, "lambda0", path));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    throw ConfigError("'" + path + "type' must be constant or exponential");
}

json schedule_to_json(const EpsilonSchedule& s) {
    json j;
    if (s.is_constant()) {
        j["type"] = "constant";
        j["eps0"] = s.eps0();
    } else {
        j["type"] = "exponential";
        j["eps0"] = s.eps0();
        j["lambda1"] = s.lambda1();
        j["lambda0"] = s.lambda0();
    }
    return j;
}

DisturbanceSignal parse_disturbance(const json& obj, const std::string& path) {
    std::string type = string_at(obj, "type", path);
    try {
        if (type == "zero") {
            check_keys(obj, {"type"}, path);
            return DisturbanceSignal::zero();
        }
        if (type == "sinusoid") {
            check_keys(obj, {"type", "amplitude", "omega", "phase"}, path);
            return DisturbanceSignal::sinusoid(number_at(obj, "amplitude", path),
                                               number_at(obj, "omega", path),
                                               number_or(obj, "phase", path, 0.0));
        }
        if (type == "constant_bias") {
            check_keys(obj, {"type", "bias"}, path);
            return DisturbanceSignal::constant_bias(number_at(obj, "bias", path));
        }
        if (type == "sampled_series") {
            check_keys(obj, {"type", "times", "values", "declared_bound"}, path);
            return DisturbanceSignal::sampled_series(
                number_list(require_key(obj, "times", path), path + "times"),
                number_list(require_key(obj, "values", path), path + "values"),
                number_at(obj, "declared_bound", path));
        }
        if (type == "state_drag") {
            check_keys(obj, {"type", "c0", "c1", "velocity_index", "declared_bound"}, path);
            const json& vi = require_key(obj, "velocity_index", path);
            if (!vi.is_number_integer()) {
                throw ConfigError("'" + path + "velocity_index' must be an integer");
            }
            return DisturbanceSignal::state_drag(number_at(obj, "c0", path),
                                                 number_at(obj, "c1", path), vi.get<int>(),
                                                 number_at(obj, "declared_bound", path));
        }
        if (type == "sum") {
            check_keys(obj, {"type", "terms"}, path);
            const json& terms = require_key(obj, "terms", path);
            if (!terms.is_array()) throw ConfigError("'" + path + "terms' must be an array");
            std::vector<DisturbanceSignal> parsed;
            int i = 0;
            for (const auto& term : terms) {
                parsed.push_back(
                    parse_disturbance(term, path + "terms[" + std::to_string(i) + "]."));
                ++i;
            }
            return DisturbanceSignal::sum(std::move(parsed));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const DisturbanceBoundError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    throw ConfigError("'" + path + "type' is not a known disturbance kind");
}

json disturbance_to_json(const DisturbanceSignal& d) {
    json j;
    switch (d.kind()) {
        case DisturbanceSignal::Kind::zero:
            j["type"] = "zero";
            break;
        case DisturbanceSignal::Kind::sinusoid:
            j["type"] = "sinusoid";
            j["amplitude"] = d.amplitude();
            j["omega"] = d.omega();
            j["phase"] = d.phase();
            break;
        case DisturbanceSignal::Kind::constant_bias:
            j["type"] = "constant_bias";
            j["bias"] = d.bias();
            break;
        case DisturbanceSignal::Kind::sampled_series:
            j["type"] = "sampled_series";
            j["times"] = d.series_times();
            j["values"] = d.series_values();
            j["declared_bound"] = d.declared_bound();
            break;
        case DisturbanceSignal::Kind::state_drag:
            j["type"] = "state_drag";
            j["c0"] = d.drag_c0();
            j["c1"] = d.drag_c1();
            j["velocity_index"] = d.velocity_index();
            j["declared_bound"] = d.declared_bound();
            break;
        case DisturbanceSignal::Kind::sum: {
            j["type"] = "sum";
            json terms = json::array();
            for (const auto& t : d.terms()) terms.push_back(disturbance_to_json(t));
            j["terms"] = terms;
            break;
        }
    }
    return j;
}

TruckParams parse_truck_params(const json& obj, const std::string& path) {
    TruckParams p;
    check_keys(obj,
               {"D_sf", "theta", "eta", "xi", "zeta", "omega", "k1", "k2", "kappa", "D_st",
                "v_bar", "u_min", "u_max", "aL_min", "aL_max"},
               path);
    p.D_sf = number_or(obj, "D_sf", path, p.D_sf);
    p.theta = number_or(obj, "theta", path, p.theta);
    p.eta = number_or(obj, "eta", path, p.eta);
    p.xi = number_or(obj, "xi", path, p.xi);
    p.zeta = number_or(obj, "zeta", path, p.zeta);
    p.omega = number_or(obj, "omega", path, p.omega);
    p.k1 = number_or(obj, "k1", path, p.k1);
    p.k2 = number_or(obj, "k2", path, p.k2);
    p.kappa = number_or(obj, "kappa", path, p.kappa);
    p.D_st = number_or(obj, "D_st", path, p.D_st);
    p.v_bar = number_or(obj, "v_bar", path, p.v_bar);
    p.u_min = number_or(obj, "u_min", path, p.u_min);
    p.u_max = number_or(obj, "u_max", path, p.u_max);
    p.aL_min = number_or(obj, "aL_min", path, p.aL_min);
    p.aL_max = number_or(obj, "aL_max", path, p.aL_max);
    return p;
}

json truck_params_to_json(const TruckParams& p) {
    json j;
    j["D_sf"] = p.D_sf;
    j["theta"] = p.theta;
    j["eta"] = p.eta;
    j["xi"] = p.xi;
    j["zeta"] = p.zeta;
    j["omega"] = p.omega;
    j["k1"] = p.k1;
    j["k2"] = p.k2;
    j["kappa"] = p.kappa;
    j["D_st"] = p.D_st;
    j["v_bar"] = p.v_bar;
    j["u_min"] = p.u_min;
    j["u_max"] = p.u_max;
    j["aL_min"] = p.aL_min;
    j["aL_max"] = p.aL_max;
    return j;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");

    check_keys(root,
               {"schema_version", "system", "filter", "disturbance", "lead_profile", "x0",
                "x0_grid", "dt", "horizon", "input_bounds", "tolerances", "certify", "sweep",
                "eval"},
               "");

    ScenarioConfig cfg;

    const json& ver = require_key(root, "schema_version", "");
    if (!ver.is_number_integer() || ver.get<int>() != 1) {
        throw ConfigError("'schema_version' must be the integer 1");
    }

    // system
    const json& sys = require_key(root, "system", "");
    check_keys(sys, {"type", "params"}, "system.");
    cfg.system_type = string_at(sys, "type", "system.");
    if (cfg.system_type == "truck_ccc") {
        if (sys.contains("params")) {
            cfg.truck = parse_truck_params(sys["params"], "system.params.");
        }
    } else if (cfg.system_type == "double_integrator") {
        if (sys.contains("params")) {
            throw ConfigError("'system.params' is only valid for truck_ccc");
        }
    } else {
        throw ConfigError("'system.type' must be double_integrator or truck_ccc");
    }

    // filter
    const json& flt = require_key(root, "filter", "");
    check_keys(flt, {"type", "eps0", "schedule", "alpha", "margin"}, "filter.");
    std::string ftype = string_at(flt, "type", "filter.");
    try {
        cfg.filter_kind = filter_kind_from_name(ftype);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("filter.type: ") + e.what());
    }
    cfg.alpha_gain = number_or(flt, "alpha", "filter.", 1.0);
    if (!(cfg.alpha_gain > 0.0)) throw ConfigError("'filter.alpha' must be positive");
    cfg.margin = number_or(flt, "margin", "filter.", 0.0);
    if (cfg.margin < 0.0) throw ConfigError("'filter.margin' must be nonnegative");
    switch (cfg.filter_kind) {
        case FilterKind::nominal:
        case FilterKind::cbf_qp:
            if (flt.contains("eps0") || flt.contains("schedule")) {
                throw ConfigError("'filter." +
                                  std::string(flt.contains("eps0") ? "eps0" : "schedule") +
                                  "' is not valid for " + ftype);
            }
            break;
        case FilterKind::issf_additive: {
            if (flt.contains("schedule")) {
                throw ConfigError("'filter.schedule' is not valid for issf_additive; use eps0");
            }
            double eps0 = number_at(flt, "eps0", "filter.");
            try {
                cfg.schedule = EpsilonSchedule::constant(eps0);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("filter.eps0: ") + e.what());
            }
            break;
        }
        case FilterKind::tissf_additive:
        case FilterKind::tissf_qp:
            if (flt.contains("eps0")) {
                throw ConfigError("'filter.eps0' is not valid for " + ftype +
                                  "; use filter.schedule");
            }
            cfg.schedule =
                parse_schedule(require_key(flt, "schedule", "filter."), "filter.schedule.");
            break;
    }

    if (root.contains("disturbance")) {
        cfg.disturbance = parse_disturbance(root["disturbance"], "disturbance.");
    }

    if (root.contains("lead_profile")) {
        const json& lead = root["lead_profile"];
        std::string ltype = string_at(lead, "type", "lead_profile.");
        if (ltype == "none") {
            check_keys(lead, {"type"}, "lead_profile.");
            cfg.lead.kind = LeadConfig::Kind::none;
        } else if (ltype == "synthetic") {
            check_keys(lead,
                       {"type", "v0", "a_min", "t_start", "jerk_limit", "sample_dt", "tail"},
                       "lead_profile.");
            cfg.lead.kind = LeadConfig::Kind::synthetic;
            cfg.lead.synth.v0 = number_or(lead, "v0", "lead_profile.", 15.0);
            cfg.lead.synth.a_min = number_or(lead, "a_min", "lead_profile.", -8.0);
            cfg.lead.synth.t_start = number_or(lead, "t_start", "lead_profile.", 1.0);
            if (lead.contains("jerk_limit") && !lead["jerk_limit"].is_null()) {
                cfg.lead.synth.jerk_limit = as_number(lead["jerk_limit"],
                                                      "lead_profile.jerk_limit");
            }
            cfg.lead.synth.sample_dt = number_or(lead, "sample_dt", "lead_profile.", 0.01);
            cfg.lead.synth.tail = number_or(lead, "tail", "lead_profile.", 5.0);
        } else if (ltype == "csv") {
            check_keys(lead, {"type", "path"}, "lead_profile.");
            cfg.lead.kind = LeadConfig::Kind::csv;
            cfg.lead.csv_path = string_at(lead, "path", "lead_profile.");
        } else {
            throw ConfigError("'lead_profile.type' must be none, synthetic or csv");
        }
    }

    if (root.contains("x0") && root.contains("x0_grid")) {
        throw ConfigError("'x0' and 'x0_grid' are mutually exclusive");
    }
    if (root.contains("x0")) cfg.x0 = vec_at(root["x0"], "x0");
    if (root.contains("x0_grid")) {
        const json& grid = root["x0_grid"];
        check_keys(grid, {"h_levels", "offsets"}, "x0_grid.");
        X0GridConfig g;
        g.h_levels = number_list(require_key(grid, "h_levels", "x0_grid."), "x0_grid.h_levels");
        g.offsets = number_list(require_key(grid, "offsets", "x0_grid."), "x0_grid.offsets");
        if (g.h_levels.empty() || g.offsets.empty()) {
            throw ConfigError("'x0_grid' lists must be nonempty");
        }
        cfg.x0_grid = g;
    }

    cfg.dt = number_or(root, "dt", "", 1e-3);
    if (!(cfg.dt > 0.0)) throw ConfigError("'dt' must be positive");
    cfg.horizon = number_or(root, "horizon", "", 20.0);
    if (!(cfg.horizon >= cfg.dt)) throw ConfigError("'horizon' must be at least dt");

    bool bounds_explicit = false;
    if (root.contains("input_bounds")) {
        const json& ib = root["input_bounds"];
        bounds_explicit = true;
        if (!ib.is_null()) {
            check_keys(ib, {"lower", "upper"}, "input_bounds.");
            InputBounds b;
            b.lower = vec_at(require_key(ib, "lower", "input_bounds."), "input_bounds.lower");
            b.upper = vec_at(require_key(ib, "upper", "input_bounds."), "input_bounds.upper");
            if (b.lower.size() != b.upper.size()) {
                throw ConfigError("'input_bounds' lower/upper sizes differ");
            }
            for (int i = 0; i < b.lower.size(); ++i) {
                if (b.lower[i] > b.upper[i]) {
                    throw ConfigError("'input_bounds' lower exceeds upper");
                }
            }
            cfg.input_bounds = b;
        }
    }
    if (!bounds_explicit && cfg.system_type == "truck_ccc") {
        TruckCcc truck{cfg.truck};
        cfg.input_bounds = truck.input_bounds();
    }

    if (root.contains("tolerances")) {
        const json& tols = root["tolerances"];
        check_keys(tols, {"tol", "fd_tol"}, "tolerances.");
        cfg.tol = number_or(tols, "tol", "tolerances.", 1e-3);
        cfg.fd_tol = number_or(tols, "fd_tol", "tolerances.", 1e-2);
        if (!(cfg.tol >= 0.0) || !(cfg.fd_tol >= 0.0)) {
            throw ConfigError("'tolerances' must be nonnegative");
        }
    }

    if (root.contains("certify")) {
        const json& c = root["certify"];
        check_keys(c,
                   {"lower", "upper", "resolution", "e_lower", "e_upper", "e_resolution",
                    "boundary_band"},
                   "certify.");
        GridSpec g;
        g.lower = vec_at(require_key(c, "lower", "certify."), "certify.lower");
        g.upper = vec_at(require_key(c, "upper", "certify."), "certify.upper");
        g.resolution = int_list(require_key(c, "resolution", "certify."), "certify.resolution");
        for (int r : g.resolution) {
            if (r < 2) throw ConfigError("'certify.resolution' entries must be >= 2");
        }
        if (c.contains("e_lower")) {
            g.e_lower = vec_at(c["e_lower"], "certify.e_lower");
            g.e_upper = vec_at(require_key(c, "e_upper", "certify."), "certify.e_upper");
            g.e_resolution =
                int_list(require_key(c, "e_resolution", "certify."), "certify.e_resolution");
            for (int r : g.e_resolution) {
                if (r < 2) throw ConfigError("'certify.e_resolution' entries must be >= 2");
            }
        }
        if (c.contains("boundary_band") && !c["boundary_band"].is_null()) {
            g.boundary_band = as_number(c["boundary_band"], "certify.boundary_band");
        }
        cfg.certify = g;
    }

    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        check_keys(s, {"eps0", "lambda1", "lambda0", "d_bound", "filters"}, "sweep.");
        cfg.sweep_given = true;
        if (s.contains("eps0")) cfg.sweep.eps0 = number_list(s["eps0"], "sweep.eps0");
        if (s.contains("lambda1")) cfg.sweep.lambda1 = number_list(s["lambda1"], "sweep.lambda1");
        if (s.contains("lambda0")) cfg.sweep.lambda0 = number_list(s["lambda0"], "sweep.lambda0");
        if (s.contains("d_bound")) cfg.sweep.d_bound = number_list(s["d_bound"], "sweep.d_bound");
        if (s.contains("filters")) {
            if (!s["filters"].is_array()) throw ConfigError("'sweep.filters' must be an array");
            for (const auto& f : s["filters"]) {
                if (!f.is_string()) throw ConfigError("'sweep.filters' must contain strings");
                try {
                    cfg.sweep.filters.push_back(filter_kind_from_name(f.get<std::string>()));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(std::string("sweep.filters: ") + e.what());
                }
            }
        }
    }

    if (root.contains("eval")) {
        const json& ev = root["eval"];
        check_keys(ev, {"x", "e"}, "eval.");
        cfg.eval_x = vec_at(require_key(ev, "x", "eval."), "eval.x");
        if (ev.contains("e")) cfg.eval_e = vec_at(ev["e"], "eval.e");
    }

    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    json root;
    root["schema_version"] = cfg.schema_version;

    json sys;
    sys["type"] = cfg.system_type;
    if (cfg.system_type == "truck_ccc") sys["params"] = truck_params_to_json(cfg.truck);
    root["system"] = sys;

    json flt;
    flt["type"] = filter_kind_name(cfg.filter_kind);
    flt["alpha"] = cfg.alpha_gain;
    flt["margin"] = cfg.margin;
    if (cfg.filter_kind == FilterKind::issf_additive) {
        flt["eps0"] = cfg.schedule.eps0();
    } else if (cfg.filter_kind == FilterKind::tissf_additive ||
               cfg.filter_kind == FilterKind::tissf_qp) {
        flt["schedule"] = schedule_to_json(cfg.schedule);
    }
    root["filter"] = flt;

    root["disturbance"] = disturbance_to_json(cfg.disturbance);

    json lead;
    switch (cfg.lead.kind) {
        case LeadConfig::Kind::none:
            lead["type"] = "none";
            break;
        case LeadConfig::Kind::synthetic:
            lead["type"] = "synthetic";
            lead["v0"] = cfg.lead.synth.v0;
            lead["a_min"] = cfg.lead.synth.a_min;
            lead["t_start"] = cfg.lead.synth.t_start;
            if (cfg.lead.synth.jerk_limit) lead["jerk_limit"] = *cfg.lead.synth.jerk_limit;
            lead["sample_dt"] = cfg.lead.synth.sample_dt;
            lead["tail"] = cfg.lead.synth.tail;
            break;
        case LeadConfig::Kind::csv:
            lead["type"] = "csv";
            lead["path"] = cfg.lead.csv_path;
            break;
    }
    root["lead_profile"] = lead;

    if (cfg.x0) {
        json arr = json::array();
        for (int i = 0; i < cfg.x0->size(); ++i) arr.push_back((*cfg.x0)[i]);
        root["x0"] = arr;
    }
    if (cfg.x0_grid) {
        json g;
        g["h_levels"] = cfg.x0_grid->h_levels;
        g["offsets"] = cfg.x0_grid->offsets;
        root["x0_grid"] = g;
    }

    root["dt"] = cfg.dt;
    root["horizon"] = cfg.horizon;

    if (cfg.input_bounds) {
        json ib;
        json lo = json::array(), hi = json::array();
        for (int i = 0; i < cfg.input_bounds->lower.size(); ++i) {
            lo.push_back(cfg.input_bounds->lower[i]);
            hi.push_back(cfg.input_bounds->upper[i]);
        }
        ib["lower"] = lo;
        ib["upper"] = hi;
        root["input_bounds"] = ib;
    } else {
        root["input_bounds"] = nullptr;
    }

    json tols;
    tols["tol"] = cfg.tol;
    tols["fd_tol"] = cfg.fd_tol;
    root["tolerances"] = tols;

    if (cfg.certify) {
        json c;
        json lo = json::array(), hi = json::array();
        for (int i = 0; i < cfg.certify->lower.size(); ++i) {
            lo.push_back(cfg.certify->lower[i]);
            hi.push_back(cfg.certify->upper[i]);
        }
        c["lower"] = lo;
        c["upper"] = hi;
        c["resolution"] = cfg.certify->resolution;
        if (cfg.certify->e_lower.size() > 0) {
            json elo = json::array(), ehi = json::array();
            for (int i = 0; i < cfg.certify->e_lower.size(); ++i) {
                elo.push_back(cfg.certify->e_lower[i]);
                ehi.push_back(cfg.certify->e_upper[i]);
            }
            c["e_lower"] = elo;
            c["e_upper"] = ehi;
            c["e_resolution"] = cfg.certify->e_resolution;
        }
        if (cfg.certify->boundary_band >= 0.0) c["boundary_band"] = cfg.certify->boundary_band;
        root["certify"] = c;
    }

    if (cfg.sweep_given) {
        json s;
        if (!cfg.sweep.eps0.empty()) s["eps0"] = cfg.sweep.eps0;
        if (!cfg.sweep.lambda1.empty()) s["lambda1"] = cfg.sweep.lambda1;
        if (!cfg.sweep.lambda0.empty()) s["lambda0"] = cfg.sweep.lambda0;
        if (!cfg.sweep.d_bound.empty()) s["d_bound"] = cfg.sweep.d_bound;
        if (!cfg.sweep.filters.empty()) {
            json arr = json::array();
            for (auto k : cfg.sweep.filters) arr.push_back(filter_kind_name(k));
            s["filters"] = arr;
        }
        root["sweep"] = s;
    }

    if (cfg.eval_x) {
        json ev;
        json arr = json::array();
        for (int i = 0; i < cfg.eval_x->size(); ++i) arr.push_back((*cfg.eval_x)[i]);
        ev["x"] = arr;
        if (cfg.eval_e) {
            json earr = json::array();
            for (int i = 0; i < cfg.eval_e->size(); ++i) earr.push_back((*cfg.eval_e)[i]);
            ev["e"] = earr;
        }
        root["eval"] = ev;
    }

    return root.dump(2) + "\n";
}

BuiltScenario build_scenario(const ScenarioConfig& cfg) {
    BuiltScenario built;
    built.system_type = cfg.system_type;
    built.alpha = ClassKappaFn::linear(cfg.alpha_gain);
    built.sched = cfg.schedule;
    built.d_inf = cfg.disturbance.declared_bound();
    built.tol = cfg.tol;
    built.fd_tol = cfg.fd_tol;

    Scenario& sc = built.scenario;
    std::function<Vec(const Vec&, const Vec&)> nominal;
    if (cfg.system_type == "double_integrator") {
        DoubleIntegrator di;
        sc.sys = di.system();
        sc.barrier = di.barrier();
        nominal = di.nominal();
    } else {
        TruckCcc truck{cfg.truck};
        sc.sys = truck.system();
        sc.barrier = truck.barrier();
        nominal = truck.nominal();
    }

    switch (cfg.filter_kind) {
        case FilterKind::nominal:
            sc.filter = FilterSpec::nominal_only(nominal);
            break;
        case FilterKind::issf_additive:
            sc.filter = FilterSpec::issf(nominal, cfg.schedule.eps0());
            break;
        case FilterKind::tissf_additive:
            sc.filter = FilterSpec::tissf(nominal, cfg.schedule);
            break;
        case FilterKind::tissf_qp:
            sc.filter = FilterSpec::tissf_qp(nominal, cfg.schedule, built.alpha, cfg.margin);
            break;
        case FilterKind::cbf_qp:
            sc.filter = FilterSpec::cbf_qp(nominal, built.alpha, cfg.margin);
            break;
    }
    sc.filter.alpha = built.alpha;

    sc.disturbance = cfg.disturbance;
    sc.dt = cfg.dt;
    sc.horizon = cfg.horizon;
    sc.input_bounds = cfg.input_bounds;

    switch (cfg.lead.kind) {
        case LeadConfig::Kind::none:
            break;
        case LeadConfig::Kind::synthetic:
            sc.lead = synth_emergency_brake(cfg.lead.synth.v0, cfg.lead.synth.a_min,
                                            cfg.lead.synth.t_start, cfg.lead.synth.jerk_limit,
                                            cfg.lead.synth.sample_dt, cfg.lead.synth.tail);
            break;
        case LeadConfig::Kind::csv:
            sc.lead = ingest_lead_csv(cfg.lead.csv_path);
            break;
    }

    if (cfg.x0) {
        if (cfg.x0->size() != sc.sys.n) {
            throw ConfigError("'x0' has dimension " + std::to_string(cfg.x0->size()) +
                              " but the system state has dimension " + std::to_string(sc.sys.n));
        }
        built.x0s.push_back(*cfg.x0);
    } else if (cfg.x0_grid) {
        if (cfg.system_type != "double_integrator") {
            throw ConfigError("'x0_grid' is only supported for the double integrator");
        }
        for (double level : cfg.x0_grid->h_levels) {
            for (double offset : cfg.x0_grid->offsets) {
                Vec x(2);
                x << level + offset, offset;
                built.x0s.push_back(x);
            }
        }
    } else {
        throw ConfigError("config needs 'x0' or 'x0_grid'");
    }
    sc.x0 = built.x0s.front();

    if (cfg.input_bounds && cfg.input_bounds->lower.size() != sc.sys.m) {
        throw ConfigError("'input_bounds' dimension does not match the input dimension");
    }

    return built;
}

}  // namespace tissf
