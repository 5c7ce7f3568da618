// tissf — safety-filter synthesis, certification and simulation front end.
//
// Exit codes: 0 success, 1 audit/certification failure, 2 config error,
// 3 runtime error (infeasible filter, divergence, bad input files).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "tissf/cert.hpp"
#include "tissf/config.hpp"
#include "tissf/sim.hpp"
#include "tissf/svg.hpp"

namespace fs = std::filesystem;
using namespace tissf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    bool want_svg = false;
    int workers = 0;
    unsigned seed = 0;  // reserved for randomized profiles
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << body;
}

std::vector<double> column_t(const Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.rows.size());
    for (const auto& r : traj.rows) out.push_back(r.t);
    return out;
}

std::vector<double> column(const Trajectory& traj, double (*get)(const TrajectoryRow&)) {
    std::vector<double> out;
    out.reserve(traj.rows.size());
    for (const auto& r : traj.rows) out.push_back(get(r));
    return out;
}

svg::Series zero_line(double t0, double t1) {
    svg::Series s;
    s.x = {t0, t1};
    s.y = {0.0, 0.0};
    s.color = "#888";
    s.dashed = true;
    s.width = 1.0;
    return s;
}

std::string render_phase_plot(const BuiltScenario& built,
                              const std::vector<Trajectory>& trajs) {
    // Four panels: phase plane with set boundaries, then h, u and d over time.
    std::vector<svg::Panel> panels(4);

    svg::Panel& phase = panels[0];
    phase.title = "phase plane";
    phase.xlabel = "x1";
    phase.ylabel = "x2";
    double lo = -3.0, hi = 3.0;
    for (const auto& traj : trajs) {
        for (const auto& r : traj.rows) {
            lo = std::min({lo, r.x[0], r.x[1]});
            hi = std::max({hi, r.x[0], r.x[1]});
        }
    }
    {
        svg::Series c;
        c.x = {lo, hi};
        c.y = {lo, hi};  // x1 - x2 = 0
        c.color = "#2e8b57";
        c.width = 1.8;
        c.label = "safe-set boundary";
        phase.series.push_back(c);
    }
    if (built.scenario.filter.has_robustness() && built.d_inf > 0.0) {
        double hstar = expanded_boundary_level(built.alpha, built.sched, built.d_inf);
        svg::Series cd;
        cd.x = {lo, hi};
        cd.y = {lo - hstar, hi - hstar};  // x1 - x2 = hstar
        cd.color = "#c0392b";
        cd.width = 1.8;
        cd.label = "expanded boundary";
        phase.series.push_back(cd);
    }
    for (const auto& traj : trajs) {
        svg::Series s;
        s.x = column(traj, [](const TrajectoryRow& r) { return r.x[0]; });
        s.y = column(traj, [](const TrajectoryRow& r) { return r.x[1]; });
        phase.series.push_back(s);
    }

    panels[1].title = "barrier value";
    panels[1].xlabel = "t [s]";
    panels[1].ylabel = "h, h_dT";
    panels[2].title = "input";
    panels[2].xlabel = "t [s]";
    panels[2].ylabel = "u [m/s^2]";
    panels[3].title = "disturbance";
    panels[3].xlabel = "t [s]";
    panels[3].ylabel = "d";
    for (const auto& traj : trajs) {
        auto t = column_t(traj);
        svg::Series sh;
        sh.x = t;
        sh.y = column(traj, [](const TrajectoryRow& r) { return r.h; });
        panels[1].series.push_back(sh);
        svg::Series shd;
        shd.x = t;
        shd.y = column(traj, [](const TrajectoryRow& r) { return r.h_dT; });
        shd.color = "#c0392b";
        shd.width = 0.9;
        panels[1].series.push_back(shd);

        svg::Series su;
        su.x = t;
        su.y = column(traj, [](const TrajectoryRow& r) { return r.u_applied[0]; });
        panels[2].series.push_back(su);

        svg::Series sd;
        sd.x = t;
        sd.y = column(traj, [](const TrajectoryRow& r) {
            return r.d.size() > 0 ? r.d[0] : 0.0;
        });
        panels[3].series.push_back(sd);
    }
    if (!trajs.empty()) {
        double t1 = trajs.front().rows.back().t;
        panels[1].series.push_back(zero_line(0.0, t1));
    }
    return svg::render(panels, 2);
}

std::string render_truck_plot(const std::vector<Trajectory>& trajs) {
    // Four rows: headway, speeds, barrier value, input.
    std::vector<svg::Panel> panels(4);
    panels[0].title = "headway distance";
    panels[0].xlabel = "t [s]";
    panels[0].ylabel = "D [m]";
    panels[1].title = "speeds";
    panels[1].xlabel = "t [s]";
    panels[1].ylabel = "v, v_L [m/s]";
    panels[2].title = "barrier value";
    panels[2].xlabel = "t [s]";
    panels[2].ylabel = "h, h_dT [m]";
    panels[3].title = "input";
    panels[3].xlabel = "t [s]";
    panels[3].ylabel = "u [m/s^2]";

    for (const auto& traj : trajs) {
        auto t = column_t(traj);
        svg::Series sD;
        sD.x = t;
        sD.y = column(traj, [](const TrajectoryRow& r) { return r.x[0]; });
        sD.label = "D";
        panels[0].series.push_back(sD);

        svg::Series sv;
        sv.x = t;
        sv.y = column(traj, [](const TrajectoryRow& r) { return r.x[1]; });
        sv.label = "v";
        panels[1].series.push_back(sv);
        svg::Series svl;
        svl.x = t;
        svl.y = column(traj, [](const TrajectoryRow& r) { return r.x[2]; });
        svl.color = "#444";
        svl.label = "v_L";
        panels[1].series.push_back(svl);

        svg::Series sh;
        sh.x = t;
        sh.y = column(traj, [](const TrajectoryRow& r) { return r.h; });
        sh.label = "h";
        panels[2].series.push_back(sh);
        svg::Series shd;
        shd.x = t;
        shd.y = column(traj, [](const TrajectoryRow& r) { return r.h_dT; });
        shd.color = "#c0392b";
        shd.width = 0.9;
        shd.label = "h_dT";
        panels[2].series.push_back(shd);

        svg::Series snom;
        snom.x = t;
        snom.y = column(traj, [](const TrajectoryRow& r) { return r.u_nominal[0]; });
        snom.color = "#999";
        snom.label = "nominal";
        panels[3].series.push_back(snom);
        svg::Series su;
        su.x = t;
        su.y = column(traj, [](const TrajectoryRow& r) { return r.u_applied[0]; });
        su.label = "applied";
        panels[3].series.push_back(su);
    }
    if (!trajs.empty()) {
        double t1 = trajs.front().rows.back().t;
        panels[2].series.push_back(zero_line(0.0, t1));
    }
    return svg::render(panels, 1);
}

int cmd_simulate(const CommonArgs& args) {
    ScenarioConfig cfg = load_config(args.config_path);
    BuiltScenario built = build_scenario(cfg);
    fs::create_directories(args.out_dir);

    std::vector<Trajectory> trajs;
    bool all_ok = true;
    for (size_t i = 0; i < built.x0s.size(); ++i) {
        Scenario sc = built.scenario;
        sc.x0 = built.x0s[i];
        Trajectory traj = integrate(sc);
        AuditReport audit = audit_trajectory(traj, sc.barrier, built.alpha, built.sched,
                                             built.d_inf, built.tol, built.fd_tol);
        traj.write_csv((fs::path(args.out_dir) / ("trajectory_" + std::to_string(i) + ".csv"))
                           .string());
        write_text(fs::path(args.out_dir) / ("audit_" + std::to_string(i) + ".txt"),
                   audit.to_kv());

        bool ok = !sc.filter.has_robustness() || audit.invariance_ok;
        all_ok = all_ok && ok;
        std::cout << "ic=" << i << " min_h=" << fmt(audit.min_h)
                  << " min_h_dT=" << fmt(audit.min_h_dT)
                  << " min_diff_bound_slack=" << fmt(audit.min_diff_bound_slack)
                  << " saturation_count=" << audit.saturation_count
                  << " invariance_ok=" << (audit.invariance_ok ? 1 : 0) << "\n";
        trajs.push_back(std::move(traj));
    }

    if (args.want_svg) {
        std::string body = built.system_type == "truck_ccc" ? render_truck_plot(trajs)
                                                            : render_phase_plot(built, trajs);
        write_text(fs::path(args.out_dir) / "plot.svg", body);
    }

    std::cout << "result=" << (all_ok ? "PASS" : "FAIL") << "\n";
    return all_ok ? kExitOk : kExitCheckFailed;
}

int cmd_certify(const CommonArgs& args) {
    ScenarioConfig cfg = load_config(args.config_path);
    if (!cfg.certify) throw ConfigError("certify command needs a 'certify' section");
    BuiltScenario built = build_scenario(cfg);

    CertificationReport rep =
        certify_grid(built.scenario.sys, built.scenario.barrier, built.alpha, built.sched,
                     built.scenario.filter, *cfg.certify, built.d_inf, args.workers);

    fs::create_directories(args.out_dir);
    write_text(fs::path(args.out_dir) / "certification.txt", rep.to_kv());
    std::cout << rep.to_kv();
    return rep.certified ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const CommonArgs& args) {
    ScenarioConfig cfg = load_config(args.config_path);
    if (!cfg.sweep_given) throw ConfigError("sweep command needs a 'sweep' section");
    BuiltScenario built = build_scenario(cfg);
    Scenario base = built.scenario;
    base.x0 = built.x0s.front();

    std::vector<SweepRow> rows = batch_sweep(base, cfg.sweep, args.workers);
    std::string csv = sweep_to_csv(rows);
    fs::create_directories(args.out_dir);
    write_text(fs::path(args.out_dir) / "sweep.csv", csv);
    std::cout << csv;
    return kExitOk;
}

int cmd_filter_eval(const CommonArgs& args) {
    ScenarioConfig cfg = load_config(args.config_path);
    if (!cfg.eval_x) throw ConfigError("filter-eval command needs an 'eval' section");
    BuiltScenario built = build_scenario(cfg);
    const Scenario& sc = built.scenario;

    Vec x = *cfg.eval_x;
    if (x.size() != sc.sys.n) throw ConfigError("'eval.x' dimension mismatch");
    Vec e = cfg.eval_e ? *cfg.eval_e : Vec::Zero(sc.sys.p);
    if (e.size() != sc.sys.p) throw ConfigError("'eval.e' dimension mismatch");

    auto ld = lie_derivatives(sc.sys, sc.barrier, x, e);
    double h = sc.barrier.value(x);
    FilterOutput fo = apply_filter(sc.filter, sc.sys, sc.barrier, x, e);
    Vec u_applied = fo.u;
    bool saturated = false;
    if (sc.input_bounds) {
        auto sr = saturate(fo.u, sc.input_bounds->lower, sc.input_bounds->upper);
        u_applied = sr.u;
        saturated = sr.saturated;
    }

    std::cout << "h=" << fmt(h) << "\n";
    std::cout << "Lf_h=" << fmt(ld.Lf_h) << "\n";
    std::cout << "Lg_h=" << fmt(ld.Lg_h[0]);
    for (int i = 1; i < ld.Lg_h.size(); ++i) std::cout << "," << fmt(ld.Lg_h[i]);
    std::cout << "\n";
    std::cout << "eps=" << fmt(built.sched.eval(h)) << "\n";
    std::cout << "gamma_T=" << fmt(gamma_tissf(built.alpha, built.sched, h, built.d_inf))
              << "\n";
    std::cout << "u_nominal=" << fmt(fo.u_nominal[0]) << "\n";
    std::cout << "u_prefilter_saturation=" << fmt(fo.u[0]) << "\n";
    std::cout << "u_filtered=" << fmt(u_applied[0]) << "\n";
    std::cout << "saturated=" << (saturated ? 1 : 0) << "\n";
    std::cout << "intervention=" << fmt((fo.u - fo.u_nominal).norm()) << "\n";
    std::cout << "cbf_slack=" << fmt(cbf_condition_slack(sc.sys, sc.barrier, built.alpha, x, e,
                                                         u_applied))
              << "\n";
    std::cout << "tissf_slack=" << fmt(tissf_condition_slack(sc.sys, sc.barrier, built.alpha,
                                                             built.sched, x, e, u_applied))
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safety-filter synthesis, certification and simulation toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* cmd, bool svg_flag) {
        cmd->add_option("--config", args.config_path, "scenario config (JSON)")->required();
        cmd->add_option("--out", args.out_dir, "output directory (default: out)");
        cmd->add_option("--workers", args.workers, "worker threads (default: cores)");
        cmd->add_option("--seed", args.seed, "seed for randomized profiles (reserved)");
        if (svg_flag) cmd->add_flag("--svg", args.want_svg, "emit a static SVG plot");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "integrate and audit a scenario");
    add_common(simulate, true);
    CLI::App* certify = app.add_subcommand("certify", "grid-certify the filter conditions");
    add_common(certify, false);
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep, false);
    CLI::App* filter_eval =
        app.add_subcommand("filter-eval", "evaluate the filter at one state");
    add_common(filter_eval, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (certify->parsed()) return cmd_certify(args);
        if (sweep->parsed()) return cmd_sweep(args);
        if (filter_eval->parsed()) return cmd_filter_eval(args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const IntegrationError& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitConfigError;
}
