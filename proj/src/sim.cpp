#include "tissf/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

namespace tissf {

namespace {

constexpr double kDivergenceGuard = 1e6;

Vec exo_at(const SystemModel& sys, const std::optional<LeadProfile>& lead, double t) {
    Vec e = Vec::Zero(sys.p);
    if (lead && sys.p > 0) e[0] = lead->a_at(t);
    return e;
}

Vec disturbance_vec(const SystemModel& sys, const DisturbanceSignal& dist, double t,
                    const Vec& x) {
    if (dist.kind() == DisturbanceSignal::Kind::zero) return Vec::Zero(sys.m);
    if (sys.m != 1) {
        throw DimensionError("scalar disturbance signals require a single-input system");
    }
    Vec d(1);
    d[0] = dist.sample(t, x);
    return d;
}

}  // namespace

Trajectory integrate(const SystemModel& sys, const Barrier& b, const FilterSpec& filter,
                     const DisturbanceSignal& disturbance,
                     const std::optional<LeadProfile>& lead, const Vec& x0, double dt, double T,
                     const std::optional<InputBounds>& input_bounds) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(T >= dt)) throw std::invalid_argument("horizon must be at least one step");
    if (x0.size() != sys.n) throw DimensionError("x0 dimension mismatch");
    require_finite(x0, "x0");

    const long steps = std::lround(T / dt);
    const double d_inf = disturbance.declared_bound();

    Trajectory traj;
    traj.dt = dt;
    traj.rows.reserve(static_cast<size_t>(steps) + 1);

    auto fill_row = [&](double t, const Vec& x) -> TrajectoryRow {
        TrajectoryRow row;
        row.t = t;
        row.x = x;
        row.e = exo_at(sys, lead, t);
        row.d = disturbance_vec(sys, disturbance, t, x);
        FilterOutput fo = apply_filter(filter, sys, b, x, row.e);
        row.u_nominal = fo.u_nominal;
        if (input_bounds) {
            SaturationResult sr = saturate(fo.u, input_bounds->lower, input_bounds->upper);
            row.u_applied = sr.u;
            row.saturated = sr.saturated;
        } else {
            row.u_applied = fo.u;
            row.saturated = false;
        }
        row.h = b.value(x);
        if (filter.has_robustness()) {
            row.gamma_T = gamma_tissf(filter.alpha, filter.sched, row.h, d_inf);
        } else {
            row.gamma_T = 0.0;
        }
        row.h_dT = row.h + row.gamma_T;
        return row;
    };

    Vec x = x0;
    for (long k = 0; k <= steps; ++k) {
        double t = double(k) * dt;
        TrajectoryRow row;
        try {
            row = fill_row(t, x);
        } catch (const InfeasibleError& err) {
            throw IntegrationError(IntegrationError::Reason::infeasible_filter,
                                   std::string("filter infeasible at t=") + std::to_string(t) +
                                       ": " + err.what(),
                                   std::move(traj));
        }
        traj.rows.push_back(row);
        if (k == steps) break;

        // Classical RK4 stages; the applied input is held over the step
        // while d and e are sampled at the stage times/states.
        const Vec& u = row.u_applied;
        auto xdot = [&](double tau, const Vec& xi) -> Vec {
            return sys.drift(xi, exo_at(sys, lead, tau)) +
                   sys.input_matrix(xi) * (u + disturbance_vec(sys, disturbance, tau, xi));
        };
        Vec k1 = xdot(t, x);
        Vec k2 = xdot(t + 0.5 * dt, x + 0.5 * dt * k1);
        Vec k3 = xdot(t + 0.5 * dt, x + 0.5 * dt * k2);
        Vec k4 = xdot(t + dt, x + dt * k3);
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (sys.project_state) sys.project_state(x);

        if (!x.allFinite() || x.norm() > kDivergenceGuard) {
            throw IntegrationError(IntegrationError::Reason::divergence,
                                   "state diverged at t=" + std::to_string(t + dt),
                                   std::move(traj));
        }
    }
    return traj;
}

Trajectory integrate(const Scenario& sc) {
    return integrate(sc.sys, sc.barrier, sc.filter, sc.disturbance, sc.lead, sc.x0, sc.dt,
                     sc.horizon, sc.input_bounds);
}

std::vector<SweepRow> batch_sweep(const Scenario& base, const SweepGrid& grid, int workers) {
    auto axis = [](const std::vector<double>& v, double fallback) {
        return v.empty() ? std::vector<double>{fallback} : v;
    };
    std::vector<double> eps0s = axis(grid.eps0, base.filter.sched.eps0());
    std::vector<double> l1s = axis(grid.lambda1, base.filter.sched.lambda1());
    std::vector<double> l0s = axis(grid.lambda0, base.filter.sched.lambda0());
    std::vector<double> dbs = axis(grid.d_bound, base.disturbance.declared_bound());
    std::vector<FilterKind> kinds =
        grid.filters.empty() ? std::vector<FilterKind>{base.filter.kind} : grid.filters;

    std::vector<SweepPoint> points;
    for (FilterKind fk : kinds)
        for (double db : dbs)
            for (double e0 : eps0s)
                for (double l1 : l1s)
                    for (double l0 : l0s) {
                        points.push_back(SweepPoint{e0, l1, l0, db, fk});
                    }
    if (points.empty()) throw std::invalid_argument("sweep grid is empty");

    std::vector<SweepRow> rows(points.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure_msg;
    std::mutex failure_mutex;

    auto run_one = [&](size_t i) {
        const SweepPoint& pt = points[i];
        Scenario sc = base;
        sc.filter.kind = pt.filter;
        switch (pt.filter) {
            case FilterKind::issf_additive:
                sc.filter.sched = EpsilonSchedule::constant(pt.eps0);
                break;
            case FilterKind::tissf_additive:
            case FilterKind::tissf_qp:
                sc.filter.sched = EpsilonSchedule::exponential(pt.eps0, pt.lambda1, pt.lambda0);
                break;
            case FilterKind::nominal:
            case FilterKind::cbf_qp:
                break;
        }
        if (sc.disturbance.kind() != DisturbanceSignal::Kind::zero) {
            sc.disturbance = sc.disturbance.scaled(pt.d_bound);
        }
        Trajectory traj = integrate(sc);

        SweepRow row;
        row.run_id = static_cast<int>(i);
        row.point = pt;
        row.min_h = traj.min_h();
        row.min_h_dT = traj.min_h_dT();
        row.max_intervention = 0.0;
        for (const auto& r : traj.rows) {
            row.max_intervention =
                std::max(row.max_intervention, (r.u_applied - r.u_nominal).norm());
        }
        row.saturation_count = traj.saturation_count();
        rows[i] = row;
    };

    int nw = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    nw = std::max(1, std::min<int>(nw, static_cast<int>(points.size())));

    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= points.size() || failed.load()) return;
            try {
                run_one(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(failure_mutex);
                failed.store(true);
                if (failure_msg.empty()) {
                    failure_msg = "sweep run " + std::to_string(i) + " failed: " + e.what();
                }
                return;
            }
        }
    };

    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < nw; ++w) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }
    if (failed.load()) throw Error(failure_msg);
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "run_id,eps0,lambda1,lambda0,d_bound,filter,min_h,min_h_dT,max_intervention,"
        "saturation_count\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%ld\n",
                      r.run_id, r.point.eps0, r.point.lambda1, r.point.lambda0, r.point.d_bound,
                      filter_kind_name(r.point.filter), r.min_h, r.min_h_dT,
                      r.max_intervention, r.saturation_count);
        out += buf;
    }
    return out;
}

}  // namespace tissf
