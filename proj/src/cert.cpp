#include "tissf/cert.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

namespace tissf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_vec(const Vec& v) {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << fmt(v[i]);
    }
    os << "]";
    return os.str();
}

}  // namespace

double iota(double eps0, double d_inf) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
    if (!(d_inf >= 0.0)) throw std::invalid_argument("d_inf must be nonnegative");
    return eps0 * d_inf * d_inf / 4.0;
}

double gamma_issf(const ClassKappaFn& alpha, double eps0, double d_inf) {
    // beta^{-1}(r) = -alpha^{-1}(-r) for beta(r) = -alpha(-r)
    return -alpha.inv(-iota(eps0, d_inf));
}

double gamma_tissf(const ClassKappaFn& alpha, const EpsilonSchedule& sched, double h,
                   double d_inf) {
    if (!(d_inf >= 0.0)) throw std::invalid_argument("d_inf must be nonnegative");
    return -alpha.inv(-sched.eval(h) * d_inf * d_inf / 4.0);
}

ExpandedSetValues h_d_and_h_dT(const Barrier& b, const ClassKappaFn& alpha,
                               const EpsilonSchedule& sched, double d_inf, const Vec& x) {
    ExpandedSetValues out;
    out.h = b.value(x);
    out.h_d = out.h + gamma_issf(alpha, sched.eps0(), d_inf);
    out.h_dT = out.h + gamma_tissf(alpha, sched, out.h, d_inf);
    return out;
}

double eps_condition_slack(const ClassKappaFn& alpha, const EpsilonSchedule& sched, double h,
                           double d_inf) {
    if (!(d_inf >= 0.0)) throw std::invalid_argument("d_inf must be nonnegative");
    if (d_inf == 0.0) return kInf;  // condition vacuous without disturbance
    double d2 = d_inf * d_inf;
    double inv_slope = alpha.inv_deriv(-sched.eval(h) * d2 / 4.0);
    return sched.deriv(h) + (4.0 / d2) / inv_slope;
}

double expanded_boundary_level(const ClassKappaFn& alpha, const EpsilonSchedule& sched,
                               double d_inf) {
    if (d_inf == 0.0) return 0.0;
    auto f = [&](double h) { return h + gamma_tissf(alpha, sched, h, d_inf); };
    // f(0) = gamma_T(0) > 0 and f decreases without bound as h -> -inf;
    // bracket downward then bisect.
    double hi = 0.0;
    double lo = -gamma_tissf(alpha, sched, 0.0, d_inf) - 1.0;
    while (f(lo) > 0.0) lo *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct GridShape {
    std::vector<int> res;
    long total = 1;
};

GridShape make_shape(const std::vector<int>& resolution) {
    GridShape s;
    s.res = resolution;
    for (int r : resolution) {
        if (r < 2) throw std::invalid_argument("grid resolution must be >= 2 per axis");
        s.total *= r;
    }
    return s;
}

Vec node_at(const Vec& lower, const Vec& upper, const std::vector<int>& res, long idx) {
    Vec x(lower.size());
    long rem = idx;
    for (int a = 0; a < lower.size(); ++a) {
        long coord = rem % res[a];
        rem /= res[a];
        x[a] = lower[a] + (upper[a] - lower[a]) * double(coord) / double(res[a] - 1);
    }
    return x;
}

struct PartialCert {
    double min_tissf_slack = kInf;
    Vec argmin_state, argmin_e;
    double min_eps_cond_slack = kInf;
    double min_grad_norm_on_boundary = kInf;
    long boundary_points = 0;
    bool infeasible = false;
    Vec infeasible_state;
};

void merge_into(PartialCert& acc, const PartialCert& p) {
    if (p.min_tissf_slack < acc.min_tissf_slack) {
        acc.min_tissf_slack = p.min_tissf_slack;
        acc.argmin_state = p.argmin_state;
        acc.argmin_e = p.argmin_e;
    }
    acc.min_eps_cond_slack = std::min(acc.min_eps_cond_slack, p.min_eps_cond_slack);
    acc.min_grad_norm_on_boundary =
        std::min(acc.min_grad_norm_on_boundary, p.min_grad_norm_on_boundary);
    acc.boundary_points += p.boundary_points;
    if (!acc.infeasible && p.infeasible) {
        acc.infeasible = true;
        acc.infeasible_state = p.infeasible_state;
    }
}

}  // namespace

CertificationReport certify_grid(const SystemModel& sys, const Barrier& b,
                                 const ClassKappaFn& alpha, const EpsilonSchedule& sched,
                                 const FilterSpec& filter, const GridSpec& grid, double d_inf,
                                 int workers) {
    if (grid.lower.size() != sys.n || grid.upper.size() != sys.n ||
        static_cast<int>(grid.resolution.size()) != sys.n) {
        throw DimensionError("grid box/resolution must match the state dimension");
    }
    if ((grid.upper - grid.lower).minCoeff() < 0.0) {
        throw std::invalid_argument("grid region is empty");
    }
    GridShape shape = make_shape(grid.resolution);

    // Exogenous sample set; a single zero vector when no e-box is given.
    std::vector<Vec> e_nodes;
    if (grid.e_lower.size() > 0 && grid.e_lower.size() != sys.p) {
        throw DimensionError("exogenous box does not match the system's channel dimension");
    }
    if (sys.p > 0 && grid.e_lower.size() == sys.p) {
        if (grid.e_upper.size() != sys.p ||
            static_cast<int>(grid.e_resolution.size()) != sys.p) {
            throw DimensionError("exogenous box/resolution must match dimension p");
        }
        GridShape eshape = make_shape(grid.e_resolution);
        for (long j = 0; j < eshape.total; ++j) {
            e_nodes.push_back(node_at(grid.e_lower, grid.e_upper, grid.e_resolution, j));
        }
    } else {
        e_nodes.push_back(Vec::Zero(sys.p));
    }

    double band = grid.boundary_band;
    if (band < 0.0) band = 0.05 * (grid.upper - grid.lower).norm();

    auto scan = [&](long begin, long end) {
        PartialCert part;
        for (long idx = begin; idx < end; ++idx) {
            Vec x = node_at(grid.lower, grid.upper, grid.resolution, idx);
            double h = b.value(x);

            double ec = eps_condition_slack(alpha, sched, h, d_inf);
            part.min_eps_cond_slack = std::min(part.min_eps_cond_slack, ec);

            if (std::abs(h) < band) {
                ++part.boundary_points;
                part.min_grad_norm_on_boundary =
                    std::min(part.min_grad_norm_on_boundary, b.gradient(x).norm());
            }

            for (const Vec& e : e_nodes) {
                Vec u;
                try {
                    u = apply_filter(filter, sys, b, x, e).u;
                } catch (const InfeasibleError&) {
                    if (!part.infeasible) {
                        part.infeasible = true;
                        part.infeasible_state = x;
                    }
                    continue;
                }
                double slack = tissf_condition_slack(sys, b, alpha, sched, x, e, u);
                if (slack < part.min_tissf_slack) {
                    part.min_tissf_slack = slack;
                    part.argmin_state = x;
                    part.argmin_e = e;
                }
            }
        }
        return part;
    };

    int nw = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    nw = std::max(1, static_cast<int>(std::min<long>(nw, shape.total)));

    PartialCert acc;
    if (nw == 1) {
        acc = scan(0, shape.total);
    } else {
        std::vector<std::future<PartialCert>> futs;
        long chunk = (shape.total + nw - 1) / nw;
        for (int w = 0; w < nw; ++w) {
            long begin = w * chunk;
            long end = std::min(shape.total, begin + chunk);
            if (begin >= end) break;
            futs.push_back(std::async(std::launch::async, scan, begin, end));
        }
        // Merge in chunk order so ties resolve deterministically.
        for (auto& f : futs) merge_into(acc, f.get());
    }

    CertificationReport rep;
    rep.grid_points = shape.total;
    rep.min_tissf_slack = acc.min_tissf_slack;
    rep.argmin_state = acc.argmin_state;
    rep.argmin_e = acc.argmin_e;
    rep.min_eps_cond_slack = acc.min_eps_cond_slack;
    rep.min_grad_norm_on_boundary = acc.min_grad_norm_on_boundary;
    rep.boundary_points = acc.boundary_points;
    rep.infeasible_encountered = acc.infeasible;
    rep.infeasible_state = acc.infeasible_state;
    rep.certified = !acc.infeasible && acc.min_tissf_slack > 0.0 &&
                    acc.min_eps_cond_slack > 0.0 &&
                    (acc.boundary_points == 0 || acc.min_grad_norm_on_boundary > 0.0);
    return rep;
}

std::string CertificationReport::to_kv() const {
    std::ostringstream os;
    os << "grid_points=" << grid_points << "\n";
    os << "min_tissf_slack=" << fmt(min_tissf_slack) << "\n";
    os << "argmin_state=" << fmt_vec(argmin_state) << "\n";
    os << "argmin_e=" << fmt_vec(argmin_e) << "\n";
    os << "min_eps_cond_slack=" << fmt(min_eps_cond_slack) << "\n";
    os << "min_grad_norm_on_boundary=" << fmt(min_grad_norm_on_boundary) << "\n";
    os << "boundary_points=" << boundary_points << "\n";
    os << "infeasible_encountered=" << (infeasible_encountered ? 1 : 0) << "\n";
    if (infeasible_encountered) os << "infeasible_state=" << fmt_vec(infeasible_state) << "\n";
    os << "certified=" << (certified ? 1 : 0) << "\n";
    return os.str();
}

AuditReport audit_trajectory(const Trajectory& traj, const Barrier& b,
                             const ClassKappaFn& alpha, const EpsilonSchedule& sched,
                             double d_inf, double tol, double fd_tol) {
    const auto& rows = traj.rows;
    if (rows.size() < 2) throw std::invalid_argument("trajectory needs at least two samples");
    double dt = traj.dt;
    for (size_t i = 0; i < rows.size(); ++i) {
        double expected = rows[0].t + double(i) * dt;
        if (std::abs(rows[i].t - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
            throw std::invalid_argument("trajectory time grid is not uniform");
        }
    }

    AuditReport rep;
    rep.tol = tol;
    rep.fd_tol = fd_tol;

    std::vector<double> h(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        h[i] = b.value(rows[i].x);
        ExpandedSetValues ev = h_d_and_h_dT(b, alpha, sched, d_inf, rows[i].x);
        rep.min_h = std::min(rep.min_h, ev.h);
        rep.min_h_d = std::min(rep.min_h_d, ev.h_d);
        rep.min_h_dT = std::min(rep.min_h_dT, ev.h_dT);
        if (rows[i].saturated) ++rep.saturation_count;
        if (rows[i].d.size() > 0 &&
            rows[i].d.norm() > d_inf + 1e-12 * std::max(1.0, d_inf)) {
            ++rep.disturbance_bound_violations;
        }
    }

    for (size_t i = 1; i + 1 < rows.size(); ++i) {
        double hdot = (h[i + 1] - h[i - 1]) / (2.0 * dt);
        rep.max_abs_hdot = std::max(rep.max_abs_hdot, std::abs(hdot));
        double slack = hdot + alpha(h[i]) + sched.eval(h[i]) * d_inf * d_inf / 4.0;
        rep.min_diff_bound_slack = std::min(rep.min_diff_bound_slack, slack);
    }

    rep.invariance_ok = rep.min_h_dT >= -tol;
    rep.diff_bound_ok =
        rep.min_diff_bound_slack >= -fd_tol * std::max(1.0, rep.max_abs_hdot);
    return rep;
}

std::string AuditReport::to_kv() const {
    std::ostringstream os;
    os << "min_h=" << fmt(min_h) << "\n";
    os << "min_h_d=" << fmt(min_h_d) << "\n";
    os << "min_h_dT=" << fmt(min_h_dT) << "\n";
    os << "min_diff_bound_slack=" << fmt(min_diff_bound_slack) << "\n";
    os << "max_abs_hdot=" << fmt(max_abs_hdot) << "\n";
    os << "saturation_count=" << saturation_count << "\n";
    os << "disturbance_bound_violations=" << disturbance_bound_violations << "\n";
    os << "tol=" << fmt(tol) << "\n";
    os << "fd_tol=" << fmt(fd_tol) << "\n";
    os << "invariance_ok=" << (invariance_ok ? 1 : 0) << "\n";
    os << "diff_bound_ok=" << (diff_bound_ok ? 1 : 0) << "\n";
    return os.str();
}

}  // namespace tissf
