#pragma once

#include "tissf/core.hpp"
#include "tissf/filters.hpp"

namespace tissf {

/// Planar plant  x1dot = -x2, x2dot = u (+d)  with barrier h = x1 - x2 and
/// the stabilizing controller k = x1 - 2 x2 - 1. Along the nominal closed
/// loop, hdot + h = 1 identically.
struct DoubleIntegrator {
    SystemModel system() const;
    Barrier barrier() const;
    std::function<Vec(const Vec&, const Vec&)> nominal() const;
    ClassKappaFn alpha() const { return ClassKappaFn::linear(1.0); }

    double nominal_u(const Vec& x) const;
};

struct TruckParams {
    // quadratic safe-distance surface
    double D_sf = 2.0;    // m
    double theta = 1.1;   // s
    double eta = 0.6;     // s
    double xi = 0.03;     // s^2/m
    double zeta = -0.03;  // s^2/m
    double omega = -0.03; // s^2/m
    // cruise controller
    double k1 = 0.7;    // 1/s
    double k2 = 0.75;   // 1/s
    double kappa = 0.7; // 1/s
    double D_st = 7.0;  // m
    double v_bar = 20.0; // m/s
    // actuation and lead envelopes
    double u_min = -6.0;  // m/s^2
    double u_max = 2.0;   // m/s^2
    double aL_min = -10.0; // m/s^2
    double aL_max = 3.0;   // m/s^2
};

/// Connected cruise control plant: state (D, v, v_L), exogenous channel
/// e = (a_L), input channel vdot = u + d. The lead speed is integrated from
/// a_L, and velocities are clamped at zero after each step (a stopped
/// vehicle does not reverse under braking).
struct TruckCcc {
    TruckParams p;

    /// Minimum admissible headway at the given speeds (always >= D_sf on the
    /// operating box; keeps at least a 1 s time headway).
    double safe_distance(double v, double vL) const;
    double dhhat_dv(double v, double vL) const;
    double dhhat_dvL(double v, double vL) const;

    /// Desired speed versus headway: 0 below D_st, saturating at v_bar.
    double range_policy(double D) const;

    /// k = k1 (V(D) - v) + k2 (v_L - v); unsaturated.
    double nominal_u(const Vec& x) const;

    SystemModel system() const;
    Barrier barrier() const;
    std::function<Vec(const Vec&, const Vec&)> nominal() const;
    InputBounds input_bounds() const;
    ClassKappaFn alpha() const { return ClassKappaFn::linear(1.0); }

    /// k - (1/eps0) dhhat/dv, the fixed-gain robustified controller.
    double issf_u(const Vec& x, double eps0) const;
    /// k - (1/eps(h)) dhhat/dv with the tunable gain.
    double tissf_u(const Vec& x, const EpsilonSchedule& sched) const;
};

}  // namespace tissf
