#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tissf/core.hpp"
#include "tissf/filters.hpp"
#include "tissf/trajectory.hpp"

namespace tissf {

/// iota(||d||) = eps0 * ||d||^2 / 4, the drift-condition offset matched by
/// the fixed-gain robust filter.
double iota(double eps0, double d_inf);

/// gamma(||d||) = beta^{-1}(eps0 ||d||^2 / 4) with beta(r) = -alpha(-r).
double gamma_issf(const ClassKappaFn& alpha, double eps0, double d_inf);

/// gamma_T(h, ||d||) = -alpha^{-1}(-eps(h) ||d||^2 / 4).
double gamma_tissf(const ClassKappaFn& alpha, const EpsilonSchedule& sched, double h,
                   double d_inf);

struct ExpandedSetValues {
    double h = 0.0;
    double h_d = 0.0;   // h + gamma (fixed gain eps0 of the schedule)
    double h_dT = 0.0;  // h + gamma_T (state-dependent gain)
};

/// Membership: x is in the safe set iff h >= 0, in the fixed-gain expanded
/// set iff h_d >= 0, and in the tunable expanded set iff h_dT >= 0.
ExpandedSetValues h_d_and_h_dT(const Barrier& b, const ClassKappaFn& alpha,
                               const EpsilonSchedule& sched, double d_inf, const Vec& x);

/// Slack of the schedule condition
///   eps'(h) > -(4/||d||^2) * (d alpha^{-1}/dr(-eps(h)||d||^2/4))^{-1}.
/// Positive slack at h means the condition holds there. Returns +inf when
/// d_inf = 0 (the condition is vacuous without disturbance).
double eps_condition_slack(const ClassKappaFn& alpha, const EpsilonSchedule& sched, double h,
                           double d_inf);

/// Level h* < 0 at which h + gamma_T(h, d_inf) = 0; the expanded-set
/// boundary sits on the h = h* level set. Returns 0 when d_inf = 0.
double expanded_boundary_level(const ClassKappaFn& alpha, const EpsilonSchedule& sched,
                               double d_inf);

struct GridSpec {
    Vec lower;
    Vec upper;
    std::vector<int> resolution;  // per state axis, >= 2
    // Exogenous channel box; leave empty for p = 0. The certification takes
    // the worst case over the sampled e values at every state node.
    Vec e_lower;
    Vec e_upper;
    std::vector<int> e_resolution;
    // Nodes with |h| below this band are checked for grad_h != 0.
    // Negative means the default 0.05 * (region diameter).
    double boundary_band = -1.0;
};

struct CertificationReport {
    long grid_points = 0;
    double min_tissf_slack = std::numeric_limits<double>::infinity();
    Vec argmin_state;
    Vec argmin_e;
    double min_eps_cond_slack = std::numeric_limits<double>::infinity();
    double min_grad_norm_on_boundary = std::numeric_limits<double>::infinity();
    long boundary_points = 0;
    bool infeasible_encountered = false;
    Vec infeasible_state;
    bool certified = false;

    std::string to_kv() const;
};

/// Evaluates, at every grid node (worst case over sampled e):
///   - the robust barrier-condition slack of the filtered input,
///   - the schedule condition slack,
///   - ||grad_h|| on near-boundary nodes.
/// certified requires every minimum to be strictly positive and no
/// infeasible node.
CertificationReport certify_grid(const SystemModel& sys, const Barrier& b,
                                 const ClassKappaFn& alpha, const EpsilonSchedule& sched,
                                 const FilterSpec& filter, const GridSpec& grid, double d_inf,
                                 int workers = 0);

struct AuditReport {
    double min_h = std::numeric_limits<double>::infinity();
    double min_h_d = std::numeric_limits<double>::infinity();
    double min_h_dT = std::numeric_limits<double>::infinity();
    double min_diff_bound_slack = std::numeric_limits<double>::infinity();
    double max_abs_hdot = 0.0;
    long saturation_count = 0;
    long disturbance_bound_violations = 0;
    double tol = 0.0;
    double fd_tol = 0.0;
    bool invariance_ok = false;
    bool diff_bound_ok = false;

    std::string to_kv() const;
};

/// Audits a recorded trajectory against the expanded-set invariance
/// guarantee and the differential bound
///   hdot >= -alpha(h) - eps(h) ||d||^2 / 4,
/// the latter via central finite differences at interior samples.
/// The diff-bound verdict scales fd_tol by max(1, max|hdot|) to absorb
/// discretization error. Requires a uniform time grid.
AuditReport audit_trajectory(const Trajectory& traj, const Barrier& b,
                             const ClassKappaFn& alpha, const EpsilonSchedule& sched,
                             double d_inf, double tol = 1e-3, double fd_tol = 1e-2);

}  // namespace tissf
