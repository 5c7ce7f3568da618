#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tissf/cert.hpp"
#include "tissf/core.hpp"
#include "tissf/filters.hpp"
#include "tissf/trajectory.hpp"

namespace tissf {

struct ProfileError : Error {
    using Error::Error;
};

/// Lead-vehicle motion as (t, v_L, a_L) samples. Linear interpolation
/// between samples, boundary values held outside the range.
class LeadProfile {
public:
    LeadProfile(std::vector<double> t, std::vector<double> v, std::vector<double> a);

    double v_at(double t) const;
    double a_at(double t) const;
    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    size_t size() const { return t_.size(); }
    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& velocities() const { return v_; }
    const std::vector<double>& accelerations() const { return a_; }

    /// v_L >= 0, a_L within [a_min, a_max], and v_L consistent with the
    /// trapezoid integral of a_L to rel_tol of max speed. Throws
    /// ProfileError naming the offending row.
    void validate(double a_min = -10.0, double a_max = 3.0, double rel_tol = 0.02) const;

    void write_csv(const std::string& path) const;

private:
    std::vector<double> t_, v_, a_;
    double interp(const std::vector<double>& ys, double t) const;
};

/// Lead decelerates from v0 to a stop with peak deceleration a_min < 0,
/// starting at t_start. Without a jerk limit the deceleration is a
/// rectangular pulse; with one it ramps at most jerk_limit per second
/// (trapezoidal, falling back to a triangular pulse for short stops).
LeadProfile synth_emergency_brake(double v0, double a_min, double t_start,
                                  std::optional<double> jerk_limit = std::nullopt,
                                  double sample_dt = 0.01, double tail = 5.0);

/// Reads a `t,v_L,a_L` CSV (comments start with '#') and validates it.
LeadProfile ingest_lead_csv(const std::string& path);

/// A mid-run failure; carries whatever was integrated before the abort.
struct IntegrationError : Error {
    enum class Reason { infeasible_filter, divergence };
    IntegrationError(Reason r, const std::string& msg, Trajectory partial)
        : Error(msg), reason(r), partial_trajectory(std::move(partial)) {}
    Reason reason;
    Trajectory partial_trajectory;
};

/// Everything needed to run one closed-loop simulation.
struct Scenario {
    SystemModel sys;
    Barrier barrier;
    FilterSpec filter;
    DisturbanceSignal disturbance = DisturbanceSignal::zero();
    std::optional<LeadProfile> lead;
    Vec x0;
    double dt = 1e-3;
    double horizon = 20.0;
    std::optional<InputBounds> input_bounds;
};

/// Fixed-step classical RK4 on the disturbed closed loop. The applied input
/// is evaluated once per step and held constant across the step (zero-order
/// hold); the disturbance and the exogenous channel are sampled at the RK4
/// stage times. Aborts with IntegrationError on filter infeasibility or
/// state divergence (||x|| > 1e6).
Trajectory integrate(const SystemModel& sys, const Barrier& b, const FilterSpec& filter,
                     const DisturbanceSignal& disturbance,
                     const std::optional<LeadProfile>& lead, const Vec& x0, double dt, double T,
                     const std::optional<InputBounds>& input_bounds);

Trajectory integrate(const Scenario& sc);

struct SweepPoint {
    double eps0 = 1.0;
    double lambda1 = 0.0;
    double lambda0 = 0.0;
    double d_bound = 0.0;
    FilterKind filter = FilterKind::nominal;
};

struct SweepGrid {
    std::vector<double> eps0;
    std::vector<double> lambda1;
    std::vector<double> lambda0;
    std::vector<double> d_bound;
    std::vector<FilterKind> filters;
};

struct SweepRow {
    int run_id = 0;
    SweepPoint point;
    double min_h = 0.0;
    double min_h_dT = 0.0;
    double max_intervention = 0.0;
    long saturation_count = 0;
};

/// Cross product of the grid axes (empty axes keep the base scenario's
/// value). Rows come back in grid order regardless of scheduling.
std::vector<SweepRow> batch_sweep(const Scenario& base, const SweepGrid& grid, int workers = 0);

/// Header: run_id,eps0,lambda1,lambda0,d_bound,filter,min_h,min_h_dT,max_intervention,saturation_count
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace tissf
