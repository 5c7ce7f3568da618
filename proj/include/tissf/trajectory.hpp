#pragma once

#include <string>
#include <vector>

#include "tissf/core.hpp"

namespace tissf {

/// One integration step record. gamma_T and h_dT are the expanded-set
/// functions implied by the active filter's schedule; for filters without a
/// robustness budget they are logged as 0 and h respectively.
struct TrajectoryRow {
    double t = 0.0;
    Vec x;
    Vec u_nominal;
    Vec u_applied;
    Vec d;
    Vec e;
    double h = 0.0;
    double gamma_T = 0.0;
    double h_dT = 0.0;
    bool saturated = false;
};

struct Trajectory {
    double dt = 0.0;
    std::vector<TrajectoryRow> rows;

    double min_h() const;
    double min_h_dT() const;
    long saturation_count() const;

    /// Header: t,x1..xn,u_nom1..m,u_app1..m,d1..m,e1..p,h,gamma_T,h_dT,saturated
    /// Floats are written with 17 significant digits.
    std::string to_csv() const;
    void write_csv(const std::string& path) const;
};

}  // namespace tissf
