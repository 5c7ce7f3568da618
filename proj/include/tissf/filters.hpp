#pragma once

#include <functional>
#include <optional>

#include "tissf/core.hpp"

namespace tissf {

/// The robustness constraint cannot be met by any input (Lg_h = 0 while the
/// drift alone violates the condition). This falsifies the barrier's
/// regularity premise locally and must abort certification.
struct InfeasibleError : Error {
    using Error::Error;
};

enum class FilterKind { nominal, issf_additive, tissf_additive, tissf_qp, cbf_qp };

const char* filter_kind_name(FilterKind k);
FilterKind filter_kind_from_name(const std::string& name);

/// A safety filter wrapping a nominal controller k(x, e).
///
/// sched supplies eps(h) for the robust variants (a constant schedule for
/// issf_additive). alpha enters the QP constraints directly and is also the
/// comparison function used when auditing the additive variants.
struct FilterSpec {
    FilterKind kind = FilterKind::nominal;
    std::function<Vec(const Vec& x, const Vec& e)> nominal;
    EpsilonSchedule sched = EpsilonSchedule::constant(1.0);
    ClassKappaFn alpha = ClassKappaFn::linear(1.0);
    double margin = 0.0;  // QP constraint margin, >= 0

    static FilterSpec nominal_only(std::function<Vec(const Vec&, const Vec&)> k);
    static FilterSpec issf(std::function<Vec(const Vec&, const Vec&)> k, double eps0);
    static FilterSpec tissf(std::function<Vec(const Vec&, const Vec&)> k, EpsilonSchedule sched);
    static FilterSpec tissf_qp(std::function<Vec(const Vec&, const Vec&)> k,
                               EpsilonSchedule sched, ClassKappaFn alpha, double margin = 0.0);
    static FilterSpec cbf_qp(std::function<Vec(const Vec&, const Vec&)> k, ClassKappaFn alpha,
                             double margin = 0.0);

    /// True for variants that carry an eps schedule and hence an expanded-set
    /// invariance guarantee under bounded disturbance.
    bool has_robustness() const {
        return kind == FilterKind::issf_additive || kind == FilterKind::tissf_additive ||
               kind == FilterKind::tissf_qp;
    }
};

/// hdot(x,u) + alpha(h(x)); the input u satisfies the barrier condition
/// iff the returned slack is >= 0.
double cbf_condition_slack(const SystemModel& sys, const Barrier& b, const ClassKappaFn& alpha,
                           const Vec& x, const Vec& e, const Vec& u);

/// cbf slack minus the robustness budget ||Lg_h||^2 / eps(h).
double tissf_condition_slack(const SystemModel& sys, const Barrier& b, const ClassKappaFn& alpha,
                             const EpsilonSchedule& sched, const Vec& x, const Vec& e,
                             const Vec& u);

/// u = k(x,e) + (1/eps0) Lg_h(x)^T
Vec issf_additive(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
                  const Vec& e);

/// u = k(x,e) + (1/eps(h(x))) Lg_h(x)^T
Vec tissf_additive(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
                   const Vec& e);

/// Closed-form solution of
///   min 1/2 ||u - k||^2  s.t.  Lf_h + Lg_h u >= -alpha(h) + ||Lg_h||^2/eps(h) + margin
/// (half-space projection of the nominal input).
Vec tissf_qp(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
             const Vec& e);

/// Same projection with the plain barrier constraint (no robustness budget).
Vec cbf_qp(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
           const Vec& e);

struct FilterOutput {
    Vec u_nominal;
    Vec u;  // filtered, before saturation
};

FilterOutput apply_filter(const FilterSpec& spec, const SystemModel& sys, const Barrier& b,
                          const Vec& x, const Vec& e);

struct InputBounds {
    Vec lower;
    Vec upper;
};

struct SaturationResult {
    Vec u;
    bool saturated = false;
};

/// Elementwise clamp; flags whether any component was clipped.
SaturationResult saturate(const Vec& u, const Vec& lower, const Vec& upper);

}  // namespace tissf
