#include "tissf/filters.hpp"

#include <sstream>

namespace tissf {

namespace {

// Below this squared norm, Lg_h is treated as identically zero and the QP
// constraint degenerates to a pure drift condition.
constexpr double kZeroDirection = 1e-18;

Vec nominal_input(const FilterSpec& spec, const SystemModel& sys, const Vec& x, const Vec& e) {
    if (!spec.nominal) throw Error("filter has no nominal controller");
    Vec u = spec.nominal(x, e);
    if (u.size() != sys.m) throw DimensionError("nominal controller returned wrong dimension");
    require_finite(u, "nominal input");
    return u;
}

// Projection of k onto { u : a.u >= c }.
Vec project_halfspace(const Vec& k, const Vec& a, double c) {
    double ak = a.dot(k);
    if (ak >= c) return k;
    double a2 = a.squaredNorm();
    return k + a * ((c - ak) / a2);
}

}  // namespace

const char* filter_kind_name(FilterKind k) {
    switch (k) {
        case FilterKind::nominal: return "nominal";
        case FilterKind::issf_additive: return "issf_additive";
        case FilterKind::tissf_additive: return "tissf_additive";
        case FilterKind::tissf_qp: return "tissf_qp";
        case FilterKind::cbf_qp: return "cbf_qp";
    }
    return "?";
}

FilterKind filter_kind_from_name(const std::string& name) {
    if (name == "nominal") return FilterKind::nominal;
    if (name == "issf_additive") return FilterKind::issf_additive;
    if (name == "tissf_additive") return FilterKind::tissf_additive;
    if (name == "tissf_qp") return FilterKind::tissf_qp;
    if (name == "cbf_qp") return FilterKind::cbf_qp;
    throw std::invalid_argument("unknown filter kind: " + name);
}

FilterSpec FilterSpec::nominal_only(std::function<Vec(const Vec&, const Vec&)> k) {
    FilterSpec s;
    s.kind = FilterKind::nominal;
    s.nominal = std::move(k);
    return s;
}

FilterSpec FilterSpec::issf(std::function<Vec(const Vec&, const Vec&)> k, double eps0) {
    FilterSpec s;
    s.kind = FilterKind::issf_additive;
    s.nominal = std::move(k);
    s.sched = EpsilonSchedule::constant(eps0);
    return s;
}

FilterSpec FilterSpec::tissf(std::function<Vec(const Vec&, const Vec&)> k,
                             EpsilonSchedule sched) {
    FilterSpec s;
    s.kind = FilterKind::tissf_additive;
    s.nominal = std::move(k);
    s.sched = sched;
    return s;
}

FilterSpec FilterSpec::tissf_qp(std::function<Vec(const Vec&, const Vec&)> k,
                                EpsilonSchedule sched, ClassKappaFn alpha, double margin) {
    if (!(margin >= 0.0)) throw std::invalid_argument("margin must be nonnegative");
    FilterSpec s;
    s.kind = FilterKind::tissf_qp;
    s.nominal = std::move(k);
    s.sched = sched;
    s.alpha = alpha;
    s.margin = margin;
    return s;
}

FilterSpec FilterSpec::cbf_qp(std::function<Vec(const Vec&, const Vec&)> k, ClassKappaFn alpha,
                              double margin) {
    if (!(margin >= 0.0)) throw std::invalid_argument("margin must be nonnegative");
    FilterSpec s;
    s.kind = FilterKind::cbf_qp;
    s.nominal = std::move(k);
    s.alpha = alpha;
    s.margin = margin;
    return s;
}

double cbf_condition_slack(const SystemModel& sys, const Barrier& b, const ClassKappaFn& alpha,
                           const Vec& x, const Vec& e, const Vec& u) {
    if (u.size() != sys.m) throw DimensionError("input dimension mismatch");
    LieDerivatives ld = lie_derivatives(sys, b, x, e);
    double slack = ld.Lf_h + ld.Lg_h.dot(u) + alpha(b.value(x));
    require_finite(slack, "cbf condition slack");
    return slack;
}

double tissf_condition_slack(const SystemModel& sys, const Barrier& b, const ClassKappaFn& alpha,
                             const EpsilonSchedule& sched, const Vec& x, const Vec& e,
                             const Vec& u) {
    LieDerivatives ld = lie_derivatives(sys, b, x, e);
    double h = b.value(x);
    double slack = ld.Lf_h + ld.Lg_h.dot(u) + alpha(h) - ld.Lg_h.squaredNorm() / sched.eval(h);
    require_finite(slack, "tissf condition slack");
    return slack;
}

Vec issf_additive(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
                  const Vec& e) {
    Vec k = nominal_input(spec, sys, x, e);
    LieDerivatives ld = lie_derivatives(sys, b, x, e);
    return k + ld.Lg_h / spec.sched.eps0();
}

Vec tissf_additive(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
                   const Vec& e) {
    Vec k = nominal_input(spec, sys, x, e);
    LieDerivatives ld = lie_derivatives(sys, b, x, e);
    return k + ld.Lg_h / spec.sched.eval(b.value(x));
}

namespace {

Vec qp_filter(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
              const Vec& e, bool with_robustness) {
    Vec k = nominal_input(spec, sys, x, e);
    LieDerivatives ld = lie_derivatives(sys, b, x, e);
    double h = b.value(x);
    double rhs = -spec.alpha(h) + spec.margin;
    if (with_robustness) rhs += ld.Lg_h.squaredNorm() / spec.sched.eval(h);

    if (ld.Lg_h.squaredNorm() < kZeroDirection) {
        if (ld.Lf_h >= rhs) return k;  // constraint vacuous
        std::ostringstream os;
        os << "safety constraint infeasible: Lg_h = 0 and Lf_h = " << ld.Lf_h
           << " < required " << rhs;
        throw InfeasibleError(os.str());
    }
    return project_halfspace(k, ld.Lg_h, rhs - ld.Lf_h);
}

}  // namespace

Vec tissf_qp(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
             const Vec& e) {
    return qp_filter(spec, sys, b, x, e, /*with_robustness=*/true);
}

Vec cbf_qp(const FilterSpec& spec, const SystemModel& sys, const Barrier& b, const Vec& x,
           const Vec& e) {
    return qp_filter(spec, sys, b, x, e, /*with_robustness=*/false);
}

FilterOutput apply_filter(const FilterSpec& spec, const SystemModel& sys, const Barrier& b,
                          const Vec& x, const Vec& e) {
    FilterOutput out;
    out.u_nominal = nominal_input(spec, sys, x, e);
    switch (spec.kind) {
        case FilterKind::nominal: out.u = out.u_nominal; break;
        case FilterKind::issf_additive: out.u = issf_additive(spec, sys, b, x, e); break;
        case FilterKind::tissf_additive: out.u = tissf_additive(spec, sys, b, x, e); break;
        case FilterKind::tissf_qp: out.u = tissf_qp(spec, sys, b, x, e); break;
        case FilterKind::cbf_qp: out.u = cbf_qp(spec, sys, b, x, e); break;
    }
    require_finite(out.u, "filtered input");
    return out;
}

SaturationResult saturate(const Vec& u, const Vec& lower, const Vec& upper) {
    if (lower.size() != u.size() || upper.size() != u.size()) {
        throw DimensionError("saturation bound dimension mismatch");
    }
    for (int i = 0; i < u.size(); ++i) {
        if (lower[i] > upper[i]) throw std::invalid_argument("lower bound exceeds upper bound");
    }
    SaturationResult r;
    r.u = u.cwiseMax(lower).cwiseMin(upper);
    r.saturated = (r.u.array() != u.array()).any();
    return r;
}

}  // namespace tissf
