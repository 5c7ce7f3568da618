#include "tissf/systems.hpp"

#include <cmath>

namespace tissf {

SystemModel DoubleIntegrator::system() const {
    SystemModel s;
    s.n = 2;
    s.m = 1;
    s.p = 0;
    s.f = [](const Vec& x, const Vec&) {
        Vec out(2);
        out << -x[1], 0.0;
        return out;
    };
    s.g = [](const Vec&) {
        Mat out(2, 1);
        out << 0.0, 1.0;
        return out;
    };
    return s;
}

Barrier DoubleIntegrator::barrier() const {
    Barrier b;
    b.h = [](const Vec& x) { return x[0] - x[1]; };
    b.grad = [](const Vec&) {
        Vec g(2);
        g << 1.0, -1.0;
        return g;
    };
    return b;
}

double DoubleIntegrator::nominal_u(const Vec& x) const { return x[0] - 2.0 * x[1] - 1.0; }

std::function<Vec(const Vec&, const Vec&)> DoubleIntegrator::nominal() const {
    return [self = *this](const Vec& x, const Vec&) {
        Vec u(1);
        u[0] = self.nominal_u(x);
        return u;
    };
}

double TruckCcc::safe_distance(double v, double vL) const {
    return p.D_sf + p.theta * v + p.eta * vL + p.xi * v * v + p.zeta * v * vL +
           p.omega * vL * vL;
}

double TruckCcc::dhhat_dv(double v, double vL) const {
    return p.theta + 2.0 * p.xi * v + p.zeta * vL;
}

double TruckCcc::dhhat_dvL(double v, double vL) const {
    return p.eta + p.zeta * v + 2.0 * p.omega * vL;
}

double TruckCcc::range_policy(double D) const {
    if (D < p.D_st) return 0.0;
    if (D > p.v_bar / p.kappa + p.D_st) return p.v_bar;
    return p.kappa * (D - p.D_st);
}

double TruckCcc::nominal_u(const Vec& x) const {
    double D = x[0], v = x[1], vL = x[2];
    return p.k1 * (range_policy(D) - v) + p.k2 * (vL - v);
}

SystemModel TruckCcc::system() const {
    SystemModel s;
    s.n = 3;
    s.m = 1;
    s.p = 1;
    s.f = [](const Vec& x, const Vec& e) {
        Vec out(3);
        out << x[2] - x[1], 0.0, e[0];
        return out;
    };
    s.g = [](const Vec&) {
        Mat out(3, 1);
        out << 0.0, 1.0, 0.0;
        return out;
    };
    s.project_state = [](Vec& x) {
        if (x[1] < 0.0) x[1] = 0.0;
        if (x[2] < 0.0) x[2] = 0.0;
    };
    return s;
}

Barrier TruckCcc::barrier() const {
    Barrier b;
    b.h = [self = *this](const Vec& x) {
        return x[0] - self.safe_distance(x[1], x[2]);
    };
    b.grad = [self = *this](const Vec& x) {
        Vec g(3);
        g << 1.0, -self.dhhat_dv(x[1], x[2]), -self.dhhat_dvL(x[1], x[2]);
        return g;
    };
    return b;
}

std::function<Vec(const Vec&, const Vec&)> TruckCcc::nominal() const {
    return [self = *this](const Vec& x, const Vec&) {
        Vec u(1);
        u[0] = self.nominal_u(x);
        return u;
    };
}

InputBounds TruckCcc::input_bounds() const {
    InputBounds b;
    b.lower = Vec::Constant(1, p.u_min);
    b.upper = Vec::Constant(1, p.u_max);
    return b;
}

double TruckCcc::issf_u(const Vec& x, double eps0) const {
    return nominal_u(x) - dhhat_dv(x[1], x[2]) / eps0;
}

double TruckCcc::tissf_u(const Vec& x, const EpsilonSchedule& sched) const {
    double h = x[0] - safe_distance(x[1], x[2]);
    return nominal_u(x) - dhhat_dv(x[1], x[2]) / sched.eval(h);
}

}  // namespace tissf
