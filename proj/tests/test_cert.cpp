#include "doctest.h"

#include <cmath>

#include "tissf/cert.hpp"
#include "tissf/systems.hpp"
#include "oracles.hpp"

using namespace tissf;

namespace {
Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}
}  // namespace

TEST_CASE("iota") {
    CHECK(iota(1.0, 3.0) == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(iota(0.1, 3.0) == doctest::Approx(0.225).epsilon(1e-15));
    CHECK(iota(7.3, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS(iota(0.0, 1.0));
}

TEST_CASE("gamma for the fixed-gain filter") {
    CHECK(gamma_issf(ClassKappaFn::linear(1.0), 1.0, 3.0) == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(gamma_issf(ClassKappaFn::linear(2.0), 1.0, 3.0) ==
          doctest::Approx(1.125).epsilon(1e-15));
    CHECK(gamma_issf(ClassKappaFn::linear(1.0), 0.4, 0.0) == doctest::Approx(0.0));
    // coincides with iota for unit-gain alpha
    for (int i = 0; i < 100; ++i) {
        double e0 = oracle::uniform(0.05, 4.0), d = oracle::uniform(0.0, 5.0);
        CHECK(gamma_issf(ClassKappaFn::linear(1.0), e0, d) == doctest::Approx(iota(e0, d)));
    }
}

TEST_CASE("gamma_issf grows strictly with eps0 and with the disturbance bound") {
    auto alpha = ClassKappaFn::linear(1.0);
    for (int i = 0; i < 1000; ++i) {
        double e0 = oracle::uniform(0.05, 4.0);
        double d = oracle::uniform(0.01, 5.0);
        double de = oracle::uniform(0.01, 1.0);
        double dd = oracle::uniform(0.01, 1.0);
        CHECK(gamma_issf(alpha, e0 + de, d) > gamma_issf(alpha, e0, d));
        CHECK(gamma_issf(alpha, e0, d + dd) > gamma_issf(alpha, e0, d));
    }
}

TEST_CASE("gamma for the tunable filter") {
    auto alpha = ClassKappaFn::linear(1.0);
    auto sched = EpsilonSchedule::exponential(1, 2, -2);
    CHECK(gamma_tissf(alpha, sched, 0.0, 3.0) ==
          doctest::Approx(2.25 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(gamma_tissf(alpha, sched, 0.0, 3.0) ==
          doctest::Approx(0.30450438728237854).epsilon(1e-14));
    CHECK(gamma_tissf(alpha, sched, 1.0, 3.0) == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(gamma_tissf(alpha, sched, 1.0, 0.0) == doctest::Approx(0.0));
    // constant-schedule reduction
    for (int i = 0; i < 200; ++i) {
        double e0 = oracle::uniform(0.05, 4.0);
        double h = oracle::uniform(-5.0, 5.0);
        double d = oracle::uniform(0.0, 5.0);
        CHECK(gamma_tissf(alpha, EpsilonSchedule::constant(e0), h, d) ==
              doctest::Approx(gamma_issf(alpha, e0, d)).epsilon(1e-14));
    }
}

TEST_CASE("expanded-set values and membership") {
    DoubleIntegrator di;
    auto b = di.barrier();
    auto alpha = ClassKappaFn::linear(1.0);

    auto v = h_d_and_h_dT(b, alpha, EpsilonSchedule::constant(1.0), 3.0, vec2(0, 0));
    CHECK(v.h == doctest::Approx(0.0));
    CHECK(v.h_d == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(v.h_dT == doctest::Approx(2.25).epsilon(1e-14));

    auto sched = EpsilonSchedule::exponential(1, 2, -2);
    v = h_d_and_h_dT(b, alpha, sched, 3.0, vec2(-0.2, 0.0));
    CHECK(v.h == doctest::Approx(-0.2));
    // independent evaluation: h + (9/4) e^{2h-2}
    CHECK(v.h_dT == doctest::Approx(-0.2 + 2.25 * std::exp(2.0 * (-0.2) - 2.0)).epsilon(1e-13));
    CHECK(v.h_dT == doctest::Approx(0.004115394901183147).epsilon(1e-12));

    // without disturbance all three coincide
    for (int i = 0; i < 200; ++i) {
        Vec x = vec2(oracle::uniform(-4, 4), oracle::uniform(-4, 4));
        auto w = h_d_and_h_dT(b, alpha, sched, 0.0, x);
        CHECK(w.h_d == doctest::Approx(w.h));
        CHECK(w.h_dT == doctest::Approx(w.h));
    }
}

TEST_CASE("expanded sets nest around the safe set") {
    DoubleIntegrator di;
    auto b = di.barrier();
    auto alpha = ClassKappaFn::linear(1.0);
    auto sched = EpsilonSchedule::exponential(0.5, 1.0, -1.0);
    for (int i = 0; i < 500; ++i) {
        Vec x = vec2(oracle::uniform(-4, 4), oracle::uniform(-4, 4));
        double d = oracle::uniform(0.0, 4.0);
        auto v = h_d_and_h_dT(b, alpha, sched, d, x);
        CHECK(v.h_d >= v.h);
        CHECK(v.h_dT >= v.h);
        if (d > 1e-6) {
            CHECK(v.h_d > v.h);
            CHECK(v.h_dT > v.h);
        }
    }
}

TEST_CASE("schedule condition slack") {
    auto alpha = ClassKappaFn::linear(1.0);
    auto sched = EpsilonSchedule::exponential(1, 2, -2);

    double s = eps_condition_slack(alpha, sched, 0.0, 3.0);
    CHECK(s == doctest::Approx(2.0 * std::exp(-2.0) + 4.0 / 9.0).epsilon(1e-14));
    CHECK(s == doctest::Approx(0.7151150109176698).epsilon(1e-12));

    for (double h : {-2.0, 0.0, 5.0}) {
        CHECK(eps_condition_slack(alpha, EpsilonSchedule::constant(0.7), h, 3.0) ==
              doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    }

    CHECK(std::isinf(eps_condition_slack(alpha, sched, 1.0, 0.0)));
}

TEST_CASE("schedule condition holds for every exponential schedule with linear alpha") {
    for (int i = 0; i < 10000; ++i) {
        auto alpha = ClassKappaFn::linear(oracle::uniform(0.1, 5.0));
        auto sched = EpsilonSchedule::exponential(oracle::uniform(1e-3, 10.0),
                                                  oracle::uniform(0.0, 10.0),
                                                  oracle::uniform(-10.0, 10.0));
        double h = oracle::uniform(-5.0, 5.0);
        double d = oracle::uniform(1e-3, 10.0);
        CHECK(eps_condition_slack(alpha, sched, h, d) > 0.0);
    }
}

TEST_CASE("positive slack implies the expanded level function is increasing in h") {
    auto alpha = ClassKappaFn::linear(1.0);
    for (int i = 0; i < 1000; ++i) {
        auto sched = EpsilonSchedule::exponential(oracle::uniform(0.1, 3.0),
                                                  oracle::uniform(0.0, 3.0),
                                                  oracle::uniform(-3.0, 3.0));
        double h = oracle::uniform(-3.0, 3.0);
        double d = oracle::uniform(0.1, 4.0);
        if (eps_condition_slack(alpha, sched, h, d) > 1e-6) {
            double dgdh = oracle::fd_derivative(
                [&](double r) { return gamma_tissf(alpha, sched, r, d); }, h);
            CHECK(1.0 + dgdh > 0.0);
        }
    }
}

TEST_CASE("expanded boundary level solves h + gamma_T(h) = 0") {
    auto alpha = ClassKappaFn::linear(1.0);
    auto sched = EpsilonSchedule::exponential(1, 2, -2);
    double hstar = expanded_boundary_level(alpha, sched, 3.0);
    CHECK(hstar + gamma_tissf(alpha, sched, hstar, 3.0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(hstar < 0.0);
    // fixed-gain case is available in closed form
    double flat = expanded_boundary_level(alpha, EpsilonSchedule::constant(1.0), 3.0);
    CHECK(flat == doctest::Approx(-2.25).epsilon(1e-10));
    CHECK(expanded_boundary_level(alpha, sched, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("grid certification: tunable filter on the double integrator") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto alpha = di.alpha();
    auto sched = EpsilonSchedule::exponential(1, 2, -2);
    auto filter = FilterSpec::tissf(di.nominal(), sched);

    GridSpec grid;
    grid.lower = vec2(-3, -3);
    grid.upper = vec2(3, 3);
    grid.resolution = {61, 61};

    auto rep = certify_grid(sys, b, alpha, sched, filter, grid, 3.0);
    CHECK(rep.grid_points == 61 * 61);
    // the additive construction keeps the robust slack identically at the
    // nominal condition slack, which is 1 for this plant
    CHECK(rep.min_tissf_slack == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep.min_eps_cond_slack > 0.0);
    CHECK(rep.boundary_points > 0);
    CHECK(rep.min_grad_norm_on_boundary == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rep.certified);
}

TEST_CASE("grid certification: nominal filter is not certified") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto alpha = di.alpha();
    auto sched = EpsilonSchedule::exponential(1, 2, -2);
    auto filter = FilterSpec::nominal_only(di.nominal());

    GridSpec grid;
    grid.lower = vec2(-3, -3);
    grid.upper = vec2(3, 3);
    grid.resolution = {61, 61};

    auto rep = certify_grid(sys, b, alpha, sched, filter, grid, 3.0);

    // independent scan: slack = 1 - 1/eps(h) minimized over the grid nodes
    double expected = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 61; ++i) {
        for (int j = 0; j < 61; ++j) {
            double x1 = -3.0 + 6.0 * i / 60.0;
            double x2 = -3.0 + 6.0 * j / 60.0;
            double h = x1 - x2;
            expected = std::min(expected, 1.0 - 1.0 / sched.eval(h));
        }
    }
    CHECK(expected < 0.0);
    CHECK(rep.min_tissf_slack == doctest::Approx(expected).epsilon(1e-9));
    CHECK(!rep.certified);
}

TEST_CASE("grid certification: deterministic across worker counts") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto alpha = di.alpha();
    auto sched = EpsilonSchedule::exponential(1, 2, -2);
    auto filter = FilterSpec::nominal_only(di.nominal());

    GridSpec grid;
    grid.lower = vec2(-3, -3);
    grid.upper = vec2(3, 3);
    grid.resolution = {31, 31};

    auto r1 = certify_grid(sys, b, alpha, sched, filter, grid, 3.0, 1);
    auto r4 = certify_grid(sys, b, alpha, sched, filter, grid, 3.0, 4);
    CHECK(r1.min_tissf_slack == r4.min_tissf_slack);
    CHECK(r1.argmin_state == r4.argmin_state);
    CHECK(r1.min_eps_cond_slack == r4.min_eps_cond_slack);
}

TEST_CASE("grid certification: worst case over the exogenous interval") {
    TruckCcc truck;
    auto sys = truck.system();
    auto b = truck.barrier();
    auto alpha = truck.alpha();
    auto sched = EpsilonSchedule::exponential(1.0, 0.5, -5.0);
    auto filter = FilterSpec::tissf(truck.nominal(), sched);

    GridSpec grid;
    grid.lower = Vec(3);
    grid.lower << 15.0, 5.0, 5.0;
    grid.upper = Vec(3);
    grid.upper << 45.0, 20.0, 20.0;
    grid.resolution = {11, 9, 9};
    grid.e_lower = Vec::Constant(1, truck.p.aL_min);
    grid.e_upper = Vec::Constant(1, truck.p.aL_max);
    grid.e_resolution = {14};

    auto rep = certify_grid(sys, b, alpha, sched, filter, grid, 1.0);

    // independent scan: the additive filter keeps the robust slack equal to
    // the nominal condition slack, whose worst case over a_L is explicit
    double expected = std::numeric_limits<double>::infinity();
    const Vec e_zero = Vec::Zero(1);
    for (int i = 0; i < 11; ++i) {
        for (int j = 0; j < 9; ++j) {
            for (int k = 0; k < 9; ++k) {
                Vec x(3);
                x << 15.0 + 30.0 * i / 10.0, 5.0 + 15.0 * j / 8.0, 5.0 + 15.0 * k / 8.0;
                for (int m = 0; m < 14; ++m) {
                    double aL = truck.p.aL_min +
                                (truck.p.aL_max - truck.p.aL_min) * double(m) / 13.0;
                    double slack = (x[2] - x[1]) - truck.dhhat_dvL(x[1], x[2]) * aL +
                                   (-truck.dhhat_dv(x[1], x[2])) * truck.nominal_u(x) +
                                   b.value(x);
                    expected = std::min(expected, slack);
                }
            }
        }
    }
    CHECK(rep.min_tissf_slack == doctest::Approx(expected).epsilon(1e-9));
    // hard lead braking at the boundary defeats the feedforward-free nominal
    CHECK(expected < 0.0);
    CHECK(!rep.certified);
    CHECK(rep.argmin_e[0] == doctest::Approx(truck.p.aL_min));
}

TEST_CASE("grid certification: infeasible node is reported") {
    // drift-only plant whose condition fails where the drift is too weak
    SystemModel sys;
    sys.n = 1;
    sys.m = 1;
    sys.p = 0;
    sys.f = [](const Vec&, const Vec&) { return Vec::Constant(1, -1.0); };
    sys.g = [](const Vec&) { return Mat::Zero(1, 1); };
    Barrier b;
    b.h = [](const Vec& x) { return x[0]; };
    b.grad = [](const Vec&) { return Vec::Constant(1, 1.0); };

    auto alpha = ClassKappaFn::linear(1.0);
    auto sched = EpsilonSchedule::constant(1.0);
    auto nominal = [](const Vec&, const Vec&) { return Vec::Zero(1); };
    auto filter = FilterSpec::tissf_qp(nominal, sched, alpha, 0.0);

    GridSpec grid;
    grid.lower = Vec::Constant(1, -2.0);
    grid.upper = Vec::Constant(1, 2.0);
    grid.resolution = {21};

    auto rep = certify_grid(sys, b, alpha, sched, filter, grid, 1.0);
    CHECK(rep.infeasible_encountered);
    CHECK(!rep.certified);
    // infeasibility needs h < 1 here (Lf_h = -1 >= -h fails)
    CHECK(rep.infeasible_state[0] < 1.0);
}

TEST_CASE("report serialization round-trips the key fields") {
    CertificationReport rep;
    rep.grid_points = 10;
    rep.min_tissf_slack = 0.5;
    rep.argmin_state = vec2(1, 2);
    rep.argmin_e = Vec::Zero(0);
    rep.certified = true;
    std::string kv = rep.to_kv();
    CHECK(kv.find("grid_points=10") != std::string::npos);
    CHECK(kv.find("min_tissf_slack=0.5") != std::string::npos);
    CHECK(kv.find("certified=1") != std::string::npos);
}
