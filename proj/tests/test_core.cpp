#include "doctest.h"

#include <cmath>

#include "tissf/core.hpp"
#include "tissf/systems.hpp"
#include "oracles.hpp"

using namespace tissf;

namespace {
Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}
Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}
const Vec kNoExo = Vec::Zero(0);
}  // namespace

TEST_CASE("lie derivatives: double integrator") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();

    // grad h = (1,-1), f = (-x2, 0), g = (0,1)^T
    auto ld = lie_derivatives(sys, b, vec2(0, 0), kNoExo);
    CHECK(ld.Lf_h == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(ld.Lg_h[0] == doctest::Approx(-1.0).epsilon(1e-15));

    ld = lie_derivatives(sys, b, vec2(0, 1), kNoExo);
    CHECK(ld.Lf_h == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(ld.Lg_h[0] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("lie derivatives: truck includes the lead-acceleration term") {
    TruckCcc truck;
    auto sys = truck.system();
    auto b = truck.barrier();

    Vec e = Vec::Zero(1);
    auto ld = lie_derivatives(sys, b, vec3(20.75, 15, 15), e);
    CHECK(ld.Lf_h == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ld.Lg_h[0] == doctest::Approx(-1.55).epsilon(1e-12));

    // a_L enters Lf_h through -dhhat/dv_L
    e[0] = -8.0;
    ld = lie_derivatives(sys, b, vec3(20.75, 15, 15), e);
    // dhhat/dv_L = 0.6 - 0.45 - 0.9 = -0.75, so Lf_h = -(-0.75)(-8) = -6
    CHECK(ld.Lf_h == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("lie derivatives: dimension and finiteness errors") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    CHECK_THROWS_AS(lie_derivatives(sys, b, vec3(0, 0, 0), kNoExo), DimensionError);
    Vec bad = vec2(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(lie_derivatives(sys, b, bad, kNoExo), NonFiniteError);
}

TEST_CASE("epsilon schedules") {
    auto exp_sched = EpsilonSchedule::exponential(1.0, 2.0, -2.0);
    auto ev = epsilon_eval(exp_sched, 0.0);
    CHECK(ev.eps == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(ev.eps_deriv == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));

    ev = epsilon_eval(exp_sched, 1.0);
    CHECK(ev.eps == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ev.eps_deriv == doctest::Approx(2.0).epsilon(1e-14));

    auto const_sched = EpsilonSchedule::constant(0.1);
    for (double h : {-5.0, 0.0, 3.7}) {
        ev = epsilon_eval(const_sched, h);
        CHECK(ev.eps == 0.1);
        CHECK(ev.eps_deriv == 0.0);
    }

    CHECK_THROWS(EpsilonSchedule::constant(0.0));
    CHECK_THROWS(EpsilonSchedule::exponential(1.0, -0.5, 0.0));
}

TEST_CASE("epsilon schedule derivative matches finite differences") {
    auto sched = EpsilonSchedule::exponential(0.7, 1.3, -0.4);
    for (int i = 0; i < 200; ++i) {
        double h = oracle::uniform(-3.0, 3.0);
        double fd = oracle::fd_derivative([&](double r) { return sched.eval(r); }, h);
        CHECK(sched.deriv(h) == doctest::Approx(fd).epsilon(1e-6));
        // ratio eps'/eps equals lambda1 exactly
        CHECK(sched.deriv(h) / sched.eval(h) == doctest::Approx(1.3).epsilon(1e-15));
    }
}

TEST_CASE("linear class-K inverse round trip") {
    for (double gain : {1.0, 2.0, 0.35}) {
        auto alpha = ClassKappaFn::linear(gain);
        for (int i = 0; i < 1000; ++i) {
            double r = oracle::uniform(-100.0, 100.0);
            CHECK(alpha(alpha.inv(r)) == doctest::Approx(r).epsilon(1e-10));
        }
        for (int i = 0; i < 100; ++i) {
            double r = oracle::uniform(-50.0, 50.0);
            double fd = oracle::fd_derivative([&](double s) { return alpha.inv(s); }, r);
            CHECK(alpha.inv_deriv(r) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
    CHECK_THROWS(ClassKappaFn::linear(0.0));
    CHECK_THROWS(ClassKappaFn::linear(-1.0));
}

TEST_CASE("disturbance signals respect their declared bound") {
    Vec x = vec3(30.0, 18.0, 12.0);
    auto check_bound = [&](const DisturbanceSignal& d) {
        double worst = 0.0;
        for (int i = 0; i < 100000; ++i) {
            double t = 40.0 * double(i) / 99999.0;
            worst = std::max(worst, std::abs(d.sample(t, x)));
        }
        CHECK(worst <= d.declared_bound() + 1e-12);
    };
    check_bound(DisturbanceSignal::zero());
    check_bound(DisturbanceSignal::sinusoid(3.0, 1.0, 0.5));
    check_bound(DisturbanceSignal::constant_bias(-0.8));
    check_bound(DisturbanceSignal::sampled_series({0, 1, 2, 3}, {0.5, -1.0, 0.2, 0.9}, 1.0));
    check_bound(DisturbanceSignal::state_drag(0.1, 0.002, 1, 0.1 + 0.002 * 18.0 * 18.0));
    check_bound(DisturbanceSignal::sum({DisturbanceSignal::sinusoid(0.5, 2.0),
                                        DisturbanceSignal::constant_bias(0.3)}));
}

TEST_CASE("disturbance bound violation is an error") {
    // drag declared for v <= 10 but evaluated at v = 18
    auto drag = DisturbanceSignal::state_drag(0.1, 0.002, 1, 0.1 + 0.002 * 100.0);
    Vec x = vec3(30.0, 18.0, 12.0);
    CHECK_THROWS_AS(drag.sample(0.0, x), DisturbanceBoundError);
    CHECK_THROWS_AS(DisturbanceSignal::sampled_series({0, 1}, {0.0, 2.0}, 1.0),
                    DisturbanceBoundError);
}

TEST_CASE("sampled series interpolates linearly and holds ends") {
    auto d = DisturbanceSignal::sampled_series({1.0, 2.0, 4.0}, {1.0, -1.0, 1.0}, 1.0);
    Vec x = Vec::Zero(1);
    CHECK(d.sample(0.0, x) == doctest::Approx(1.0));   // held before range
    CHECK(d.sample(1.5, x) == doctest::Approx(0.0));
    CHECK(d.sample(3.0, x) == doctest::Approx(0.0));
    CHECK(d.sample(10.0, x) == doctest::Approx(1.0));  // held after range
}

TEST_CASE("disturbance rescaling preserves shape") {
    auto d = DisturbanceSignal::sinusoid(3.0, 1.0, 0.0);
    auto half = d.scaled(1.5);
    Vec x = Vec::Zero(1);
    CHECK(half.declared_bound() == doctest::Approx(1.5));
    CHECK(half.sample(0.7, x) == doctest::Approx(0.5 * d.sample(0.7, x)));
}
