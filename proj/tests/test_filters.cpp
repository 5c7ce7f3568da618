#include "doctest.h"

#include <cmath>

#include "tissf/filters.hpp"
#include "tissf/systems.hpp"
#include "oracles.hpp"

using namespace tissf;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}
const Vec kNoExo = Vec::Zero(0);

// Scalar-input plant with Lg_h identically zero: h = x1 while the input only
// drives x2.
struct DriftOnly {
    SystemModel system(double drift) const {
        SystemModel s;
        s.n = 2;
        s.m = 1;
        s.p = 0;
        s.f = [drift](const Vec&, const Vec&) {
            Vec out(2);
            out << drift, 0.0;
            return out;
        };
        s.g = [](const Vec&) {
            Mat out(2, 1);
            out << 0.0, 1.0;
            return out;
        };
        return s;
    }
    Barrier barrier() const {
        Barrier b;
        b.h = [](const Vec& x) { return x[0]; };
        b.grad = [](const Vec&) { return vec2(1.0, 0.0); };
        return b;
    }
};

}  // namespace

TEST_CASE("cbf condition slack boundary") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto alpha = di.alpha();
    // pick u so hdot = -alpha(h) exactly: Lf_h + Lg_h u = -h
    Vec x = vec2(1.3, -0.4);
    auto ld = lie_derivatives(sys, b, x, kNoExo);
    Vec u(1);
    u[0] = (-b.value(x) - ld.Lf_h) / ld.Lg_h[0];
    CHECK(cbf_condition_slack(sys, b, alpha, x, kNoExo, u) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("issf additive filter values") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();

    auto spec1 = FilterSpec::issf(di.nominal(), 1.0);
    CHECK(issf_additive(spec1, sys, b, vec2(0, 0), kNoExo)[0] ==
          doctest::Approx(-2.0).epsilon(1e-14));

    auto spec01 = FilterSpec::issf(di.nominal(), 0.1);
    CHECK(issf_additive(spec01, sys, b, vec2(0, 0), kNoExo)[0] ==
          doctest::Approx(-11.0).epsilon(1e-13));

    // Lg_h = 0 leaves the nominal input untouched
    DriftOnly plant;
    auto sys0 = plant.system(1.0);
    auto b0 = plant.barrier();
    auto nominal = [](const Vec&, const Vec&) { return Vec::Constant(1, 0.7); };
    auto spec0 = FilterSpec::issf(nominal, 0.5);
    CHECK(issf_additive(spec0, sys0, b0, vec2(1, 1), kNoExo)[0] == doctest::Approx(0.7));
}

TEST_CASE("tissf additive filter values") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto spec = FilterSpec::tissf(di.nominal(), EpsilonSchedule::exponential(1, 2, -2));

    // h=0: u = -1 - e^2
    CHECK(tissf_additive(spec, sys, b, vec2(0, 0), kNoExo)[0] ==
          doctest::Approx(-1.0 - std::exp(2.0)).epsilon(1e-14));
    CHECK(tissf_additive(spec, sys, b, vec2(0, 0), kNoExo)[0] ==
          doctest::Approx(-8.38905609893065).epsilon(1e-14));
    // h=1: eps = 1, k = 0, so u = -1
    CHECK(tissf_additive(spec, sys, b, vec2(1, 0), kNoExo)[0] ==
          doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("tissf additive with constant schedule reduces to issf additive") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    for (double eps0 : {0.1, 1.0, 3.5}) {
        auto t = FilterSpec::tissf(di.nominal(), EpsilonSchedule::constant(eps0));
        auto s = FilterSpec::issf(di.nominal(), eps0);
        for (int i = 0; i < 300; ++i) {
            Vec x = vec2(oracle::uniform(-4, 4), oracle::uniform(-4, 4));
            CHECK(tissf_additive(t, sys, b, x, kNoExo)[0] ==
                  issf_additive(s, sys, b, x, kNoExo)[0]);
        }
    }
}

TEST_CASE("additive intervention at a given level shrinks as lambda1 grows") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    Vec x = vec2(2.0, 0.0);  // h = 2
    double prev = std::numeric_limits<double>::infinity();
    for (double l1 : {0.0, 1.0, 2.0}) {
        auto spec = FilterSpec::tissf(di.nominal(), EpsilonSchedule::exponential(1.0, l1, -2.0));
        auto out = apply_filter(spec, sys, b, x, kNoExo);
        double intervention = (out.u - out.u_nominal).norm();
        CHECK(intervention == doctest::Approx(std::exp(-(2.0 * l1 - 2.0))).epsilon(1e-12));
        CHECK(intervention < prev);
        prev = intervention;
    }
}

TEST_CASE("tissf qp: frozen example and dense-scan oracle") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto spec = FilterSpec::tissf_qp(di.nominal(), EpsilonSchedule::exponential(1, 2, -2),
                                     ClassKappaFn::linear(1.0), 0.0);

    // active constraint at the origin: u = k - (e^2 - 1)
    Vec u = tissf_qp(spec, sys, b, vec2(0, 0), kNoExo);
    CHECK(u[0] == doctest::Approx(-std::exp(2.0)).epsilon(1e-13));
    CHECK(u[0] == doctest::Approx(-7.38905609893065).epsilon(1e-13));

    // dense sampling oracle over u in [-20, 20]
    auto ld = lie_derivatives(sys, b, vec2(0, 0), kNoExo);
    double h = b.value(vec2(0, 0));
    double rhs = -h + ld.Lg_h.squaredNorm() / spec.sched.eval(h);
    double ref = oracle::dense_qp_scan(di.nominal_u(vec2(0, 0)), ld.Lg_h[0], rhs - ld.Lf_h,
                                       -20.0, 20.0);
    CHECK(u[0] == doctest::Approx(ref).epsilon(1e-4));

    // inactive region: far inside the safe set the nominal passes through
    Vec deep = vec2(5.0, 0.0);
    u = tissf_qp(spec, sys, b, deep, kNoExo);
    CHECK(u[0] == doctest::Approx(di.nominal_u(deep)).epsilon(1e-15));
}

TEST_CASE("tissf qp: vacuous and infeasible zero-direction cases") {
    DriftOnly plant;
    auto b = plant.barrier();
    auto nominal = [](const Vec&, const Vec&) { return Vec::Constant(1, 0.3); };
    auto sched = EpsilonSchedule::constant(1.0);
    auto alpha = ClassKappaFn::linear(1.0);

    // drift satisfies the condition: u = k
    auto sys_ok = plant.system(1.0);
    auto spec = FilterSpec::tissf_qp(nominal, sched, alpha, 0.0);
    Vec x = vec2(0.5, 0.0);  // h = 0.5, need Lf_h >= -0.5
    CHECK(tissf_qp(spec, sys_ok, b, x, kNoExo)[0] == doctest::Approx(0.3));

    // drift violates it and no input can help
    auto sys_bad = plant.system(-1.0);
    CHECK_THROWS_AS(tissf_qp(spec, sys_bad, b, x, kNoExo), InfeasibleError);
}

TEST_CASE("cbf qp: nominal passes through, adversarial nominal is projected") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto alpha = di.alpha();

    auto spec = FilterSpec::cbf_qp(di.nominal(), alpha, 0.0);
    for (int i = 0; i < 200; ++i) {
        Vec x = vec2(oracle::uniform(-3, 3), oracle::uniform(-3, 3));
        CHECK(cbf_qp(spec, sys, b, x, kNoExo)[0] ==
              doctest::Approx(di.nominal_u(x)).epsilon(1e-15));
    }

    // shifting the nominal toward the unsafe side activates the projection
    auto adversarial = [&](const Vec& x, const Vec&) {
        return Vec::Constant(1, di.nominal_u(x) + 10.0);
    };
    auto spec_adv = FilterSpec::cbf_qp(adversarial, alpha, 0.0);
    Vec x0 = vec2(0, 0);
    Vec u = cbf_qp(spec_adv, sys, b, x0, kNoExo);
    // constraint boundary: slack exactly zero
    CHECK(cbf_condition_slack(sys, b, alpha, x0, kNoExo, u) ==
          doctest::Approx(0.0).epsilon(1e-12));
    auto ld = lie_derivatives(sys, b, x0, kNoExo);
    double ref = oracle::dense_qp_scan(di.nominal_u(x0) + 10.0, ld.Lg_h[0],
                                       -b.value(x0) - ld.Lf_h, -30.0, 30.0);
    CHECK(u[0] == doctest::Approx(ref).epsilon(1e-4));
}

TEST_CASE("qp optimality and feasibility over random draws") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto alpha = di.alpha();

    for (int i = 0; i < 1000; ++i) {
        Vec x = vec2(oracle::uniform(-3, 3), oracle::uniform(-3, 3));
        auto sched = EpsilonSchedule::exponential(oracle::uniform(0.1, 3.0),
                                                  oracle::uniform(0.0, 3.0),
                                                  oracle::uniform(-3.0, 3.0));
        auto spec = FilterSpec::tissf_qp(di.nominal(), sched, alpha, 0.0);
        Vec u = tissf_qp(spec, sys, b, x, kNoExo);

        double slack = tissf_condition_slack(sys, b, alpha, sched, x, kNoExo, u);
        CHECK(slack >= -1e-9);

        double k = di.nominal_u(x);
        double cost = 0.5 * (u[0] - k) * (u[0] - k);
        auto ld = lie_derivatives(sys, b, x, kNoExo);
        double c = -b.value(x) + ld.Lg_h.squaredNorm() / sched.eval(b.value(x)) - ld.Lf_h;
        for (int j = 0; j < 100; ++j) {
            double cand = oracle::uniform(-40.0, 40.0);
            if (ld.Lg_h[0] * cand < c) continue;  // infeasible sample
            CHECK(0.5 * (cand - k) * (cand - k) >= cost - 1e-9);
        }
    }
}

TEST_CASE("tissf condition slack is identically one for the built-in example") {
    DoubleIntegrator di;
    auto sys = di.system();
    auto b = di.barrier();
    auto alpha = di.alpha();
    auto sched = EpsilonSchedule::exponential(1, 2, -2);
    auto spec = FilterSpec::tissf(di.nominal(), sched);
    for (int i = 0; i < 500; ++i) {
        Vec x = vec2(oracle::uniform(-4, 4), oracle::uniform(-4, 4));
        Vec u = tissf_additive(spec, sys, b, x, kNoExo);
        // tolerance reflects cancellation of the 1/eps(h) terms deep below
        // the boundary, where they reach ~1e8
        CHECK(tissf_condition_slack(sys, b, alpha, sched, x, kNoExo, u) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("saturation clamps elementwise and is idempotent") {
    Vec lo = Vec::Constant(1, -6.0), hi = Vec::Constant(1, 2.0);

    auto r = saturate(Vec::Constant(1, -8.39), lo, hi);
    CHECK(r.u[0] == doctest::Approx(-6.0));
    CHECK(r.saturated);

    r = saturate(Vec::Constant(1, 0.0), lo, hi);
    CHECK(r.u[0] == doctest::Approx(0.0));
    CHECK(!r.saturated);

    r = saturate(Vec::Constant(1, 3.0), lo, hi);
    CHECK(r.u[0] == doctest::Approx(2.0));
    CHECK(r.saturated);

    for (int i = 0; i < 100; ++i) {
        Vec u = Vec::Constant(1, oracle::uniform(-20, 20));
        auto once = saturate(u, lo, hi);
        auto twice = saturate(once.u, lo, hi);
        CHECK(twice.u[0] == once.u[0]);
        CHECK(!twice.saturated);
    }

    CHECK_THROWS(saturate(Vec::Constant(1, 0.0), hi, lo));
}
