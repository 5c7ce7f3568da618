#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tissf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inconsistent vector/matrix dimensions at an API boundary.
struct DimensionError : Error {
    using Error::Error;
};

/// A NaN or Inf reached a place that admits only finite values.
struct NonFiniteError : Error {
    using Error::Error;
};

void require_finite(const Vec& v, const std::string& what);
void require_finite(double v, const std::string& what);

/// Control-affine dynamics  xdot = f(x, e) + g(x) u  with an exogenous
/// measured channel e (dimension p, possibly 0).
struct SystemModel {
    int n = 0;
    int m = 0;
    int p = 0;
    std::function<Vec(const Vec& x, const Vec& e)> f;
    std::function<Mat(const Vec& x)> g;
    /// Optional post-step projection onto the admissible state region
    /// (e.g. clamping velocities at zero); identity when absent.
    std::function<void(Vec& x)> project_state;

    Vec drift(const Vec& x, const Vec& e) const;
    Mat input_matrix(const Vec& x) const;
};

/// Continuously differentiable scalar h with its gradient (row vector).
/// The 0-superlevel set of h is the safe set.
struct Barrier {
    std::function<double(const Vec& x)> h;
    std::function<Vec(const Vec& x)> grad;

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
};

/// Extended class-K-infinity comparison function. v1 supports the linear
/// family alpha(r) = c*r, carrying the inverse and its derivative so that
/// nonlinear variants can be added without touching theorem-side code.
class ClassKappaFn {
public:
    static ClassKappaFn linear(double gain);

    double operator()(double r) const { return eval(r); }
    double eval(double r) const;
    double inv(double r) const;
    double inv_deriv(double r) const;
    double gain() const { return gain_; }

private:
    explicit ClassKappaFn(double gain);
    double gain_ = 1.0;
};

/// The tunable robustness gain eps(h) > 0 and its derivative.
/// Constant recovers the fixed-gain (non-tunable) robust filter.
class EpsilonSchedule {
public:
    enum class Kind { constant, exponential };

    static EpsilonSchedule constant(double eps0);
    /// eps(h) = eps0 * exp(lambda1*h + lambda0), lambda1 >= 0.
    static EpsilonSchedule exponential(double eps0, double lambda1, double lambda0);

    double eval(double h) const;
    double deriv(double h) const;

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::constant; }
    double eps0() const { return eps0_; }
    double lambda1() const { return lambda1_; }
    double lambda0() const { return lambda0_; }
    std::string describe() const;

private:
    EpsilonSchedule(Kind k, double eps0, double l1, double l0);
    Kind kind_ = Kind::constant;
    double eps0_ = 1.0;
    double lambda1_ = 0.0;
    double lambda0_ = 0.0;
};

/// A disturbance sample exceeded the signal's declared sup-norm bound.
struct DisturbanceBoundError : Error {
    using Error::Error;
};

/// Scalar input-channel disturbance d(t) (or d(x) for the drag variant)
/// with a declared bound ||d||_inf. Every emitted sample is audited
/// against the bound; exceeding it throws DisturbanceBoundError.
class DisturbanceSignal {
public:
    enum class Kind { zero, sinusoid, constant_bias, sampled_series, state_drag, sum };

    static DisturbanceSignal zero();
    static DisturbanceSignal sinusoid(double amplitude, double omega, double phase = 0.0);
    static DisturbanceSignal constant_bias(double bias);
    /// Piecewise-linear interpolation over (t, value) samples, holding the
    /// boundary value outside the sampled range.
    static DisturbanceSignal sampled_series(std::vector<double> times, std::vector<double> values,
                                            double declared_bound);
    /// d = -(c0 + c1 * v^2) where v is the state component at velocity_index.
    /// The bound must be supplied from the caller's velocity envelope.
    static DisturbanceSignal state_drag(double c0, double c1, int velocity_index,
                                        double declared_bound);
    static DisturbanceSignal sum(std::vector<DisturbanceSignal> terms);

    double sample(double t, const Vec& x) const;
    double declared_bound() const { return declared_bound_; }
    Kind kind() const { return kind_; }

    /// Same signal shape rescaled so the declared bound equals new_bound.
    DisturbanceSignal scaled(double new_bound) const;

    double amplitude() const { return amplitude_; }
    double omega() const { return omega_; }
    double phase() const { return phase_; }
    double bias() const { return bias_; }
    double drag_c0() const { return c0_; }
    double drag_c1() const { return c1_; }
    int velocity_index() const { return velocity_index_; }
    const std::vector<double>& series_times() const { return times_; }
    const std::vector<double>& series_values() const { return values_; }
    const std::vector<DisturbanceSignal>& terms() const { return terms_; }
    std::string describe() const;

private:
    DisturbanceSignal() = default;
    double raw_sample(double t, const Vec& x) const;

    Kind kind_ = Kind::zero;
    double declared_bound_ = 0.0;
    double amplitude_ = 0.0, omega_ = 0.0, phase_ = 0.0;
    double bias_ = 0.0;
    double c0_ = 0.0, c1_ = 0.0;
    int velocity_index_ = 0;
    std::vector<double> times_, values_;
    std::vector<DisturbanceSignal> terms_;
};

struct LieDerivatives {
    double Lf_h = 0.0;
    Vec Lg_h;  // row vector, length m
};

/// Lf_h = grad_h(x) . f(x,e), Lg_h = grad_h(x) . g(x).
LieDerivatives lie_derivatives(const SystemModel& sys, const Barrier& b, const Vec& x,
                               const Vec& e);

struct EpsilonValue {
    double eps = 0.0;
    double eps_deriv = 0.0;
};

EpsilonValue epsilon_eval(const EpsilonSchedule& sched, double h);

}  // namespace tissf
