#include "tissf/core.hpp"

#include <algorithm>
#include <sstream>

namespace tissf {

void require_finite(const Vec& v, const std::string& what) {
    if (!v.allFinite()) {
        throw NonFiniteError(what + " contains a non-finite value");
    }
}

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) {
        throw NonFiniteError(what + " is non-finite");
    }
}

Vec SystemModel::drift(const Vec& x, const Vec& e) const {
    if (x.size() != n) throw DimensionError("state dimension mismatch in drift evaluation");
    if (e.size() != p) throw DimensionError("exogenous dimension mismatch in drift evaluation");
    require_finite(x, "state");
    Vec out = f(x, e);
    if (out.size() != n) throw DimensionError("drift map returned wrong dimension");
    require_finite(out, "f(x,e)");
    return out;
}

Mat SystemModel::input_matrix(const Vec& x) const {
    if (x.size() != n) throw DimensionError("state dimension mismatch in input-matrix evaluation");
    Mat out = g(x);
    if (out.rows() != n || out.cols() != m) {
        throw DimensionError("input matrix has wrong shape");
    }
    if (!out.allFinite()) throw NonFiniteError("g(x) contains a non-finite value");
    return out;
}

double Barrier::value(const Vec& x) const {
    double v = h(x);
    require_finite(v, "h(x)");
    return v;
}

Vec Barrier::gradient(const Vec& x) const {
    Vec gr = grad(x);
    require_finite(gr, "grad_h(x)");
    return gr;
}

ClassKappaFn::ClassKappaFn(double gain) : gain_(gain) {}

ClassKappaFn ClassKappaFn::linear(double gain) {
    if (!(gain > 0.0)) throw std::invalid_argument("class-K gain must be positive");
    return ClassKappaFn(gain);
}

double ClassKappaFn::eval(double r) const { return gain_ * r; }
double ClassKappaFn::inv(double r) const { return r / gain_; }
double ClassKappaFn::inv_deriv(double /*r*/) const { return 1.0 / gain_; }

EpsilonSchedule::EpsilonSchedule(Kind k, double eps0, double l1, double l0)
    : kind_(k), eps0_(eps0), lambda1_(l1), lambda0_(l0) {}

EpsilonSchedule EpsilonSchedule::constant(double eps0) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
    return EpsilonSchedule(Kind::constant, eps0, 0.0, 0.0);
}

EpsilonSchedule EpsilonSchedule::exponential(double eps0, double lambda1, double lambda0) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
    if (!(lambda1 >= 0.0)) throw std::invalid_argument("lambda1 must be nonnegative");
    if (!std::isfinite(lambda0)) throw std::invalid_argument("lambda0 must be finite");
    return EpsilonSchedule(Kind::exponential, eps0, lambda1, lambda0);
}

double EpsilonSchedule::eval(double h) const {
    require_finite(h, "h");
    if (kind_ == Kind::constant) return eps0_;
    return eps0_ * std::exp(lambda1_ * h + lambda0_);
}

double EpsilonSchedule::deriv(double h) const {
    if (kind_ == Kind::constant) return 0.0;
    return lambda1_ * eval(h);
}

std::string EpsilonSchedule::describe() const {
    std::ostringstream os;
    if (kind_ == Kind::constant) {
        os << "constant(" << eps0_ << ")";
    } else {
        os << "exponential(" << eps0_ << "," << lambda1_ << "," << lambda0_ << ")";
    }
    return os.str();
}

DisturbanceSignal DisturbanceSignal::zero() { return DisturbanceSignal{}; }

DisturbanceSignal DisturbanceSignal::sinusoid(double amplitude, double omega, double phase) {
    DisturbanceSignal d;
    d.kind_ = Kind::sinusoid;
    d.amplitude_ = amplitude;
    d.omega_ = omega;
    d.phase_ = phase;
    d.declared_bound_ = std::abs(amplitude);
    return d;
}

DisturbanceSignal DisturbanceSignal::constant_bias(double bias) {
    DisturbanceSignal d;
    d.kind_ = Kind::constant_bias;
    d.bias_ = bias;
    d.declared_bound_ = std::abs(bias);
    return d;
}

DisturbanceSignal DisturbanceSignal::sampled_series(std::vector<double> times,
                                                    std::vector<double> values,
                                                    double declared_bound) {
    if (times.size() != values.size() || times.empty()) {
        throw std::invalid_argument("sampled series needs matching, nonempty time/value lists");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("sampled series times must be nondecreasing");
    }
    for (double v : values) {
        if (std::abs(v) > declared_bound) {
            throw DisturbanceBoundError("sampled series value exceeds declared bound");
        }
    }
    DisturbanceSignal d;
    d.kind_ = Kind::sampled_series;
    d.times_ = std::move(times);
    d.values_ = std::move(values);
    d.declared_bound_ = declared_bound;
    return d;
}

DisturbanceSignal DisturbanceSignal::state_drag(double c0, double c1, int velocity_index,
                                                double declared_bound) {
    if (velocity_index < 0) throw std::invalid_argument("velocity index must be nonnegative");
    DisturbanceSignal d;
    d.kind_ = Kind::state_drag;
    d.c0_ = c0;
    d.c1_ = c1;
    d.velocity_index_ = velocity_index;
    d.declared_bound_ = declared_bound;
    return d;
}

DisturbanceSignal DisturbanceSignal::sum(std::vector<DisturbanceSignal> terms) {
    DisturbanceSignal d;
    d.kind_ = Kind::sum;
    d.declared_bound_ = 0.0;
    for (const auto& t : terms) d.declared_bound_ += t.declared_bound();
    d.terms_ = std::move(terms);
    return d;
}

double DisturbanceSignal::raw_sample(double t, const Vec& x) const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::sinusoid:
            return amplitude_ * std::sin(omega_ * t + phase_);
        case Kind::constant_bias:
            return bias_;
        case Kind::sampled_series: {
            if (t <= times_.front()) return values_.front();
            if (t >= times_.back()) return values_.back();
            auto it = std::upper_bound(times_.begin(), times_.end(), t);
            size_t i = static_cast<size_t>(it - times_.begin());
            double t0 = times_[i - 1], t1 = times_[i];
            double w = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
            return values_[i - 1] + w * (values_[i] - values_[i - 1]);
        }
        case Kind::state_drag: {
            if (velocity_index_ >= x.size()) {
                throw DimensionError("state drag velocity index out of range");
            }
            double v = x[velocity_index_];
            return -(c0_ + c1_ * v * v);
        }
        case Kind::sum: {
            double s = 0.0;
            for (const auto& term : terms_) s += term.sample(t, x);
            return s;
        }
    }
    return 0.0;
}

double DisturbanceSignal::sample(double t, const Vec& x) const {
    double d = raw_sample(t, x);
    require_finite(d, "disturbance sample");
    if (std::abs(d) > declared_bound_ + 1e-12 * std::max(1.0, declared_bound_)) {
        std::ostringstream os;
        os << "disturbance sample " << d << " at t=" << t << " exceeds declared bound "
           << declared_bound_;
        throw DisturbanceBoundError(os.str());
    }
    return d;
}

DisturbanceSignal DisturbanceSignal::scaled(double new_bound) const {
    if (!(new_bound >= 0.0)) throw std::invalid_argument("bound must be nonnegative");
    DisturbanceSignal d = *this;
    if (kind_ == Kind::zero) return d;
    if (declared_bound_ <= 0.0) {
        throw std::invalid_argument("cannot rescale a signal with zero declared bound");
    }
    double s = new_bound / declared_bound_;
    d.declared_bound_ = new_bound;
    d.amplitude_ *= s;
    d.bias_ *= s;
    d.c0_ *= s;
    d.c1_ *= s;
    for (auto& v : d.values_) v *= s;
    for (auto& term : d.terms_) term = term.scaled(term.declared_bound() * s);
    return d;
}

std::string DisturbanceSignal::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::zero: os << "zero"; break;
        case Kind::sinusoid:
            os << "sinusoid(" << amplitude_ << "," << omega_ << "," << phase_ << ")";
            break;
        case Kind::constant_bias: os << "constant_bias(" << bias_ << ")"; break;
        case Kind::sampled_series: os << "sampled_series(" << times_.size() << " samples)"; break;
        case Kind::state_drag: os << "state_drag(" << c0_ << "," << c1_ << ")"; break;
        case Kind::sum: os << "sum(" << terms_.size() << " terms)"; break;
    }
    return os.str();
}

LieDerivatives lie_derivatives(const SystemModel& sys, const Barrier& b, const Vec& x,
                               const Vec& e) {
    Vec gr = b.gradient(x);
    if (gr.size() != sys.n) throw DimensionError("barrier gradient dimension mismatch");
    Vec fx = sys.drift(x, e);
    Mat gx = sys.input_matrix(x);
    LieDerivatives out;
    out.Lf_h = gr.dot(fx);
    out.Lg_h = (gr.transpose() * gx).transpose();
    require_finite(out.Lf_h, "Lf_h");
    require_finite(out.Lg_h, "Lg_h");
    return out;
}

EpsilonValue epsilon_eval(const EpsilonSchedule& sched, double h) {
    return EpsilonValue{sched.eval(h), sched.deriv(h)};
}

}  // namespace tissf
