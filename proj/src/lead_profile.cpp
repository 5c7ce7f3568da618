#include "tissf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tissf {

LeadProfile::LeadProfile(std::vector<double> t, std::vector<double> v, std::vector<double> a)
    : t_(std::move(t)), v_(std::move(v)), a_(std::move(a)) {
    if (t_.empty() || t_.size() != v_.size() || t_.size() != a_.size()) {
        throw ProfileError("lead profile needs matching, nonempty t/v/a lists");
    }
    for (size_t i = 1; i < t_.size(); ++i) {
        if (!(t_[i] > t_[i - 1])) throw ProfileError("lead profile times must be increasing");
    }
}

double LeadProfile::interp(const std::vector<double>& ys, double t) const {
    if (t <= t_.front()) return ys.front();
    if (t >= t_.back()) return ys.back();
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    size_t i = static_cast<size_t>(it - t_.begin());
    double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

double LeadProfile::v_at(double t) const { return interp(v_, t); }
double LeadProfile::a_at(double t) const { return interp(a_, t); }

void LeadProfile::validate(double a_min, double a_max, double rel_tol) const {
    double v_scale = 0.0;
    for (size_t i = 0; i < t_.size(); ++i) {
        if (!std::isfinite(t_[i]) || !std::isfinite(v_[i]) || !std::isfinite(a_[i])) {
            throw ProfileError("lead profile row " + std::to_string(i) + ": non-finite value");
        }
        if (v_[i] < 0.0) {
            throw ProfileError("lead profile row " + std::to_string(i) + ": v_L < 0");
        }
        if (a_[i] < a_min - 1e-9 || a_[i] > a_max + 1e-9) {
            throw ProfileError("lead profile row " + std::to_string(i) +
                               ": a_L outside [" + std::to_string(a_min) + ", " +
                               std::to_string(a_max) + "]");
        }
        v_scale = std::max(v_scale, std::abs(v_[i]));
    }
    // v_L must agree with the running trapezoid integral of a_L.
    double tol = rel_tol * std::max(1.0, v_scale);
    double v_int = v_.front();
    for (size_t i = 1; i < t_.size(); ++i) {
        v_int += 0.5 * (a_[i - 1] + a_[i]) * (t_[i] - t_[i - 1]);
        if (std::abs(v_int - v_[i]) > tol) {
            throw ProfileError("lead profile row " + std::to_string(i) +
                               ": v_L inconsistent with integrated a_L");
        }
    }
}

void LeadProfile::write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << "t,v_L,a_L\n";
    char buf[128];
    for (size_t i = 0; i < t_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t_[i], v_[i], a_[i]);
        f << buf;
    }
}

LeadProfile synth_emergency_brake(double v0, double a_min, double t_start,
                                  std::optional<double> jerk_limit, double sample_dt,
                                  double tail) {
    if (!(v0 >= 0.0)) throw std::invalid_argument("v0 must be nonnegative");
    if (!(a_min < 0.0)) throw std::invalid_argument("a_min must be negative");
    if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");
    if (!(t_start >= 0.0)) throw std::invalid_argument("t_start must be nonnegative");

    // Deceleration pulse a(tau), tau measured from t_start. Rectangular by
    // default; with a jerk limit, trapezoidal (or triangular when v0 is too
    // small to reach a_min).
    double amag = -a_min;
    double t_ramp = 0.0, t_hold = 0.0, peak = amag;
    if (v0 > 0.0) {
        if (jerk_limit) {
            double J = *jerk_limit;
            if (!(J > 0.0)) throw std::invalid_argument("jerk limit must be positive");
            t_ramp = amag / J;
            double v_ramps = amag * t_ramp;  // speed lost in both ramps combined
            if (v_ramps <= v0) {
                t_hold = (v0 - v_ramps) / amag;
            } else {
                peak = std::sqrt(v0 * J);
                t_ramp = peak / J;
                t_hold = 0.0;
            }
        } else {
            t_hold = v0 / amag;
        }
    }
    double t_stop_rel = 2.0 * t_ramp + t_hold;

    auto accel_at = [&](double tau) -> double {
        if (v0 <= 0.0) return 0.0;
        if (tau < 0.0 || tau >= t_stop_rel) return 0.0;
        if (tau < t_ramp) return -peak * (tau / t_ramp);
        if (tau < t_ramp + t_hold) return -peak;
        return -peak * ((t_stop_rel - tau) / t_ramp);
    };
    auto speed_at = [&](double tau) -> double {
        if (v0 <= 0.0) return 0.0;
        if (tau <= 0.0) return v0;
        if (tau >= t_stop_rel) return 0.0;
        double v;
        if (tau < t_ramp) {
            v = v0 - 0.5 * peak * tau * tau / t_ramp;
        } else if (tau < t_ramp + t_hold) {
            v = v0 - 0.5 * peak * t_ramp - peak * (tau - t_ramp);
        } else {
            double r = t_stop_rel - tau;
            v = 0.5 * peak * r * r / t_ramp;
        }
        return std::max(v, 0.0);
    };

    double t_end = t_start + t_stop_rel + tail;
    size_t count = static_cast<size_t>(std::ceil(t_end / sample_dt)) + 1;
    std::vector<double> ts(count), vs(count), as(count);
    for (size_t i = 0; i < count; ++i) {
        double t = std::min(double(i) * sample_dt, t_end);
        ts[i] = t;
        vs[i] = speed_at(t - t_start);
        as[i] = accel_at(t - t_start);
    }
    // Rectangular pulses jump; place exact breakpoint samples so the
    // interpolated profile stays kinematically consistent.
    auto insert_break = [&](double t) {
        if (t <= 0.0 || t >= t_end) return;
        auto it = std::lower_bound(ts.begin(), ts.end(), t);
        size_t i = static_cast<size_t>(it - ts.begin());
        if (it != ts.end() && std::abs(*it - t) < 1e-12) {
            vs[i] = speed_at(t - t_start);
            as[i] = accel_at(t - t_start);
            return;
        }
        ts.insert(ts.begin() + i, t);
        vs.insert(vs.begin() + i, speed_at(t - t_start));
        as.insert(as.begin() + i, accel_at(t - t_start));
    };
    if (v0 > 0.0) {
        const double eps = 1e-9;
        insert_break(t_start - eps);
        insert_break(t_start);
        insert_break(t_start + t_ramp);
        insert_break(t_start + t_ramp + t_hold);
        insert_break(t_start + t_stop_rel - eps);
        insert_break(t_start + t_stop_rel);
    }
    return LeadProfile(std::move(ts), std::move(vs), std::move(as));
}

LeadProfile ingest_lead_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ProfileError("cannot open lead profile: " + path);
    std::vector<double> ts, vs, as;
    std::string line;
    size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(f, line)) {
        ++lineno;
        // strip trailing CR from CRLF files
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            std::string squashed;
            for (char c : line) {
                if (c != ' ' && c != '\t') squashed += c;
            }
            if (squashed != "t,v_L,a_L") {
                throw ProfileError("lead profile line " + std::to_string(lineno) +
                                   ": expected header t,v_L,a_L");
            }
            continue;
        }
        double vals[3];
        std::istringstream ss(line);
        std::string field;
        int k = 0;
        while (std::getline(ss, field, ',')) {
            if (k >= 3) break;
            try {
                size_t used = 0;
                vals[k] = std::stod(field, &used);
                while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
                if (used != field.size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw ProfileError("lead profile line " + std::to_string(lineno) +
                                   ": malformed field '" + field + "'");
            }
            ++k;
        }
        if (k != 3) {
            throw ProfileError("lead profile line " + std::to_string(lineno) +
                               ": expected 3 comma-separated fields");
        }
        ts.push_back(vals[0]);
        vs.push_back(vals[1]);
        as.push_back(vals[2]);
    }
    if (ts.empty()) throw ProfileError("lead profile has no data rows: " + path);
    LeadProfile p(std::move(ts), std::move(vs), std::move(as));
    p.validate();
    return p;
}

}  // namespace tissf
