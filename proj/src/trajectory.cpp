#include "tissf/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tissf {

namespace {

void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

double Trajectory::min_h() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) m = std::min(m, r.h);
    return m;
}

double Trajectory::min_h_dT() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) m = std::min(m, r.h_dT);
    return m;
}

long Trajectory::saturation_count() const {
    long c = 0;
    for (const auto& r : rows) c += r.saturated ? 1 : 0;
    return c;
}

std::string Trajectory::to_csv() const {
    std::string out;
    if (rows.empty()) return out;
    const auto& r0 = rows.front();
    out += "t";
    for (int i = 0; i < r0.x.size(); ++i) out += ",x" + std::to_string(i + 1);
    for (int i = 0; i < r0.u_nominal.size(); ++i) out += ",u_nom" + std::to_string(i + 1);
    for (int i = 0; i < r0.u_applied.size(); ++i) out += ",u_app" + std::to_string(i + 1);
    for (int i = 0; i < r0.d.size(); ++i) out += ",d" + std::to_string(i + 1);
    for (int i = 0; i < r0.e.size(); ++i) out += ",e" + std::to_string(i + 1);
    out += ",h,gamma_T,h_dT,saturated\n";

    for (const auto& r : rows) {
        append_num(out, r.t);
        for (int i = 0; i < r.x.size(); ++i) { out += ','; append_num(out, r.x[i]); }
        for (int i = 0; i < r.u_nominal.size(); ++i) { out += ','; append_num(out, r.u_nominal[i]); }
        for (int i = 0; i < r.u_applied.size(); ++i) { out += ','; append_num(out, r.u_applied[i]); }
        for (int i = 0; i < r.d.size(); ++i) { out += ','; append_num(out, r.d[i]); }
        for (int i = 0; i < r.e.size(); ++i) { out += ','; append_num(out, r.e[i]); }
        out += ','; append_num(out, r.h);
        out += ','; append_num(out, r.gamma_T);
        out += ','; append_num(out, r.h_dT);
        out += ',';
        out += r.saturated ? '1' : '0';
        out += '\n';
    }
    return out;
}

void Trajectory::write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << to_csv();
}

}  // namespace tissf
