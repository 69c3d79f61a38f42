#include "apes/monitors.hpp"

#include <cmath>
#include <cstdio>

#include "apes/errors.hpp"

namespace apes {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double laplacian_h_norm_sq(const SpectralField3D& f) {
    // || Lap_H f ||_2^2 by Parseval
    const Grid& g = f.grid();
    const double tp2 = 4.0 * M_PI * M_PI;
    double s = 0.0;
    for (int m = 0; m <= g.nz; ++m) {
        const double wm = (m == 0) ? 2.0 * g.h : g.h;
        for (int iy = 0; iy < g.ny; ++iy) {
            const double ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx) {
                const double k2 = tp2 * (double(kx) * kx + ky * ky);
                s += (kx == 0 ? 1.0 : 2.0) * wm * k2 * k2 * std::norm(f.at(kx, iy, m));
            }
        }
    }
    return s;
}

double grad_h_dz_norm_sq(const SpectralField3D& f) {
    // || grad_H dz f ||_2^2
    const Grid& g = f.grid();
    const double tp2 = 4.0 * M_PI * M_PI;
    double s = 0.0;
    for (int m = 1; m <= g.nz; ++m) {
        const double mz = (M_PI / g.h) * m;
        for (int iy = 0; iy < g.ny; ++iy) {
            const double ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx) {
                const double k2 = tp2 * (double(kx) * kx + ky * ky);
                s += (kx == 0 ? 1.0 : 2.0) * g.h * k2 * mz * mz *
                     std::norm(f.at(kx, iy, m));
            }
        }
    }
    return s;
}

double dz2_norm_sq(const SpectralField3D& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int m = 1; m <= g.nz; ++m) {
        const double mz = (M_PI / g.h) * m;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int kx = 0; kx < g.nkx(); ++kx)
                s += (kx == 0 ? 1.0 : 2.0) * g.h * mz * mz * mz * mz *
                     std::norm(f.at(kx, iy, m));
    }
    return s;
}

double full_hessian_norm_sq(const SpectralField3D& f) {
    // sum_{i,j} ||d_i d_j f||^2 = sum_k |f_k|^2 |k|^4 (Parseval)
    const Grid& g = f.grid();
    const double tp2 = 4.0 * M_PI * M_PI;
    double s = 0.0;
    for (int m = 0; m <= g.nz; ++m) {
        const double wm = (m == 0) ? 2.0 * g.h : g.h;
        const double mz2 = (M_PI / g.h) * m * (M_PI / g.h) * m;
        for (int iy = 0; iy < g.ny; ++iy) {
            const double ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx) {
                const double k2 = tp2 * (double(kx) * kx + ky * ky) + mz2;
                s += (kx == 0 ? 1.0 : 2.0) * wm * k2 * k2 * std::norm(f.at(kx, iy, m));
            }
        }
    }
    return s;
}

} // namespace

std::string MonitorRecord::csv_header(const std::vector<int>& q_list) {
    std::string h = "t,l2_vT,diss,max_T";
    for (int q : q_list) h += ",lq_v_q" + std::to_string(q);
    h += ",A2,B2,vinf_proxy,A3,B3,A4,B4,grad2_T";
    return h;
}

std::string MonitorRecord::csv_row() const {
    std::string r = fmt17(t) + "," + fmt17(l2_vT) + "," + fmt17(diss) + "," + fmt17(max_T);
    for (double v : lq_v) r += "," + fmt17(v);
    r += "," + fmt17(A2) + "," + fmt17(B2) + "," + fmt17(vinf_proxy);
    r += "," + fmt17(A3) + "," + fmt17(B3) + "," + fmt17(A4) + "," + fmt17(B4);
    r += "," + fmt17(grad2_T);
    return r;
}

MonitorRecord monitor_report(const State& s, const Params& p) {
    const double eps = p.epsilon;
    MonitorRecord r;
    r.t = s.t;

    r.l2_vT = l2_norm_sq(s.v1) + l2_norm_sq(s.v2) + l2_norm_sq(s.T);
    r.diss = grad_h_norm_sq(s.v1) + grad_h_norm_sq(s.v2) + dz_norm_sq(s.T) +
             eps * (dz_norm_sq(s.v1) + dz_norm_sq(s.v2) + grad_h_norm_sq(s.T));

    PhysicalField3D pv1 = transform_inverse(s.v1);
    PhysicalField3D pv2 = transform_inverse(s.v2);
    r.max_T = max_abs(transform_inverse(s.T));

    for (int q : p.q_list)
        r.lq_v.push_back(lq_norm_magnitude(pv1, pv2, q) / std::sqrt(double(q)));

    AuxFields a = compute_aux_fields(s.v1, s.v2, s.T);
    const double u_l2 = l2_norm_sq(a.u.x) + l2_norm_sq(a.u.y);
    PhysicalField3D pu1 = transform_inverse(a.u.x);
    PhysicalField3D pu2 = transform_inverse(a.u.y);
    const double u_l4 = std::pow(lq_norm_magnitude(pu1, pu2, 4.0), 4.0);

    r.A2 = l2_norm_sq(a.theta) + l2_norm_sq(a.eta) + u_l2 + 0.5 * u_l4 + M_E;
    r.B2 = grad_h_norm_sq(a.theta) + grad_h_norm_sq(a.eta) + grad_h_norm_sq(a.u.x) +
           grad_h_norm_sq(a.u.y) +
           eps * (dz_norm_sq(a.eta) + dz_norm_sq(a.theta) + dz_norm_sq(a.u.x) +
                  dz_norm_sq(a.u.y));

    const double vinf = max_magnitude(pv1, pv2);
    r.vinf_proxy = vinf * vinf / std::log(r.A2 + r.B2);

    // |grad_H T| on the grid for the Lq norms of the temperature gradient
    PhysicalField3D ptx = transform_inverse(differentiate(s.T, Axis::X));
    PhysicalField3D pty = transform_inverse(differentiate(s.T, Axis::Y));
    const double ght_l2 = grad_h_norm_sq(s.T);
    const double gt_l2 = ght_l2 + dz_norm_sq(s.T);
    const double ght_q3 = std::pow(lq_norm_magnitude(ptx, pty, kMonitorQ3), kMonitorQ3);
    const double ght_q4 = std::pow(lq_norm_magnitude(ptx, pty, kMonitorQ4), kMonitorQ4);

    r.A3 = grad_h_norm_sq(a.eta) + grad_h_norm_sq(a.theta) + 0.5 * gt_l2 +
           ght_q3 / kMonitorQ3;
    r.B3 = 0.5 * (laplacian_h_norm_sq(a.eta) + laplacian_h_norm_sq(a.theta) +
                  eps * (grad_h_dz_norm_sq(a.eta) + grad_h_dz_norm_sq(a.theta))) +
           dz2_norm_sq(s.T) + grad_h_dz_norm_sq(s.T) + eps * laplacian_h_norm_sq(s.T);
    r.A4 = 2.0 * ght_q4 / kMonitorQ4 + ght_l2;
    r.B4 = grad_h_dz_norm_sq(s.T);
    r.grad2_T = full_hessian_norm_sq(s.T);
    return r;
}

void GronwallInstance::validate() const {
    if (A0 < 0.0) throw ValidationError("gronwall: A0 must be >= 0");
    if (!(K > 0.0) || !(alpha > 0.0))
        throw ValidationError("gronwall: K and alpha must be > 0");
    if (times.size() < 2 || l.size() != times.size() || m.size() != times.size() ||
        n.size() != times.size() || f.size() != times.size())
        throw ValidationError("gronwall: sample arrays must share length >= 2");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1]))
            throw ValidationError("gronwall: times must increase");
        if (l[i] < 0 || m[i] < 0 || n[i] < 0 || f[i] < 0)
            throw ValidationError("gronwall: negative coefficient sample");
    }
}

namespace {
// int_0^t of a sampled function by trapezoid, linear in the last partial cell.
double trapz_to(const std::vector<double>& times, const std::vector<double>& vals,
                double t) {
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (t <= times[i - 1]) break;
        const double t1 = std::min(t, times[i]);
        const double dt = times[i] - times[i - 1];
        const double frac = (t1 - times[i - 1]) / dt;
        const double v1 = vals[i - 1] + frac * (vals[i] - vals[i - 1]);
        acc += 0.5 * (vals[i - 1] + v1) * (t1 - times[i - 1]);
    }
    return acc;
}
} // namespace

GronwallBound gronwall_bound(const GronwallInstance& inst, double t) {
    inst.validate();
    if (t < 0.0 || t > inst.horizon + 1e-12)
        throw ValidationError("gronwall_bound: t outside [0, horizon]");

    const double K = std::max(inst.K, 0.5); // keeps log(2K) >= 0
    const double log2K = std::log(2.0 * K);

    std::vector<double> mn(inst.times.size()), lfn(inst.times.size());
    for (std::size_t i = 0; i < inst.times.size(); ++i) {
        mn[i] = inst.m[i] + inst.n[i];
        lfn[i] = inst.l[i] + inst.f[i] + log2K * inst.n[i];
    }
    const double I_mn = trapz_to(inst.times, mn, t);
    const double I_lfn = trapz_to(inst.times, lfn, t);

    GronwallBound out;
    out.Q = std::exp((inst.alpha + 1.0) * I_mn) *
            (std::log(inst.A0 + M_E) + I_lfn + t);
    out.log_bound = out.Q + std::log(2.0 * out.Q + 1.0);
    out.bound = std::exp(out.log_bound);
    return out;
}

} // namespace apes
