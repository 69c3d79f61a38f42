#include "apes/consistency.hpp"

#include <cmath>
#include <random>

#include "apes/errors.hpp"

namespace apes {

namespace {

SpectralField3D normalized_random(const Grid& g, Parity parity, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField3D f(g, parity);
    for (int m = 0; m <= g.nz; ++m)
        for (int iy = 0; iy < g.ny; ++iy) {
            const int ky = g.ky_of(iy);
            if (ky > g.ky_cut || ky < -g.ky_cut) continue;
            for (int kx = 0; kx <= g.kx_cut; ++kx) {
                if (parity == Parity::Odd && m == 0) continue;
                const double k2 =
                    double(kx) * kx + double(ky) * ky + double(m) * m;
                f.at(kx, iy, m) =
                    std::pow(1.0 + k2, -2.0) * cplx(gauss(rng), gauss(rng));
            }
        }
    enforce_structure(f);
    const double n = l2_norm(f);
    if (n > 0.0) f *= 1.0 / n;
    return f;
}

} // namespace

TwinRunReport continuous_dependence_experiment(const Params& p, double delta,
                                               double horizon) {
    if (delta < 0.0) throw ValidationError("twin: delta must be >= 0");
    const Grid g = p.make_grid();
    State base = make_initial_data(p);

    State pert = base;
    if (delta > 0.0) {
        pert.v1 += delta * normalized_random(g, Parity::Even, p.seed + 101);
        pert.v2 += delta * normalized_random(g, Parity::Even, p.seed + 102);
        pert.T += delta * normalized_random(g, Parity::Odd, p.seed + 103);
        project_barotropic(pert.v1, pert.v2);
    }

    Stepper a(p, base), b(p, pert);
    TwinRunReport rep;
    rep.base_l2 = l2_norm_sq(base.v1) + l2_norm_sq(base.v2) + l2_norm_sq(base.T);

    auto record = [&]() {
        rep.times.push_back(a.state().t);
        const double d = l2_norm_sq(a.state().v1 - b.state().v1) +
                         l2_norm_sq(a.state().v2 - b.state().v2) +
                         l2_norm_sq(a.state().T - b.state().T);
        rep.delta_l2.push_back(d);
    };
    record();
    rep.perturbation_l2 = rep.delta_l2.front();

    const long nsteps = static_cast<long>(std::llround(horizon / p.dt));
    for (long i = 0; i < nsteps; ++i) {
        a.advance();
        b.advance();
        if ((i + 1) % p.monitor_stride == 0 || i == nsteps - 1) record();
    }

    // Least-squares slope of log delta against t.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        if (rep.delta_l2[i] <= 0.0) continue;
        const double x = rep.times[i], y = std::log(rep.delta_l2[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2 && sxx * n - sx * sx > 0.0)
        rep.growth_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

AppendixAResiduals appendix_a_check(const State& s, const Params& p) {
    Tendency t = rhs(s, p);

    // Chain rule through the definitions: eta = div_H v + Phi(T),
    // theta = curl_H v; Phi is linear in T.
    SpectralField3D eta_dot =
        differentiate(t.dv1, Axis::X) + differentiate(t.dv2, Axis::Y);
    SpectralField3D G = integrate_z_from_bottom(t.dT);
    eta_dot += G - extend_z_uniform(vertical_mean(G));
    SpectralField3D theta_dot =
        differentiate(t.dv2, Axis::X) - differentiate(t.dv1, Axis::Y);

    SpectralField3D eta_rhs = derived_rhs_eta(s, p);
    SpectralField3D theta_rhs = derived_rhs_theta(s, p);

    AppendixAResiduals r;
    r.eta_abs = l2_norm(eta_dot - eta_rhs);
    r.eta_rel = r.eta_abs / std::max(l2_norm(eta_rhs), 1e-300);
    r.theta_abs = l2_norm(theta_dot - theta_rhs);
    r.theta_rel = r.theta_abs / std::max(l2_norm(theta_rhs), 1e-300);
    return r;
}

} // namespace apes
