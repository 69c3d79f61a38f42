#include "apes/diagnostics.hpp"

#include <cmath>

#include "apes/errors.hpp"

namespace apes {

namespace {

SpectralField3D div_h(const SpectralField3D& a, const SpectralField3D& b) {
    return differentiate(a, Axis::X) + differentiate(b, Axis::Y);
}

SpectralField3D curl_h(const SpectralField3D& a, const SpectralField3D& b) {
    return differentiate(b, Axis::X) - differentiate(a, Axis::Y);
}

SpectralField3D laplacian_h(const SpectralField3D& f) {
    return differentiate(f, Axis::X, 2) + differentiate(f, Axis::Y, 2);
}

SpectralField3D advect(const SpectralField3D& v1, const SpectralField3D& v2,
                       const SpectralField3D& f) {
    return multiply(v1, differentiate(f, Axis::X)) +
           multiply(v2, differentiate(f, Axis::Y));
}

double l2_norm_pair(const VectorField& f) {
    return std::sqrt(l2_norm_sq(f.x) + l2_norm_sq(f.y));
}

} // namespace

SpectralField3D compute_w(const SpectralField3D& v1, const SpectralField3D& v2,
                          double constraint_tol) {
    if (barotropic_residual(v1, v2) > constraint_tol)
        throw ConstraintError("compute_w: velocity violates the barotropic constraint");
    SpectralField3D w = integrate_z_from_bottom(div_h(v1, v2));
    w *= -1.0;
    return w;
}

AuxFields compute_aux_fields(const SpectralField3D& v1, const SpectralField3D& v2,
                             const SpectralField3D& T) {
    AuxFields a;
    SpectralField3D G = integrate_z_from_bottom(T);
    a.Phi = G - extend_z_uniform(vertical_mean(G));
    a.eta = div_h(v1, v2) + a.Phi;
    a.theta = curl_h(v1, v2);
    a.u.x = differentiate(v1, Axis::Z);
    a.u.y = differentiate(v2, Axis::Z);
    a.varphi = div_h(a.u.x, a.u.y) + T;
    a.psi = curl_h(a.u.x, a.u.y);
    a.w = compute_w(v1, v2);
    return a;
}

VectorField momentum_nonlinearity(const SpectralField3D& v1, const SpectralField3D& v2,
                                  const SpectralField3D& w) {
    SpectralField3D p11 = multiply(v1, v1);
    SpectralField3D p12 = multiply(v1, v2);
    SpectralField3D p22 = multiply(v2, v2);
    VectorField n;
    n.x = differentiate(p11, Axis::X) + differentiate(p12, Axis::Y) +
          differentiate(multiply(w, v1), Axis::Z);
    n.y = differentiate(p12, Axis::X) + differentiate(p22, Axis::Y) +
          differentiate(multiply(w, v2), Axis::Z);
    return n;
}

SpectralField3D temperature_nonlinearity(const SpectralField3D& v1,
                                         const SpectralField3D& v2,
                                         const SpectralField3D& w,
                                         const SpectralField3D& T) {
    return div_h(multiply(v1, T), multiply(v2, T)) +
           differentiate(multiply(w, T), Axis::Z);
}

SpectralField2D solve_surface_pressure(const SpectralField3D& v1,
                                       const SpectralField3D& v2,
                                       const SpectralField3D& T, double f0) {
    if (barotropic_residual(v1, v2) > 1e-10)
        throw ConstraintError(
            "solve_surface_pressure: velocity violates the barotropic constraint");
    SpectralField3D p11 = multiply(v1, v1);
    SpectralField3D p12 = multiply(v1, v2);
    SpectralField3D p22 = multiply(v2, v2);
    SpectralField3D intT = integrate_z_from_bottom(T);

    SpectralField3D f1 = differentiate(p11, Axis::X) + differentiate(p12, Axis::Y) -
                         differentiate(intT, Axis::X);
    SpectralField3D f2 = differentiate(p12, Axis::X) + differentiate(p22, Axis::Y) -
                         differentiate(intT, Axis::Y);
    if (f0 != 0.0) {
        f1 += (-f0) * v2;
        f2 += f0 * v1;
    }
    SpectralField2D rhs = gradient_component_2d(vertical_mean(f1), Axis::X);
    rhs += gradient_component_2d(vertical_mean(f2), Axis::Y);
    // Divergence form: the horizontal mean vanishes identically.
    return solve_poisson_2d(rhs);
}

SpectralField3D reconstruct_pressure(const SpectralField2D& p_s,
                                     const SpectralField3D& T) {
    return extend_z_uniform(p_s) - integrate_z_from_bottom(T);
}

ZetaVarpi decompose_zeta_varpi(const SpectralField3D& v1, const SpectralField3D& v2,
                               const SpectralField3D& T) {
    const Grid& g = v1.grid();
    SpectralField3D G = integrate_z_from_bottom(T);
    SpectralField3D Phi = G - extend_z_uniform(vertical_mean(G));
    SpectralField3D rhs = zero_horizontal_mean_per_level(Phi);

    // chi solves Lap_H chi = Phi - mean_M Phi per level, zero-mean gauge.
    SpectralField3D chi(g, Parity::Even);
    const double two_pi = 2.0 * M_PI;
    for (int m = 0; m <= g.nz; ++m) {
        for (int iy = 0; iy < g.ny; ++iy) {
            const double ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx) {
                if (kx == 0 && ky == 0.0) continue;
                const double k2 = two_pi * two_pi * (double(kx) * kx + ky * ky);
                chi.at(kx, iy, m) = -rhs.at(kx, iy, m) / k2;
            }
        }
    }
    ZetaVarpi out;
    out.varpi.x = differentiate(chi, Axis::X);
    out.varpi.y = differentiate(chi, Axis::Y);
    out.zeta.x = v1 + out.varpi.x;
    out.zeta.y = v2 + out.varpi.y;
    return out;
}

SpectralField2D compute_f_bar(const SpectralField3D& v1, const SpectralField3D& v2,
                              const SpectralField3D& T, const SpectralField3D& w,
                              const Params& p) {
    SpectralField3D inner = temperature_nonlinearity(v1, v2, w, T); // has dz(wT) term
    // f uses int_-h^z (div_H(vT) - eps Lap_H T); strip the dz(wT) part and
    // add wT directly, which is the same thing after integration.
    SpectralField3D divvT = div_h(multiply(v1, T), multiply(v2, T));
    if (p.epsilon != 0.0) divvT -= p.epsilon * laplacian_h(T);
    SpectralField3D A = integrate_z_from_bottom(divvT) + multiply(w, T);
    SpectralField2D part1 = vertical_mean(A);

    SpectralField3D p11 = multiply(v1, v1);
    SpectralField3D p12 = multiply(v1, v2);
    SpectralField3D p22 = multiply(v2, v2);
    SpectralField3D d1 = differentiate(p11, Axis::X) + differentiate(p12, Axis::Y);
    SpectralField3D d2 = differentiate(p12, Axis::X) + differentiate(p22, Axis::Y);
    if (p.f0 != 0.0) {
        d1 += (-p.f0) * v2;
        d2 += p.f0 * v1;
    }
    SpectralField2D part2 = gradient_component_2d(vertical_mean(d1), Axis::X);
    part2 += gradient_component_2d(vertical_mean(d2), Axis::Y);

    part1 += part2;
    return part1;
}

VectorField derived_rhs_u(const State& s, const Params& p) {
    AuxFields a = compute_aux_fields(s.v1, s.v2, s.T);
    SpectralField3D divv = div_h(s.v1, s.v2);
    VectorField out;
    const SpectralField3D* v[2] = {&s.v1, &s.v2};
    const SpectralField3D* u[2] = {&a.u.x, &a.u.y};
    for (int i = 0; i < 2; ++i) {
        SpectralField3D r = advect(s.v1, s.v2, *u[i]);
        r *= -1.0;
        r -= multiply(a.w, differentiate(*u[i], Axis::Z));
        r += p.nu_h * laplacian_h(*u[i]);
        if (p.epsilon != 0.0) r += p.epsilon * differentiate(*u[i], Axis::Z, 2);
        // -f0 k x u
        r += (i == 0 ? p.f0 : -p.f0) * *u[1 - i];
        // -(u . grad_H) v_i + (div_H v) u_i
        r -= multiply(a.u.x, differentiate(*v[i], Axis::X));
        r -= multiply(a.u.y, differentiate(*v[i], Axis::Y));
        r += multiply(divv, *u[i]);
        r += differentiate(s.T, i == 0 ? Axis::X : Axis::Y);
        (i == 0 ? out.x : out.y) = std::move(r);
    }
    return out;
}

SpectralField3D derived_rhs_theta(const State& s, const Params& p) {
    AuxFields a = compute_aux_fields(s.v1, s.v2, s.T);
    VectorField n = momentum_nonlinearity(s.v1, s.v2, a.w);
    if (p.f0 != 0.0) {
        n.x += (-p.f0) * s.v2;
        n.y += p.f0 * s.v1;
    }
    SpectralField3D r = p.nu_h * laplacian_h(a.theta);
    if (p.epsilon != 0.0) r += p.epsilon * differentiate(a.theta, Axis::Z, 2);
    r -= curl_h(n.x, n.y);
    return r;
}

SpectralField3D derived_rhs_eta(const State& s, const Params& p) {
    AuxFields a = compute_aux_fields(s.v1, s.v2, s.T);
    VectorField n = momentum_nonlinearity(s.v1, s.v2, a.w);
    if (p.f0 != 0.0) {
        n.x += (-p.f0) * s.v2;
        n.y += p.f0 * s.v1;
    }
    SpectralField3D r = p.nu_h * laplacian_h(a.eta);
    if (p.epsilon != 0.0) r += p.epsilon * differentiate(a.eta, Axis::Z, 2);
    r -= div_h(n.x, n.y);
    r += (p.kappa_z - p.epsilon) * differentiate(s.T, Axis::Z);
    r -= multiply(a.w, s.T);
    SpectralField3D divvT = div_h(multiply(s.v1, s.T), multiply(s.v2, s.T));
    if (p.epsilon != 0.0) divvT -= p.epsilon * laplacian_h(s.T);
    r -= integrate_z_from_bottom(divvT);
    r += extend_z_uniform(compute_f_bar(s.v1, s.v2, s.T, a.w, p));
    if (p.nu_h != 1.0) r += (1.0 - p.nu_h) * laplacian_h(a.Phi);
    return r;
}

SpectralField3D derived_rhs_varphi(const State& s, const Params& p) {
    AuxFields a = compute_aux_fields(s.v1, s.v2, s.T);
    SpectralField3D divv = div_h(s.v1, s.v2);

    SpectralField3D r = advect(s.v1, s.v2, a.varphi);
    r *= -1.0;
    r -= multiply(a.w, differentiate(a.varphi, Axis::Z));
    r += p.nu_h * laplacian_h(a.varphi);
    if (p.epsilon != 0.0) r += p.epsilon * differentiate(a.varphi, Axis::Z, 2);
    r += p.f0 * a.psi;

    // -div_H((u . grad_H) v - (div_H v) u)
    SpectralField3D g1 = multiply(a.u.x, differentiate(s.v1, Axis::X)) +
                         multiply(a.u.y, differentiate(s.v1, Axis::Y)) -
                         multiply(divv, a.u.x);
    SpectralField3D g2 = multiply(a.u.x, differentiate(s.v2, Axis::X)) +
                         multiply(a.u.y, differentiate(s.v2, Axis::Y)) -
                         multiply(divv, a.u.y);
    r -= div_h(g1, g2);

    // -grad_H v : (grad_H u)^T
    r -= multiply(differentiate(s.v1, Axis::X), differentiate(a.u.x, Axis::X));
    r -= multiply(differentiate(s.v2, Axis::X), differentiate(a.u.x, Axis::Y));
    r -= multiply(differentiate(s.v1, Axis::Y), differentiate(a.u.y, Axis::X));
    r -= multiply(differentiate(s.v2, Axis::Y), differentiate(a.u.y, Axis::Y));

    // -grad_H w . dz u
    r -= multiply(differentiate(a.w, Axis::X), differentiate(a.u.x, Axis::Z));
    r -= multiply(differentiate(a.w, Axis::Y), differentiate(a.u.y, Axis::Z));

    const double ct = 1.0 + p.epsilon - p.nu_h;
    if (ct != 0.0) r += ct * laplacian_h(s.T);
    r += (p.kappa_z - p.epsilon) * differentiate(s.T, Axis::Z, 2);
    return r;
}

SpectralField3D derived_rhs_psi(const State& s, const Params& p) {
    AuxFields a = compute_aux_fields(s.v1, s.v2, s.T);
    SpectralField3D divv = div_h(s.v1, s.v2);

    SpectralField3D r = advect(s.v1, s.v2, a.psi);
    r *= -1.0;
    r -= multiply(a.w, differentiate(a.psi, Axis::Z));
    r += p.nu_h * laplacian_h(a.psi);
    if (p.epsilon != 0.0) r += p.epsilon * differentiate(a.psi, Axis::Z, 2);
    r -= p.f0 * div_h(a.u.x, a.u.y);

    SpectralField3D g1 = multiply(a.u.x, differentiate(s.v1, Axis::X)) +
                         multiply(a.u.y, differentiate(s.v1, Axis::Y)) -
                         multiply(divv, a.u.x);
    SpectralField3D g2 = multiply(a.u.x, differentiate(s.v2, Axis::X)) +
                         multiply(a.u.y, differentiate(s.v2, Axis::Y)) -
                         multiply(divv, a.u.y);
    r -= curl_h(g1, g2);

    // -grad_H^perp v : (grad_H u)^T
    r += multiply(differentiate(s.v1, Axis::Y), differentiate(a.u.x, Axis::X));
    r += multiply(differentiate(s.v2, Axis::Y), differentiate(a.u.x, Axis::Y));
    r -= multiply(differentiate(s.v1, Axis::X), differentiate(a.u.y, Axis::X));
    r -= multiply(differentiate(s.v2, Axis::X), differentiate(a.u.y, Axis::Y));

    // -grad_H^perp w . dz u
    r += multiply(differentiate(a.w, Axis::Y), differentiate(a.u.x, Axis::Z));
    r -= multiply(differentiate(a.w, Axis::X), differentiate(a.u.y, Axis::Z));
    return r;
}

ResidualNorms compute_residuals(const State& before, const State& middle,
                                const State& after, const Params& p) {
    const double d1 = middle.t - before.t;
    const double d2 = after.t - middle.t;
    if (!(d1 > 0.0) || std::abs(d1 - d2) > 1e-9 * d1)
        throw ValidationError("compute_residuals: states are not equally spaced");
    const double inv2dt = 1.0 / (d1 + d2);

    AuxFields am = compute_aux_fields(before.v1, before.v2, before.T);
    AuxFields ap = compute_aux_fields(after.v1, after.v2, after.T);

    ResidualNorms out;
    auto record = [&](const std::string& name, const SpectralField3D& lo,
                      const SpectralField3D& hi, const SpectralField3D& rhs) {
        SpectralField3D dot = hi - lo;
        dot *= inv2dt;
        dot -= rhs;
        const double r = l2_norm(dot);
        out.abs[name] = r;
        out.rel[name] = r / std::max(l2_norm(rhs), 1e-300);
    };

    VectorField rhs_u = derived_rhs_u(middle, p);
    {
        SpectralField3D dx = ap.u.x - am.u.x;
        dx *= inv2dt;
        dx -= rhs_u.x;
        SpectralField3D dy = ap.u.y - am.u.y;
        dy *= inv2dt;
        dy -= rhs_u.y;
        const double r = std::sqrt(l2_norm_sq(dx) + l2_norm_sq(dy));
        out.abs["u"] = r;
        out.rel["u"] = r / std::max(l2_norm_pair(rhs_u), 1e-300);
    }
    record("eta", am.eta, ap.eta, derived_rhs_eta(middle, p));
    record("theta", am.theta, ap.theta, derived_rhs_theta(middle, p));
    record("varphi", am.varphi, ap.varphi, derived_rhs_varphi(middle, p));
    record("psi", am.psi, ap.psi, derived_rhs_psi(middle, p));
    return out;
}

} // namespace apes
