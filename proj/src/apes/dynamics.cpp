#include "apes/dynamics.hpp"

#include <cmath>

#include "apes/errors.hpp"

namespace apes {

namespace {

// Modal multipliers of the implicitly treated dissipation.
inline double lambda_v(const Grid& g, const Params& p, int kx, double ky, int m) {
    const double tp2 = 4.0 * M_PI * M_PI;
    const double mz = (M_PI / g.h) * m;
    return p.nu_h * tp2 * (double(kx) * kx + ky * ky) + p.epsilon * mz * mz;
}
inline double lambda_T(const Grid& g, const Params& p, int kx, double ky, int m) {
    const double tp2 = 4.0 * M_PI * M_PI;
    const double mz = (M_PI / g.h) * m;
    return p.epsilon * tp2 * (double(kx) * kx + ky * ky) + p.kappa_z * mz * mz;
}

SpectralField3D linear_v(const SpectralField3D& v, const Params& p) {
    const Grid& g = v.grid();
    SpectralField3D out(g, v.parity());
    for (int m = 0; m <= g.nz; ++m)
        for (int iy = 0; iy < g.ny; ++iy) {
            const double ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx)
                out.at(kx, iy, m) = -lambda_v(g, p, kx, ky, m) * v.at(kx, iy, m);
        }
    return out;
}

SpectralField3D linear_T(const SpectralField3D& T, const Params& p) {
    const Grid& g = T.grid();
    SpectralField3D out(g, T.parity());
    for (int m = 0; m <= g.nz; ++m)
        for (int iy = 0; iy < g.ny; ++iy) {
            const double ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx)
                out.at(kx, iy, m) = -lambda_T(g, p, kx, ky, m) * T.at(kx, iy, m);
        }
    return out;
}

void check_state(const State& s) {
    if (barotropic_residual(s.v1, s.v2) > 1e-10)
        throw ConstraintError("rhs: input state violates the barotropic constraint");
}

} // namespace

Tendency rhs_explicit(const State& s, const Params& p) {
    check_state(s);
    const Grid& g = s.grid();

    SpectralField3D divv =
        differentiate(s.v1, Axis::X) + differentiate(s.v2, Axis::Y);
    SpectralField3D w = integrate_z_from_bottom(divv);
    w *= -1.0;

    // Collocation values; all quadratic terms formed on the padded grid.
    ProductGridBuf pv1 = to_product_grid(s.v1);
    ProductGridBuf pv2 = to_product_grid(s.v2);
    ProductGridBuf pw = to_product_grid(w);
    ProductGridBuf pT = to_product_grid(s.T);

    auto product = [&](const ProductGridBuf& a, const ProductGridBuf& b,
                       Parity parity) {
        ProductGridBuf tmp;
        tmp.grid = g;
        tmp.v.resize(a.v.size());
        for (std::size_t i = 0; i < a.v.size(); ++i) tmp.v[i] = a.v[i] * b.v[i];
        return from_product_grid(tmp, parity);
    };

    SpectralField3D p11 = product(pv1, pv1, Parity::Even);
    SpectralField3D p12 = product(pv1, pv2, Parity::Even);
    SpectralField3D p22 = product(pv2, pv2, Parity::Even);
    SpectralField3D wv1 = product(pw, pv1, Parity::Odd);
    SpectralField3D wv2 = product(pw, pv2, Parity::Odd);
    SpectralField3D v1T = product(pv1, pT, Parity::Odd);
    SpectralField3D v2T = product(pv2, pT, Parity::Odd);
    SpectralField3D wT = product(pw, pT, Parity::Even);

    // Momentum nonlinearity in divergence form.
    SpectralField3D n1 = differentiate(p11, Axis::X) + differentiate(p12, Axis::Y) +
                         differentiate(wv1, Axis::Z);
    SpectralField3D n2 = differentiate(p12, Axis::X) + differentiate(p22, Axis::Y) +
                         differentiate(wv2, Axis::Z);

    SpectralField3D intT = integrate_z_from_bottom(s.T);

    // Surface pressure from the vertical means (divergence-form right side).
    SpectralField2D mean1 = vertical_mean(n1);
    SpectralField2D mean2 = vertical_mean(n2);
    if (p.f0 != 0.0) {
        SpectralField2D c1 = vertical_mean(s.v2);
        c1 *= -p.f0;
        mean1 += c1;
        SpectralField2D c2 = vertical_mean(s.v1);
        c2 *= p.f0;
        mean2 += c2;
    }
    SpectralField2D meanIntT = vertical_mean(intT);
    mean1 -= gradient_component_2d(meanIntT, Axis::X);
    mean2 -= gradient_component_2d(meanIntT, Axis::Y);
    SpectralField2D ps_rhs = gradient_component_2d(mean1, Axis::X);
    ps_rhs += gradient_component_2d(mean2, Axis::Y);
    SpectralField2D ps = solve_poisson_2d(ps_rhs);

    // p3 = p_s - int_-h^z T; tendency takes -grad_H p3.
    SpectralField3D p3 = extend_z_uniform(ps) - intT;

    Tendency out;
    out.dv1 = n1;
    out.dv1 *= -1.0;
    out.dv1 -= differentiate(p3, Axis::X);
    out.dv2 = n2;
    out.dv2 *= -1.0;
    out.dv2 -= differentiate(p3, Axis::Y);
    if (p.f0 != 0.0) {
        out.dv1 += p.f0 * s.v2;  // -f0 (k x v)_1 = +f0 v2
        out.dv2 += (-p.f0) * s.v1;
    }
    out.dT = differentiate(v1T, Axis::X) + differentiate(v2T, Axis::Y) +
             differentiate(wT, Axis::Z);
    out.dT *= -1.0;
    return out;
}

Tendency rhs(const State& s, const Params& p) {
    Tendency t = rhs_explicit(s, p);
    t.dv1 += linear_v(s.v1, p);
    t.dv2 += linear_v(s.v2, p);
    t.dT += linear_T(s.T, p);
    return t;
}

void Stepper::apply_imex(const Tendency& expl, double wcur, double wprev,
                         const Tendency* prev) {
    const Grid& g = s_.grid();
    const double dt = p_.dt;
    auto solve = [&](SpectralField3D& f, const SpectralField3D& e,
                     const SpectralField3D* ep, bool is_v) {
        for (int m = 0; m <= g.nz; ++m)
            for (int iy = 0; iy < g.ny; ++iy) {
                const double ky = g.ky_of(iy);
                for (int kx = 0; kx < g.nkx(); ++kx) {
                    const double lam = is_v ? lambda_v(g, p_, kx, ky, m)
                                            : lambda_T(g, p_, kx, ky, m);
                    cplx nl = wcur * e.at(kx, iy, m);
                    if (ep) nl += wprev * ep->at(kx, iy, m);
                    f.at(kx, iy, m) = ((1.0 - 0.5 * dt * lam) * f.at(kx, iy, m) +
                                       dt * nl) /
                                      (1.0 + 0.5 * dt * lam);
                }
            }
    };
    solve(s_.v1, expl.dv1, prev ? &prev->dv1 : nullptr, true);
    solve(s_.v2, expl.dv2, prev ? &prev->dv2 : nullptr, true);
    solve(s_.T, expl.dT, prev ? &prev->dT : nullptr, false);
}

Stepper::Stepper(const Params& p, State s0) : p_(p), s_(std::move(s0)) {
    p_.validate();
    s_ = project_symmetry(project_barotropic(s_));
}

void Stepper::energy_bookkeeping() {
    const double energy = 0.5 * (l2_norm_sq(s_.v1) + l2_norm_sq(s_.v2) +
                                 l2_norm_sq(s_.T));
    const double diss = p_.nu_h * (grad_h_norm_sq(s_.v1) + grad_h_norm_sq(s_.v2)) +
                        p_.kappa_z * dz_norm_sq(s_.T) +
                        p_.epsilon * (dz_norm_sq(s_.v1) + dz_norm_sq(s_.v2) +
                                      grad_h_norm_sq(s_.T));
    SpectralField3D divv =
        differentiate(s_.v1, Axis::X) + differentiate(s_.v2, Axis::Y);
    const double work = -inner_product(integrate_z_from_bottom(s_.T), divv);

    if (have_energy_) {
        // Trapezoid-in-time balance of d/dt E + D = W over the last step.
        last_imbalance_ = (energy - prev_energy_) / p_.dt +
                          0.5 * (diss + prev_diss_) - 0.5 * (work + prev_work_);
    }
    prev_energy_ = energy;
    prev_diss_ = diss;
    prev_work_ = work;
    have_energy_ = true;
}

void Stepper::advance() {
    if (!have_energy_) energy_bookkeeping();

    Tendency expl = rhs_explicit(s_, p_);
    if (p_.scheme == Scheme::ImexCnAb2 && have_prev_)
        apply_imex(expl, 1.5, -0.5, &prev_);
    else
        apply_imex(expl, 1.0, 0.0, nullptr);

    if (p_.scheme == Scheme::ImexCnAb2) {
        prev_ = std::move(expl);
        have_prev_ = true;
    }

    s_ = project_symmetry(s_);
    project_barotropic(s_.v1, s_.v2);
    s_.t += p_.dt;
    ++n_;

    if (!all_finite(s_.v1) || !all_finite(s_.v2) || !all_finite(s_.T) ||
        sup_bound_from_modal(s_.v1) > 1e8 || sup_bound_from_modal(s_.v2) > 1e8)
        throw BlowUpError(s_.t, "solution blew up at t = " + std::to_string(s_.t));

    energy_bookkeeping();
}

void Stepper::restore_memory(Tendency prev, long step_index) {
    prev_ = std::move(prev);
    have_prev_ = true;
    n_ = step_index;
}

void Stepper::replace_state(State s) {
    if (s.grid() != s_.grid()) throw ShapeError("replace_state: grid mismatch");
    s_ = std::move(s);
    have_energy_ = false;
}

State step(const State& s, const Params& p) {
    Stepper st(p, s);
    st.advance();
    return st.state();
}

RunResult run_from(Stepper& stepper, double t_final, const RunHooks& hooks) {
    const Params& p = stepper.params();
    RunResult res;
    double max_imb = 0.0;

    auto record = [&]() {
        MonitorRecord r = monitor_report(stepper.state(), p);
        res.records.push_back(r);
        if (hooks.on_record) hooks.on_record(r);
    };

    if (stepper.step_index() == 0) record();

    const double t0 = stepper.state().t;
    const long nsteps = static_cast<long>(std::llround((t_final - t0) / p.dt));
    for (long i = 0; i < nsteps; ++i) {
        stepper.advance();
        max_imb = std::max(max_imb, std::abs(stepper.last_imbalance()));
        const long n = stepper.step_index();
        if (n % p.monitor_stride == 0 || i == nsteps - 1) record();
        if (p.checkpoint_every > 0 && n % p.checkpoint_every == 0 &&
            hooks.on_checkpoint)
            hooks.on_checkpoint(stepper.state(),
                                stepper.has_memory() ? &stepper.memory() : nullptr, n);
        if (p.snapshot_every > 0 && n % p.snapshot_every == 0 && hooks.on_snapshot)
            hooks.on_snapshot(stepper.state(), n);
    }

    res.final_state = stepper.state();
    res.steps = stepper.step_index();
    res.fitted_scheme_constant = max_imb / (p.dt * p.dt);

    // Fitted c in ||(v,T)||_2^2(t) <= e^{c t} ||(v0,T0)||_2^2.
    double c = 0.0;
    if (!res.records.empty() && res.records.front().l2_vT > 0.0) {
        const double e0 = res.records.front().l2_vT;
        const double tstart = res.records.front().t;
        for (const auto& r : res.records) {
            if (r.t > tstart + 1e-12 && r.l2_vT > 0.0)
                c = std::max(c, std::log(r.l2_vT / e0) / (r.t - tstart));
        }
    }
    res.fitted_energy_exponent = c;
    return res;
}

RunResult run(const Params& p, const State& initial, const RunHooks& hooks) {
    Stepper st(p, initial);
    return run_from(st, p.t_final, hooks);
}

RunResult run(const Params& p) { return run(p, make_initial_data(p), RunHooks{}); }

} // namespace apes
