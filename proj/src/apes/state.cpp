#include "apes/state.hpp"

#include <cmath>
#include <random>

#include "apes/errors.hpp"

namespace apes {

namespace io {
// Defined in io.cpp; used for init_kind = file without a header cycle.
State read_state_for_init(const std::string& path, const Grid& expected);
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "imex_cn_ab2") return Scheme::ImexCnAb2;
    if (s == "imex_euler") return Scheme::ImexEuler;
    throw ValidationError("unknown scheme: " + s);
}

std::string scheme_to_string(Scheme s) {
    return s == Scheme::ImexCnAb2 ? "imex_cn_ab2" : "imex_euler";
}

InitKind init_kind_from_string(const std::string& s) {
    if (s == "random_smooth") return InitKind::RandomSmooth;
    if (s == "manufactured") return InitKind::Manufactured;
    if (s == "file") return InitKind::File;
    throw ValidationError("unknown initial data kind: " + s);
}

std::string init_kind_to_string(InitKind k) {
    switch (k) {
        case InitKind::RandomSmooth: return "random_smooth";
        case InitKind::Manufactured: return "manufactured";
        default: return "file";
    }
}

void Params::validate() const {
    Grid probe(nx, ny, nz, h); // validates resolution and h
    if (epsilon < 0.0 || epsilon >= 1.0)
        throw ValidationError("epsilon must lie in [0, 1)");
    if (!(nu_h > 0.0) || !(kappa_z > 0.0))
        throw ValidationError("nu_h and kappa_z must be > 0");
    if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
    if (t_final < 0.0) throw ValidationError("t_final must be >= 0");
    if (monitor_stride < 1) throw ValidationError("monitor_stride must be >= 1");
    if (checkpoint_every < 0 || snapshot_every < 0)
        throw ValidationError("checkpoint/snapshot cadence must be >= 0");
    for (int q : q_list)
        if (q < 2) throw ValidationError("q_list entries must be >= 2");
    // Explicitly treated skew terms: keep the AB2 step well inside the
    // stability region for the Coriolis rotation.
    if (dt * std::abs(f0) > 0.5)
        throw ValidationError("dt * |f0| exceeds the explicit stability bound 0.5");
    if (init_kind == InitKind::RandomSmooth && init_slope < 3.0)
        throw ValidationError("random_smooth requires spectrum slope >= 3");
    if (init_kind == InitKind::File && init_file.empty())
        throw ValidationError("init_kind = file requires init_file");
}

State project_symmetry(const State& s) {
    State out = s;
    enforce_structure(out.v1);
    enforce_structure(out.v2);
    enforce_structure(out.T);
    return out;
}

void project_barotropic(SpectralField3D& v1, SpectralField3D& v2) {
    const Grid& g = v1.grid();
    for (int iy = 0; iy < g.ny; ++iy) {
        const double ky = g.ky_of(iy);
        for (int kx = 0; kx < g.nkx(); ++kx) {
            if (kx == 0 && ky == 0) continue;
            const double k2 = double(kx) * kx + ky * ky;
            const cplx dot = double(kx) * v1.at(kx, iy, 0) + ky * v2.at(kx, iy, 0);
            v1.at(kx, iy, 0) -= double(kx) * dot / k2;
            v2.at(kx, iy, 0) -= ky * dot / k2;
        }
    }
}

State project_barotropic(const State& s) {
    State out = s;
    project_barotropic(out.v1, out.v2);
    return out;
}

double barotropic_residual(const SpectralField3D& v1, const SpectralField3D& v2) {
    const Grid& g = v1.grid();
    const double two_pi = 2.0 * M_PI;
    double resid = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        const double ky = g.ky_of(iy);
        for (int kx = 0; kx < g.nkx(); ++kx) {
            cplx div = cplx(0.0, two_pi) *
                       (double(kx) * v1.at(kx, iy, 0) + ky * v2.at(kx, iy, 0));
            resid += (kx == 0 ? 1.0 : 2.0) * std::norm(2.0 * g.h * div);
        }
    }
    double scale = std::sqrt(l2_norm_sq(v1) + l2_norm_sq(v2));
    return std::sqrt(resid) / std::max(scale, 1e-300);
}

namespace {

SpectralField3D random_smooth_field(const Grid& g, Parity parity, std::mt19937_64& rng,
                                    double slope, double amplitude) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField3D f(g, parity);
    for (int m = 0; m <= g.nz; ++m) {
        for (int iy = 0; iy < g.ny; ++iy) {
            const int ky = g.ky_of(iy);
            if (ky > g.ky_cut || ky < -g.ky_cut) continue;
            for (int kx = 0; kx <= g.kx_cut; ++kx) {
                if (parity == Parity::Odd && m == 0) continue;
                const double k2 = double(kx) * kx + double(ky) * ky + double(m) * m;
                const double scale = amplitude * std::pow(1.0 + k2, -slope / 2.0);
                f.at(kx, iy, m) = scale * cplx(gauss(rng), gauss(rng));
            }
        }
    }
    enforce_structure(f);
    return f;
}

} // namespace

State make_initial_data(const Params& p) {
    p.validate();
    const Grid g = p.make_grid();

    if (p.init_kind == InitKind::File) {
        State s = io::read_state_for_init(p.init_file, g);
        s.t = 0.0; // initial data, not a continuation ("run --resume" is)
        project_barotropic(s.v1, s.v2);
        return project_symmetry(s);
    }

    State s(g);
    if (p.init_kind == InitKind::Manufactured) {
        // Shear flow plus a single temperature mode; linearly decaying when
        // f0 = 0 and the amplitude is small.
        s.v1.at(0, 1, 0) = cplx(0.0, -0.5) * p.init_amplitude;
        s.v1.at(0, g.ny - 1, 0) = cplx(0.0, 0.5) * p.init_amplitude;
        s.T.at(0, 0, 1) = cplx(p.init_tmax, 0.0);
    } else {
        std::mt19937_64 rng(p.seed);
        s.v1 = random_smooth_field(g, Parity::Even, rng, p.init_slope, p.init_amplitude);
        s.v2 = random_smooth_field(g, Parity::Even, rng, p.init_slope, p.init_amplitude);
        s.T = random_smooth_field(g, Parity::Odd, rng, p.init_slope, p.init_amplitude);
    }

    project_barotropic(s.v1, s.v2);

    // ||T0||_inf cap enforced by global rescaling, preserving smoothness.
    double tmax = max_abs(transform_inverse(s.T));
    if (tmax > p.init_tmax && tmax > 0.0) s.T *= p.init_tmax / tmax;

    s.t = 0.0;
    return project_symmetry(s);
}

} // namespace apes
