#pragma once

#include <map>
#include <string>

#include "apes/state.hpp"

namespace apes {

// Derived fields of one prognostic state:
//   w       vertical velocity, w = -int_-h^z div_H v           (odd)
//   Phi     zero-z-mean primitive of T                          (even)
//   eta     div_H v + Phi                                       (even)
//   theta   curl_H v                                            (even)
//   u       dz v                                                (odd pair)
//   varphi  div_H u + T                                         (odd)
//   psi     curl_H u                                            (odd)
struct AuxFields {
    SpectralField3D w, Phi, eta, theta;
    VectorField u;
    SpectralField3D varphi, psi;
};

SpectralField3D compute_w(const SpectralField3D& v1, const SpectralField3D& v2,
                          double constraint_tol = 1e-10);

AuxFields compute_aux_fields(const SpectralField3D& v1, const SpectralField3D& v2,
                             const SpectralField3D& T);

// Shared nonlinearities in divergence form (alias-free products):
//   momentum:     div_H(v (x) v) + dz(w v)
//   temperature:  div_H(v T) + dz(w T)
VectorField momentum_nonlinearity(const SpectralField3D& v1, const SpectralField3D& v2,
                                  const SpectralField3D& w);
SpectralField3D temperature_nonlinearity(const SpectralField3D& v1,
                                         const SpectralField3D& v2,
                                         const SpectralField3D& w,
                                         const SpectralField3D& T);

// Surface pressure: -Lap_H p_s = (1/2h) div_H int_-h^h (div_H(v(x)v)
// + f0 k x v - int_-h^z grad_H T) dz, zero-mean gauge.
SpectralField2D solve_surface_pressure(const SpectralField3D& v1,
                                       const SpectralField3D& v2,
                                       const SpectralField3D& T, double f0);

// p = p_s - int_-h^z T dxi; even, and dz p + T = 0 by construction.
SpectralField3D reconstruct_pressure(const SpectralField2D& p_s,
                                     const SpectralField3D& T);

struct ZetaVarpi {
    VectorField zeta, varpi;
};

// Per-level curl-free corrector: varpi = grad_H chi with Lap_H chi =
// Phi - mean_M Phi, zero horizontal mean; zeta = v + varpi.
ZetaVarpi decompose_zeta_varpi(const SpectralField3D& v1, const SpectralField3D& v2,
                               const SpectralField3D& T);

// The barotropic source f(x, y, t) of the eta equation.
SpectralField2D compute_f_bar(const SpectralField3D& v1, const SpectralField3D& v2,
                              const SpectralField3D& T, const SpectralField3D& w,
                              const Params& p);

// Explicit right-hand sides of the derived evolution equations, evaluated
// at one state (the time derivative moved to the left-hand side).
VectorField derived_rhs_u(const State& s, const Params& p);
SpectralField3D derived_rhs_eta(const State& s, const Params& p);
SpectralField3D derived_rhs_theta(const State& s, const Params& p);
SpectralField3D derived_rhs_varphi(const State& s, const Params& p);
SpectralField3D derived_rhs_psi(const State& s, const Params& p);

// Centered-difference defect of each derived equation over a state triple
// sampled delta_t apart. Values are L2 norms; "rel" entries are relative to
// the L2 norm of the corresponding right-hand side.
struct ResidualNorms {
    std::map<std::string, double> abs, rel;
};

ResidualNorms compute_residuals(const State& before, const State& middle,
                                const State& after, const Params& p);

} // namespace apes
