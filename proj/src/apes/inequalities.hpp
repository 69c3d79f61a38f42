#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apes/monitors.hpp"

namespace apes {

// The inequality testers deliberately avoid the spectral-core transform
// machinery: fields are explicit trigonometric polynomials evaluated by
// direct separable summation, and all norms come from uniform-grid
// quadrature on an oversampled grid. A defect in spectral-core cannot
// self-certify through this path.

struct TrigTerm {
    double amp = 0.0;
    int kx = 0, ky = 0; // horizontal integer wavenumbers
    int m = 0;          // vertical index of cos/sin(m pi z / h)
    bool sx = false, sy = false, sz = false; // sine basis flags per axis
};

struct TrigPoly3 {
    double h = 1.0;
    std::vector<TrigTerm> terms;

    TrigPoly3 deriv(int axis) const; // 0 = x, 1 = y, 2 = z
    bool odd_in_z() const;           // every term a z-sine
    int max_k() const;
};

TrigPoly3 constant_poly(double value, double h = 1.0);
TrigPoly3 random_poly(std::uint64_t seed, int kmax, int mmax, double h,
                      int zparity /* -1 odd, +1 even, 0 mixed */,
                      int nterms = 24, double slope = 2.0);

// Uniform evaluation grid; norms are plain products of point values and
// cell volumes (periodic trapezoid).
struct EvalGrid {
    int gx = 0, gy = 0, gz = 0;
    double h = 1.0;
};

EvalGrid default_eval_grid(const std::vector<const TrigPoly3*>& fields,
                           int resolution);

std::vector<double> evaluate(const TrigPoly3& f, const EvalGrid& g);

struct InequalityCase {
    std::string name;
    double lhs = 0.0;
    double rhs_structural = 0.0; // unknown constant factored out
    double ratio = 0.0;          // lhs / rhs when rhs > 0
};

// Known case names: lad, ineqlad, ineqlad1, lem2_3_a..d, zt4, ht4,
// log_sobolev, bgw, bkm. Field-count and hypothesis requirements per case;
// violations raise HypothesisError.
InequalityCase check_inequality(const std::string& name,
                                const std::vector<TrigPoly3>& fields,
                                int resolution);

int inequality_field_count(const std::string& name);
bool inequality_has_explicit_constant(const std::string& name); // ratio <= 1 claims
bool inequality_is_homogeneous(const std::string& name);

struct EnsembleSpec {
    std::uint64_t seed = 0;
    int count = 100;
    int kmax = 3, mmax = 3;
    double h = 1.0;
    int resolution = 2; // oversampling factor over the spectrum Nyquist
};

struct EnsembleReport {
    std::string name;
    double max_ratio = 0.0;
    std::vector<int> histogram;  // 20 bins over [0, max_ratio]
    std::vector<InequalityCase> cases;
};

EnsembleReport empirical_constant(const std::string& name, const EnsembleSpec& spec);

// ---- logarithmic Gronwall oracle --------------------------------------------

// Equality-version closure A' + B = [l + m log(A+e) + n log(A+B+e)](A+e) + f
// with B = beta A and piecewise-constant coefficients on the breakpoints.
struct GronwallClosure {
    double A0 = 0.0;
    double K = 1.0;
    double alpha = 1.0;
    double horizon = 1.0;
    double beta = 0.0;
    std::vector<double> breaks; // ascending, breaks.front() = 0
    std::vector<double> l, m, n, f; // per interval [breaks[i], breaks[i+1])
};

struct GronwallOracleResult {
    std::vector<double> t, A, intB;
    GronwallBound bound_at_end;
    bool holds = true; // A(t) + int B <= bound at every sample
};

// Integrates the closure with adaptive 4th/5th-order stepping, evaluates the
// bound on the sampled instance, and checks domination at every sample.
// Raises HypothesisError if n(t) exceeds K (A+e)^alpha along the trajectory.
GronwallOracleResult gronwall_oracle(const GronwallClosure& c, int samples = 200);

GronwallClosure random_gronwall_closure(std::uint64_t seed);

} // namespace apes
