#include "apes/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "apes/errors.hpp"

namespace apes {

namespace {
constexpr double pi = 3.14159265358979323846;
}

TrigPoly3 TrigPoly3::deriv(int axis) const {
    TrigPoly3 out;
    out.h = h;
    for (const TrigTerm& t : terms) {
        TrigTerm d = t;
        double k = 0.0;
        bool* flag = nullptr;
        if (axis == 0) {
            k = 2.0 * pi * t.kx;
            flag = &d.sx;
        } else if (axis == 1) {
            k = 2.0 * pi * t.ky;
            flag = &d.sy;
        } else {
            k = pi * t.m / h;
            flag = &d.sz;
        }
        if (k == 0.0) continue; // derivative of the constant factor
        // d/dx cos(kx) = -k sin(kx), d/dx sin(kx) = k cos(kx)
        d.amp = t.amp * ((*flag) ? k : -k);
        *flag = !*flag;
        out.terms.push_back(d);
    }
    return out;
}

bool TrigPoly3::odd_in_z() const {
    for (const TrigTerm& t : terms)
        if (t.amp != 0.0 && (!t.sz || t.m == 0)) return false;
    return true;
}

int TrigPoly3::max_k() const {
    int k = 0;
    for (const TrigTerm& t : terms)
        k = std::max({k, std::abs(t.kx), std::abs(t.ky), std::abs(t.m)});
    return k;
}

TrigPoly3 constant_poly(double value, double h) {
    TrigPoly3 p;
    p.h = h;
    p.terms.push_back(TrigTerm{value, 0, 0, 0, false, false, false});
    return p;
}

TrigPoly3 random_poly(std::uint64_t seed, int kmax, int mmax, double h, int zparity,
                      int nterms, double slope) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> kd(0, kmax), md(0, mmax), bd(0, 1);
    TrigPoly3 p;
    p.h = h;
    for (int i = 0; i < nterms; ++i) {
        TrigTerm t;
        t.kx = kd(rng);
        t.ky = kd(rng);
        t.m = md(rng);
        t.sx = t.kx > 0 && bd(rng);
        t.sy = t.ky > 0 && bd(rng);
        if (zparity < 0) {
            t.sz = true;
            if (t.m == 0) t.m = 1 + (md(rng) % std::max(1, mmax));
        } else if (zparity > 0) {
            t.sz = false;
        } else {
            t.sz = t.m > 0 && bd(rng);
        }
        const double k2 = double(t.kx) * t.kx + double(t.ky) * t.ky + double(t.m) * t.m;
        t.amp = gauss(rng) * std::pow(1.0 + k2, -slope / 2.0);
        p.terms.push_back(t);
    }
    return p;
}

EvalGrid default_eval_grid(const std::vector<const TrigPoly3*>& fields,
                           int resolution) {
    if (resolution < 1) throw ValidationError("quadrature resolution must be >= 1");
    int kmax = 1;
    double h = 1.0;
    for (const TrigPoly3* f : fields) {
        kmax = std::max(kmax, f->max_k());
        h = f->h;
    }
    // "2x the Nyquist" of the generating spectrum at resolution = 2; exact
    // for fourth powers of the fields. Multiples of 4 keep the quarter-period
    // extrema of the basis functions on the grid.
    int g = resolution * (2 * kmax + 1) + 1;
    g += (4 - g % 4) % 4;
    g = std::max(g, 12);
    return EvalGrid{g, g, g, h};
}

std::vector<double> evaluate(const TrigPoly3& f, const EvalGrid& g) {
    std::vector<double> out(static_cast<std::size_t>(g.gz) * g.gy * g.gx, 0.0);
    std::vector<double> tx(g.gx), ty(g.gy), tz(g.gz);
    for (const TrigTerm& t : f.terms) {
        if (t.amp == 0.0) continue;
        for (int j = 0; j < g.gx; ++j) {
            const double a = 2.0 * pi * t.kx * j / g.gx;
            tx[j] = t.sx ? std::sin(a) : std::cos(a);
        }
        for (int j = 0; j < g.gy; ++j) {
            const double a = 2.0 * pi * t.ky * j / g.gy;
            ty[j] = t.sy ? std::sin(a) : std::cos(a);
        }
        for (int j = 0; j < g.gz; ++j) {
            const double z = -g.h + 2.0 * g.h * j / g.gz;
            const double a = pi * t.m * z / g.h;
            tz[j] = t.sz ? std::sin(a) : std::cos(a);
        }
        std::size_t idx = 0;
        for (int jz = 0; jz < g.gz; ++jz) {
            const double az = t.amp * tz[jz];
            for (int jy = 0; jy < g.gy; ++jy) {
                const double ay = az * ty[jy];
                for (int jx = 0; jx < g.gx; ++jx) out[idx++] += ay * tx[jx];
            }
        }
    }
    return out;
}

namespace {

struct Quad {
    EvalGrid g;
    double dV() const { return (1.0 / g.gx) * (1.0 / g.gy) * (2.0 * g.h / g.gz); }
    double dA() const { return (1.0 / g.gx) * (1.0 / g.gy); }
    double dz() const { return 2.0 * g.h / g.gz; }
    std::size_t n() const { return static_cast<std::size_t>(g.gz) * g.gy * g.gx; }
    std::size_t slice() const { return static_cast<std::size_t>(g.gy) * g.gx; }
};

double lq_omega(const Quad& q, const std::vector<double>& v, double p) {
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s * q.dV(), 1.0 / p);
}

double l2_omega(const Quad& q, const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s * q.dV());
}

double sup_omega(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// || f(.,z) ||_{p, M} for one z-slice
double lp_slice(const Quad& q, const std::vector<double>& v, int jz, double p) {
    const std::size_t off = jz * q.slice();
    double s = 0.0;
    for (std::size_t i = 0; i < q.slice(); ++i) s += std::pow(std::abs(v[off + i]), p);
    return std::pow(s * q.dA(), 1.0 / p);
}

double sup_slice(const Quad& q, const std::vector<double>& v, int jz) {
    const std::size_t off = jz * q.slice();
    double s = 0.0;
    for (std::size_t i = 0; i < q.slice(); ++i) s = std::max(s, std::abs(v[off + i]));
    return s;
}

// column integrals int_-h^h |a| dz (and |a b| dz) as (gy*gx) planes
std::vector<double> column_abs_integral(const Quad& q, const std::vector<double>& a) {
    std::vector<double> out(q.slice(), 0.0);
    for (int jz = 0; jz < q.g.gz; ++jz) {
        const std::size_t off = jz * q.slice();
        for (std::size_t i = 0; i < q.slice(); ++i) out[i] += std::abs(a[off + i]);
    }
    for (double& x : out) x *= q.dz();
    return out;
}

std::vector<double> column_absprod_integral(const Quad& q, const std::vector<double>& a,
                                            const std::vector<double>& b) {
    std::vector<double> out(q.slice(), 0.0);
    for (int jz = 0; jz < q.g.gz; ++jz) {
        const std::size_t off = jz * q.slice();
        for (std::size_t i = 0; i < q.slice(); ++i)
            out[i] += std::abs(a[off + i] * b[off + i]);
    }
    for (double& x : out) x *= q.dz();
    return out;
}

double plane_product_integral(const Quad& q, const std::vector<double>& a,
                              const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.slice(); ++i) s += a[i] * b[i];
    return s * q.dA();
}

double grad_h_l2(const Quad& q, const std::vector<double>& fx,
                 const std::vector<double>& fy) {
    double s = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) s += fx[i] * fx[i] + fy[i] * fy[i];
    return std::sqrt(s * q.dV());
}

InequalityCase finish(const std::string& name, double lhs, double rhs) {
    InequalityCase c;
    c.name = name;
    c.lhs = lhs;
    c.rhs_structural = rhs;
    c.ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    return c;
}

} // namespace

int inequality_field_count(const std::string& name) {
    if (name == "lad" || name == "ineqlad" || name == "ineqlad1") return 3;
    if (name == "bkm") return 2;
    if (name == "lem2_3_a" || name == "lem2_3_b" || name == "lem2_3_c" ||
        name == "lem2_3_d" || name == "zt4" || name == "ht4" ||
        name == "log_sobolev" || name == "bgw")
        return 1;
    throw ValidationError("unknown inequality case: " + name);
}

bool inequality_has_explicit_constant(const std::string& name) {
    return name == "ineqlad" || name == "ineqlad1" || name == "zt4" || name == "ht4";
}

bool inequality_is_homogeneous(const std::string& name) {
    return name == "lad" || name == "ineqlad" || name == "ineqlad1" ||
           name == "lem2_3_a" || name == "lem2_3_b" || name == "lem2_3_c" ||
           name == "lem2_3_d" || name == "zt4" || name == "ht4";
}

InequalityCase check_inequality(const std::string& name,
                                const std::vector<TrigPoly3>& fields, int resolution) {
    if (static_cast<int>(fields.size()) != inequality_field_count(name))
        throw HypothesisError(name + ": wrong number of input fields");
    std::vector<const TrigPoly3*> fp;
    for (const auto& f : fields) fp.push_back(&f);
    const EvalGrid g = default_eval_grid(fp, resolution);
    const Quad q{g};

    if (name == "lad" || name == "ineqlad" || name == "ineqlad1") {
        auto A = evaluate(fields[0], g);
        auto B = evaluate(fields[1], g);
        auto C = evaluate(fields[2], g);
        if (name == "lad") {
            auto colA = column_abs_integral(q, A);
            auto colBC = column_absprod_integral(q, B, C);
            const double lhs = plane_product_integral(q, colA, colBC);
            auto Bx = evaluate(fields[1].deriv(0), g);
            auto By = evaluate(fields[1].deriv(1), g);
            auto Cx = evaluate(fields[2].deriv(0), g);
            auto Cy = evaluate(fields[2].deriv(1), g);
            const double nB = l2_omega(q, B), nC = l2_omega(q, C);
            const double gB = grad_h_l2(q, Bx, By), gC = grad_h_l2(q, Cx, Cy);
            const double rhs = l2_omega(q, A) * std::sqrt(nB) *
                               (std::sqrt(nB) + std::sqrt(gB)) * std::sqrt(nC) *
                               (std::sqrt(nC) + std::sqrt(gC));
            return finish(name, lhs, rhs);
        }
        if (name == "ineqlad") {
            auto colA = column_abs_integral(q, A);
            auto colBC = column_absprod_integral(q, B, C);
            const double lhs = plane_product_integral(q, colA, colBC);
            double intA4 = 0.0, intB4sq = 0.0;
            for (int jz = 0; jz < g.gz; ++jz) {
                intA4 += lp_slice(q, A, jz, 4.0);
                const double b4 = lp_slice(q, B, jz, 4.0);
                intB4sq += b4 * b4;
            }
            intA4 *= q.dz();
            intB4sq *= q.dz();
            const double rhs = intA4 * std::sqrt(intB4sq) * l2_omega(q, C);
            return finish(name, lhs, rhs);
        }
        // ineqlad1
        auto colAB = column_absprod_integral(q, A, B);
        auto colC = column_abs_integral(q, C);
        const double lhs = plane_product_integral(q, colAB, colC);
        double intA4sq = 0.0, intB4sq = 0.0, intC2 = 0.0;
        for (int jz = 0; jz < g.gz; ++jz) {
            const double a4 = lp_slice(q, A, jz, 4.0);
            const double b4 = lp_slice(q, B, jz, 4.0);
            intA4sq += a4 * a4;
            intB4sq += b4 * b4;
            intC2 += lp_slice(q, C, jz, 2.0);
        }
        intA4sq *= q.dz();
        intB4sq *= q.dz();
        intC2 *= q.dz();
        const double rhs = std::sqrt(intA4sq) * std::sqrt(intB4sq) * intC2;
        return finish(name, lhs, rhs);
    }

    if (name == "lem2_3_a" || name == "lem2_3_b") {
        auto F = evaluate(fields[0], g);
        auto Fx = evaluate(fields[0].deriv(0), g);
        auto Fy = evaluate(fields[0].deriv(1), g);
        double int42 = 0.0, int4 = 0.0;
        for (int jz = 0; jz < g.gz; ++jz) {
            const double f4 = lp_slice(q, F, jz, 4.0);
            int42 += f4 * f4;
            int4 += f4;
        }
        int42 *= q.dz();
        int4 *= q.dz();
        const double n2 = l2_omega(q, F);
        const double gn = grad_h_l2(q, Fx, Fy);
        const double base = std::sqrt(n2) * std::sqrt(gn) + n2;
        if (name == "lem2_3_a") return finish(name, std::sqrt(int42), base);
        return finish(name, int4, std::sqrt(g.h) * base);
    }

    if (name == "lem2_3_c" || name == "lem2_3_d") {
        auto Fx = evaluate(fields[0].deriv(0), g);
        auto Fy = evaluate(fields[0].deriv(1), g);
        std::vector<double> mag(Fx.size());
        for (std::size_t i = 0; i < Fx.size(); ++i) mag[i] = std::hypot(Fx[i], Fy[i]);
        double int42 = 0.0, int4 = 0.0;
        for (int jz = 0; jz < g.gz; ++jz) {
            const double f4 = lp_slice(q, mag, jz, 4.0);
            int42 += f4 * f4;
            int4 += f4;
        }
        int42 *= q.dz();
        int4 *= q.dz();
        auto Fxx = evaluate(fields[0].deriv(0).deriv(0), g);
        auto Fxy = evaluate(fields[0].deriv(0).deriv(1), g);
        auto Fyy = evaluate(fields[0].deriv(1).deriv(1), g);
        double h2 = 0.0;
        for (std::size_t i = 0; i < Fxx.size(); ++i)
            h2 += Fxx[i] * Fxx[i] + 2.0 * Fxy[i] * Fxy[i] + Fyy[i] * Fyy[i];
        h2 = std::sqrt(h2 * q.dV());
        const double g1 = grad_h_l2(q, Fx, Fy);
        const double base = std::sqrt(g1) * std::sqrt(h2);
        if (name == "lem2_3_c") return finish(name, std::sqrt(int42), base);
        return finish(name, int4, std::sqrt(g.h) * base);
    }

    if (name == "zt4" || name == "ht4") {
        if (name == "zt4" && !fields[0].odd_in_z())
            throw HypothesisError("zt4 requires an odd-in-z temperature field");
        auto T = evaluate(fields[0], g);
        const double supT = sup_omega(T);
        if (name == "zt4") {
            auto Tz = evaluate(fields[0].deriv(2), g);
            auto Tzz = evaluate(fields[0].deriv(2).deriv(2), g);
            const double lhs = std::pow(lq_omega(q, Tz, 4.0), 2.0);
            const double rhs = 3.0 * supT * l2_omega(q, Tzz);
            return finish(name, lhs, rhs);
        }
        auto Tx = evaluate(fields[0].deriv(0), g);
        auto Ty = evaluate(fields[0].deriv(1), g);
        std::vector<double> mag(Tx.size());
        for (std::size_t i = 0; i < Tx.size(); ++i) mag[i] = std::hypot(Tx[i], Ty[i]);
        auto Txx = evaluate(fields[0].deriv(0).deriv(0), g);
        auto Tyy = evaluate(fields[0].deriv(1).deriv(1), g);
        std::vector<double> lap(Txx.size());
        for (std::size_t i = 0; i < Txx.size(); ++i) lap[i] = Txx[i] + Tyy[i];
        const double lhs = std::pow(lq_omega(q, mag, 4.0), 2.0);
        const double rhs = 3.0 * supT * l2_omega(q, lap);
        return finish(name, lhs, rhs);
    }

    if (name == "log_sobolev") {
        // lambda = 1/2, p = 4; sup over r in {2, 4, ..., 64} (documented
        // truncation of sup_{r >= 2}).
        const double lambda = 0.5, p = 4.0;
        auto F = evaluate(fields[0], g);
        auto Fx = evaluate(fields[0].deriv(0), g);
        auto Fy = evaluate(fields[0].deriv(1), g);
        auto Fz = evaluate(fields[0].deriv(2), g);
        double supr = 0.0;
        for (int r = 2; r <= 64; r += 2)
            supr = std::max(supr, lq_omega(q, F, r) / std::pow(double(r), lambda));
        const double w1p = lq_omega(q, F, p) + lq_omega(q, Fx, p) +
                           lq_omega(q, Fy, p) + lq_omega(q, Fz, p);
        const double lhs = sup_omega(F);
        const double rhs =
            std::max(1.0, supr) * std::pow(std::log(w1p + M_E), lambda);
        return finish(name, lhs, rhs);
    }

    if (name == "bgw") {
        auto F = evaluate(fields[0], g);
        auto Fx = evaluate(fields[0].deriv(0), g);
        auto Fy = evaluate(fields[0].deriv(1), g);
        auto Fxx = evaluate(fields[0].deriv(0).deriv(0), g);
        auto Fxy = evaluate(fields[0].deriv(0).deriv(1), g);
        auto Fyy = evaluate(fields[0].deriv(1).deriv(1), g);
        InequalityCase best = finish(name, 0.0, 1.0);
        for (int jz = 0; jz < g.gz; ++jz) {
            auto sl2 = [&](const std::vector<double>& v) {
                return lp_slice(q, v, jz, 2.0);
            };
            const double h1 = std::sqrt(sl2(F) * sl2(F) + sl2(Fx) * sl2(Fx) +
                                        sl2(Fy) * sl2(Fy));
            const double h2 =
                std::sqrt(h1 * h1 + sl2(Fxx) * sl2(Fxx) + 2.0 * sl2(Fxy) * sl2(Fxy) +
                          sl2(Fyy) * sl2(Fyy));
            const double lhs = sup_slice(q, F, jz);
            const double rhs = (1.0 + h1) * std::sqrt(std::log(M_E + h2));
            if (rhs > 0.0 && lhs / rhs > best.ratio) best = finish(name, lhs, rhs);
        }
        return best;
    }

    if (name == "bkm") {
        // vector field (g1, g2) per slice; the log argument uses the
        // W^{1,q}(M) norm of grad_H g (the form used where the bound is
        // applied), q = 4, sum convention.
        const double qq = 4.0;
        auto G1 = evaluate(fields[0], g);
        auto G2 = evaluate(fields[1], g);
        auto G1x = evaluate(fields[0].deriv(0), g);
        auto G1y = evaluate(fields[0].deriv(1), g);
        auto G2x = evaluate(fields[1].deriv(0), g);
        auto G2y = evaluate(fields[1].deriv(1), g);
        (void)G1;
        (void)G2;
        auto G1xx = evaluate(fields[0].deriv(0).deriv(0), g);
        auto G1xy = evaluate(fields[0].deriv(0).deriv(1), g);
        auto G1yy = evaluate(fields[0].deriv(1).deriv(1), g);
        auto G2xx = evaluate(fields[1].deriv(0).deriv(0), g);
        auto G2xy = evaluate(fields[1].deriv(0).deriv(1), g);
        auto G2yy = evaluate(fields[1].deriv(1).deriv(1), g);

        InequalityCase best = finish(name, 0.0, 1.0);
        std::vector<double> gradmag(q.slice()), curl(q.slice()), divg(q.slice());
        for (int jz = 0; jz < g.gz; ++jz) {
            const std::size_t off = jz * q.slice();
            for (std::size_t i = 0; i < q.slice(); ++i) {
                const double a = G1x[off + i], b = G1y[off + i];
                const double c = G2x[off + i], d = G2y[off + i];
                gradmag[i] = std::sqrt(a * a + b * b + c * c + d * d);
                curl[i] = c - b;
                divg[i] = a + d;
            }
            double lhs = 0.0, supc = 0.0, supd = 0.0;
            for (std::size_t i = 0; i < q.slice(); ++i) {
                lhs = std::max(lhs, gradmag[i]);
                supc = std::max(supc, std::abs(curl[i]));
                supd = std::max(supd, std::abs(divg[i]));
            }
            auto slq = [&](const std::vector<double>& v) {
                return lp_slice(q, v, jz, qq);
            };
            const double w1q = slq(G1x) + slq(G1y) + slq(G2x) + slq(G2y) +
                               slq(G1xx) + slq(G1xy) + slq(G1yy) + slq(G2xx) +
                               slq(G2xy) + slq(G2yy);
            const double rhs = (supc + supd + 1.0) * std::log(M_E + w1q);
            if (rhs > 0.0 && lhs / rhs > best.ratio) best = finish(name, lhs, rhs);
        }
        return best;
    }

    throw ValidationError("unknown inequality case: " + name);
}

EnsembleReport empirical_constant(const std::string& name, const EnsembleSpec& spec) {
    if (spec.count < 1) throw ValidationError("ensemble count must be >= 1");
    const int nf = inequality_field_count(name);
    const int zparity = (name == "zt4" || name == "ht4") ? -1 : 0;

    EnsembleReport rep;
    rep.name = name;
    for (int i = 0; i < spec.count; ++i) {
        std::vector<TrigPoly3> fields;
        for (int j = 0; j < nf; ++j)
            fields.push_back(random_poly(spec.seed * 1000003ULL + i * 17ULL + j,
                                         spec.kmax, spec.mmax, spec.h, zparity));
        rep.cases.push_back(check_inequality(name, fields, spec.resolution));
        rep.max_ratio = std::max(rep.max_ratio, rep.cases.back().ratio);
    }
    rep.histogram.assign(20, 0);
    if (rep.max_ratio > 0.0) {
        for (const auto& c : rep.cases) {
            int bin = static_cast<int>(19.999 * c.ratio / rep.max_ratio);
            bin = std::clamp(bin, 0, 19);
            ++rep.histogram[bin];
        }
    }
    return rep;
}

// ---- logarithmic Gronwall oracle ----------------------------------------------

namespace {

struct PiecewiseCoeffs {
    const GronwallClosure& c;
    int interval(double t) const {
        int i = static_cast<int>(std::upper_bound(c.breaks.begin(), c.breaks.end(), t) -
                                 c.breaks.begin()) -
                1;
        return std::clamp(i, 0, static_cast<int>(c.l.size()) - 1);
    }
};

} // namespace

GronwallOracleResult gronwall_oracle(const GronwallClosure& c, int samples) {
    if (c.breaks.size() < 2 || c.l.size() != c.breaks.size() - 1 ||
        c.m.size() != c.l.size() || c.n.size() != c.l.size() || c.f.size() != c.l.size())
        throw ValidationError("gronwall closure: inconsistent piecewise data");
    if (c.A0 < 0.0 || c.beta < 0.0 || !(c.K > 0.0) || !(c.alpha > 0.0))
        throw ValidationError("gronwall closure: negative inputs");
    for (std::size_t i = 0; i < c.l.size(); ++i)
        if (c.l[i] < 0 || c.m[i] < 0 || c.n[i] < 0 || c.f[i] < 0)
            throw ValidationError("gronwall closure: negative coefficient");

    PiecewiseCoeffs pc{c};

    auto hypothesis_ok = [&](double t, double A) {
        return c.n[pc.interval(t)] <=
               c.K * std::pow(A + M_E, c.alpha) * (1.0 + 1e-12);
    };

    // y = (A, intB); equality version of the differential inequality
    auto deriv = [&](double t, double A, double dy[2]) {
        const int i = pc.interval(t);
        const double B = c.beta * A;
        dy[0] = (c.l[i] + c.m[i] * std::log(A + M_E) +
                 c.n[i] * std::log(A + B + M_E)) *
                    (A + M_E) +
                c.f[i] - B;
        dy[1] = B;
    };

    // Cash-Karp 4(5) with step control, integrating sample to sample.
    GronwallOracleResult out;
    const double dt_out = c.horizon / samples;
    double A = c.A0, intB = 0.0, t = 0.0;
    out.t.push_back(0.0);
    out.A.push_back(A);
    out.intB.push_back(0.0);
    if (!hypothesis_ok(0.0, A))
        throw HypothesisError("gronwall closure: n(t) exceeds K (A+e)^alpha");

    auto rk_step = [&](double tt, double y[2], double hstep, double ynew[2],
                       double err[2]) {
        static const double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
        static const double b21 = 0.2;
        static const double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
        static const double b41 = 0.3, b42 = -0.9, b43 = 1.2;
        static const double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                            b54 = 35.0 / 27.0;
        static const double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                            b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                            b65 = 253.0 / 4096.0;
        static const double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                            c6 = 512.0 / 1771.0;
        static const double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                            d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                            d6 = c6 - 0.25;
        double k1[2], k2[2], k3[2], k4[2], k5[2], k6[2], ytmp;
        deriv(tt, y[0], k1);
        ytmp = y[0] + hstep * b21 * k1[0];
        deriv(tt + a2 * hstep, ytmp, k2);
        ytmp = y[0] + hstep * (b31 * k1[0] + b32 * k2[0]);
        deriv(tt + a3 * hstep, ytmp, k3);
        ytmp = y[0] + hstep * (b41 * k1[0] + b42 * k2[0] + b43 * k3[0]);
        deriv(tt + a4 * hstep, ytmp, k4);
        ytmp = y[0] + hstep * (b51 * k1[0] + b52 * k2[0] + b53 * k3[0] + b54 * k4[0]);
        deriv(tt + a5 * hstep, ytmp, k5);
        ytmp = y[0] + hstep * (b61 * k1[0] + b62 * k2[0] + b63 * k3[0] + b64 * k4[0] +
                               b65 * k5[0]);
        deriv(tt + a6 * hstep, ytmp, k6);
        for (int j = 0; j < 2; ++j) {
            ynew[j] = y[j] + hstep * (c1 * k1[j] + c3 * k3[j] + c4 * k4[j] + c6 * k6[j]);
            err[j] = hstep * (d1 * k1[j] + d3 * k3[j] + d4 * k4[j] + d5 * k5[j] +
                              d6 * k6[j]);
        }
    };

    for (int sidx = 1; sidx <= samples; ++sidx) {
        const double t_target = sidx * dt_out;
        double hstep = std::min(dt_out, t_target - t);
        while (t < t_target - 1e-15 * c.horizon) {
            hstep = std::min(hstep, t_target - t);
            double y[2] = {A, intB}, ynew[2], err[2];
            rk_step(t, y, hstep, ynew, err);
            const double tol = 1e-10 * std::max({1.0, std::abs(y[0]), std::abs(ynew[0])});
            const double e = std::max(std::abs(err[0]), std::abs(err[1]));
            if (e > tol) {
                hstep *= std::max(0.2, 0.9 * std::pow(tol / e, 0.25));
                continue;
            }
            t += hstep;
            A = ynew[0];
            intB = ynew[1];
            if (!hypothesis_ok(t, A))
                throw HypothesisError("gronwall closure: n(t) exceeds K (A+e)^alpha");
            if (e > 0.0)
                hstep = std::min(dt_out, hstep * std::min(5.0, 0.9 * std::pow(tol / e, 0.2)));
        }
        t = t_target;
        out.t.push_back(t);
        out.A.push_back(A);
        out.intB.push_back(intB);
    }

    // Bound evaluated on the sampled instance.
    GronwallInstance inst;
    inst.A0 = c.A0;
    inst.K = c.K;
    inst.alpha = c.alpha;
    inst.horizon = c.horizon;
    inst.times = out.t;
    for (double tt : out.t) {
        const int i = pc.interval(std::min(tt, c.horizon * (1.0 - 1e-15)));
        inst.l.push_back(c.l[i]);
        inst.m.push_back(c.m[i]);
        inst.n.push_back(c.n[i]);
        inst.f.push_back(c.f[i]);
    }

    out.holds = true;
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        GronwallBound b = gronwall_bound(inst, out.t[i]);
        const double lhs = std::log(out.A[i] + out.intB[i] + 1e-300);
        if (lhs > b.log_bound) out.holds = false;
        if (i + 1 == out.t.size()) out.bound_at_end = b;
    }
    return out;
}

GronwallClosure random_gronwall_closure(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GronwallClosure c;
    c.horizon = 0.5 + 1.5 * u(rng);
    c.A0 = 2.0 * u(rng);
    c.K = 0.5 + 2.5 * u(rng);
    c.alpha = 0.5 + 2.5 * u(rng);
    c.beta = 5.0 * u(rng);
    const int pieces = 4;
    c.breaks.push_back(0.0);
    for (int i = 1; i < pieces; ++i) c.breaks.push_back(c.horizon * i / pieces);
    c.breaks.push_back(c.horizon);
    const double nmax = 0.99 * c.K * std::exp(c.alpha); // hypothesis-safe since A >= 0
    for (int i = 0; i < pieces; ++i) {
        c.l.push_back(1.5 * u(rng));
        c.m.push_back(1.5 * u(rng));
        c.n.push_back(std::min(1.5, nmax) * u(rng));
        c.f.push_back(1.5 * u(rng));
    }
    return c;
}

} // namespace apes
