#include "apes/fft.hpp"

#include <cstring>
#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>
#include <omp.h>

#include "apes/errors.hpp"
#include "apes/parallel.hpp"

namespace apes {

namespace {
std::mutex planner_mutex; // FFTW's planner is not thread-safe
inline fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
} // namespace

struct TransformContext::Ws {
    AlignedVec<double> rplane;
    AlignedVec<cplx> cplane;
    AlignedVec<cplx> zin, zout;
    fftw_plan r2c = nullptr, c2r = nullptr, zf = nullptr, zb = nullptr;
    ~Ws() {
        std::lock_guard<std::mutex> lk(planner_mutex);
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        if (zf) fftw_destroy_plan(zf);
        if (zb) fftw_destroy_plan(zb);
    }
};

TransformContext::TransformContext(const Grid& g, int NX, int NY)
    : g_(g), NX_(NX), NY_(NY), NKX_(NX / 2 + 1), kxb_(g.kx_cut + 1) {
    for (int iy = 0; iy <= g.ky_cut; ++iy) ret_iy_.push_back(iy);
    for (int iy = g.ny - g.ky_cut; iy < g.ny; ++iy) ret_iy_.push_back(iy);

    zbuf_.resize(static_cast<std::size_t>(g.pz) * g.ny * g.nkx());

    const int nt = worker_count();
    std::lock_guard<std::mutex> lk(planner_mutex);
    for (int t = 0; t < nt; ++t) {
        auto w = std::make_unique<Ws>();
        w->rplane.resize(static_cast<std::size_t>(NY_) * NX_);
        w->cplane.resize(static_cast<std::size_t>(NY_) * NKX_);
        w->zin.resize(static_cast<std::size_t>(g.pz) * kxb_);
        w->zout.resize(static_cast<std::size_t>(g.pz) * kxb_);
        w->r2c = fftw_plan_dft_r2c_2d(NY_, NX_, w->rplane.data(), fc(w->cplane.data()),
                                      FFTW_ESTIMATE);
        w->c2r = fftw_plan_dft_c2r_2d(NY_, NX_, fc(w->cplane.data()), w->rplane.data(),
                                      FFTW_ESTIMATE);
        int n = g.pz;
        w->zf = fftw_plan_many_dft(1, &n, kxb_, fc(w->zin.data()), nullptr, kxb_, 1,
                                   fc(w->zout.data()), nullptr, kxb_, 1, FFTW_FORWARD,
                                   FFTW_ESTIMATE);
        w->zb = fftw_plan_many_dft(1, &n, kxb_, fc(w->zin.data()), nullptr, kxb_, 1,
                                   fc(w->zout.data()), nullptr, kxb_, 1, FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
        ws_.push_back(std::move(w));
    }
}

TransformContext::~TransformContext() = default;

void TransformContext::inverse(const cplx* modal, Parity parity, double* out) {
    const Grid& g = g_;
    const int nkx = g.nkx(), ny = g.ny, pz = g.pz, nz = g.nz;

    // Vertical synthesis into periodic z bins, retained columns only.
    parallel_for(ret_iy_.size(), [&](std::size_t r) {
        Ws& w = *ws_[omp_get_thread_num()];
        const int iy = ret_iy_[r];
        std::fill(w.zin.begin(), w.zin.end(), cplx(0.0));
        for (int m = 0; m <= nz; ++m) {
            const cplx* src = modal + (static_cast<std::size_t>(m) * ny + iy) * nkx;
            const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
            if (parity == Parity::Even) {
                if (m == 0) {
                    for (int kx = 0; kx < kxb_; ++kx) w.zin[kx] += src[kx];
                } else {
                    for (int kx = 0; kx < kxb_; ++kx) {
                        cplx half = 0.5 * sgn * src[kx];
                        w.zin[static_cast<std::size_t>(m) * kxb_ + kx] += half;
                        w.zin[static_cast<std::size_t>(pz - m) * kxb_ + kx] += half;
                    }
                }
            } else {
                if (m == 0) continue; // odd fields have no m = 0 mode
                for (int kx = 0; kx < kxb_; ++kx) {
                    cplx half = cplx(0.0, -0.5) * sgn * src[kx];
                    w.zin[static_cast<std::size_t>(m) * kxb_ + kx] += half;
                    w.zin[static_cast<std::size_t>(pz - m) * kxb_ + kx] -= half;
                }
            }
        }
        fftw_execute(w.zb);
        for (int j = 0; j < pz; ++j) {
            cplx* dst = zbuf_.data() + (static_cast<std::size_t>(j) * ny + iy) * nkx;
            const cplx* srcz = w.zout.data() + static_cast<std::size_t>(j) * kxb_;
            std::memcpy(dst, srcz, sizeof(cplx) * kxb_);
        }
    });

    // Horizontal synthesis plane by plane.
    parallel_for(pz, [&](std::size_t jz) {
        Ws& w = *ws_[omp_get_thread_num()];
        std::fill(w.cplane.begin(), w.cplane.end(), cplx(0.0));
        for (int iy : ret_iy_) {
            const int ky = g.ky_of(iy);
            const int IY = ky >= 0 ? ky : NY_ + ky;
            std::memcpy(w.cplane.data() + static_cast<std::size_t>(IY) * NKX_,
                        zbuf_.data() + (jz * ny + iy) * nkx, sizeof(cplx) * kxb_);
        }
        fftw_execute(w.c2r);
        std::memcpy(out + jz * static_cast<std::size_t>(NY_) * NX_, w.rplane.data(),
                    sizeof(double) * NY_ * NX_);
    });
}

double TransformContext::forward(const double* in, Parity parity, cplx* modal,
                                 double* total) {
    const Grid& g = g_;
    const int nkx = g.nkx(), ny = g.ny, pz = g.pz, nz = g.nz;
    const double hscale = 1.0 / (static_cast<double>(NX_) * NY_);

    parallel_for(pz, [&](std::size_t jz) {
        Ws& w = *ws_[omp_get_thread_num()];
        std::memcpy(w.rplane.data(), in + jz * static_cast<std::size_t>(NY_) * NX_,
                    sizeof(double) * NY_ * NX_);
        fftw_execute(w.r2c);
        for (int iy : ret_iy_) {
            const int ky = g.ky_of(iy);
            const int IY = ky >= 0 ? ky : NY_ + ky;
            cplx* dst = zbuf_.data() + (jz * ny + iy) * nkx;
            const cplx* src = w.cplane.data() + static_cast<std::size_t>(IY) * NKX_;
            for (int kx = 0; kx < kxb_; ++kx) dst[kx] = hscale * src[kx];
        }
    });

    std::fill(modal, modal + g.modal_size(), cplx(0.0));
    std::vector<double> removed_row(ret_iy_.size(), 0.0), total_row(ret_iy_.size(), 0.0);

    parallel_for(ret_iy_.size(), [&](std::size_t r) {
        Ws& w = *ws_[omp_get_thread_num()];
        const int iy = ret_iy_[r];
        for (int j = 0; j < pz; ++j) {
            std::memcpy(w.zin.data() + static_cast<std::size_t>(j) * kxb_,
                        zbuf_.data() + (static_cast<std::size_t>(j) * ny + iy) * nkx,
                        sizeof(cplx) * kxb_);
        }
        fftw_execute(w.zf);
        const double zscale = 1.0 / pz;
        double rem = 0.0, tot = 0.0;
        for (int kx = 0; kx < kxb_; ++kx) {
            const double mult = (kx == 0) ? 1.0 : 2.0; // Hermitian half-spectrum
            const cplx g0 = zscale * w.zout[kx];
            if (parity == Parity::Even) {
                modal[(0 * static_cast<std::size_t>(ny) + iy) * nkx + kx] = g0;
                tot += mult * 2.0 * g.h * std::norm(g0);
            } else {
                rem += mult * 2.0 * g.h * std::norm(g0);
                tot += mult * 2.0 * g.h * std::norm(g0);
            }
            for (int m = 1; m <= nz; ++m) {
                const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
                const cplx gp = zscale * w.zout[static_cast<std::size_t>(m) * kxb_ + kx];
                const cplx gm =
                    zscale * w.zout[static_cast<std::size_t>(pz - m) * kxb_ + kx];
                const cplx ceven = sgn * (gp + gm);
                const cplx codd = cplx(0.0, 1.0) * sgn * (gp - gm);
                const cplx keep = (parity == Parity::Even) ? ceven : codd;
                const cplx drop = (parity == Parity::Even) ? codd : ceven;
                modal[(static_cast<std::size_t>(m) * ny + iy) * nkx + kx] = keep;
                rem += mult * g.h * std::norm(drop);
                tot += mult * g.h * (std::norm(keep) + std::norm(drop));
            }
        }
        removed_row[r] = rem;
        total_row[r] = tot;
    });

    double removed = 0.0, tot = 0.0;
    for (std::size_t r = 0; r < ret_iy_.size(); ++r) {
        removed += removed_row[r];
        tot += total_row[r];
    }
    if (total) *total = tot;
    return removed;
}

void TransformContext::inverse2d(const cplx* modal, double* out) {
    const Grid& g = g_;
    Ws& w = *ws_[0];
    std::fill(w.cplane.begin(), w.cplane.end(), cplx(0.0));
    for (int iy : ret_iy_) {
        const int ky = g.ky_of(iy);
        const int IY = ky >= 0 ? ky : NY_ + ky;
        std::memcpy(w.cplane.data() + static_cast<std::size_t>(IY) * NKX_,
                    modal + static_cast<std::size_t>(iy) * g.nkx(), sizeof(cplx) * kxb_);
    }
    fftw_execute(w.c2r);
    std::memcpy(out, w.rplane.data(), sizeof(double) * NY_ * NX_);
}

void TransformContext::forward2d(const double* in, cplx* modal) {
    const Grid& g = g_;
    Ws& w = *ws_[0];
    std::memcpy(w.rplane.data(), in, sizeof(double) * NY_ * NX_);
    fftw_execute(w.r2c);
    const double hscale = 1.0 / (static_cast<double>(NX_) * NY_);
    std::fill(modal, modal + static_cast<std::size_t>(g.ny) * g.nkx(), cplx(0.0));
    for (int iy : ret_iy_) {
        const int ky = g.ky_of(iy);
        const int IY = ky >= 0 ? ky : NY_ + ky;
        cplx* dst = modal + static_cast<std::size_t>(iy) * g.nkx();
        const cplx* src = w.cplane.data() + static_cast<std::size_t>(IY) * NKX_;
        for (int kx = 0; kx < kxb_; ++kx) dst[kx] = hscale * src[kx];
    }
}

std::shared_ptr<TransformContext> TransformContext::get(const Grid& g, int NX, int NY) {
    using Key = std::tuple<int, int, int, long long, int, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<TransformContext>> cache;
    long long hbits;
    static_assert(sizeof(double) == sizeof(long long));
    std::memcpy(&hbits, &g.h, sizeof(double));
    Key key{g.nx, g.ny, g.nz, hbits, NX, NY};
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto ctx = std::make_shared<TransformContext>(g, NX, NY);
    cache.emplace(key, ctx);
    return ctx;
}

} // namespace apes
