#pragma once

#include <cstdlib>
#include <memory>
#include <new>

#include "apes/grid.hpp"

namespace apes {

// 64-byte aligned storage so FFTW SIMD paths stay enabled.
template <typename T>
class AlignedVec {
public:
    AlignedVec() = default;
    explicit AlignedVec(std::size_t n) { resize(n); }
    AlignedVec(const AlignedVec& o) { resize(o.n_); std::copy(o.p_, o.p_ + o.n_, p_); }
    AlignedVec(AlignedVec&& o) noexcept : p_(o.p_), n_(o.n_) { o.p_ = nullptr; o.n_ = 0; }
    AlignedVec& operator=(const AlignedVec& o) {
        if (this != &o) { resize(o.n_); std::copy(o.p_, o.p_ + o.n_, p_); }
        return *this;
    }
    AlignedVec& operator=(AlignedVec&& o) noexcept {
        if (this != &o) { free_(); p_ = o.p_; n_ = o.n_; o.p_ = nullptr; o.n_ = 0; }
        return *this;
    }
    ~AlignedVec() { free_(); }

    void resize(std::size_t n) {
        free_();
        n_ = n;
        if (n == 0) { p_ = nullptr; return; }
        std::size_t bytes = (n * sizeof(T) + 63) / 64 * 64;
        p_ = static_cast<T*>(std::aligned_alloc(64, bytes));
        if (!p_) throw std::bad_alloc();
    }
    void fill(const T& v) { for (std::size_t i = 0; i < n_; ++i) p_[i] = v; }

    T* data() { return p_; }
    const T* data() const { return p_; }
    T& operator[](std::size_t i) { return p_[i]; }
    const T& operator[](std::size_t i) const { return p_[i]; }
    std::size_t size() const { return n_; }
    T* begin() { return p_; }
    T* end() { return p_ + n_; }
    const T* begin() const { return p_; }
    const T* end() const { return p_ + n_; }

private:
    void free_() { std::free(p_); p_ = nullptr; n_ = 0; }
    T* p_ = nullptr;
    std::size_t n_ = 0;
};

// Transform pipeline between modal coefficients (m, iy, kx) of one Grid and
// real collocation values (jz, jy, jx) on a target horizontal size
// (NX, NY) >= the retained band, with the grid's periodic z resolution pz.
// Horizontal stage: FFTW r2c / c2r per z-plane. Vertical stage: c2c FFT per
// retained column with cos/sin folding:
//   field = sum_m c_m cos(m pi z / h)   (even)   or   sin(...)  (odd),
// realized through periodic bins g(+-m) with alternating signs, because
// cos(m pi z/h) = (-1)^m cos(2 pi m j / pz) on z_j = -h + 2h j / pz.
//
// One context is not re-entrant: callers run transforms one at a time (all
// parallelism lives inside, over planes and columns).
class TransformContext {
public:
    TransformContext(const Grid& g, int NX, int NY);
    ~TransformContext();
    TransformContext(const TransformContext&) = delete;
    TransformContext& operator=(const TransformContext&) = delete;

    // modal -> real values, out has size pz*NY*NX (jz, jy, jx)
    void inverse(const cplx* modal, Parity parity, double* out);

    // real values -> modal (band-truncated). Returns the squared L2 content
    // removed by the parity projection (weighted Parseval energy) within the
    // retained band; "total" receives the squared L2 norm of both parts.
    double forward(const double* in, Parity parity, cplx* modal, double* total = nullptr);

    // 2D horizontal-only transforms on the target grid (used for surface
    // fields): values laid out (jy, jx), modal (iy, kx) with kx <= NX/2.
    void inverse2d(const cplx* modal, double* out);
    void forward2d(const double* in, cplx* modal);

    const Grid& grid() const { return g_; }
    int NX() const { return NX_; }
    int NY() const { return NY_; }

    // Shared cache keyed by (grid dims, target size).
    static std::shared_ptr<TransformContext> get(const Grid& g, int NX, int NY);

private:
    struct Ws;
    Grid g_;
    int NX_, NY_, NKX_;
    int kxb_;                     // retained kx count = kx_cut + 1
    std::vector<int> ret_iy_;     // retained iy rows of the field grid
    std::vector<std::unique_ptr<Ws>> ws_;
    AlignedVec<cplx> zbuf_;       // (pz, ny, nkx) staging buffer
};

} // namespace apes
