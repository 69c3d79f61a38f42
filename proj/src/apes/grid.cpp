#include "apes/grid.hpp"

#include "apes/errors.hpp"

namespace apes {

namespace {
bool five_smooth(int n) {
    for (int p : {2, 3, 5})
        while (n % p == 0) n /= p;
    return n == 1;
}
} // namespace

int fast_even_size(int n) {
    int m = n + (n % 2);
    while (!five_smooth(m)) m += 2;
    return m;
}

Grid::Grid(int nx_, int ny_, int nz_, double h_) : nx(nx_), ny(ny_), nz(nz_), h(h_) {
    if (nx < 8 || ny < 8 || nx % 2 || ny % 2)
        throw ValidationError("grid: nx, ny must be even and >= 8");
    if (nz < 4) throw ValidationError("grid: nz must be >= 4");
    if (!(h > 0.0)) throw ValidationError("grid: h must be > 0");
    kx_cut = nx / 3;
    ky_cut = ny / 3;
    // Alias-free quadratic products need p - 2k > k, i.e. p >= 3k + 1.
    px = fast_even_size(3 * kx_cut + 1);
    py = fast_even_size(3 * ky_cut + 1);
    pz = fast_even_size(3 * nz + 1);
}

} // namespace apes
