#include "fraflow/resample.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fraflow/spectral.hpp"

namespace fraflow {

namespace {

using cd = std::complex<double>;

// Row i of the matrix evaluates the 1d interpolant at R * x_i:
//   p(x) = (1/n) sum_k c_k exp(i xi_k (x + L)),  k in [-n/2, n/2),
// with the k = -n/2 coefficient applied as cos (real symmetric choice).
std::vector<cd> eval_matrix(const Grid& g, double R) {
    int n = g.n();
    double L = g.half_width();
    std::vector<cd> E(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        double target = R * g.coord(i) + L;
        for (int j = 0; j < n; ++j) {
            int k = j < n / 2 ? j : j - n;
            double th = M_PI * k / L * target;
            cd w = j == n / 2 ? cd(std::cos(th), 0.0) : cd(std::cos(th), std::sin(th));
            E[static_cast<std::size_t>(i) * n + j] = w / static_cast<double>(n);
        }
    }
    return E;
}

// In-place resample of every line along `axis` of a (possibly 2d) array.
void resample_axis(const Grid& g, std::vector<double>& data, int axis,
                   const std::vector<cd>& E) {
    int n = g.n();
    int nlines = g.dim() == 1 ? 1 : n;
    std::size_t stride = 1, step = 1;
    if (g.dim() == 2) {
        if (axis == 0) { stride = static_cast<std::size_t>(n); step = 1; }
        else { stride = 1; step = static_cast<std::size_t>(n); }
    }
    Grid line_grid(1, n, g.half_width());
    for (int l = 0; l < nlines; ++l) {
        std::size_t base = static_cast<std::size_t>(l) * step;
        Field line(line_grid);
        for (int i = 0; i < n; ++i) line.v[i] = data[base + i * stride];
        Spectrum c = forward_fft(line);
        for (int i = 0; i < n; ++i) {
            cd acc(0.0, 0.0);
            const cd* row = E.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) acc += row[j] * c[j];
            data[base + i * stride] = acc.real();
        }
    }
}

}  // namespace

Field resample_scaled(const Field& u, double R) {
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("resample_scaled: scale must be positive and finite");
    if (R == 1.0) return u;
    const Grid& g = u.grid;
    auto E = eval_matrix(g, R);
    Field out = u;
    for (int axis = 0; axis < g.dim(); ++axis) resample_axis(g, out.v, axis, E);
    return out;
}

}  // namespace fraflow
