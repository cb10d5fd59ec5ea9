#include "fraflow/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fraflow {

Grid::Grid(int dim, int n, double half_width)
    : dim_(dim), n_(n), half_width_(half_width) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("Grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (n < 8 || n % 2 != 0)
        throw std::invalid_argument("Grid: n must be even and >= 8, got " + std::to_string(n));
    if (!(half_width > 0.0))
        throw std::invalid_argument("Grid: half width L must be positive");
    size_ = static_cast<std::size_t>(n);
    if (dim == 2) size_ *= static_cast<std::size_t>(n);
}

double Grid::cell_volume() const {
    double h = spacing();
    return dim_ == 1 ? h : h * h;
}

double Grid::freq(int j) const {
    int k = j < n_ / 2 ? j : j - n_;
    return M_PI * k / half_width_;
}

Field::Field(const Grid& g, std::vector<double> data) : grid(g), v(std::move(data)) {
    if (v.size() != g.size())
        throw std::invalid_argument("Field: data size does not match grid");
}

VectorField coordinate_field(const Grid& g) {
    VectorField x(g);
    int n = g.n();
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) x.comp[0][i] = g.coord(i);
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                std::size_t idx = static_cast<std::size_t>(ix) * n + iy;
                x.comp[0][idx] = g.coord(ix);
                x.comp[1][idx] = g.coord(iy);
            }
    }
    return x;
}

void require_finite(const std::vector<double>& v, const char* where) {
    for (double a : v)
        if (!std::isfinite(a))
            throw std::domain_error(std::string(where) + ": non-finite value encountered");
}

}  // namespace fraflow
