#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fraflow {

// Uniform periodic grid on [-L, L)^d, d = 1 or 2, n points per axis.
// Storage is row-major: in 2d the linear index is ix*n + iy, with axis 0
// the slow one (matches the FFT layout).
class Grid {
public:
    Grid(int dim, int n, double half_width);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return 2.0 * half_width_ / n_; }
    std::size_t size() const { return size_; }
    // Volume element h^d.
    double cell_volume() const;

    // Physical coordinate of 1d index i along an axis: -L + i*h.
    double coord(int i) const { return -half_width_ + i * spacing(); }
    // Angular frequency of transform index j along an axis: pi*k/L with
    // k = j for j < n/2 and k = j - n otherwise.
    double freq(int j) const;

    bool operator==(const Grid& g) const {
        return dim_ == g.dim_ && n_ == g.n_ && half_width_ == g.half_width_;
    }

private:
    int dim_;
    int n_;
    double half_width_;
    std::size_t size_;
};

// Scalar field sampled on a grid.
struct Field {
    Grid grid;
    std::vector<double> v;

    explicit Field(const Grid& g) : grid(g), v(g.size(), 0.0) {}
    Field(const Grid& g, std::vector<double> data);

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

// d-component vector field (gradients, fluxes).
struct VectorField {
    Grid grid;
    std::vector<std::vector<double>> comp;

    explicit VectorField(const Grid& g)
        : grid(g), comp(g.dim(), std::vector<double>(g.size(), 0.0)) {}
};

// Symmetric d x d matrix field; stores the upper triangle
// (d=1: [00]; d=2: [00, 01, 11]).
struct MatrixField {
    Grid grid;
    std::vector<std::vector<double>> comp;

    explicit MatrixField(const Grid& g)
        : grid(g), comp(g.dim() == 1 ? 1 : 3, std::vector<double>(g.size(), 0.0)) {}

    // Index of entry (a,b) in the packed layout.
    int entry(int a, int b) const {
        if (grid.dim() == 1) return 0;
        return a + b;  // (0,0)->0, (0,1)/(1,0)->1, (1,1)->2
    }
};

// Fills a vector field with the box coordinate x (sawtooth across the
// periodic boundary).
VectorField coordinate_field(const Grid& g);

// Throws std::domain_error naming `where` if any entry is non-finite.
void require_finite(const std::vector<double>& v, const char* where);

}  // namespace fraflow
