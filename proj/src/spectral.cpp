#include "fraflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fraflow/reduce.hpp"

namespace fraflow {

namespace {

// One forward/backward c2c plan pair per (dim, n). Plans are created with
// FFTW_UNALIGNED so fftw_execute_dft may run on any caller buffer, which is
// thread safe; only planning itself needs the lock.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(const Grid& g) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(g.dim(), g.n());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> buf(g.size());
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair pp;
    if (g.dim() == 1) {
        pp.fwd = fftw_plan_dft_1d(g.n(), p, p, FFTW_FORWARD, flags);
        pp.bwd = fftw_plan_dft_1d(g.n(), p, p, FFTW_BACKWARD, flags);
    } else {
        pp.fwd = fftw_plan_dft_2d(g.n(), g.n(), p, p, FFTW_FORWARD, flags);
        pp.bwd = fftw_plan_dft_2d(g.n(), g.n(), p, p, FFTW_BACKWARD, flags);
    }
    return cache.emplace(key, pp).first->second;
}

// Applies `sym(jx, jy)` as a complex multiplier in place. `jy` is unused in 1d.
template <class Sym>
void apply_symbol(const Grid& g, Spectrum& s, Sym&& sym) {
    int n = g.n();
    if (g.dim() == 1) {
        for (int j = 0; j < n; ++j) s[j] *= sym(j, 0);
    } else {
        for (int jx = 0; jx < n; ++jx)
            for (int jy = 0; jy < n; ++jy)
                s[static_cast<std::size_t>(jx) * n + jy] *= sym(jx, jy);
    }
}

bool on_nyquist(const Grid& g, int jx, int jy) {
    int ny = g.n() / 2;
    return jx == ny || (g.dim() == 2 && jy == ny);
}

double xi_norm2(const Grid& g, int jx, int jy) {
    double a = g.freq(jx);
    if (g.dim() == 1) return a * a;
    double b = g.freq(jy);
    return a * a + b * b;
}

}  // namespace

Spectrum forward_fft(const Field& w) {
    Spectrum s(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) s[i] = w.v[i];
    auto& pp = plans_for(w.grid);
    auto* p = reinterpret_cast<fftw_complex*>(s.data());
    fftw_execute_dft(pp.fwd, p, p);
    return s;
}

Field inverse_fft(const Grid& g, const Spectrum& s) {
    if (s.size() != g.size()) throw std::invalid_argument("inverse_fft: size mismatch");
    Spectrum buf = s;
    auto& pp = plans_for(g);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(pp.bwd, p, p);
    Field out(g);
    double scale = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = buf[i].real() * scale;
    return out;
}

Field frac_laplacian(const Field& w, double beta) {
    if (!(beta > -1.0 && beta <= 1.0))
        throw std::invalid_argument("frac_laplacian: beta must lie in (-1, 1]");
    require_finite(w.v, "frac_laplacian");
    if (beta == 0.0) return w;
    const Grid& g = w.grid;
    Spectrum s = forward_fft(w);
    apply_symbol(g, s, [&](int jx, int jy) -> double {
        if (on_nyquist(g, jx, jy)) return 0.0;
        double k2 = xi_norm2(g, jx, jy);
        if (k2 == 0.0) return 0.0;
        return std::pow(k2, beta);
    });
    return inverse_fft(g, s);
}

VectorField riesz_gradient(const Field& w, double s) {
    if (!(s >= -0.5 && s < 1.0))
        throw std::invalid_argument("riesz_gradient: order s must lie in [-0.5, 1)");
    require_finite(w.v, "riesz_gradient");
    const Grid& g = w.grid;
    Spectrum base = forward_fft(w);
    VectorField out(g);
    for (int axis = 0; axis < g.dim(); ++axis) {
        Spectrum comp = base;
        apply_symbol(g, comp, [&](int jx, int jy) -> std::complex<double> {
            if (on_nyquist(g, jx, jy)) return {0.0, 0.0};
            double k2 = xi_norm2(g, jx, jy);
            if (k2 == 0.0) return {0.0, 0.0};
            double xj = axis == 0 ? g.freq(jx) : g.freq(jy);
            double mag = s == 0.0 ? 1.0 : std::pow(k2, -s);
            return {0.0, xj * mag};
        });
        out.comp[axis] = inverse_fft(g, comp).v;
    }
    return out;
}

VectorField gradient(const Field& w) { return riesz_gradient(w, 0.0); }

Field divergence(const VectorField& V) {
    const Grid& g = V.grid;
    Spectrum acc(g.size(), {0.0, 0.0});
    for (int axis = 0; axis < g.dim(); ++axis) {
        require_finite(V.comp[axis], "divergence");
        Spectrum s = forward_fft(Field(g, V.comp[axis]));
        apply_symbol(g, s, [&](int jx, int jy) -> std::complex<double> {
            if (on_nyquist(g, jx, jy)) return {0.0, 0.0};
            double xj = axis == 0 ? g.freq(jx) : g.freq(jy);
            return {0.0, xj};
        });
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s[i];
    }
    acc[0] = 0.0;  // zero mean by construction
    return inverse_fft(g, acc);
}

MatrixField hessian(const Field& w) {
    require_finite(w.v, "hessian");
    const Grid& g = w.grid;
    Spectrum base = forward_fft(w);
    MatrixField out(g);
    int d = g.dim();
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            Spectrum s = base;
            apply_symbol(g, s, [&](int jx, int jy) -> double {
                if (on_nyquist(g, jx, jy)) return 0.0;
                double xa = a == 0 ? g.freq(jx) : g.freq(jy);
                double xb = b == 0 ? g.freq(jx) : g.freq(jy);
                return -xa * xb;
            });
            out.comp[out.entry(a, b)] = inverse_fft(g, s).v;
        }
    return out;
}

Field resolvent_frac_laplacian(const Field& w, double beta, double a, double c) {
    if (!(beta > 0.0 && beta <= 1.0) || !(a >= 0.0) || !(c > 0.0))
        throw std::invalid_argument("resolvent_frac_laplacian: bad parameters");
    require_finite(w.v, "resolvent_frac_laplacian");
    const Grid& g = w.grid;
    Spectrum s = forward_fft(w);
    // Even positive symbol: well defined on the whole lattice, Nyquist included.
    apply_symbol(g, s, [&](int jx, int jy) -> double {
        double k2 = xi_norm2(g, jx, jy);
        double lam = k2 == 0.0 ? 0.0 : std::pow(k2, beta);
        return 1.0 / (a * lam + c);
    });
    return inverse_fft(g, s);
}

Field lowpass(const Field& w, double cut, double width) {
    if (!(cut > 0.0) || !(width > 0.0) || !(width < cut))
        throw std::invalid_argument("lowpass: need 0 < width < cut");
    require_finite(w.v, "lowpass");
    const Grid& g = w.grid;
    double nyq = std::abs(g.freq(g.n() / 2));
    Spectrum s = forward_fft(w);
    apply_symbol(g, s, [&](int jx, int jy) -> double {
        double kappa = std::sqrt(xi_norm2(g, jx, jy)) / nyq;
        double t = (cut - kappa) / width;
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return t * t * (3.0 - 2.0 * t);
    });
    return inverse_fft(g, s);
}

double integrate(const Field& w) {
    return w.grid.cell_volume() * pairwise_sum(w.v);
}

double inner(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("inner: grid mismatch");
    return a.grid.cell_volume() * pairwise_dot(a.v, b.v);
}

double lp_norm(const Field& w, double r) {
    if (!(r >= 1.0)) throw std::invalid_argument("lp_norm: r must be >= 1");
    std::vector<double> p(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) p[i] = std::pow(std::abs(w.v[i]), r);
    double s = w.grid.cell_volume() * pairwise_sum(p);
    return std::pow(s, 1.0 / r);
}

double hs_seminorm(const Field& w, double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("hs_seminorm: alpha must lie in (0, 2]");
    return inner(w, frac_laplacian(w, alpha / 2.0));
}

double boundary_mass_fraction(const Field& w) {
    const Grid& g = w.grid;
    int n = g.n();
    double half = g.half_width() / 2.0;
    std::vector<double> all(w.size()), outer(w.size(), 0.0);
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            double a = std::abs(w.v[i]);
            all[i] = a;
            if (std::abs(g.coord(i)) > half) outer[i] = a;
        }
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                std::size_t idx = static_cast<std::size_t>(ix) * n + iy;
                double a = std::abs(w.v[idx]);
                all[idx] = a;
                if (std::abs(g.coord(ix)) > half || std::abs(g.coord(iy)) > half)
                    outer[idx] = a;
            }
    }
    double total = pairwise_sum(all);
    if (total == 0.0) return 0.0;
    return pairwise_sum(outer) / total;
}

}  // namespace fraflow
