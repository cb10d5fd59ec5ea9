#include "fraflow/gns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fraflow/flow.hpp"
#include "fraflow/reduce.hpp"
#include "fraflow/resample.hpp"
#include "fraflow/spectral.hpp"

namespace fraflow {

namespace {

Field pos_pow(const Field& w, double e) {
    Field out(w.grid);
    for (std::size_t i = 0; i < w.v.size(); ++i)
        out.v[i] = w.v[i] > 0.0 ? std::pow(w.v[i], e) : 0.0;
    return out;
}

struct QuotientParts {
    double n2p;  // ||w||_2p
    double npp;  // ||w||_(p+1)
    double hs;   // squared seminorm of order alpha/2
    double q;
};

QuotientParts quotient_parts(const Field& w, const DerivedExponents& e) {
    QuotientParts qp;
    qp.n2p = lp_norm(w, 2.0 * e.p);
    qp.npp = lp_norm(w, e.p + 1.0);
    qp.hs = hs_seminorm(w, e.alpha);
    qp.q = qp.n2p /
           (std::pow(qp.hs, 0.5 * e.theta) * std::pow(qp.npp, 1.0 - e.theta));
    return qp;
}

// Rescale so that int w^2p = target.
void normalize_mass(Field& w, double p, double target) {
    double i2p = std::pow(lp_norm(w, 2.0 * p), 2.0 * p);
    if (!(i2p > 0.0))
        throw std::domain_error("gns: cannot normalize a vanishing field");
    double a = std::pow(target / i2p, 1.0 / (2.0 * p));
    for (auto& t : w.v) t *= a;
}

struct BalanceFit {
    double beta1, beta2;  // b1 (-Delta)^(alpha/2) w + b2 w^p ~ w^(2p-1)
    double resid_rel;     // ls residual over the fitted leading term
};

BalanceFit fit_balance(const Field& t1, const Field& t2, const Field& t3) {
    double a11 = inner(t1, t1), a12 = inner(t1, t2), a22 = inner(t2, t2);
    double b1 = inner(t1, t3), b2 = inner(t2, t3);
    double det = a11 * a22 - a12 * a12;
    BalanceFit fit;
    if (det > 1e-12 * a11 * a22) {
        fit.beta1 = (b1 * a22 - b2 * a12) / det;
        fit.beta2 = (a11 * b2 - a12 * b1) / det;
    } else {  // t2 (near) collinear with t1: single-term fit
        fit.beta1 = b1 / a11;
        fit.beta2 = 0.0;
    }
    Field r(t1.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i)
        r.v[i] = t3.v[i] - fit.beta1 * t1.v[i] - fit.beta2 * t2.v[i];
    double rn = std::sqrt(inner(r, r));
    double den = std::abs(fit.beta1) * std::sqrt(a11);
    if (!(den > 0.0)) den = std::sqrt(inner(t3, t3));
    fit.resid_rel = rn / den;
    return fit;
}

}  // namespace

double gns_quotient(const Field& w, const DerivedExponents& e) {
    if (!(e.p > 1.0) || !(e.theta > 0.0) || !(e.theta <= 1.0))
        throw std::invalid_argument("gns quotient: exponents out of range");
    QuotientParts qp = quotient_parts(w, e);
    if (!std::isfinite(qp.q))
        throw std::domain_error("gns quotient: degenerate field");
    return qp.q;
}

double el_residual(const Field& w, const DerivedExponents& e) {
    Field t1 = frac_laplacian(w, 0.5 * e.alpha);
    Field t2 = pos_pow(w, e.p);
    Field t3 = pos_pow(w, 2.0 * e.p - 1.0);
    return fit_balance(t1, t2, t3).resid_rel;
}

GnsReport estimate_cgns(const Grid& g, const DerivedExponents& e, double M,
                        const GnsOptions& opts, const Field* init) {
    if (!(M > 0.0)) throw std::invalid_argument("gns: mass must be positive");
    GnsReport rep(g);
    Field w(g);
    if (init) {
        w = *init;
        for (auto& t : w.v) t = std::max(t, 0.0);
    } else if (e.alpha < e.d) {
        w = aubin_talenti_profile(g, e.alpha);
    } else {
        // bump with the far-field decay of the optimality balance
        VectorField x = coordinate_field(g);
        double expo = 1.0 / (1.0 - e.p);
        for (std::size_t i = 0; i < w.v.size(); ++i) {
            double r2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) r2 += x.comp[a][i] * x.comp[a][i];
            w.v[i] = std::pow(1.0 + r2, expo);
        }
    }
    normalize_mass(w, e.p, M);

    QuotientParts qp = quotient_parts(w, e);

    // On a periodic box the raw quotient is unbounded: the seminorm
    // annihilates the uniform mode, so flattening toward a constant climbs
    // forever and says nothing about the decaying class the estimate
    // concerns.  Candidates are therefore scored with the uniform mode
    // re-weighted at the box's own infrared scale (2 pi / L)^alpha -- for a
    // localized field the correction sits far below the quotient's
    // resolution, while the pedestal ray loses its free ride and the scored
    // functional attains its maximum on the decaying bump.  Steps must
    // improve both the scored and the raw quotient, so the recorded history
    // of raw quotients stays nondecreasing.
    const double vbox = std::pow(2.0 * g.half_width(), g.dim());
    const double w0a = std::pow(2.0 * M_PI / g.half_width(), e.alpha);
    auto p0sq = [&](const Field& f) {
        double t = integrate(f);
        return t * t / vbox;
    };
    auto scored = [&](const QuotientParts& parts, const Field& f) {
        double hst = parts.hs + w0a * p0sq(f);
        return parts.n2p / (std::pow(hst, 0.5 * e.theta) *
                            std::pow(parts.npp, 1.0 - e.theta));
    };
    double qs = scored(qp, w);
    rep.quotient_history.push_back(qp.q);

    double eta = opts.step0;
    int small_gain = 0;
    bool reset_done = false;
    for (int it = 0; it < opts.max_iters && small_gain < 8; ++it) {
        Field t1 = frac_laplacian(w, 0.5 * e.alpha);
        Field nu = pos_pow(w, 2.0 * e.p - 1.0);
        double i2p = std::pow(qp.n2p, 2.0 * e.p);
        double ipp = std::pow(qp.npp, e.p + 1.0);
        double hst = qp.hs + w0a * p0sq(w);
        double wmean = integrate(w) / vbox;
        Field grad(g);
        for (std::size_t i = 0; i < w.v.size(); ++i) {
            double wp = w.v[i] > 0.0 ? w.v[i] : 0.0;
            grad.v[i] = nu.v[i] / i2p -
                        e.theta * (t1.v[i] + w0a * wmean) / hst -
                        (1.0 - e.theta) * std::pow(wp, e.p) / ipp;
        }
        double gn = std::sqrt(inner(grad, grad));
        double wn2 = std::sqrt(inner(w, w));
        if (!(gn > 0.0)) break;
        double scale = wn2 / gn;

        bool accepted = false;
        for (int tries = 0; tries < 40 && eta > 1e-14; ++tries) {
            Field cand(g);
            for (std::size_t i = 0; i < w.v.size(); ++i)
                cand.v[i] = std::max(w.v[i] + eta * scale * grad.v[i], 0.0);
            normalize_mass(cand, e.p, M);
            QuotientParts qc = quotient_parts(cand, e);
            double qsc = scored(qc, cand);
            if (qsc > qs && qc.q > qp.q) {
                double gain = (qsc - qs) / qsc;
                w = std::move(cand);
                qp = qc;
                qs = qsc;
                rep.quotient_history.push_back(qp.q);
                eta = std::min(eta * 1.5, 4.0 * opts.step0);
                small_gain = gain < opts.gain_tol ? small_gain + 1 : 0;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        ++rep.iters;
        if (!accepted) {
            if (reset_done) break;
            eta = opts.step0;
            reset_done = true;
        }
    }

    // Fixed-point polish on the fitted optimality balance: invert the shifted
    // linear part against the nonlinear remainder, keeping whichever iterate
    // balances best. The reported constant stays the sup of the achieved
    // quotients; small dips along the way are part of the balance search.
    double best_el = el_residual(w, e);
    if (opts.polish) {
        Field best = w;
        for (int it = 0; it < opts.polish_iters; ++it) {
            Field t1 = frac_laplacian(w, 0.5 * e.alpha);
            Field t2 = pos_pow(w, e.p);
            Field t3 = pos_pow(w, 2.0 * e.p - 1.0);
            BalanceFit fit = fit_balance(t1, t2, t3);
            if (!(fit.beta1 > 0.0)) break;
            double b2c = std::max(fit.beta2, 0.0);
            double wmax = *std::max_element(w.v.begin(), w.v.end());
            double gamma = (2.0 * e.p - 1.0) * std::pow(wmax, 2.0 * e.p - 2.0) +
                           b2c * e.p * std::pow(wmax, e.p - 1.0);
            Field rhs(g);
            for (std::size_t i = 0; i < w.v.size(); ++i)
                rhs.v[i] = t3.v[i] - b2c * t2.v[i] + gamma * w.v[i];
            Field cand = resolvent_frac_laplacian(rhs, 0.5 * e.alpha, fit.beta1, gamma);
            for (auto& t : cand.v) t = std::max(t, 0.0);
            normalize_mass(cand, e.p, M);
            w = std::move(cand);
            double elc = el_residual(w, e);
            QuotientParts qc = quotient_parts(w, e);
            if (qc.q > qp.q) qp = qc;
            if (qc.q > rep.quotient_history.back())
                rep.quotient_history.push_back(qc.q);
            if (elc < best_el) {
                best = w;
                best_el = elc;
            }
            ++rep.iters;
            if (!std::isfinite(elc) || elc > 50.0 * best_el) break;
            if (best_el < 1e-11) break;
        }
        w = std::move(best);
    }

    rep.c_gns = std::max(qp.q, rep.quotient_history.back());
    rep.w_opt = std::move(w);
    rep.el_resid = best_el;
    rep.converged = small_gain >= 8 || rep.el_resid < 1e-6;
    return rep;
}

double stationarity_residual(const Field& v, const ModelParams& p,
                             double floor_rel) {
    Field r = rhs_rescaled(v, p, floor_rel);
    VectorField x = coordinate_field(v.grid);
    VectorField xv(v.grid);
    for (int a = 0; a < v.grid.dim(); ++a)
        for (std::size_t i = 0; i < v.v.size(); ++i)
            xv.comp[a][i] = x.comp[a][i] * v.v[i];
    double den = lp_norm(divergence(xv), 2.0);
    if (!(den > 0.0))
        throw std::domain_error("stationarity residual: degenerate field");
    return lp_norm(r, 2.0) / den;
}

double stationarity_residual_scaled(const Field& v, const ModelParams& p,
                                    double floor_rel) {
    auto eval = [&](double lam) {
        Field vs = resample_scaled(v, lam);
        double amp = std::pow(lam, v.grid.dim());
        for (auto& t : vs.v) t = std::max(t * amp, 0.0);
        return stationarity_residual(vs, p, floor_rel);
    };
    // Golden-section search over the dilation factor; the quotient Q is
    // dilation invariant, so the minimizer is not known a priori.
    double a = 0.7, b = 1.4;
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - (b - a) * invphi, d = a + (b - a) * invphi;
    double fc = eval(c), fd = eval(d);
    for (int it = 0; it < 32; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * invphi;
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * invphi;
            fd = eval(d);
        }
    }
    return std::min({fc, fd, eval(1.0)});
}

SelfsimRow selfsim_vs_optimal(const Grid& g, const ModelParams& p,
                              const GnsOptions& gns_opts) {
    p.validate();
    const DerivedExponents e = exponents(p);
    SelfsimRow row{};
    row.params = p;

    GnsReport rep = estimate_cgns(g, e, p.M, gns_opts);
    row.c_gns = rep.c_gns;
    row.el_resid_opt = rep.el_resid;

    StationaryResult st = compute_stationary_profile(g, p);
    Field wB = pos_pow(st.v, p.m - 0.5);
    row.el_resid_B = el_residual(wB, e);
    row.stat_resid_B = st.residual;

    Field vopt = pos_pow(rep.w_opt, 2.0 * e.p);
    row.stat_resid_opt = stationarity_residual_scaled(vopt, p);

    double entr = integrate(pos_pow(st.v, p.m));
    row.kappa_star_est = kappa_star(e, std::pow(entr, e.sigma));
    row.kappa_est = kappa(e, p.M, row.c_gns);
    row.margin = row.kappa_star_est - row.kappa_est;
    return row;
}

}  // namespace fraflow
