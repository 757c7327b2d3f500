#pragma once

// Boundary-welded extension and Beltrami estimates.
//
// The atlas pairs the reflected decreasing-chain trace with the chain trace
// at equal time: source S(t, theta) = 1 / conj(g_t(zeta)), target
// F(t, theta) = f_t(zeta), zeta = (1 - delta) e^{i theta}. Differentiating
// F = Phi o S in t and theta and using the two Loewner equations gives, at
// the sampling radius,
//
//     mu = (conj(A) / A) (phi q / conj(phi q)) (phi p - conj(phi q)) / (phi (p + q))
//
// with phi = (zeta - tau)(1 - conj(tau) zeta) / zeta and A = (d_t g) / g^2.
// The last factor carries |mu|; the unimodular prefactor needs d_t g, which
// is taken from time differences of g traces.

#include <unordered_map>

#include "chains.hpp"

namespace loewner {

// ---------------------------------------------------------------------------
// Traces

struct TraceSamples {
    double t = 0;
    std::vector<double> theta;
    std::vector<cplx> values;        ///< at radius 1 - delta
    std::vector<cplx> values_half;   ///< at radius 1 - delta/2 (empty when not computed)
    std::vector<bool> masked;
    double half_radius_change = qnan;   ///< max |values_half - values|
};

inline TraceSamples boundary_trace(const ChainFrames& fr, double t) {
    std::size_t i = fr.index(t);
    TraceSamples s;
    s.t = t;
    s.theta = fr.theta;
    s.values = fr.trace[i];
    if (!fr.trace_half.empty()) s.values_half = fr.trace_half[i];
    s.masked.resize(s.values.size());
    double change = 0;
    for (std::size_t j = 0; j < s.values.size(); ++j) {
        s.masked[j] = !finite(s.values[j]);
        if (!s.values_half.empty() && finite(s.values[j]) && finite(s.values_half[j]))
            change = std::max(change, std::abs(s.values_half[j] - s.values[j]));
    }
    if (!s.values_half.empty()) s.half_radius_change = change;
    return s;
}

// ---------------------------------------------------------------------------
// Atlas

struct ExtensionAtlas {
    std::vector<double> times;
    std::vector<double> theta;
    double delta_trace = 1e-3;
    std::vector<std::vector<cplx>> source;       ///< [t][theta]
    std::vector<std::vector<cplx>> target;
    std::vector<std::vector<cplx>> mu_formula;   ///< with the unimodular prefactor
    std::vector<std::vector<cplx>> mu_bare;      ///< without it
    std::vector<std::vector<cplx>> mu_fd;
    std::vector<std::vector<char>> masked;

    double separation_threshold = 0;
    double min_separation = inf;
    std::size_t collisions = 0;
    double coverage = 0;
    bool rejected = false;
    std::vector<std::string> warnings;

    std::size_t rows() const { return times.size(); }
    std::size_t cols() const { return theta.size(); }
};

namespace detail {

inline std::vector<std::vector<cplx>> grid_of(std::size_t n, std::size_t m, cplx v) {
    return std::vector<std::vector<cplx>>(n, std::vector<cplx>(m, v));
}

// Solves the 3x3 complex system M x = b by Gaussian elimination with
// partial pivoting; false when singular.
inline bool solve3(std::array<std::array<cplx, 3>, 3> M, std::array<cplx, 3>& b) {
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
        if (std::abs(M[piv][c]) < 1e-300) return false;
        std::swap(M[c], M[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < 3; ++r) {
            cplx f = M[r][c] / M[c][c];
            for (int k = c; k < 3; ++k) M[r][k] -= f * M[c][k];
            b[r] -= f * b[c];
        }
    }
    for (int c = 2; c >= 0; --c) {
        for (int k = c + 1; k < 3; ++k) b[c] -= M[c][k] * b[k];
        b[c] /= M[c][c];
    }
    return true;
}

}  // namespace detail

struct WirtingerFit {
    cplx dz = qnan, dzbar = qnan;
    bool ok = false;
};

/// Least-squares fit y ~ a + b (x - x0) + c conj(x - x0) over a stencil;
/// returns b = d_z and c = d_zbar. Stencils whose points are nearly
/// collinear are rejected.
inline WirtingerFit fit_wirtinger(const std::vector<cplx>& x, const std::vector<cplx>& y, cplx x0,
                                  double collinear_ratio = 1e-8) {
    WirtingerFit f;
    std::size_t n = x.size();
    if (n < 3) return f;
    double scale = 0;
    for (cplx v : x) scale += std::norm(v - x0);
    scale = std::sqrt(scale / static_cast<double>(n));
    if (!(scale > 0)) return f;
    double sxx = 0, sxy = 0, syy = 0;
    std::vector<cplx> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        d[k] = (x[k] - x0) / scale;
        sxx += d[k].real() * d[k].real();
        sxy += d[k].real() * d[k].imag();
        syy += d[k].imag() * d[k].imag();
    }
    double tr = sxx + syy, det = sxx * syy - sxy * sxy;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    double lmax = tr / 2 + disc, lmin = tr / 2 - disc;
    if (!(lmin > collinear_ratio * lmax)) return f;
    std::array<std::array<cplx, 3>, 3> M{};
    std::array<cplx, 3> rhs{};
    for (std::size_t k = 0; k < n; ++k) {
        std::array<cplx, 3> row{1.0, d[k], std::conj(d[k])};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) M[a][b] += std::conj(row[a]) * row[b];
            rhs[a] += std::conj(row[a]) * y[k];
        }
    }
    if (!detail::solve3(M, rhs)) return f;
    f.dz = rhs[1] / scale;
    f.dzbar = rhs[2] / scale;
    f.ok = finite(f.dz) && finite(f.dzbar) && std::abs(f.dz) > 0;
    return f;
}

/// mu_fd on every cell with a full 3x3 (t, theta) stencil; theta is
/// periodic. Cells without a stencil keep NaN; degenerate stencils are
/// masked.
inline void beltrami_fd(ExtensionAtlas& at) {
    std::size_t n = at.rows(), m = at.cols();
    at.mu_fd = detail::grid_of(n, m, cplx(qnan, qnan));
    std::vector<std::size_t> rows;
    for (std::size_t i = 1; i + 1 < n; ++i) rows.push_back(i);
    parallel_for(rows.size(), [&](std::size_t r) {
        std::size_t i = rows[r];
        for (std::size_t j = 0; j < m; ++j) {
            if (at.masked[i][j]) continue;
            std::vector<cplx> xs, ys;
            bool ok = true;
            for (int di = -1; di <= 1 && ok; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    std::size_t ii = static_cast<std::size_t>(static_cast<long>(i) + di);
                    std::size_t jj = static_cast<std::size_t>(static_cast<long>(j + m) + dj) % m;
                    cplx s = at.source[ii][jj], v = at.target[ii][jj];
                    if (!finite(s) || !finite(v)) {
                        ok = false;
                        break;
                    }
                    xs.push_back(s);
                    ys.push_back(v);
                }
            if (!ok) continue;
            auto fit = fit_wirtinger(xs, ys, at.source[i][j]);
            if (!fit.ok) {
                at.masked[i][j] = 1;
                continue;
            }
            at.mu_fd[i][j] = fit.dzbar / fit.dz;
        }
    }, 1);
}

/// Pointwise factor (phi p - conj(phi q)) / (phi (p + q)); NaN when the
/// denominator is below 1e-12.
inline cplx beltrami_bare(cplx p, cplx q, cplx tau, cplx zeta) {
    cplx phi = (zeta - tau) * (1.0 - std::conj(tau) * zeta) / zeta;
    cplx den = phi * (p + q);
    if (std::abs(den) < 1e-12) return {qnan, qnan};
    return (phi * p - std::conj(phi * q)) / den;
}

/// Samples of d_t g on a trace row: g at t and at two more times, with
/// signed offsets h1 != h2 (both non-zero).
struct TraceDerivative {
    double h1 = 0, h2 = 0;
    std::vector<cplx> g0, g1, g2;

    cplx at(std::size_t j) const {
        // quadratic through (0, g0), (h1, g1), (h2, g2), derivative at 0
        double a1 = h2 / (h1 * (h2 - h1)), a2 = -h1 / (h2 * (h2 - h1));
        return a1 * (g1[j] - g0[j]) + a2 * (g2[j] - g0[j]);
    }
};

/// mu_formula on one atlas row from the Herglotz data at time t.
inline void beltrami_formula_row(ExtensionAtlas& at, std::size_t i, const HerglotzSpec& p,
                                 const HerglotzSpec& q, cplx tau, const TraceDerivative& dg) {
    double t = at.times[i], rho = 1 - at.delta_trace;
    for (std::size_t j = 0; j < at.cols(); ++j) {
        cplx zeta = std::polar(rho, at.theta[j]);
        cplx pv = p(zeta, t), qv = q(zeta, t);
        cplx bare = beltrami_bare(pv, qv, tau, zeta);
        at.mu_bare[i][j] = bare;
        if (!finite(bare)) {
            at.masked[i][j] = 1;
            continue;
        }
        cplx g = dg.g0[j], gd = dg.at(j);
        cplx A = gd / (g * g);
        cplx phi = (zeta - tau) * (1.0 - std::conj(tau) * zeta) / zeta;
        cplx pq = phi * qv;
        if (!finite(A) || std::abs(A) == 0 || std::abs(pq) == 0) {
            at.mu_formula[i][j] = {qnan, qnan};
            continue;
        }
        at.mu_formula[i][j] = (std::conj(A) / A) * (pq / std::conj(pq)) * bare;
    }
}

namespace detail {

// Signed offsets for d_t g at t: centered when (t - dt, t + dt] holds no
// breakpoint and t - dt >= 0, else one-sided on the side that stays inside
// the constancy interval of tau (right-continuous).
inline std::pair<double, double> derivative_offsets(double t, double dt, const std::vector<double>& breaks) {
    auto clear = [&](double a, double b) {
        for (double x : breaks)
            if (x > a && x <= b) return false;
        return true;
    };
    if (t - dt >= 0 && clear(t - dt, t + dt)) return {-dt, dt};
    if (clear(t, t + 2 * dt)) return {dt, 2 * dt};
    if (t - 2 * dt >= 0 && clear(t - 2 * dt, t)) return {-dt, -2 * dt};
    throw Error("no constancy window of width " + fmt(2 * dt) + " at t=" + fmt(t));
}

inline void atlas_geometry(ExtensionAtlas& at, double collision_limit) {
    std::size_t n = at.rows(), m = at.cols();
    // declared threshold: a quarter of the smallest neighbour spacing
    double hmin = inf;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            cplx s = at.source[i][j];
            if (at.masked[i][j] || !finite(s)) continue;
            cplx r = at.source[i][(j + 1) % m];
            if (!at.masked[i][(j + 1) % m] && finite(r)) hmin = std::min(hmin, std::abs(r - s));
            if (i + 1 < n && !at.masked[i + 1][j] && finite(at.source[i + 1][j]))
                hmin = std::min(hmin, std::abs(at.source[i + 1][j] - s));
        }
    at.separation_threshold = std::isfinite(hmin) ? 0.25 * hmin : 0.0;
    struct P {
        double x;
        cplx z;
    };
    std::vector<P> pts;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (!at.masked[i][j] && finite(at.source[i][j])) pts.push_back({at.source[i][j].real(), at.source[i][j]});
    std::sort(pts.begin(), pts.end(), [](const P& a, const P& b) { return a.x < b.x; });
    at.min_separation = inf;
    at.collisions = 0;
    // sweep: only pairs closer than the current bound in x can matter
    double window = std::max(at.separation_threshold, 1e-300);
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size() && pts[b].x - pts[a].x < std::max(window, at.min_separation); ++b) {
            double d = std::abs(pts[b].z - pts[a].z);
            at.min_separation = std::min(at.min_separation, d);
            if (d < at.separation_threshold) ++at.collisions;
        }
    double np = static_cast<double>(pts.size());
    double pairs = 0.5 * np * (np - 1);
    if (pairs > 0 && static_cast<double>(at.collisions) > collision_limit * pairs) {
        at.rejected = true;
        at.warnings.push_back("atlas rejected: " + std::to_string(at.collisions) + " colliding source pairs");
    }
    // coverage: unmasked cell area over the area between the first and last source curves
    auto area = [](const std::vector<cplx>& poly) {
        double a = 0;
        for (std::size_t k = 0; k < poly.size(); ++k) {
            cplx u = poly[k], v = poly[(k + 1) % poly.size()];
            a += u.real() * v.imag() - v.real() * u.imag();
        }
        return 0.5 * std::abs(a);
    };
    if (n < 2) return;
    double total = area(at.source.back()) - area(at.source.front());
    double covered = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            std::size_t jj = (j + 1) % m;
            std::vector<cplx> quad{at.source[i][j], at.source[i + 1][j], at.source[i + 1][jj], at.source[i][jj]};
            bool ok = !at.masked[i][j] && !at.masked[i + 1][j] && !at.masked[i + 1][jj] && !at.masked[i][jj];
            for (cplx z : quad) ok = ok && finite(z);
            if (ok) covered += area(quad);
        }
    at.coverage = total > 0 ? std::min(1.0, covered / total) : 0.0;
}

inline ExtensionAtlas empty_atlas(const std::vector<double>& times, const std::vector<double>& theta,
                                  double delta) {
    ExtensionAtlas at;
    at.times = times;
    at.theta = theta;
    at.delta_trace = delta;
    std::size_t n = times.size(), m = theta.size();
    at.source = detail::grid_of(n, m, cplx(qnan, qnan));
    at.target = at.source;
    at.mu_formula = at.source;
    at.mu_bare = at.source;
    at.mu_fd = at.source;
    at.masked.assign(n, std::vector<char>(m, 0));
    return at;
}

}  // namespace detail

struct ExtensionOptions {
    double tol = 1e-9;                ///< reverse integrations for d_t g
    double max_dt = 0.01;             ///< upper bound for the trace time step
    double collision_limit = 0.01;    ///< fraction of colliding pairs that rejects the atlas
    EvolveOptions evolve;
};

/// Atlas Phi(1 / conj(g_t(zeta))) = f_t(zeta) from matching frames.
/// p drives f, q drives g; both share tau.
inline ExtensionAtlas build_extension(const ChainFrames& f, const ChainFrames& g, const HerglotzSpec& p,
                                      const HerglotzSpec& q, const DenjoyWolffSpec& tau,
                                      const ExtensionOptions& opt = {}) {
    if (f.tag != ChainFrames::Tag::range_normalized || g.tag != ChainFrames::Tag::decreasing)
        throw Error("build_extension needs range-normalized f frames and decreasing g frames");
    if (f.checkpoints != g.checkpoints || f.theta != g.theta || f.delta_trace != g.delta_trace)
        throw Error("f and g frames must share checkpoints, theta grid and trace radius");
    auto at = detail::empty_atlas(f.checkpoints, f.theta, f.delta_trace);
    std::size_t n = at.rows(), m = at.cols();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            cplx w = g.trace[i][j], v = f.trace[i][j];
            at.target[i][j] = v;
            at.source[i][j] = finite(w) && std::abs(w) > 0 ? 1.0 / std::conj(w) : cplx(qnan, qnan);
            if (!finite(at.source[i][j]) || !finite(v)) at.masked[i][j] = 1;
        }
    VectorField Gq(q, tau);
    double spacing = inf;
    for (std::size_t i = 0; i + 1 < n; ++i) spacing = std::min(spacing, at.times[i + 1] - at.times[i]);
    double dt = std::min(opt.max_dt, spacing);
    auto breaks = tau.breakpoints();
    auto seeds = SeedGrid::from_points(detail::trace_points(at.theta, 1 - at.delta_trace), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double t = at.times[i];
        auto [h1, h2] = detail::derivative_offsets(t, dt, breaks);
        TraceDerivative dg{h1, h2, g.trace[i], {}, {}};
        dg.g1 = solve_reverse(Gq, t + h1, seeds, opt.tol, {}, opt.evolve).values.back();
        dg.g2 = solve_reverse(Gq, t + h2, seeds, opt.tol, {}, opt.evolve).values.back();
        beltrami_formula_row(at, i, p, q, tau(t), dg);
    }
    beltrami_fd(at);
    detail::atlas_geometry(at, opt.collision_limit);
    return at;
}

/// Atlas of the radial extension F(e^t e^{i theta}) = f_t(zeta): the
/// source is the reflected trace of g_t = e^{-t} z up to the factor
/// 1 / (1 - delta), which leaves mu unchanged. Needs tau = 0.
inline ExtensionAtlas becker_atlas(const ChainFrames& f, const HerglotzSpec& p) {
    if (f.tag != ChainFrames::Tag::range_normalized) throw Error("becker_atlas needs range-normalized frames");
    auto at = detail::empty_atlas(f.checkpoints, f.theta, f.delta_trace);
    std::size_t n = at.rows(), m = at.cols();
    double rho = 1 - f.delta_trace;
    auto one = HerglotzSpec::constant(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double t = at.times[i];
        for (std::size_t j = 0; j < m; ++j) {
            at.source[i][j] = std::polar(std::exp(t), at.theta[j]);
            at.target[i][j] = f.trace[i][j];
            if (!finite(at.target[i][j])) at.masked[i][j] = 1;
        }
        double dt = 0.01;
        TraceDerivative dg{-dt, dt, {}, {}, {}};
        for (std::size_t j = 0; j < m; ++j) {
            cplx zeta = std::polar(rho, at.theta[j]);
            dg.g0.push_back(std::exp(-t) * zeta);
            dg.g1.push_back(std::exp(-t + dt) * zeta);
            dg.g2.push_back(std::exp(-t - dt) * zeta);
        }
        beltrami_formula_row(at, i, p, one, 0.0, dg);
    }
    beltrami_fd(at);
    detail::atlas_geometry(at, 0.01);
    return at;
}

struct BeckerSamples {
    std::vector<double> radii;
    std::vector<double> theta;
    std::vector<std::vector<cplx>> values;   ///< [radius][theta]
};

/// F(r e^{i theta}) = f_{log r}((1 - delta) e^{i theta}) for r >= 1 (linear
/// in t between checkpoints) and f_0(r e^{i theta}) for r < 1.
inline BeckerSamples becker_extension(const ChainFrames& f, const VectorField& G, const std::vector<double>& radii,
                                      const ChainOptions& opt = {}) {
    if (f.tag != ChainFrames::Tag::range_normalized || f.checkpoints.front() != 0.0)
        throw Error("becker_extension needs range-normalized frames starting at t = 0");
    double r_max = std::exp(f.checkpoints.back());
    BeckerSamples out;
    out.radii = radii;
    out.theta = f.theta;
    std::vector<double> s;
    std::vector<cplx> z;
    for (double r : radii) {
        if (r > r_max * (1 + 1e-12))
            throw Error("radius " + fmt(r) + " beyond the checkpoint horizon; achievable r_max = " +
                        fmt(r_max));
        if (r < 1)
            for (double th : f.theta) {
                s.push_back(0.0);
                z.push_back(std::polar(r, th));
            }
    }
    std::vector<cplx> inside;
    if (!z.empty()) inside = ChainSolver(G, opt).evaluate(f.selection, s, z);
    std::size_t q = 0;
    for (double r : radii) {
        std::vector<cplx> row;
        if (r < 1) {
            row.assign(inside.begin() + static_cast<long>(q), inside.begin() + static_cast<long>(q + f.theta.size()));
            q += f.theta.size();
        } else {
            double t = std::log(r);
            auto it = std::upper_bound(f.checkpoints.begin(), f.checkpoints.end(), t);
            std::size_t k = it == f.checkpoints.begin() ? 0 : static_cast<std::size_t>(it - f.checkpoints.begin()) - 1;
            k = std::min(k, f.checkpoints.size() - 2);
            double a = (t - f.checkpoints[k]) / (f.checkpoints[k + 1] - f.checkpoints[k]);
            for (std::size_t j = 0; j < f.theta.size(); ++j)
                row.push_back((1 - a) * f.trace[k][j] + a * f.trace[k + 1][j]);
        }
        out.values.push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports

struct DilatationReport {
    double k = 0;
    double tol = 0.02;
    double max_formula = 0;
    double max_fd = 0;
    double agreement = 0;          ///< max |mu_formula - mu_fd|
    double agreement_modulus = 0;  ///< max ||mu_formula| - |mu_fd||
    std::size_t cells = 0;
    std::size_t masked = 0;
    std::size_t fd_cells = 0;
    bool sense_preserving = true;
    bool pass = false;
};

inline DilatationReport dilatation_report(const ExtensionAtlas& at, double k, double tol = 0.02) {
    DilatationReport r;
    r.k = k;
    r.tol = tol;
    for (std::size_t i = 0; i < at.rows(); ++i)
        for (std::size_t j = 0; j < at.cols(); ++j) {
            ++r.cells;
            if (at.masked[i][j]) {
                ++r.masked;
                continue;
            }
            cplx mf = at.mu_bare[i][j], mfp = at.mu_formula[i][j], md = at.mu_fd[i][j];
            if (finite(mf)) r.max_formula = std::max(r.max_formula, std::abs(mf));
            if (finite(md)) {
                ++r.fd_cells;
                r.max_fd = std::max(r.max_fd, std::abs(md));
                if (std::abs(md) >= 1) r.sense_preserving = false;
            }
            if (finite(mfp) && finite(md)) r.agreement = std::max(r.agreement, std::abs(mfp - md));
            if (finite(mf) && finite(md))
                r.agreement_modulus = std::max(r.agreement_modulus, std::abs(std::abs(mf) - std::abs(md)));
        }
    r.pass = r.max_formula <= k + tol && r.max_fd <= k + tol && !at.rejected;
    return r;
}

/// mu_fd of f_0 on the interior grid circles (source z, target f_0(z)).
inline double interior_dilatation(const ChainFrames& fr, std::size_t checkpoint = 0) {
    std::map<int, std::vector<std::size_t>> circles;
    for (std::size_t k = 0; k < fr.grid.size(); ++k)
        if (fr.grid.labels[k].first >= 0 && std::abs(fr.grid.points[k]) > 0)
            circles[fr.grid.labels[k].first].push_back(k);
    std::vector<std::vector<std::size_t>> rows;
    for (auto& [c, idx] : circles) rows.push_back(idx);
    if (rows.size() < 3) throw Error("interior dilatation needs three grid circles");
    ExtensionAtlas at = detail::empty_atlas(std::vector<double>(rows.size(), 0.0),
                                            std::vector<double>(rows.front().size(), 0.0), fr.delta_trace);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw Error("grid circles differ in size");
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            at.source[i][j] = fr.grid.points[rows[i][j]];
            at.target[i][j] = fr.interior[checkpoint][rows[i][j]];
        }
    }
    beltrami_fd(at);
    double mx = 0;
    for (const auto& row : at.mu_fd)
        for (cplx v : row)
            if (finite(v)) mx = std::max(mx, std::abs(v));
    return mx;
}

}  // namespace loewner
