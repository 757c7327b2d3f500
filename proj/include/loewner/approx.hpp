#pragma once

// Step-function approximation of Denjoy-Wolff data and the convergence
// experiments built on it.

#include <chrono>
#include <random>

#include "chains.hpp"

namespace loewner {

/// Midpoint-sampled step function on the uniform n-partition of [0, T].
/// After T the approximant follows tau itself, so chains (which depend on
/// the whole future of tau) differ between levels only through [0, T].
struct StepApproximant {
    std::size_t n = 1;
    double horizon = 1;
    std::vector<double> breaks;   ///< interior cell boundaries
    std::vector<cplx> values;     ///< one per cell
    double deviation = 0;         ///< sup |tau - tau_n| over the probe grid
    DenjoyWolffSpec exact;

    cplx operator()(double t) const {
        if (t >= horizon) return exact(t);
        auto i = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), t) - breaks.begin());
        return values[i];
    }

    DenjoyWolffSpec spec() const {
        auto b = breaks;
        b.push_back(horizon);
        for (double x : exact.breakpoints())
            if (x > horizon) b.push_back(x);
        auto self = *this;
        return DenjoyWolffSpec::sampled([self](double t) { return self(t); }, 1.0, b);
    }
};

inline StepApproximant step_approximate(const DenjoyWolffSpec& tau, std::size_t n, double T) {
    if (n < 1 || !(T > 0)) throw Error("step_approximate needs n >= 1 and T > 0");
    StepApproximant a;
    a.n = n;
    a.horizon = T;
    a.exact = tau;
    double h = T / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) a.breaks.push_back(h * static_cast<double>(i));
        cplx v = tau(h * (static_cast<double>(i) + 0.5));
        if (std::abs(v) > 1 + 1e-15) throw ModulusError(h * (static_cast<double>(i) + 0.5), v);
        a.values.push_back(v);
    }
    std::size_t probes = 16 * n;
    for (std::size_t k = 0; k < probes; ++k) {
        double t = T * static_cast<double>(k) / static_cast<double>(probes);
        a.deviation = std::max(a.deviation, std::abs(tau(t) - a(t)));
    }
    return a;
}

// ---------------------------------------------------------------------------
// Field deviation

struct FieldDeviationReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double max_measured = 0;
    double max_bound = 0;
    double max_ratio = 0;         ///< measured / bound where bound > 0
    cplx worst_z = 0;
    double worst_t = 0;
    bool pass = true;
};

namespace detail {

inline void deviation_sample(FieldDeviationReport& r, cplx z, double t, cplx tau, cplx sigma, cplx p,
                             double rounding) {
    auto poly = [&](cplx c) { return (z - c) * (std::conj(c) * z - 1.0); };
    double measured = std::abs((poly(tau) - poly(sigma)) * p);
    double bound = 4 * std::abs(tau - sigma) * std::abs(p);
    ++r.samples;
    r.max_measured = std::max(r.max_measured, measured);
    r.max_bound = std::max(r.max_bound, bound);
    if (bound > 0 && measured / bound > r.max_ratio) {
        r.max_ratio = measured / bound;
        r.worst_z = z;
        r.worst_t = t;
    }
    if (measured > bound + rounding * std::max(1.0, bound)) ++r.violations;
}

}  // namespace detail

/// Measured |G - G_n| against 4 |tau - tau_n| |p| on a grid. A violation
/// is impossible in exact arithmetic, so it is raised as an error.
inline FieldDeviationReport field_deviation(const HerglotzSpec& p, const DenjoyWolffSpec& tau,
                                            const DenjoyWolffSpec& tau_n, const DiskGrid& grid,
                                            const std::vector<double>& times, double rounding = 1e-12) {
    FieldDeviationReport r;
    auto pts = grid.points();
    for (double t : times) {
        cplx a = tau(t), b = tau_n(t);
        for (cplx z : pts) detail::deviation_sample(r, z, t, a, b, p(z, t), rounding);
    }
    r.pass = r.violations == 0;
    if (!r.pass)
        throw Error("field deviation bound violated at t=" + fmt(r.worst_t) + " (ratio " +
                    fmt(r.max_ratio) + ")");
    return r;
}

/// The same inequality on random z, tau, tau_n in the closed disk and
/// random Herglotz values p (Re p > 0).
inline FieldDeviationReport field_deviation_random(std::size_t n, std::uint64_t seed = 1,
                                                   double rounding = 1e-12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto disk = [&] { return std::polar(std::sqrt(u(rng)), 2 * pi * u(rng)); };
    FieldDeviationReport r;
    for (std::size_t i = 0; i < n; ++i) {
        cplx z = disk(), a = disk(), b = disk();
        cplx p(std::exp(4 * u(rng) - 2), std::tan(pi * (u(rng) - 0.5)) * 0.5);
        detail::deviation_sample(r, z, 0.0, a, b, p, rounding);
    }
    r.pass = r.violations == 0;
    return r;
}

// ---------------------------------------------------------------------------
// Gronwall envelope

/// E(t) = h(t) + int_{t0}^t g(s) h(s) exp(int_s^t g) ds at the requested
/// nodes, from u' = g (u + h), u(t0) = 0, E = h + u. `breaks` lists jump
/// times of g or h.
inline std::vector<double> gronwall_envelope(const std::function<double(double)>& h,
                                             const std::function<double(double)>& g, double t0,
                                             const std::vector<double>& nodes,
                                             const std::vector<double>& breaks = {}, double tol = 1e-10) {
    std::vector<double> out(nodes.size(), qnan);
    std::vector<double> stops = nodes;
    std::sort(stops.begin(), stops.end());
    std::vector<double> br;
    for (double b : breaks)
        if (b > t0) br.push_back(b);
    std::array<ode::Tolerance, 1> w{ode::Tolerance{tol, tol}};
    ode::dopri5<1>(
        [&](double t, const ode::State<1>& y, double) { return ode::State<1>{g(t) * (y[0].real() + h(t))}; },
        t0, {0.0}, stops, br, w,
        [&](std::size_t k, double t, const ode::State<1>& y) {
            for (std::size_t i = 0; i < nodes.size(); ++i)
                if (nodes[i] == stops[k]) out[i] = h(t) + y[0].real();
        },
        [](double, const ode::State<1>&) { return false; });
    return out;
}

// ---------------------------------------------------------------------------
// Convergence experiments

struct ApproxRow {
    std::size_t n = 0;
    double deviation = 0;
    double ef_error = qnan;
    double chain_error = qnan;
    double envelope = qnan;        ///< max over seeds and checkpoints
    bool under_envelope = true;    ///< error <= envelope at every sample
    bool chain_converged = true;
    double runtime_ms = 0;
};

struct ApproxTable {
    std::vector<ApproxRow> rows;
    bool ef_decreasing = true;
    bool chain_decreasing = true;
    double ef_order = qnan;        ///< slope of log error against log deviation
    std::vector<std::string> warnings;
};

struct ApproxOptions {
    double horizon = 4;            ///< T of the step approximants
    double tol = 1e-10;
    double noise_floor = 1e-8;     ///< differences below this are not called non-monotone
    double radius_margin = 0.1;    ///< Lipschitz disk radius R = m + margin (1 - m)
    std::size_t lipschitz_angles = 64;
    EvolveOptions evolve;
};

namespace detail {

inline double lipschitz_on_circle(const VectorField& G, double R, double t, std::size_t n) {
    double m = 0;
    for (std::size_t j = 0; j < n; ++j) {
        cplx w = std::polar(R, 2 * pi * static_cast<double>(j) / static_cast<double>(n));
        m = std::max(m, std::abs(G.dz(w, t, t)));
    }
    return m;
}

inline void mark_monotone(ApproxTable& t, double floor) {
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        const auto& a = t.rows[i - 1];
        const auto& b = t.rows[i];
        if (!(b.ef_error < a.ef_error) && std::max(a.ef_error, b.ef_error) > floor) t.ef_decreasing = false;
        if (std::isfinite(a.chain_error) && std::isfinite(b.chain_error) && !(b.chain_error < a.chain_error) &&
            std::max(a.chain_error, b.chain_error) > floor)
            t.chain_decreasing = false;
    }
}

}  // namespace detail

/// Per level: sup over seeds and checkpoints of |phi^n_{s,t} - phi_{s,t}|
/// against the exact-tau reference, together with the Gronwall envelope
/// with h = int |G - G_n| along the reference trajectory and g = max of
/// |dG_n/dz| over the circle |w| = R enclosing both trajectories.
inline ApproxTable ef_convergence(const HerglotzSpec& p, const DenjoyWolffSpec& tau,
                                  const std::vector<std::size_t>& levels, const SeedGrid& seeds, double s,
                                  double t_end, const std::vector<double>& checkpoints,
                                  const ApproxOptions& opt = {}) {
    if (t_end > opt.horizon) throw Error("ef_convergence needs t_end within the approximation horizon");
    ApproxTable table;
    VectorField G(p, tau);
    std::vector<double> dense = checkpoints;
    for (double t = s; t < t_end; t += 1.0 / 32) dense.push_back(t);
    auto ref = solve_forward(G, s, t_end, seeds, opt.tol, dense, opt.evolve);
    auto cps = detail::checkpoint_list(s, t_end, checkpoints);
    for (std::size_t n : levels) {
        auto t0 = std::chrono::steady_clock::now();
        ApproxRow row;
        row.n = n;
        auto approx = step_approximate(tau, n, opt.horizon);
        row.deviation = approx.deviation;
        VectorField Gn(p, approx.spec());
        auto lev = solve_forward(Gn, s, t_end, seeds, opt.tol, dense, opt.evolve);
        double m = 0;
        for (const auto* ts : {&ref, &lev})
            for (const auto& v : ts->values)
                for (cplx w : v)
                    if (finite(w)) m = std::max(m, std::abs(w));
        double R = m + opt.radius_margin * (1 - m);
        std::vector<double> brk = Gn.discontinuities();
        for (double b : G.discontinuities()) brk.push_back(b);
        std::sort(brk.begin(), brk.end());
        std::vector<double> stops;
        for (double c : cps)
            if (c > s) stops.push_back(c);
        std::vector<double> err(cps.size(), 0.0), env(cps.size(), 0.0);
        row.ef_error = 0;
        for (std::size_t j = 0; j < seeds.size(); ++j) {
            for (double c : cps) {
                std::size_t a = ref.time_index(c), b = lev.time_index(c);
                cplx x = ref.values[a][j], y = lev.values[b][j];
                if (!finite(x) || !finite(y)) continue;
                double e = std::abs(x - y);
                row.ef_error = std::max(row.ef_error, e);
            }
            // phi along the reference, H = int |G - G_n|, U' = g (U + H)
            std::array<ode::Tolerance, 3> w{ode::Tolerance{opt.tol, opt.tol}, ode::Tolerance{1e-12, 1e-10},
                                            ode::Tolerance{1e-12, 1e-10}};
            std::vector<double> Hs(stops.size()), Us(stops.size());
            ode::dopri5<3>(
                [&](double t, const ode::State<3>& y, double tm) {
                    double dev = std::abs(G.eval(y[0], t, tm) - Gn.eval(y[0], t, tm));
                    double g = detail::lipschitz_on_circle(Gn, R, tm, opt.lipschitz_angles);
                    return ode::State<3>{G.eval(y[0], t, tm), dev, g * (y[2].real() + y[1].real())};
                },
                s, {seeds.points[j], 0.0, 0.0}, stops, brk, w,
                [&](std::size_t k, double, const ode::State<3>& y) {
                    Hs[k] = y[1].real();
                    Us[k] = y[2].real();
                },
                [](double, const ode::State<3>&) { return false; });
            for (std::size_t k = 0; k < stops.size(); ++k) {
                double E = Hs[k] + Us[k];
                std::size_t a = ref.time_index(stops[k]), b = lev.time_index(stops[k]);
                double e = std::abs(ref.values[a][j] - lev.values[b][j]);
                if (std::isfinite(e) && e > E + 10 * opt.tol) row.under_envelope = false;
                row.envelope = std::isfinite(row.envelope) ? std::max(row.envelope, E) : E;
            }
        }
        row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        table.rows.push_back(row);
    }
    detail::mark_monotone(table, opt.noise_floor);
    if (table.rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
        for (const auto& r : table.rows)
            if (r.ef_error > 0 && r.deviation > 0) {
                double x = std::log(r.deviation), y = std::log(r.ef_error);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                k += 1;
            }
        if (k >= 2 && k * sxx - sx * sx > 0) table.ef_order = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }
    if (!table.ef_decreasing) table.warnings.push_back("ef error not monotone above the noise floor");
    return table;
}

/// Fills chain_error: sup over the interior grid and checkpoints of
/// |f^n_t - f_t| for range-normalized chains. Levels whose chain limit
/// did not converge are excluded and noted.
inline void chain_convergence(ApproxTable& table, const HerglotzSpec& p, const DenjoyWolffSpec& tau,
                              const FrameSpec& frames, const ChainOptions& copt = {},
                              const ApproxOptions& opt = {}) {
    auto ref = range_normalized_chain(VectorField(p, tau), frames, copt);
    if (!ref.diag.converged) table.warnings.push_back("reference chain limit unconverged");
    for (auto& row : table.rows) {
        auto t0 = std::chrono::steady_clock::now();
        auto approx = step_approximate(tau, row.n, opt.horizon);
        auto fr = range_normalized_chain(VectorField(p, approx.spec()), frames, copt);
        row.chain_converged = fr.diag.converged;
        if (!fr.diag.converged) {
            row.chain_error = qnan;
            table.warnings.push_back("level " + std::to_string(row.n) + " excluded: chain limit unconverged");
        } else {
            double e = 0;
            for (std::size_t i = 0; i < fr.checkpoints.size(); ++i)
                for (std::size_t k = 0; k < fr.grid.size(); ++k) {
                    double d = std::abs(fr.interior[i][k] - ref.interior[i][k]);
                    if (std::isfinite(d)) e = std::max(e, d);
                }
            row.chain_error = e;
        }
        row.runtime_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    table.chain_decreasing = true;
    detail::mark_monotone(table, opt.noise_floor);
    if (!table.chain_decreasing) table.warnings.push_back("chain error not monotone above the noise floor");
}

}  // namespace loewner
