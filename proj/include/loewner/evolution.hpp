#pragma once

// Forward and reverse evolution families: phi_{s,t}(z) solves
// d phi / dt = G(phi, t) with phi_{s,s}(z) = z, and the reverse family
// omega_{s,t}(z) solves dw/ds = -G(w, s) backward from w(t) = z.
// First derivatives are carried through the variational equation,
// integrated as log phi' so that decaying derivatives keep their relative
// accuracy.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "herglotz.hpp"
#include "ode.hpp"

namespace loewner {

inline constexpr double default_guard = 1e-6;

/// Seed points with labels (circle index, angle index) back to the
/// construction; labels are (-1, i) for explicit point lists.
struct SeedGrid {
    std::vector<cplx> points;
    std::vector<std::pair<int, int>> labels;

    static SeedGrid circles(const std::vector<double>& radii, std::size_t n_angles,
                            double guard = default_guard) {
        SeedGrid g;
        auto th = angles(n_angles);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (!(radii[i] >= 0 && radii[i] <= 1 - guard))
                throw Error("seed circle radius " + fmt(radii[i]) +
                            " outside [0, 1 - guard]");
            if (radii[i] == 0) {
                g.points.push_back(0.0);
                g.labels.emplace_back(static_cast<int>(i), 0);
                continue;
            }
            for (std::size_t j = 0; j < n_angles; ++j) {
                g.points.push_back(std::polar(radii[i], th[j]));
                g.labels.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
        return g;
    }

    static SeedGrid from_points(std::vector<cplx> pts, double guard = default_guard) {
        SeedGrid g;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!(std::abs(pts[i]) <= 1 - guard))
                throw Error("seed " + std::to_string(i) + " has modulus above 1 - guard");
            g.labels.emplace_back(-1, static_cast<int>(i));
        }
        g.points = std::move(pts);
        return g;
    }

    std::size_t size() const { return points.size(); }
};

enum class Direction { forward, reverse };

struct SeedLog {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    bool truncated = false;   ///< reached the boundary guard
    double t_truncated = qnan;
    std::string error;        ///< non-empty on underflow or non-finite state
};

/// Discretized evolution family over a seed grid. For the forward family
/// times ascend from the start time s; for the reverse family they descend
/// from the seeding time t down to 0. values[i][j] is the map at times[i]
/// applied to seed j; entries after truncation are NaN.
struct TrajectorySet {
    double start = 0;
    Direction direction = Direction::forward;
    std::vector<double> times;
    std::vector<cplx> seeds;
    std::vector<std::vector<cplx>> values;
    std::vector<std::vector<cplx>> derivs;
    std::vector<SeedLog> log;

    std::size_t n_times() const { return times.size(); }
    std::size_t n_seeds() const { return seeds.size(); }

    bool live(std::size_t ti, std::size_t j) const { return finite(values[ti][j]); }

    std::size_t time_index(double t) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
        throw Error("time " + fmt(t) + " is not a stored checkpoint");
    }

    std::size_t truncated_count() const {
        std::size_t n = 0;
        for (const auto& l : log) n += l.truncated ? 1 : 0;
        return n;
    }
};

struct EvolveOptions {
    double guard = default_guard;
    unsigned workers = 0;   ///< 0 uses the hardware concurrency
};

namespace detail {

inline std::vector<double> checkpoint_list(double a, double b, std::vector<double> cps) {
    std::vector<double> out{a};
    for (double c : cps)
        if (c > a && c < b) out.push_back(c);
    out.push_back(b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Integrates (phi, log phi') for every seed. The integration variable is
// field time for the forward family and sigma = t0 - s for the reverse one.
inline TrajectorySet integrate_family(const VectorField& G, double t0, std::vector<cplx> seeds,
                                      const std::vector<double>& field_times, Direction dir,
                                      double tol, const EvolveOptions& opt) {
    if (!(tol > 0)) throw Error("tolerance must be positive");
    TrajectorySet ts;
    ts.start = t0;
    ts.direction = dir;
    ts.times = field_times;
    ts.seeds = seeds;
    std::size_t nt = field_times.size(), ns = seeds.size();
    ts.values.assign(nt, std::vector<cplx>(ns, cplx(qnan, qnan)));
    ts.derivs.assign(nt, std::vector<cplx>(ns, cplx(qnan, qnan)));
    ts.log.assign(ns, {});

    bool fwd = dir == Direction::forward;
    auto to_field = [&](double x) { return fwd ? x : t0 - x; };
    std::vector<double> stops(nt), breaks;
    for (std::size_t i = 0; i < nt; ++i) stops[i] = fwd ? field_times[i] : t0 - field_times[i];
    for (double b : G.discontinuities()) breaks.push_back(fwd ? b : t0 - b);
    double x0 = fwd ? t0 : 0.0;

    std::array<ode::Tolerance, 2> w{ode::Tolerance{tol, tol}, ode::Tolerance{tol, 0.0}};
    double limit = 1 - opt.guard;

    parallel_for(
        ns,
        [&](std::size_t j) {
            auto rhs = [&](double x, const ode::State<2>& y, double xm) {
                double t = to_field(x), tm = to_field(xm);
                return ode::State<2>{G.eval(y[0], t, tm), G.dz(y[0], t, tm)};
            };
            auto observe = [&](std::size_t k, double, const ode::State<2>& y) {
                ts.values[k][j] = y[0];
                ts.derivs[k][j] = k == 0 ? cplx(1.0) : std::exp(y[1]);
            };
            auto guard = [&](double, const ode::State<2>& y) { return std::abs(y[0]) >= limit; };
            auto r = ode::dopri5<2>(rhs, x0, {seeds[j], 0.0}, stops, breaks, w, observe, guard);
            auto& lg = ts.log[j];
            lg.accepted = r.accepted;
            lg.rejected = r.rejected;
            if (r.outcome == ode::Outcome::guarded) {
                lg.truncated = true;
                lg.t_truncated = to_field(r.t_stop);
                // values at the stop itself touch the guard band; drop them
                for (std::size_t k = 0; k < nt; ++k)
                    if (finite(ts.values[k][j]) && std::abs(ts.values[k][j]) >= limit)
                        ts.values[k][j] = ts.derivs[k][j] = cplx(qnan, qnan);
            } else if (r.outcome != ode::Outcome::completed) {
                lg.error = std::string(ode::to_string(r.outcome)) + " at t=" +
                           fmt(to_field(r.t_stop));
            }
        },
        opt.workers);
    // EF1 holds exactly by construction
    for (std::size_t j = 0; j < ns; ++j) {
        ts.values[0][j] = seeds[j];
        ts.derivs[0][j] = 1.0;
    }
    return ts;
}

}  // namespace detail

/// Forward evolution family from s to t_end; output at the union of
/// {s, t_end} and the checkpoints inside (s, t_end).
inline TrajectorySet solve_forward(const VectorField& G, double s, double t_end,
                                   const SeedGrid& seeds, double tol = 1e-9,
                                   const std::vector<double>& checkpoints = {},
                                   const EvolveOptions& opt = {}) {
    if (!(s <= t_end)) throw Error("solve_forward needs s <= t_end");
    auto times = detail::checkpoint_list(s, t_end, checkpoints);
    return detail::integrate_family(G, s, seeds.points, times, Direction::forward, tol, opt);
}

/// Reverse evolution family seeded at time t, read at s = t, the
/// checkpoints inside (0, t), and s = 0 (descending).
inline TrajectorySet solve_reverse(const VectorField& G, double t, const SeedGrid& seeds,
                                   double tol = 1e-9, const std::vector<double>& checkpoints = {},
                                   const EvolveOptions& opt = {}) {
    if (!(t >= 0)) throw Error("solve_reverse needs t >= 0");
    auto asc = detail::checkpoint_list(0.0, t, checkpoints);
    std::vector<double> times(asc.rbegin(), asc.rend());
    return detail::integrate_family(G, t, seeds.points, times, Direction::reverse, tol, opt);
}

struct ResidualReport {
    double max_residual = 0;
    double mean_residual = 0;
    std::size_t worst_seed = 0;
    std::size_t used = 0;
    std::size_t excluded = 0;
    std::vector<double> per_seed;   ///< NaN for excluded seeds
};

/// max over seeds of |phi_{s,t}(z) - phi_{u,t}(phi_{s,u}(z))| with all
/// three legs integrated independently.
inline ResidualReport verify_semigroup(const VectorField& G, double s, double u, double t,
                                       const SeedGrid& seeds, double tol = 1e-9,
                                       const EvolveOptions& opt = {}) {
    if (!(s <= u && u <= t)) throw Error("verify_semigroup needs s <= u <= t");
    auto direct = solve_forward(G, s, t, seeds, tol, {}, opt);
    auto first = solve_forward(G, s, u, seeds, tol, {}, opt);
    SeedGrid mid;
    mid.labels = seeds.labels;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        cplx v = first.values.back()[j];
        mid.points.push_back(finite(v) ? v : cplx(0.0));
    }
    auto second = solve_forward(G, u, t, mid, tol, {}, opt);
    ResidualReport r;
    r.per_seed.assign(seeds.size(), qnan);
    double sum = 0;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        cplx a = direct.values.back()[j];
        cplx b = second.values.back()[j];
        bool bad = !finite(a) || !finite(b) || !finite(first.values.back()[j]) ||
                   !direct.log[j].error.empty() || !first.log[j].error.empty() ||
                   !second.log[j].error.empty();
        if (bad) {
            ++r.excluded;
            continue;
        }
        double d = std::abs(a - b);
        r.per_seed[j] = d;
        sum += d;
        ++r.used;
        if (d > r.max_residual) {
            r.max_residual = d;
            r.worst_seed = j;
        }
    }
    r.mean_residual = r.used ? sum / static_cast<double>(r.used) : 0;
    return r;
}

struct SchwarzPickReport {
    double worst_violation = -inf;   ///< max of d_h(t) - d_h(0)
    bool pass = true;
    std::size_t checked = 0;
    std::size_t excluded = 0;
};

/// Hyperbolic distances between paired seeds must not increase beyond
/// tol_hyp at any stored time.
inline SchwarzPickReport schwarz_pick_check(const TrajectorySet& ts,
                                            const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                            double tol_hyp = 1e-9) {
    SchwarzPickReport r;
    for (auto [a, b] : pairs) {
        if (ts.log[a].truncated || ts.log[b].truncated || !ts.log[a].error.empty() ||
            !ts.log[b].error.empty()) {
            ++r.excluded;
            continue;
        }
        double d0 = hyperbolic_distance(ts.seeds[a], ts.seeds[b]);
        for (std::size_t i = 0; i < ts.n_times(); ++i) {
            double d = hyperbolic_distance(ts.values[i][a], ts.values[i][b]);
            r.worst_violation = std::max(r.worst_violation, d - d0);
            ++r.checked;
        }
    }
    r.pass = r.worst_violation <= tol_hyp;
    return r;
}

/// Composite 5-point Gauss-Legendre rule on [a, b] with panels no wider
/// than `panel`, split at the given breakpoints.
template <class F>
auto integrate_gl(F&& f, double a, double b, const std::vector<double>& breaks = {},
                  double panel = 0.05) -> decltype(f(a)) {
    using R = decltype(f(a));
    static constexpr double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                                    -0.9061798459386640, 0.9061798459386640};
    static constexpr double w[5] = {0.5688888888888889, 0.4786286704993665,
                                    0.4786286704993665, 0.2369268850561891,
                                    0.2369268850561891};
    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    R acc{};
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double lo = cuts[c], hi = cuts[c + 1];
        auto n = static_cast<std::size_t>(std::ceil((hi - lo) / panel));
        n = std::max<std::size_t>(n, 1);
        double h = (hi - lo) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            double mid = lo + (static_cast<double>(k) + 0.5) * h;
            for (int q = 0; q < 5; ++q) acc += w[q] * 0.5 * h * f(mid + 0.5 * h * x[q]);
        }
    }
    return acc;
}

struct OriginDerivative {
    std::vector<double> times;
    std::vector<cplx> values;                    ///< phi'_{0,t}(0)
    std::optional<std::vector<cplx>> quadrature; ///< exp(-int_0^t p(0,u) du) when tau == 0
    double max_deviation = qnan;                  ///< |values - quadrature| when available
};

/// phi'_{0,t}(0) along the checkpoints, with the closed quadrature form as
/// a cross-check when tau is identically 0.
inline OriginDerivative derivative_at_origin(const VectorField& G, double t_end, double tol = 1e-9,
                                             const std::vector<double>& checkpoints = {}) {
    auto ts = solve_forward(G, 0.0, t_end, SeedGrid::from_points({0.0}), tol, checkpoints);
    OriginDerivative out;
    out.times = ts.times;
    for (std::size_t i = 0; i < ts.n_times(); ++i) out.values.push_back(ts.derivs[i][0]);
    auto c = std::get_if<DenjoyWolffSpec::Constant>(&G.tau().kind());
    if (c && c->v == cplx(0.0)) {
        std::vector<cplx> q;
        out.max_deviation = 0;
        double prev = 0;
        cplx acc = 0;
        for (std::size_t i = 0; i < ts.n_times(); ++i) {
            acc += integrate_gl([&](double u) { return G.p()(0.0, u); }, prev, ts.times[i]);
            prev = ts.times[i];
            q.push_back(std::exp(-acc));
            out.max_deviation = std::max(out.max_deviation, std::abs(q.back() - out.values[i]));
        }
        out.quadrature = std::move(q);
    }
    return out;
}

}  // namespace loewner
