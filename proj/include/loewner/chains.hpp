#pragma once

// Loewner chains from evolution families.
//
// With alpha(t) = phi_{0,t}(0), beta(t) = phi'_{0,t}(0) / |phi'_{0,t}(0)| and
// M_t(z) = (beta z + alpha) / (1 + beta conj(alpha) z), the range-normalized
// chain is
//
//     f_s(z) = lim_{T -> inf} M_T^{-1}(phi_{s,T}(z)) / c_T,
//     c_T    = |phi'_{0,T}(0)| / (1 - |alpha(T)|^2),
//
// which equals h_s o M_s^{-1} with h_s = lim psi_{s,T} / psi'_{0,T}(0).
// Each finite-horizon estimate already satisfies f_s = f_t o phi_{s,t}
// exactly, so limits are taken with one horizon selection shared by every
// point of a frame set.
//
// phi_{s,T}(z) and alpha(T) approach each other as T grows; the difference
// d = phi_{s,T}(z) - alpha(T) is integrated directly to avoid the
// cancellation of subtracting two nearby values. The state holds log d
// (d vanishes only at z = alpha(s), where the chain is 0 for every T):
// (log d)' tends to a smooth limit, so steps grow once d decays.

#include <map>
#include <optional>

#include "evolution.hpp"

namespace loewner {

// ---------------------------------------------------------------------------
// Moebius normalization

struct MobiusNormalizer {
    std::vector<double> times;
    std::vector<cplx> alpha;
    std::vector<cplx> beta;
    std::vector<cplx> dphi0;   ///< phi'_{0,t}(0)

    std::size_t index(double t) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
        throw Error("time " + fmt(t) + " is not a normalizer checkpoint");
    }

    cplx M(std::size_t i, cplx z) const {
        return (beta[i] * z + alpha[i]) / (1.0 + beta[i] * std::conj(alpha[i]) * z);
    }
    cplx M_inv(std::size_t i, cplx w) const {
        return (w - alpha[i]) / (beta[i] * (1.0 - std::conj(alpha[i]) * w));
    }
    /// psi'_{0,t}(0) = |phi'_{0,t}(0)| / (1 - |alpha(t)|^2), positive.
    double psi_prime0(std::size_t i) const {
        double a = std::abs(alpha[i]);
        return std::abs(dphi0[i]) / ((1 - a) * (1 + a));
    }
};

/// Tabulates alpha and beta from a forward family started at s = 0 that
/// contains the seed 0.
inline MobiusNormalizer normalize(const TrajectorySet& traj) {
    if (traj.direction != Direction::forward || traj.start != 0.0)
        throw Error("normalize needs a forward family started at s = 0");
    std::size_t j0 = traj.n_seeds();
    for (std::size_t j = 0; j < traj.n_seeds(); ++j)
        if (traj.seeds[j] == cplx(0.0)) j0 = j;
    if (j0 == traj.n_seeds()) throw Error("normalize needs the seed 0");
    MobiusNormalizer n;
    n.times = traj.times;
    for (std::size_t i = 0; i < traj.n_times(); ++i) {
        cplx a = traj.values[i][j0], d = traj.derivs[i][j0];
        if (!finite(a) || !finite(d))
            throw Error("normalize: trajectory of 0 truncated at t=" + fmt(traj.times[i]));
        if (std::abs(d) == 0)
            throw Error("normalize: phi'_{0,t}(0) vanished at t=" + fmt(traj.times[i]));
        n.alpha.push_back(a);
        n.dphi0.push_back(d);
        n.beta.push_back(d / std::abs(d));
    }
    n.alpha[0] = 0.0;
    n.beta[0] = 1.0;
    n.dphi0[0] = 1.0;
    return n;
}

struct NormalizationCheck {
    double max_psi0 = 0;       ///< max |psi_{s,t}(0)|
    double max_arg = 0;        ///< max |arg psi'_{s,t}(0)|
    bool pass = true;
};

/// Checks psi_{s,t}(0) = 0 and psi'_{s,t}(0) > 0 for every checkpoint
/// pair s < t by integrating phi_{s,t}(alpha(s)).
inline NormalizationCheck verify_normalization(const MobiusNormalizer& n, const VectorField& G,
                                               double tol = 1e-9, double check_tol = 1e-9) {
    NormalizationCheck r;
    std::size_t nt = n.times.size();
    for (std::size_t i = 0; i + 1 < nt; ++i) {
        auto ts = solve_forward(G, n.times[i], n.times.back(), SeedGrid::from_points({n.alpha[i]}, 0.0),
                                tol, n.times);
        for (std::size_t k = 1; k < ts.n_times(); ++k) {
            std::size_t j = n.index(ts.times[k]);
            cplx w = ts.values[k][0], dw = ts.derivs[k][0];
            if (!finite(w)) continue;
            cplx psi0 = n.M_inv(j, w);
            cplx den = 1.0 - std::conj(n.alpha[j]) * w;
            cplx dpsi = (1 - std::norm(n.alpha[j])) / (n.beta[j] * den * den) * dw * n.beta[i] *
                        (1 - std::norm(n.alpha[i]));
            r.max_psi0 = std::max(r.max_psi0, std::abs(psi0));
            r.max_arg = std::max(r.max_arg, std::abs(std::arg(dpsi)));
        }
    }
    r.pass = r.max_psi0 <= check_tol && r.max_arg <= check_tol;
    return r;
}

// ---------------------------------------------------------------------------
// Chain limit

struct ChainOptions {
    double tol = 1e-9;
    double horizon = 64;              ///< largest horizon T
    double tol_limit = 1e-8;          ///< successive-estimate threshold (relative sup norm)
    std::size_t extrapolation_nodes = 4;
    double guard = default_guard;
    unsigned workers = 0;
};

/// Geometric horizons 2^k inside [t_min, T), followed by T.
inline std::vector<double> horizon_schedule(double t_min, double T) {
    if (!(T > t_min)) throw Error("chain horizon must exceed the largest checkpoint");
    std::vector<double> out;
    for (double h = 1; h < T; h *= 2)
        if (h >= t_min) out.push_back(h);
    out.push_back(T);
    return out;
}

/// How per-horizon estimates become a limit value. Shared by all points of
/// a frame set so that chain identities survive the limit exactly.
struct LimitSelection {
    std::vector<double> horizons;
    std::size_t last = 0;        ///< index of the last horizon used
    std::size_t nodes = 1;       ///< 1: raw estimate; >1: rational extrapolation in 1/T

    cplx apply(const std::vector<cplx>& est) const {
        if (nodes <= 1) return est[last];
        std::size_t first = last + 1 - nodes;
        std::vector<double> x;
        std::vector<cplx> y;
        for (std::size_t k = first; k <= last; ++k) {
            x.push_back(1.0 / horizons[k]);
            y.push_back(est[k]);
        }
        return extrapolate_rational(x, y);
    }
};

struct LimitDiagnostics {
    bool converged = false;
    std::string mode = "raw";       ///< raw | extrapolated
    double delta = inf;             ///< achieved successive delta
    double horizon = 0;             ///< last horizon integrated
    std::vector<double> horizons;
    std::vector<double> raw_deltas;
    std::vector<double> extrapolated_deltas;
    std::vector<double> ungated_deltas;   ///< raw deltas of points outside the test (traces)
    std::size_t truncated = 0;
};

/// Evaluates f_s(z) = lim M_T^{-1}(phi_{s,T}(z)) / c_T for batches of
/// (s, z) queries.
class ChainSolver {
public:
    ChainSolver(VectorField G, ChainOptions opt = {}) : G_(std::move(G)), opt_(opt) {}

    const ChainOptions& options() const { return opt_; }
    const VectorField& field() const { return G_; }

    struct Batch {
        std::vector<cplx> values;                 ///< limit values (NaN when truncated)
        std::vector<std::vector<cplx>> estimates; ///< [query][horizon]
        LimitSelection selection;
        LimitDiagnostics diag;
    };

    /// Adaptive limit: horizons are added until the raw or the extrapolated
    /// sequence changes by less than tol_limit (relative sup norm).
    /// Only queries with gate[q] set (all, when gate is empty) take part in
    /// the convergence test; the others follow the same selection.
    Batch limit(const std::vector<double>& s, const std::vector<cplx>& z,
                std::vector<bool> gate = {}) const {
        if (gate.empty()) gate.assign(z.size(), true);
        double s_max = s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
        Batch b;
        b.selection.horizons = horizon_schedule(s_max, opt_.horizon);
        const auto& H = b.selection.horizons;
        b.diag.horizons = H;
        auto states = start(s, z);
        b.estimates.assign(z.size(), {});
        std::vector<cplx> acc_prev;
        double best_raw = inf, best_acc = inf;
        std::size_t best_raw_k = 0, best_acc_k = 0;
        for (std::size_t k = 0; k < H.size(); ++k) {
            advance(states, H[k]);
            for (std::size_t q = 0; q < z.size(); ++q) b.estimates[q].push_back(estimate(states[q]));
            b.diag.horizon = H[k];
            if (k == 0) continue;
            double raw = 0, raw_other = 0;
            for (std::size_t q = 0; q < z.size(); ++q) {
                cplx a = b.estimates[q][k], c = b.estimates[q][k - 1];
                if (!finite(a) || !finite(c)) continue;
                double d = std::abs(a - c) / std::max(1.0, std::abs(a));
                (gate[q] ? raw : raw_other) = std::max(gate[q] ? raw : raw_other, d);
            }
            b.diag.ungated_deltas.push_back(raw_other);
            b.diag.raw_deltas.push_back(raw);
            if (raw < best_raw) {
                best_raw = raw;
                best_raw_k = k;
            }
            LimitSelection sel{H, k, std::min(opt_.extrapolation_nodes, k + 1)};
            std::vector<cplx> acc(z.size());
            for (std::size_t q = 0; q < z.size(); ++q) acc[q] = sel.apply(b.estimates[q]);
            double dacc = inf;
            if (!acc_prev.empty()) {
                dacc = 0;
                for (std::size_t q = 0; q < z.size(); ++q)
                    if (gate[q] && finite(acc[q]) && finite(acc_prev[q]))
                        dacc = std::max(dacc, std::abs(acc[q] - acc_prev[q]) / std::max(1.0, std::abs(acc[q])));
                b.diag.extrapolated_deltas.push_back(dacc);
                if (dacc < best_acc) {
                    best_acc = dacc;
                    best_acc_k = k;
                }
            }
            acc_prev = std::move(acc);
            if (raw < opt_.tol_limit) {
                b.selection.last = k;
                b.selection.nodes = 1;
                b.diag = finish(b.diag, true, "raw", raw);
                break;
            }
            if (dacc < opt_.tol_limit) {
                b.selection.last = k;
                b.selection.nodes = std::min(opt_.extrapolation_nodes, k + 1);
                b.diag = finish(b.diag, true, "extrapolated", dacc);
                break;
            }
        }
        if (!b.diag.converged) {
            if (H.size() == 1) {
                b.selection.last = 0;
                b.selection.nodes = 1;
                b.diag = finish(b.diag, false, "raw", inf);
            } else if (best_acc < best_raw) {
                b.selection.last = best_acc_k;
                b.selection.nodes = std::min(opt_.extrapolation_nodes, best_acc_k + 1);
                b.diag = finish(b.diag, false, "extrapolated", best_acc);
            } else {
                b.selection.last = best_raw_k;
                b.selection.nodes = 1;
                b.diag = finish(b.diag, false, "raw", best_raw);
            }
        }
        b.values.resize(z.size());
        for (std::size_t q = 0; q < z.size(); ++q) {
            b.values[q] = b.selection.apply(b.estimates[q]);
            if (!finite(b.values[q])) ++b.diag.truncated;
        }
        return b;
    }

    /// Evaluates with a fixed selection (obtained from `limit`).
    std::vector<cplx> evaluate(const LimitSelection& sel, const std::vector<double>& s,
                               const std::vector<cplx>& z) const {
        auto states = start(s, z);
        std::vector<std::vector<cplx>> est(z.size());
        for (std::size_t k = 0; k <= sel.last; ++k) {
            advance(states, sel.horizons[k]);
            for (std::size_t q = 0; q < z.size(); ++q) est[q].push_back(estimate(states[q]));
        }
        std::vector<cplx> out(z.size());
        for (std::size_t q = 0; q < z.size(); ++q) out[q] = sel.apply(est[q]);
        return out;
    }

    /// alpha(s) and log phi'_{0,s}(0) at the requested times.
    std::map<double, ode::State<2>> anchor(std::vector<double> s) const {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        std::map<double, ode::State<2>> out;
        if (s.empty()) return out;
        std::vector<double> stops = s;
        if (stops.front() > 0) stops.insert(stops.begin(), 0.0);
        std::array<ode::Tolerance, 2> w{ode::Tolerance{opt_.tol, opt_.tol}, ode::Tolerance{opt_.tol, 0.0}};
        auto rhs = [&](double t, const ode::State<2>& y, double tm) {
            return ode::State<2>{G_.eval(y[0], t, tm), G_.dz(y[0], t, tm)};
        };
        bool hit = false;
        auto res = ode::dopri5<2>(
            rhs, 0.0, {0.0, 0.0}, stops, G_.discontinuities(), w,
            [&](std::size_t, double t, const ode::State<2>& y) { out[t] = y; },
            [&](double, const ode::State<2>& y) { return hit = std::abs(y[0]) >= 1 - opt_.guard; });
        if (res.outcome != ode::Outcome::completed)
            throw Error("trajectory of 0 failed before t=" + fmt(s.back()) + ": " +
                        ode::to_string(res.outcome));
        return out;
    }

private:
    struct QueryState {
        double t = 0;
        ode::State<3> y{};   ///< alpha, log phi'_{0,t}(0), log(phi_{s,t}(z) - alpha)
        bool anchor = false; ///< z = alpha(s)
        bool alive = true;
        std::string error;
    };

    static LimitDiagnostics finish(LimitDiagnostics d, bool conv, const char* mode, double delta) {
        d.converged = conv;
        d.mode = mode;
        d.delta = delta;
        return d;
    }

    std::vector<QueryState> start(const std::vector<double>& s, const std::vector<cplx>& z) const {
        if (s.size() != z.size()) throw Error("chain query lists differ in length");
        auto anchors = anchor(s);
        std::vector<QueryState> st(z.size());
        for (std::size_t q = 0; q < z.size(); ++q) {
            const auto& a = anchors.at(s[q]);
            st[q].t = s[q];
            cplx d = z[q] - a[0];
            st[q].anchor = d == 0.0;
            st[q].y = {a[0], a[1], st[q].anchor ? cplx(0.0) : std::log(d)};
            if (!(std::abs(z[q]) < 1 - opt_.guard) || !finite(z[q])) st[q].alive = false;
        }
        return st;
    }

    void advance(std::vector<QueryState>& st, double T) const {
        std::array<ode::Tolerance, 3> w{ode::Tolerance{opt_.tol, opt_.tol},
                                        ode::Tolerance{opt_.tol, 0.0},
                                        ode::Tolerance{opt_.tol, 0.0}};
        double limit = 1 - opt_.guard;
        parallel_for(
            st.size(),
            [&](std::size_t q) {
                auto& s = st[q];
                if (!s.alive || s.t >= T) return;
                auto rhs = [&](double t, const ode::State<3>& y, double tm) {
                    auto j = G_.jet(y[0], s.anchor ? cplx(0.0) : std::exp(y[2]), t, tm);
                    return ode::State<3>{j.g, j.dg, s.anchor ? cplx(0.0) : j.rel};
                };
                auto res = ode::dopri5<3>(
                    rhs, s.t, s.y, {T}, G_.discontinuities(), w,
                    [&](std::size_t, double, const ode::State<3>& y) { s.y = y; },
                    [&](double, const ode::State<3>& y) {
                        return std::abs(y[0]) >= limit ||
                               (!s.anchor && std::abs(y[0] + std::exp(y[2])) >= limit);
                    });
                s.t = T;
                if (res.outcome != ode::Outcome::completed) {
                    s.alive = false;
                    s.error = ode::to_string(res.outcome);
                }
            },
            opt_.workers);
    }

    static cplx estimate(const QueryState& s) {
        if (!s.alive) return {qnan, qnan};
        if (s.anchor) return 0.0;
        cplx a = s.y[0], d = std::exp(s.y[2]);
        double m = std::abs(a);
        double gap = (1 - m) * (1 + m);
        cplx dphi = std::exp(s.y[1]);
        if (!(std::abs(dphi) > 1e-300)) throw Error("psi'_{0,T}(0) vanished numerically");
        return d * gap / (dphi * (gap - std::conj(a) * d));
    }

    VectorField G_;
    ChainOptions opt_;
};

struct ChainLimitResult {
    std::vector<cplx> h;   ///< h_s on the seed grid
    LimitSelection selection;
    LimitDiagnostics diag;
};

/// h_s(zeta) = lim psi_{s,T}(zeta) / psi'_{0,T}(0) on the seed grid,
/// evaluated as f_s(M_s(zeta)).
inline ChainLimitResult chain_limit(const MobiusNormalizer& n, const VectorField& G, double s,
                                    const SeedGrid& seeds, const ChainOptions& opt = {}) {
    std::size_t i = n.index(s);
    std::vector<cplx> pts;
    for (cplx zeta : seeds.points) pts.push_back(n.M(i, zeta));
    ChainSolver solver(G, opt);
    auto b = solver.limit(std::vector<double>(pts.size(), s), pts);
    return {b.values, b.selection, b.diag};
}

// ---------------------------------------------------------------------------
// Frames

struct ChainFrames {
    enum class Tag { range_normalized, decreasing };
    Tag tag = Tag::range_normalized;
    std::vector<double> checkpoints;
    SeedGrid grid;
    std::vector<double> theta;
    double delta_trace = 1e-3;
    std::vector<std::vector<cplx>> interior;    ///< [checkpoint][grid point]
    std::vector<std::vector<cplx>> trace;       ///< [checkpoint][theta] at radius 1 - delta
    std::vector<std::vector<cplx>> trace_half;  ///< at radius 1 - delta/2, when requested
    LimitSelection selection;                   ///< range-normalized frames only
    LimitDiagnostics diag;
    std::vector<std::string> warnings;

    std::size_t index(double t) const {
        for (std::size_t i = 0; i < checkpoints.size(); ++i)
            if (std::abs(checkpoints[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
        throw Error("time " + fmt(t) + " is not a frame checkpoint");
    }
};

struct FrameSpec {
    std::vector<double> checkpoints;
    SeedGrid grid;
    std::vector<double> theta;
    double delta_trace = 1e-3;
    bool half_radius = false;
};

namespace detail {

inline std::vector<cplx> trace_points(const std::vector<double>& theta, double r) {
    std::vector<cplx> out;
    for (double a : theta) out.push_back(std::polar(r, a));
    return out;
}

}  // namespace detail

/// Range-normalized chain f_t = h_t o M_t^{-1} on the grid and traces.
inline ChainFrames range_normalized_chain(const VectorField& G, const FrameSpec& spec,
                                          const ChainOptions& opt = {}) {
    ChainFrames fr;
    fr.tag = ChainFrames::Tag::range_normalized;
    fr.checkpoints = spec.checkpoints;
    fr.grid = spec.grid;
    fr.theta = spec.theta;
    fr.delta_trace = spec.delta_trace;
    std::vector<double> qs;
    std::vector<cplx> qz;
    std::vector<bool> gate;
    auto outer = detail::trace_points(spec.theta, 1 - spec.delta_trace);
    auto half = detail::trace_points(spec.theta, 1 - spec.delta_trace / 2);
    for (double t : spec.checkpoints) {
        for (cplx z : spec.grid.points) {
            qs.push_back(t);
            qz.push_back(z);
            gate.push_back(true);
        }
        for (cplx z : outer) {
            qs.push_back(t);
            qz.push_back(z);
            gate.push_back(false);
        }
        if (spec.half_radius)
            for (cplx z : half) {
                qs.push_back(t);
                qz.push_back(z);
                gate.push_back(false);
            }
    }
    ChainSolver solver(G, opt);
    auto b = solver.limit(qs, qz, gate);
    fr.selection = b.selection;
    fr.diag = b.diag;
    std::size_t q = 0;
    for (std::size_t i = 0; i < spec.checkpoints.size(); ++i) {
        fr.interior.emplace_back(b.values.begin() + q, b.values.begin() + q + spec.grid.size());
        q += spec.grid.size();
        fr.trace.emplace_back(b.values.begin() + q, b.values.begin() + q + spec.theta.size());
        q += spec.theta.size();
        if (spec.half_radius) {
            fr.trace_half.emplace_back(b.values.begin() + q, b.values.begin() + q + spec.theta.size());
            q += spec.theta.size();
        }
    }
    if (!b.diag.converged)
        fr.warnings.push_back("chain limit unconverged: delta " + fmt(b.diag.delta) +
                              " at horizon " + fmt(b.diag.horizon));
    if (b.diag.truncated)
        fr.warnings.push_back("truncated chain samples: " + std::to_string(b.diag.truncated));
    if (!b.diag.ungated_deltas.empty() && b.diag.ungated_deltas.back() > 100 * opt.tol_limit)
        fr.warnings.push_back("trace samples still moving at the last horizon: delta " +
                              fmt(b.diag.ungated_deltas.back()));
    return fr;
}

/// Decreasing chain g_t = omega_{0,t} on the grid and traces.
inline ChainFrames decreasing_chain(const VectorField& G, const FrameSpec& spec, double tol = 1e-9,
                                    const EvolveOptions& eo = {}) {
    ChainFrames fr;
    fr.tag = ChainFrames::Tag::decreasing;
    fr.checkpoints = spec.checkpoints;
    fr.grid = spec.grid;
    fr.theta = spec.theta;
    fr.delta_trace = spec.delta_trace;
    SeedGrid all;
    all.points = spec.grid.points;
    auto outer = detail::trace_points(spec.theta, 1 - spec.delta_trace);
    auto half = detail::trace_points(spec.theta, 1 - spec.delta_trace / 2);
    all.points.insert(all.points.end(), outer.begin(), outer.end());
    if (spec.half_radius) all.points.insert(all.points.end(), half.begin(), half.end());
    std::size_t ng = spec.grid.size(), nth = spec.theta.size();
    fr.interior.assign(spec.checkpoints.size(), {});
    fr.trace.assign(spec.checkpoints.size(), {});
    if (spec.half_radius) fr.trace_half.assign(spec.checkpoints.size(), {});
    for (std::size_t i = 0; i < spec.checkpoints.size(); ++i) {
        auto ts = solve_reverse(G, spec.checkpoints[i], all, tol, {}, eo);
        const auto& v = ts.values.back();
        fr.interior[i].assign(v.begin(), v.begin() + ng);
        fr.trace[i].assign(v.begin() + ng, v.begin() + ng + nth);
        if (spec.half_radius) fr.trace_half[i].assign(v.begin() + ng + nth, v.begin() + ng + 2 * nth);
        std::size_t bad = 0;
        for (const auto& l : ts.log) bad += (l.truncated || !l.error.empty()) ? 1 : 0;
        if (bad)
            fr.warnings.push_back("reverse family at t=" + fmt(spec.checkpoints[i]) +
                                  " lost " + std::to_string(bad) + " samples");
    }
    return fr;
}

// ---------------------------------------------------------------------------
// Identities and diagnostics

struct TransitionReport {
    double max_residual = 0;
    double worst_s = 0, worst_t = 0;
    std::size_t pairs = 0;
    std::size_t excluded = 0;
    bool pass = true;
};

/// max |f_s(z) - f_t(phi_{s,t}(z))| over the interior grid for consecutive
/// checkpoint pairs and the pair (first, last).
inline TransitionReport verify_transition(const ChainFrames& fr, const VectorField& G,
                                          const ChainOptions& opt = {}, double tol_chain = 1e-6) {
    if (fr.tag != ChainFrames::Tag::range_normalized)
        throw Error("transition identity applies to range-normalized frames");
    TransitionReport r;
    std::size_t n = fr.checkpoints.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    if (n > 2) pairs.emplace_back(0, n - 1);
    ChainSolver solver(G, opt);
    for (auto [i, j] : pairs) {
        double s = fr.checkpoints[i], t = fr.checkpoints[j];
        auto ts = solve_forward(G, s, t, fr.grid, opt.tol, {}, {opt.guard, opt.workers});
        std::vector<cplx> pts;
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < fr.grid.size(); ++k) {
            cplx w = ts.values.back()[k];
            if (!finite(w) || !finite(fr.interior[i][k])) {
                ++r.excluded;
                continue;
            }
            pts.push_back(w);
            idx.push_back(k);
        }
        auto ft = solver.evaluate(fr.selection, std::vector<double>(pts.size(), t), pts);
        for (std::size_t m = 0; m < pts.size(); ++m) {
            if (!finite(ft[m])) {
                ++r.excluded;
                continue;
            }
            double d = std::abs(ft[m] - fr.interior[i][idx[m]]);
            if (d > r.max_residual) {
                r.max_residual = d;
                r.worst_s = s;
                r.worst_t = t;
            }
        }
        ++r.pairs;
    }
    r.pass = r.max_residual <= tol_chain;
    return r;
}

/// f_0(0) and f_0'(0) - 1 (range-normalized) or max |g_0(z) - z|
/// (decreasing); f_0'(0) from a centered difference on a small circle.
struct NormalizationReport {
    double value_at_origin = 0;
    double derivative_error = 0;
    double identity_error = 0;
    bool pass = true;
};

inline NormalizationReport check_frame_normalization(const ChainFrames& fr, const VectorField& G,
                                                     const ChainOptions& opt = {},
                                                     double tol_chain = 1e-6) {
    NormalizationReport r;
    if (fr.tag == ChainFrames::Tag::decreasing) {
        for (std::size_t k = 0; k < fr.grid.size(); ++k)
            r.identity_error = std::max(r.identity_error, std::abs(fr.interior[0][k] - fr.grid.points[k]));
        r.pass = r.identity_error <= tol_chain;
        return r;
    }
    ChainSolver solver(G, opt);
    double h = 1e-3;
    std::vector<cplx> pts{0.0, h, -h, cplx(0, h), cplx(0, -h)};
    auto v = solver.evaluate(fr.selection, std::vector<double>(pts.size(), fr.checkpoints.front()), pts);
    cplx d1 = (v[1] - v[2]) / (2 * h), d2 = (v[3] - v[4]) / (cplx(0, 2 * h));
    r.value_at_origin = std::abs(v[0]);
    r.derivative_error = std::abs(0.5 * (d1 + d2) - 1.0);
    r.pass = r.value_at_origin <= tol_chain && r.derivative_error <= tol_chain;
    return r;
}

struct ContainmentReport {
    std::size_t tested = 0;
    std::size_t violations = 0;
    bool strict = true;                  ///< outer trace leaves the inner trace somewhere
    std::vector<double> hull_diameter;   ///< per checkpoint
    bool pass = true;
};

/// Spot check of f_s(D) in f_t(D) (or g_t(D) in g_s(D)) for consecutive
/// checkpoints: interior values of the smaller frame must have winding
/// number 1 with respect to the trace polygon of the larger one.
inline ContainmentReport check_containment(const ChainFrames& fr, double max_violation_fraction = 0.0) {
    ContainmentReport r;
    bool inc = fr.tag == ChainFrames::Tag::range_normalized;
    for (const auto& tr : fr.trace) {
        double d = 0;
        for (std::size_t a = 0; a < tr.size(); ++a)
            for (std::size_t b = a + 1; b < tr.size(); ++b)
                if (finite(tr[a]) && finite(tr[b])) d = std::max(d, std::abs(tr[a] - tr[b]));
        r.hull_diameter.push_back(d);
    }
    for (std::size_t i = 0; i + 1 < fr.checkpoints.size(); ++i) {
        const auto& small = inc ? fr.interior[i] : fr.interior[i + 1];
        const auto& big = inc ? fr.trace[i + 1] : fr.trace[i];
        const auto& small_trace = inc ? fr.trace[i] : fr.trace[i + 1];
        std::vector<cplx> poly;
        for (cplx w : big)
            if (finite(w)) poly.push_back(w);
        if (poly.size() < 3) continue;
        for (cplx w : small) {
            if (!finite(w)) continue;
            ++r.tested;
            if (winding_number(poly, w) != 1) ++r.violations;
        }
        std::vector<cplx> inner;
        for (cplx w : small_trace)
            if (finite(w)) inner.push_back(w);
        bool leaves = false;
        for (cplx w : poly)
            if (inner.size() >= 3 && winding_number(inner, w) == 0) leaves = true;
        if (!leaves) r.strict = false;
    }
    r.pass = r.tested == 0 ||
             static_cast<double>(r.violations) <= max_violation_fraction * static_cast<double>(r.tested);
    return r;
}

namespace detail {

// d f / dz on a circle of radius r from N equally spaced samples: with
// c_n the discrete Fourier coefficients, f'(z) = sum n c_n e^{i n theta} / z,
// taking all modes as non-negative (holomorphic data). `tail` receives
// (n-1)|c_{n-1}| / max_m m|c_m|, large when the circle is under-resolved.
inline std::vector<cplx> circle_derivative(const std::vector<cplx>& v, double r,
                                           const std::vector<double>& theta, double* tail = nullptr) {
    std::size_t n = v.size();
    std::vector<cplx> c(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        cplx acc = 0;
        for (std::size_t j = 0; j < n; ++j)
            acc += v[j] * std::polar(1.0, -2 * pi * static_cast<double>((m * j) % n) / static_cast<double>(n));
        c[m] = acc / static_cast<double>(n);
    }
    if (tail) {
        double peak = 0;
        for (std::size_t m = 1; m < n; ++m) peak = std::max(peak, static_cast<double>(m) * std::abs(c[m]));
        *tail = peak > 0 ? static_cast<double>(n - 1) * std::abs(c[n - 1]) / peak : 0.0;
    }
    std::vector<cplx> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx acc = 0;
        for (std::size_t m = 1; m < n; ++m)
            acc += static_cast<double>(m) * c[m] *
                   std::polar(1.0, 2 * pi * static_cast<double>((m * j) % n) / static_cast<double>(n));
        out[j] = acc / std::polar(r, theta[j]);
    }
    return out;
}

}  // namespace detail

struct PdeReport {
    double max_relative = 0;
    std::vector<double> per_checkpoint;   ///< interior checkpoints only
    bool resolution_limited = false;
    std::size_t samples = 0;
    std::size_t skipped = 0;              ///< checkpoints whose stencil straddles a jump of tau
    double spectral_tail = 0;             ///< worst highest-mode weight of d/dz over the circles
};

/// Relative residual of the Loewner PDE
///   d_t f = (z - tau)(1 - conj(tau) z) d_z f p   (range-normalized)
///   d_t g = (z - tau)(conj(tau) z - 1) d_z g p   (decreasing)
/// with d_t by three-point differences across checkpoints and d_z spectral
/// on each grid circle of radius <= r_max. The residual at z is divided by
/// |d_z f(z)| sup |p(., t)|. Stencils that straddle a discontinuity of the
/// field are skipped: there the chain is only differentiable almost
/// everywhere.
inline PdeReport verify_chain_pde(const ChainFrames& fr, const VectorField& G, double r_max = 0.8,
                                  double tol_pde = 1e-3) {
    std::size_t nt = fr.checkpoints.size();
    if (nt < 3) throw Error("chain PDE check needs at least three checkpoints");
    std::map<int, std::vector<std::size_t>> circles;
    for (std::size_t k = 0; k < fr.grid.size(); ++k)
        if (fr.grid.labels[k].first >= 0 && std::abs(fr.grid.points[k]) > 0)
            circles[fr.grid.labels[k].first].push_back(k);
    double sign = fr.tag == ChainFrames::Tag::range_normalized ? 1.0 : -1.0;
    PdeReport r;
    auto breaks = G.discontinuities();
    for (std::size_t i = 1; i + 1 < nt; ++i) {
        double t0 = fr.checkpoints[i - 1], t1 = fr.checkpoints[i], t2 = fr.checkpoints[i + 1];
        if (std::any_of(breaks.begin(), breaks.end(), [&](double b) { return b > t0 && b < t2; })) {
            ++r.skipped;
            r.per_checkpoint.push_back(qnan);
            continue;
        }
        double h1 = t1 - t0, h2 = t2 - t1;
        double w0 = -h2 / (h1 * (h1 + h2)), w1 = (h2 - h1) / (h1 * h2), w2 = h1 / (h2 * (h1 + h2));
        double sup_p = 0;
        for (cplx z : fr.grid.points) sup_p = std::max(sup_p, std::abs(G.p()(z, t1)));
        double worst = 0;
        for (const auto& [ci, idx] : circles) {
            double r0 = std::abs(fr.grid.points[idx.front()]);
            if (r0 > r_max + 1e-12) continue;
            std::vector<cplx> v;
            std::vector<double> th;
            bool ok = true;
            for (std::size_t k : idx) {
                v.push_back(fr.interior[i][k]);
                th.push_back(std::arg(fr.grid.points[k]));
                ok = ok && finite(fr.interior[i][k]) && finite(fr.interior[i - 1][k]) &&
                     finite(fr.interior[i + 1][k]);
            }
            if (!ok) continue;
            double tail = 0;
            auto fz = detail::circle_derivative(v, r0, th, &tail);
            r.spectral_tail = std::max(r.spectral_tail, tail);
            for (std::size_t m = 0; m < idx.size(); ++m) {
                std::size_t k = idx[m];
                cplx z = fr.grid.points[k];
                cplx ft = w0 * fr.interior[i - 1][k] + w1 * fr.interior[i][k] + w2 * fr.interior[i + 1][k];
                cplx tau = G.tau()(t1);
                cplx rhs = sign * (z - tau) * (1.0 - std::conj(tau) * z) * fz[m] * G.p()(z, t1);
                double rel = std::abs(ft - rhs) / (std::abs(fz[m]) * sup_p);
                worst = std::max(worst, rel);
                ++r.samples;
            }
        }
        r.per_checkpoint.push_back(worst);
        r.max_relative = std::max(r.max_relative, worst);
    }
    r.resolution_limited = r.max_relative > tol_pde;
    return r;
}

/// Convergence order of the PDE residual between two checkpoint spacings.
/// Residuals already at the noise floor (chains exactly linear in t) give
/// no order information; that case is reported as nullopt.
inline std::optional<double> pde_order(double res_coarse, double res_fine, double ratio = 2.0,
                                       double floor = 1e-9) {
    if (res_coarse <= floor && res_fine <= floor) return std::nullopt;
    return std::log(res_coarse / res_fine) / std::log(ratio);
}

struct RotationReport {
    double max_deviation = 0;   ///< max_t min_{|lambda|=1} max_z |f_t - lambda f_0|
    std::vector<double> angle;  ///< arg lambda per checkpoint
};

/// Measures how far each frame is from a rotation of the first one.
inline RotationReport rotation_deviation(const ChainFrames& fr) {
    RotationReport r;
    for (std::size_t i = 0; i < fr.checkpoints.size(); ++i) {
        cplx num = 0;
        double den = 0;
        for (std::size_t k = 0; k < fr.grid.size(); ++k) {
            num += std::conj(fr.interior[0][k]) * fr.interior[i][k];
            den += std::norm(fr.interior[0][k]);
        }
        cplx lam = den > 0 ? num / den : 1.0;
        lam /= std::abs(lam);
        double dev = 0;
        for (std::size_t k = 0; k < fr.grid.size(); ++k)
            dev = std::max(dev, std::abs(fr.interior[i][k] - lam * fr.interior[0][k]));
        for (std::size_t k = 0; k < fr.theta.size(); ++k)
            dev = std::max(dev, std::abs(fr.trace[i][k] - lam * fr.trace[0][k]));
        r.angle.push_back(std::arg(lam));
        r.max_deviation = std::max(r.max_deviation, dev);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Range classification

struct RangeReport {
    double beta0 = 0;
    std::vector<cplx> probes;
    std::vector<double> beta;                ///< final estimate per probe
    std::vector<std::vector<double>> raw;    ///< [probe][horizon]
    std::vector<double> horizons;
    std::vector<double> deltas;              ///< successive deltas of beta(0)
    std::string method = "raw";              ///< raw | extrapolated
    std::string classification;              ///< plane | disk | inconclusive
    double radius = inf;
    std::vector<std::string> warnings;
};

/// beta(z) = lim |phi'_{0,T}(z)| / (1 - |phi_{0,T}(z)|^2) along the horizon
/// schedule. Sequences that still move at the last horizon are
/// extrapolated rationally in 1/T (algebraic decay, typical of a
/// boundary Denjoy-Wolff point); the estimate is clamped to
/// [0, smallest raw value].
inline RangeReport beta_limit(const VectorField& G, std::vector<cplx> probes,
                              const ChainOptions& opt = {}, double tol_beta = 1e-6,
                              double tol_probe = 1e-4) {
    if (probes.empty() || probes.front() != cplx(0.0)) probes.insert(probes.begin(), 0.0);
    RangeReport r;
    r.probes = probes;
    r.horizons = horizon_schedule(0.0, opt.horizon);
    auto ts = solve_forward(G, 0.0, opt.horizon, SeedGrid::from_points(probes, opt.guard), opt.tol,
                            r.horizons, {opt.guard, opt.workers});
    r.raw.assign(probes.size(), {});
    std::vector<std::size_t> hidx;
    for (double h : r.horizons) hidx.push_back(ts.time_index(h));
    for (std::size_t j = 0; j < probes.size(); ++j) {
        std::vector<double> seq, x;
        for (std::size_t k = 0; k < hidx.size(); ++k) {
            cplx w = ts.values[hidx[k]][j], d = ts.derivs[hidx[k]][j];
            if (!finite(w)) break;
            double m = std::abs(w);
            seq.push_back(std::abs(d) / ((1 - m) * (1 + m)));
            x.push_back(1.0 / r.horizons[k]);
        }
        r.raw[j] = seq;
        if (seq.empty()) {
            r.beta.push_back(qnan);
            r.warnings.push_back("probe " + std::to_string(j) + " truncated before the first horizon");
            continue;
        }
        if (seq.size() < hidx.size())
            r.warnings.push_back("probe " + std::to_string(j) + " truncated at horizon " +
                                 fmt(r.horizons[seq.size() - 1]));
        double floor = *std::min_element(seq.begin(), seq.end());
        double last_delta = seq.size() > 1 ? std::abs(seq.back() - seq[seq.size() - 2]) : inf;
        double est = floor;
        bool extrap = false;
        if (last_delta > tol_beta && seq.size() >= 2) {
            std::size_t m = std::min(opt.extrapolation_nodes, seq.size());
            std::vector<double> xs(x.end() - static_cast<long>(m), x.end());
            std::vector<double> ys(seq.end() - static_cast<long>(m), seq.end());
            est = std::clamp(extrapolate_rational(xs, ys), 0.0, floor);
            extrap = true;
        }
        if (j == 0) {
            r.method = extrap ? "extrapolated" : "raw";
            for (std::size_t k = 1; k < seq.size(); ++k) r.deltas.push_back(std::abs(seq[k] - seq[k - 1]));
        }
        r.beta.push_back(est);
    }
    r.beta0 = r.beta[0];
    if (!std::isfinite(r.beta0)) {
        r.classification = "inconclusive";
        return r;
    }
    bool zero = r.beta0 <= tol_beta;
    bool agree = true;
    for (std::size_t j = 1; j < probes.size(); ++j) {
        if (!std::isfinite(r.beta[j])) continue;
        double normalized = r.beta[j] * (1 - std::norm(probes[j]));
        bool z = normalized <= (zero ? tol_probe : 0.0);
        if (z != zero) agree = false;
    }
    if (!agree) {
        r.classification = "inconclusive";
        r.warnings.push_back("probes disagree on whether beta vanishes");
    } else if (zero) {
        r.classification = "plane";
    } else {
        r.classification = "disk";
        r.radius = 1 / r.beta0;
    }
    return r;
}

/// True when Re p vanishes on every sample: the chain is a family of
/// rotations of one map and there is no extension to construct.
inline bool conformal_only(const HerglotzSpec& p, const DiskGrid& grid, const std::vector<double>& times,
                           double tol = 1e-12) {
    return real_part_horizon(p, grid, times, tol) == 0.0;
}

}  // namespace loewner
