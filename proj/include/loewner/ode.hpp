#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small complex systems.
// Steps land exactly on requested output times and on discontinuities of
// the right-hand side; no dense output is used.

#include <array>
#include <cstddef>
#include <vector>

#include "core.hpp"

namespace loewner::ode {

template <std::size_t N>
using State = std::array<cplx, N>;

/// Error weight of one component: |err| <= atol + rtol * |y|.
struct Tolerance {
    double atol = 1e-9;
    double rtol = 1e-9;
};

struct StepControl {
    double h_init = 0;          ///< 0 selects a starting step automatically
    double h_min_rel = 1e-13;   ///< underflow threshold relative to max(1, |t|)
    std::size_t max_steps = 2'000'000;
};

enum class Outcome { completed, guarded, underflow, nonfinite, max_steps };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::completed: return "completed";
        case Outcome::guarded: return "guarded";
        case Outcome::underflow: return "step underflow";
        case Outcome::nonfinite: return "non-finite state";
        case Outcome::max_steps: return "step limit";
    }
    return "?";
}

struct Result {
    Outcome outcome = Outcome::completed;
    double t_stop = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

namespace detail {

// Dormand & Prince (1980) coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1,
                  const std::array<Tolerance, N>& tol) {
    double worst = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double sc = tol[i].atol + tol[i].rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double e = std::abs(err[i]);
        if (e == 0) continue;
        if (!(sc > 0)) return inf;
        worst = std::max(worst, e / sc);
    }
    return worst;
}

template <std::size_t N>
double scaled_max(const State<N>& v, const State<N>& y, const std::array<Tolerance, N>& tol) {
    double m = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double sc = tol[i].atol + tol[i].rtol * std::abs(y[i]);
        if (sc > 0) m = std::max(m, std::abs(v[i]) / sc);
    }
    return m;
}

template <std::size_t N>
bool all_finite(const State<N>& y) {
    for (const auto& v : y)
        if (!finite(v)) return false;
    return true;
}

}  // namespace detail

/// Integrates y' = f(t, y, t_mid) from t0 through every time in `stops`
/// (ascending, each >= t0), calling observe(k, t, y) on arrival at stops[k].
/// `breaks` lists discontinuity times of f; steps never straddle them, and
/// t_mid passed to f is the midpoint of the current smooth segment so that
/// piecewise-constant data can be looked up without ambiguity at segment
/// ends. guard(t, y) is checked after every accepted step; returning true
/// halts integration with Outcome::guarded.
template <std::size_t N, class Rhs, class Observer, class Guard>
Result dopri5(Rhs&& f, double t0, State<N> y, const std::vector<double>& stops,
              const std::vector<double>& breaks, const std::array<Tolerance, N>& tol,
              Observer&& observe, Guard&& guard, const StepControl& ctl = {}) {
    using namespace detail;
    Result res;
    res.t_stop = t0;
    if (stops.empty()) return res;
    double t_end = stops.back();

    std::vector<double> bounds;
    for (double b : breaks)
        if (b > t0 && b < t_end) bounds.push_back(b);
    bounds.push_back(t_end);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    std::size_t next_stop = 0;
    while (next_stop < stops.size() && stops[next_stop] <= t0) {
        observe(next_stop, stops[next_stop], y);
        ++next_stop;
    }

    double t = t0;
    double h = ctl.h_init;
    double seg_lo = t0;
    for (double seg_hi : bounds) {
        double t_mid = 0.5 * (seg_lo + seg_hi);
        auto rhs = [&](double ts, const State<N>& ys) {
            return f(std::clamp(ts, seg_lo, seg_hi), ys, t_mid);
        };
        State<N> k1 = rhs(t, y);
        if (!all_finite(k1)) {
            res.outcome = Outcome::nonfinite;
            res.t_stop = t;
            return res;
        }
        if (!(h > 0)) {
            double d0 = scaled_max(y, y, tol), d1 = scaled_max(k1, y, tol);
            double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
            h0 = std::min(h0, seg_hi - t);
            State<N> y1;
            for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h0 * k1[i];
            State<N> k2 = rhs(t + h0, y1);
            State<N> diff;
            for (std::size_t i = 0; i < N; ++i) diff[i] = k2[i] - k1[i];
            double d2 = scaled_max(diff, y, tol) / h0;
            double dm = std::max(d1, d2);
            double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
            h = std::min(100 * h0, h1);
        }
        bool rejected_last = false;
        while (t < seg_hi) {
            double target = seg_hi;
            if (next_stop < stops.size()) target = std::min(target, stops[next_stop]);
            if (res.accepted + res.rejected >= ctl.max_steps) {
                res.outcome = Outcome::max_steps;
                res.t_stop = t;
                return res;
            }
            double h_min = ctl.h_min_rel * std::max(1.0, std::abs(t));
            if (h < h_min) {
                res.outcome = Outcome::underflow;
                res.t_stop = t;
                return res;
            }
            bool lands = false;
            double h_free = h;
            if (t + h >= target - 1e-14 * std::max(1.0, std::abs(target))) {
                h = target - t;
                lands = true;
            }

            State<N> ys, k2, k3, k4, k5, k6, k7, y_new, err;
            for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + h * a21 * k1[i];
            k2 = rhs(t + c2 * h, ys);
            for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = rhs(t + c3 * h, ys);
            for (std::size_t i = 0; i < N; ++i)
                ys[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = rhs(t + c4 * h, ys);
            for (std::size_t i = 0; i < N; ++i)
                ys[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = rhs(t + c5 * h, ys);
            for (std::size_t i = 0; i < N; ++i)
                ys[i] = y[i] +
                        h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            double t_new = lands ? target : t + h;
            k6 = rhs(t_new, ys);
            for (std::size_t i = 0; i < N; ++i)
                y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                       a76 * k6[i]);
            k7 = rhs(t_new, y_new);
            for (std::size_t i = 0; i < N; ++i)
                err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);

            double en = all_finite(y_new) && all_finite(k7) ? error_norm(err, y, y_new, tol) : inf;
            if (en <= 1.0) {
                ++res.accepted;
                t = t_new;
                y = y_new;
                k1 = k7;
                while (next_stop < stops.size() && stops[next_stop] <= t) {
                    observe(next_stop, stops[next_stop], y);
                    ++next_stop;
                }
                if (guard(t, y)) {
                    res.outcome = Outcome::guarded;
                    res.t_stop = t;
                    return res;
                }
                double fac = en == 0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
                if (rejected_last) fac = std::min(fac, 1.0);
                // A step shortened to land on an output time says little
                // about the admissible step length.
                h = lands ? std::max(h * fac, h_free) : h * fac;
                rejected_last = false;
            } else {
                ++res.rejected;
                if (!std::isfinite(en)) {
                    h *= 0.2;
                } else {
                    h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
                }
                rejected_last = true;
                if (!all_finite(y_new) && h < h_min) {
                    res.outcome = Outcome::nonfinite;
                    res.t_stop = t;
                    return res;
                }
            }
        }
        seg_lo = seg_hi;
    }
    res.t_stop = t;
    return res;
}

}  // namespace loewner::ode
