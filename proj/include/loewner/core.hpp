#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace loewner {

/// %g rendering for messages.
inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double qnan = std::numeric_limits<double>::quiet_NaN();
inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a transform or evaluator.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A Denjoy-Wolff function left the closed unit disk.
class ModulusError : public Error {
public:
    ModulusError(double t, cplx value)
        : Error("Denjoy-Wolff value " + fmt(std::abs(value)) + " exceeds 1 at t=" + fmt(t)),
          time(t), value(value) {}
    double time;
    cplx value;
};

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// n equally spaced points on [a, b], endpoints included.
inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

/// n angles 2*pi*j/n, j = 0..n-1.
inline std::vector<double> angles(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = 2 * pi * static_cast<double>(j) / static_cast<double>(n);
    return out;
}

/// Hyperbolic distance in the unit disk (curvature -1).
inline double hyperbolic_distance(cplx a, cplx b) {
    cplx den = 1.0 - std::conj(a) * b;
    double r = std::abs(a - b) / std::abs(den);
    r = std::min(r, 1.0);
    return 2 * std::atanh(r);
}

/// Winding number of a closed polygon around a point.
inline int winding_number(const std::vector<cplx>& poly, cplx z) {
    int wn = 0;
    std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        cplx a = poly[i], b = poly[(i + 1) % n];
        double cross = (b.real() - a.real()) * (z.imag() - a.imag()) -
                       (z.real() - a.real()) * (b.imag() - a.imag());
        if (a.imag() <= z.imag()) {
            if (b.imag() > z.imag() && cross > 0) ++wn;
        } else if (b.imag() <= z.imag() && cross < 0) {
            --wn;
        }
    }
    return wn;
}

/// Polynomial extrapolation to x = 0 through (x_i, y_i) (Neville).
template <class T>
T extrapolate_to_zero(const std::vector<double>& x, std::vector<T> y) {
    std::size_t n = x.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            y[i] = (x[i + m] * y[i] - x[i] * y[i + 1]) / (x[i + m] - x[i]);
    return y[0];
}

/// Diagonal rational extrapolation to x = 0 (Bulirsch-Stoer). Falls back to
/// the polynomial value when the tableau meets a pole.
template <class T>
T extrapolate_rational(const std::vector<double>& x, const std::vector<T>& y) {
    std::size_t n = x.size();
    if (n == 0) return T{};
    std::size_t ns = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(x[i]) < std::abs(x[ns])) ns = i;
    const double tiny = 1e-300;
    std::vector<T> c(y), d(y);
    for (auto& v : d) v += T(tiny);
    T out = y[ns];
    long at = static_cast<long>(ns) - 1;
    for (std::size_t m = 1; m < n; ++m) {
        for (std::size_t i = 0; i + m < n; ++i) {
            T w = c[i + 1] - d[i];
            double h = x[i + m];
            T t = (x[i] / h) * d[i];
            T dd = t - c[i + 1];
            if (dd == T(0)) return extrapolate_to_zero(x, y);
            dd = w / dd;
            d[i] = c[i + 1] * dd;
            c[i] = t * dd;
        }
        T dy = (2 * (at + 1) < static_cast<long>(n - m)) ? c[static_cast<std::size_t>(at + 1)]
                                                          : d[static_cast<std::size_t>(at--)];
        out += dy;
    }
    if constexpr (std::is_same_v<T, double>) {
        if (!std::isfinite(out)) return extrapolate_to_zero(x, y);
    } else {
        if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) return extrapolate_to_zero(x, y);
    }
    return out;
}

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is
/// owned by exactly one call, so results written by index are independent
/// of the worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         unsigned workers = 0) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace loewner
