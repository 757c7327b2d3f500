#pragma once

// Herglotz data p(z, t), Denjoy-Wolff data tau(t), the assembled vector
// field G(z, t) = (z - tau)(conj(tau) z - 1) p(z, t), and sample-based
// checks of the Herglotz, Becker and pair inequalities.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"

namespace loewner {

using TimeFunction = std::function<cplx(double)>;

/// Piecewise-linear interpolation of (t, value) samples; constant beyond
/// the first and last node.
struct TimeTable {
    std::vector<double> t;
    std::vector<cplx> v;

    cplx operator()(double s) const {
        if (t.empty()) throw Error("empty time table");
        if (s <= t.front()) return v.front();
        if (s >= t.back()) return v.back();
        auto it = std::upper_bound(t.begin(), t.end(), s);
        std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
        double w = (s - t[i]) / (t[i + 1] - t[i]);
        return v[i] + w * (v[i + 1] - v[i]);
    }

    void validate(const std::string& what) const {
        if (t.empty() || t.size() != v.size())
            throw Error(what + ": table needs matching, non-empty t and value lists");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1])) throw Error(what + ": table times must be strictly increasing");
    }
};

inline cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

/// Herglotz function p(z, t): holomorphic in z on the unit disk with
/// Re p >= 0, measurable in t.
class HerglotzSpec {
public:
    struct Constant {
        cplx c;
    };
    /// (kappa + z) / (kappa - z) with a unimodular driving function.
    struct MobiusKernel {
        TimeFunction kappa;
    };
    /// profile(t) * ((1 + z) / (1 - z))^spread, taking values in the sector
    /// |arg w| <= k pi / 2 when |arg profile| + spread pi / 2 <= k pi / 2.
    struct Sector {
        double k;
        TimeFunction profile;
        double spread = 0;
    };
    /// num(z) / den(z) with coefficients (lowest degree first) given at
    /// time nodes and interpolated linearly in t.
    struct RationalTable {
        std::vector<double> t;
        std::vector<std::vector<cplx>> num, den;
    };
    /// z-independent values from a (t, value) table or a callable; a
    /// general callable may depend on z.
    struct UserSampled {
        std::function<cplx(cplx, double)> eval;
    };

    using Kind = std::variant<Constant, MobiusKernel, Sector, RationalTable, UserSampled>;

    HerglotzSpec() : kind_(Constant{1.0}) {}
    explicit HerglotzSpec(Kind k) : kind_(std::move(k)) {}

    static HerglotzSpec constant(cplx c) { return HerglotzSpec(Constant{c}); }
    static HerglotzSpec mobius_kernel(TimeFunction kappa) {
        return HerglotzSpec(MobiusKernel{std::move(kappa)});
    }
    static HerglotzSpec sector(double k, TimeFunction profile, double spread = 0) {
        if (!(k >= 0 && k < 1)) throw Error("sector opening k must lie in [0,1)");
        if (!(spread >= 0 && spread <= k)) throw Error("sector spread must lie in [0,k]");
        return HerglotzSpec(Sector{k, std::move(profile), spread});
    }
    static HerglotzSpec rational_table(RationalTable r) {
        if (r.t.empty() || r.num.size() != r.t.size() || r.den.size() != r.t.size())
            throw Error("rational table needs one numerator and denominator per time node");
        for (std::size_t i = 1; i < r.t.size(); ++i)
            if (!(r.t[i] > r.t[i - 1]))
                throw Error("rational table times must be strictly increasing");
        return HerglotzSpec(std::move(r));
    }
    static HerglotzSpec user_sampled(TimeTable table) {
        table.validate("user_sampled");
        return HerglotzSpec(UserSampled{[tab = std::move(table)](cplx, double t) { return tab(t); }});
    }
    static HerglotzSpec user(std::function<cplx(cplx, double)> f) {
        return HerglotzSpec(UserSampled{std::move(f)});
    }
    /// (1 + c z) / (1 - c z): the extremal Becker function for |c| = k.
    static HerglotzSpec becker(cplx c) {
        return rational_table({{0.0}, {{1.0, c}}, {{1.0, -c}}});
    }

    cplx operator()(cplx z, double t) const {
        return std::visit([&](const auto& k) { return eval(k, z, t); }, kind_);
    }

    /// d/dz; exact for constant, Moebius and rational kinds, centered
    /// differences otherwise.
    cplx dz(cplx z, double t, double h = 1e-5) const {
        if (std::holds_alternative<Constant>(kind_)) return 0.0;
        if (auto m = std::get_if<MobiusKernel>(&kind_)) {
            cplx k = m->kappa(t);
            return 2.0 * k / ((k - z) * (k - z));
        }
        if (auto r = std::get_if<RationalTable>(&kind_)) {
            auto [n, dn] = horner_jet(mix(*r, r->num, t), z);
            auto [d, dd] = horner_jet(mix(*r, r->den, t), z);
            return (dn * d - n * dd) / (d * d);
        }
        return ((*this)(z + h, t) - (*this)(z - h, t)) / (2 * h);
    }

    std::string kind_name() const {
        static const char* names[] = {"constant", "mobius_kernel", "sector", "rational_table",
                                      "user_sampled"};
        return names[kind_.index()];
    }

    const Kind& kind() const { return kind_; }

private:
    static cplx eval(const Constant& c, cplx, double) { return c.c; }
    static cplx eval(const MobiusKernel& m, cplx z, double t) {
        cplx k = m.kappa(t);
        return (k + z) / (k - z);
    }
    static cplx eval(const Sector& s, cplx z, double t) {
        cplx w = s.profile(t);
        if (s.spread == 0) return w;
        return w * std::pow((1.0 + z) / (1.0 - z), s.spread);
    }
    // Coefficients at time t, linear between nodes and constant outside.
    static std::vector<cplx> mix(const RationalTable& r, const std::vector<std::vector<cplx>>& c, double t) {
        if (r.t.size() == 1 || t <= r.t.front()) return c.front();
        if (t >= r.t.back()) return c.back();
        auto it = std::upper_bound(r.t.begin(), r.t.end(), t);
        std::size_t i = static_cast<std::size_t>(it - r.t.begin()) - 1;
        double w = (t - r.t[i]) / (r.t[i + 1] - r.t[i]);
        std::size_t n = std::max(c[i].size(), c[i + 1].size());
        std::vector<cplx> out(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            cplx a = j < c[i].size() ? c[i][j] : 0.0;
            cplx b = j < c[i + 1].size() ? c[i + 1][j] : 0.0;
            out[j] = a + w * (b - a);
        }
        return out;
    }
    static std::pair<cplx, cplx> horner_jet(const std::vector<cplx>& c, cplx z) {
        cplx v = 0, d = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            d = d * z + v;
            v = v * z + *it;
        }
        return {v, d};
    }
    static cplx eval(const RationalTable& r, cplx z, double t) {
        if (r.t.size() == 1 || t <= r.t.front()) return horner(r.num.front(), z) / horner(r.den.front(), z);
        if (t >= r.t.back()) return horner(r.num.back(), z) / horner(r.den.back(), z);
        return horner(mix(r, r.num, t), z) / horner(mix(r, r.den, t), z);
    }
    static cplx eval(const UserSampled& u, cplx z, double t) { return u.eval(z, t); }

    Kind kind_;
};

/// Denjoy-Wolff function tau(t) with values in the closed unit disk.
class DenjoyWolffSpec {
public:
    struct Constant {
        cplx v;
    };
    /// Right-continuous: values[i] on [breaks[i-1], breaks[i]).
    struct Step {
        std::vector<double> breaks;
        std::vector<cplx> values;
    };
    /// Arbitrary evaluator with a declared modulus bound; `breaks` may list
    /// known jump times so the integrator can respect them.
    struct Sampled {
        TimeFunction eval;
        double bound = 1;
        std::vector<double> breaks;
    };

    using Kind = std::variant<Constant, Step, Sampled>;

    DenjoyWolffSpec() : kind_(Constant{0.0}) {}
    explicit DenjoyWolffSpec(Kind k) : kind_(std::move(k)) {}

    static DenjoyWolffSpec constant(cplx v) {
        if (std::abs(v) > 1 + 1e-15) throw ModulusError(0.0, v);
        return DenjoyWolffSpec(Constant{v});
    }
    static DenjoyWolffSpec step(std::vector<double> breaks, std::vector<cplx> values) {
        if (values.size() != breaks.size() + 1)
            throw Error("step Denjoy-Wolff data needs one more value than breakpoints");
        for (std::size_t i = 1; i < breaks.size(); ++i)
            if (!(breaks[i] > breaks[i - 1])) throw Error("breakpoints must be strictly increasing");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (std::abs(values[i]) > 1 + 1e-15)
                throw ModulusError(i == 0 ? 0.0 : breaks[i - 1], values[i]);
        return DenjoyWolffSpec(Step{std::move(breaks), std::move(values)});
    }
    static DenjoyWolffSpec sampled(TimeFunction f, double bound = 1, std::vector<double> breaks = {}) {
        if (!(bound >= 0 && bound <= 1)) throw Error("declared modulus bound must lie in [0,1]");
        return DenjoyWolffSpec(Sampled{std::move(f), bound, std::move(breaks)});
    }
    static DenjoyWolffSpec sampled(TimeTable table, double bound = 1) {
        table.validate("tau");
        return sampled([tab = std::move(table)](double t) { return tab(t); }, bound);
    }

    cplx operator()(double t) const { return on_segment(t, t); }

    /// Value at t where t_mid lies strictly inside the smooth segment that
    /// contains t; step data is looked up at t_mid.
    cplx on_segment(double t, double t_mid) const {
        if (auto c = std::get_if<Constant>(&kind_)) return c->v;
        if (auto s = std::get_if<Step>(&kind_)) {
            auto it = std::upper_bound(s->breaks.begin(), s->breaks.end(), t_mid);
            return s->values[static_cast<std::size_t>(it - s->breaks.begin())];
        }
        const auto& s = std::get<Sampled>(kind_);
        if (!s.breaks.empty()) {
            // keep t inside [lo, hi) of the segment holding t_mid
            auto it = std::upper_bound(s.breaks.begin(), s.breaks.end(), t_mid);
            if (it != s.breaks.end() && t >= *it) t = std::nextafter(*it, -inf);
            if (it != s.breaks.begin() && t < *(it - 1)) t = *(it - 1);
        }
        return s.eval(t);
    }

    std::vector<double> breakpoints() const {
        if (auto s = std::get_if<Step>(&kind_)) return s->breaks;
        if (auto s = std::get_if<Sampled>(&kind_)) return s->breaks;
        return {};
    }

    bool is_constant() const { return std::holds_alternative<Constant>(kind_); }
    bool is_step() const { return std::holds_alternative<Step>(kind_); }
    bool is_sampled() const { return std::holds_alternative<Sampled>(kind_); }
    const Kind& kind() const { return kind_; }

    std::string kind_name() const {
        static const char* names[] = {"constant", "step", "sampled"};
        return names[kind_.index()];
    }

private:
    Kind kind_;
};

/// G(z, t) = (z - tau)(conj(tau) z - 1) p(z, t).
class VectorField {
public:
    VectorField(HerglotzSpec p, DenjoyWolffSpec tau) : p_(std::move(p)), tau_(std::move(tau)) {}

    cplx operator()(cplx z, double t) const { return eval(z, t, t); }

    cplx eval(cplx z, double t, double t_mid) const {
        cplx tau = tau_.on_segment(t, t_mid);
        if (z == tau) return 0.0;
        return (z - tau) * (std::conj(tau) * z - 1.0) * p_(z, t);
    }

    /// dG/dz by the product rule.
    cplx dz(cplx z, double t, double t_mid) const {
        cplx tau = tau_.on_segment(t, t_mid);
        cplx tb = std::conj(tau);
        cplx poly = (z - tau) * (tb * z - 1.0);
        cplx dpoly = 2.0 * tb * z - 1.0 - std::norm(tau);
        cplx dp = poly == 0.0 ? 0.0 : p_.dz(z, t);
        return dpoly * p_(z, t) + poly * dp;
    }

    struct Jet {
        cplx g;      ///< G(a)
        cplx dg;     ///< dG/dz(a)
        cplx diff;   ///< G(a + d) - G(a)
        cplx rel;    ///< diff / d (dg when d = 0)
    };

    /// G(a), dG/dz(a) and G(a + d) - G(a) with p(a) evaluated once; the
    /// polynomial factor is differenced exactly, so diff keeps relative
    /// accuracy when d is small.
    Jet jet(cplx a, cplx d, double t, double t_mid) const {
        cplx tau = tau_.on_segment(t, t_mid);
        cplx tb = std::conj(tau);
        cplx poly_a = (a - tau) * (tb * a - 1.0);
        cplx pa = p_(a, t), pb = p_(a + d, t);
        cplx dpoly = 2.0 * tb * a - 1.0 - std::norm(tau);
        cplx ddiff = d * (tb * (2.0 * a + d) - 1.0 - std::norm(tau));
        cplx srel = tb * (2.0 * a + d) - 1.0 - std::norm(tau);
        Jet j;
        if (poly_a == 0.0) {
            j.g = 0.0;
            j.dg = dpoly * pa;
            j.diff = ddiff * pb;
            j.rel = srel * pb;
        } else {
            j.g = poly_a * pa;
            j.dg = dpoly * pa + poly_a * p_.dz(a, t);
            j.diff = ddiff * pb + poly_a * (pb - pa);
            j.rel = d == 0.0 ? j.dg : srel * pb + poly_a * (pb - pa) / d;
        }
        return j;
    }

    std::vector<double> discontinuities() const { return tau_.breakpoints(); }

    const HerglotzSpec& p() const { return p_; }
    const DenjoyWolffSpec& tau() const { return tau_; }

private:
    HerglotzSpec p_;
    DenjoyWolffSpec tau_;
};

/// Validates |tau| <= 1 (sampled data is probed on [0, probe_horizon]) and
/// returns the field. Throws ModulusError naming the offending time.
inline VectorField assemble_field(const HerglotzSpec& p, const DenjoyWolffSpec& tau,
                                  double probe_horizon = 64.0) {
    if (auto c = std::get_if<DenjoyWolffSpec::Constant>(&tau.kind())) {
        if (std::abs(c->v) > 1 + 1e-15) throw ModulusError(0.0, c->v);
    } else if (auto s = std::get_if<DenjoyWolffSpec::Step>(&tau.kind())) {
        for (std::size_t i = 0; i < s->values.size(); ++i)
            if (std::abs(s->values[i]) > 1 + 1e-15)
                throw ModulusError(i == 0 ? 0.0 : s->breaks[i - 1], s->values[i]);
    } else {
        auto probes = linspace(0, probe_horizon, 4097);
        for (double b : tau.breakpoints()) probes.push_back(b);
        for (double t : probes) {
            cplx v = tau(t);
            if (!finite(v) || std::abs(v) > 1 + 1e-12) throw ModulusError(t, v);
        }
    }
    return VectorField(p, tau);
}

// ---------------------------------------------------------------------------
// Sample grids and checks

/// Concentric circles times equally spaced angles.
struct DiskGrid {
    std::vector<double> radii;
    std::size_t n_angles = 256;

    static DiskGrid standard() {
        return {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}, 256};
    }

    std::vector<cplx> points() const {
        std::vector<cplx> out;
        out.reserve(radii.size() * n_angles);
        auto th = angles(n_angles);
        for (double r : radii)
            for (double a : th) out.push_back(std::polar(r, a));
        return out;
    }

    double r_max() const { return radii.empty() ? 0 : *std::max_element(radii.begin(), radii.end()); }
};

/// Outcome of a sample-based inequality check. `value` is the extremal
/// statistic (minimum real part, or maximum ratio).
struct CheckReport {
    std::string name;
    bool pass = true;
    double value = 0;
    double threshold = 0;
    cplx worst_z = 0;
    double worst_t = 0;
    std::size_t samples = 0;
    std::size_t nonfinite = 0;
    std::size_t skipped = 0;
    std::vector<double> per_time;   ///< extremal statistic at each time node
    std::vector<double> failing_times;
    std::vector<std::string> warnings;
};

namespace detail {

// Failures at isolated time nodes are tolerated with a warning (the
// inequalities only have to hold for almost every t); two or more
// consecutive failing nodes fail the check. A single time node has no
// neighbours and is never isolated.
inline void apply_time_rule(CheckReport& r, const std::vector<double>& times,
                            const std::vector<bool>& fail) {
    std::size_t n = fail.size();
    r.pass = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!fail[i]) continue;
        r.failing_times.push_back(times[i]);
        bool left = i > 0 && fail[i - 1];
        bool right = i + 1 < n && fail[i + 1];
        if (n == 1 || left || right) {
            r.pass = false;
        } else {
            r.warnings.push_back(r.name + ": isolated failure at t=" + fmt(times[i]));
        }
    }
}

}  // namespace detail

/// min Re p over the grid; passes iff the minimum is >= -tol.
inline CheckReport check_herglotz(const HerglotzSpec& p, const DiskGrid& grid,
                                  const std::vector<double>& times, double tol = 1e-12) {
    CheckReport r;
    r.name = "herglotz";
    r.threshold = -tol;
    r.value = inf;
    auto pts = grid.points();
    std::vector<bool> fail(times.size(), false);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double local = inf;
        for (cplx z : pts) {
            cplx v = p(z, times[i]);
            ++r.samples;
            if (!finite(v)) {
                ++r.nonfinite;
                fail[i] = true;
                local = -inf;
                r.worst_z = z;
                r.worst_t = times[i];
                continue;
            }
            if (v.real() < local) local = v.real();
            if (v.real() < r.value) {
                r.value = v.real();
                r.worst_z = z;
                r.worst_t = times[i];
            }
        }
        if (local < -tol) fail[i] = true;
        r.per_time.push_back(local);
    }
    detail::apply_time_rule(r, times, fail);
    if (r.nonfinite) r.warnings.push_back("non-finite samples: " + std::to_string(r.nonfinite));
    return r;
}

/// max |p - 1| / |p + 1|; passes iff the maximum is <= k + tol.
inline CheckReport check_becker(const HerglotzSpec& p, const DiskGrid& grid,
                                const std::vector<double>& times, double k, double tol = 1e-6) {
    CheckReport r;
    r.name = "becker";
    r.threshold = k + tol;
    auto pts = grid.points();
    std::vector<bool> fail(times.size(), false);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double local = 0;
        for (cplx z : pts) {
            cplx v = p(z, times[i]);
            ++r.samples;
            double ratio;
            if (!finite(v)) {
                ++r.nonfinite;
                ratio = inf;
            } else {
                double den = std::abs(v + 1.0);
                ratio = den == 0 ? inf : std::abs(v - 1.0) / den;
            }
            if (ratio > local) local = ratio;
            if (ratio > r.value || r.samples == 1) {
                r.value = ratio;
                r.worst_z = z;
                r.worst_t = times[i];
            }
        }
        if (!(local <= r.threshold)) fail[i] = true;
        r.per_time.push_back(local);
    }
    detail::apply_time_rule(r, times, fail);
    if (r.nonfinite) r.warnings.push_back("non-finite samples: " + std::to_string(r.nonfinite));
    return r;
}

/// max |p - conj q| / |p + q|; passes iff the maximum is <= k + tol.
/// Samples where p + q and p - conj q both vanish are skipped and counted.
inline CheckReport check_pair(const HerglotzSpec& p, const HerglotzSpec& q, const DiskGrid& grid,
                              const std::vector<double>& times, double k, double tol = 1e-6) {
    CheckReport r;
    r.name = "pair";
    r.threshold = k + tol;
    auto pts = grid.points();
    std::vector<bool> fail(times.size(), false);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double local = 0;
        for (cplx z : pts) {
            cplx a = p(z, times[i]), b = q(z, times[i]);
            ++r.samples;
            double ratio;
            if (!finite(a) || !finite(b)) {
                ++r.nonfinite;
                ratio = inf;
            } else {
                double num = std::abs(a - std::conj(b));
                double den = std::abs(a + b);
                if (den == 0 && num == 0) {
                    ++r.skipped;
                    continue;
                }
                ratio = den == 0 ? inf : num / den;
            }
            if (ratio > local) local = ratio;
            if (ratio > r.value) {
                r.value = ratio;
                r.worst_z = z;
                r.worst_t = times[i];
            }
        }
        if (!(local <= r.threshold)) fail[i] = true;
        r.per_time.push_back(local);
    }
    detail::apply_time_rule(r, times, fail);
    if (r.nonfinite) r.warnings.push_back("non-finite samples: " + std::to_string(r.nonfinite));
    if (r.skipped) r.warnings.push_back("skipped 0/0 samples: " + std::to_string(r.skipped));
    return r;
}

/// sin(k pi / 2): the pair-ratio bound implied by a sector of opening k.
inline double sector_bound(double k) { return std::sin(k * pi / 2); }

/// Half-plane form zeta -> 2 p((zeta - 1) / (zeta + 1), t) on Re zeta >= 0.
inline std::function<cplx(cplx, double)> cayley_transfer(HerglotzSpec p) {
    return [p = std::move(p)](cplx zeta, double t) {
        if (!finite(zeta) || zeta == cplx(-1.0) || zeta.real() < 0)
            throw DomainError("half-plane argument outside Re >= 0 or equal to -1");
        return 2.0 * p((zeta - 1.0) / (zeta + 1.0), t);
    };
}

/// Inverse substitution: z -> p_H((1 + z) / (1 - z), t) / 2.
inline std::function<cplx(cplx, double)> cayley_inverse(std::function<cplx(cplx, double)> ph) {
    return [ph = std::move(ph)](cplx z, double t) {
        if (!finite(z) || z == cplx(1.0)) throw DomainError("disk argument equal to 1");
        return 0.5 * ph((1.0 + z) / (1.0 - z), t);
    };
}

/// Cauchy-Riemann residual |p_y - i p_x| / max(1, |p_x|) with fourth-order
/// centered differences of step h; passes iff the maximum is <= tol.
inline CheckReport check_holomorphy(const HerglotzSpec& p, const DiskGrid& grid,
                                    const std::vector<double>& times, double tol = 1e-6,
                                    double h = 1e-4) {
    CheckReport r;
    r.name = "holomorphy";
    r.threshold = tol;
    auto pts = grid.points();
    auto d4 = [&](cplx z, cplx dir, double t) {
        return (8.0 * (p(z + h * dir, t) - p(z - h * dir, t)) -
                (p(z + 2.0 * h * dir, t) - p(z - 2.0 * h * dir, t))) /
               (12 * h);
    };
    std::vector<bool> fail(times.size(), false);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double local = 0;
        for (cplx z : pts) {
            cplx px = d4(z, 1.0, times[i]);
            cplx py = d4(z, cplx(0, 1), times[i]);
            ++r.samples;
            double res = std::abs(py - cplx(0, 1) * px) / std::max(1.0, std::abs(px));
            if (!std::isfinite(res)) {
                ++r.nonfinite;
                res = inf;
            }
            if (res > local) local = res;
            if (res > r.value) {
                r.value = res;
                r.worst_z = z;
                r.worst_t = times[i];
            }
        }
        if (!(local <= tol)) fail[i] = true;
        r.per_time.push_back(local);
    }
    detail::apply_time_rule(r, times, fail);
    return r;
}

/// Estimate of the degeneracy time: the last time node at which Re p
/// exceeds tol somewhere on the grid (0 when p is imaginary throughout).
inline double real_part_horizon(const HerglotzSpec& p, const DiskGrid& grid,
                                const std::vector<double>& times, double tol = 1e-12) {
    auto pts = grid.points();
    double last = 0;
    bool any = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (cplx z : pts) {
            if (std::abs(p(z, times[i]).real()) > tol) {
                last = i + 1 < times.size() ? times[i + 1] : times[i];
                any = true;
                break;
            }
        }
    }
    return any ? last : 0.0;
}

}  // namespace loewner
