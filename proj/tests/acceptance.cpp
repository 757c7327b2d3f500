// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>

#include "loewner/pipeline.hpp"

using namespace loewner;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string sig3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

VectorField field(HerglotzSpec p, cplx tau) { return VectorField(std::move(p), DenjoyWolffSpec::constant(tau)); }

FrameSpec frames(std::vector<double> cps, std::vector<double> radii, std::size_t n, std::size_t ntheta) {
    FrameSpec s;
    s.checkpoints = std::move(cps);
    s.grid = SeedGrid::circles(radii, n);
    s.theta = angles(ntheta);
    return s;
}

double frame_error(const ChainFrames& fr, const std::function<cplx(cplx, double)>& exact) {
    double e = 0;
    for (std::size_t i = 0; i < fr.checkpoints.size(); ++i)
        for (std::size_t k = 0; k < fr.grid.size(); ++k) {
            cplx v = exact(fr.grid.points[k], fr.checkpoints[i]);
            e = std::max(e, std::abs(fr.interior[i][k] - v) / std::max(1.0, std::abs(v)));
        }
    return e;
}

double trajectory_error(const TrajectorySet& ts, const std::function<cplx(cplx, double)>& exact) {
    double e = 0;
    for (std::size_t i = 0; i < ts.n_times(); ++i)
        for (std::size_t j = 0; j < ts.n_seeds(); ++j)
            e = std::max(e, std::abs(ts.values[i][j] - exact(ts.seeds[j], ts.times[i])));
    return e;
}

// -- 1 ----------------------------------------------------------------------
Outcome exponential_oracle() {
    Outcome o;
    auto G = field(HerglotzSpec::constant(1.0), 0.0);
    auto seeds = SeedGrid::circles({0.2, 0.5, 0.8, 0.95}, 16);
    auto cps = linspace(0, 4, 9);
    auto ts = solve_forward(G, 0, 4, seeds, 1e-9, cps);
    double e_phi = trajectory_error(ts, [](cplx z, double t) { return std::exp(-t) * z; });
    o.require(e_phi <= 1e-8, "phi err " + sig3(e_phi));
    auto fs = frames(linspace(0, 2, 5), {0.0, 0.3, 0.6, 0.9}, 16, 64);
    auto f = range_normalized_chain(G, fs);
    double e_f = frame_error(f, [](cplx z, double t) { return std::exp(t) * z; });
    o.require(e_f <= 1e-8, "f err " + sig3(e_f));
    auto g = decreasing_chain(G, fs);
    double e_g = frame_error(g, [](cplx z, double t) { return std::exp(-t) * z; });
    o.require(e_g <= 1e-8, "g err " + sig3(e_g));
    auto r = beta_limit(G, {0.5, cplx(0, -0.7)});
    o.require(r.beta0 <= 1e-8 && r.classification == "plane", "beta(0) " + sig3(r.beta0) + " " + r.classification);
    return o;
}

// -- 2 ----------------------------------------------------------------------
Outcome chordal_oracle() {
    Outcome o;
    auto G = field(HerglotzSpec::constant(1.0), 1.0);
    auto seeds = SeedGrid::circles({0.2, 0.5, 0.8, 0.95}, 16);
    double worst = 0;
    for (double s : {0.0, 1.0}) {
        auto ts = solve_forward(G, s, 4, seeds, 1e-10, linspace(s, 4, 9));
        worst = std::max(worst, trajectory_error(ts, [s](cplx z, double t) {
                             return 1.0 + (z - 1.0) / (1.0 - (z - 1.0) * (t - s));
                         }));
    }
    o.require(seeds.size() == 64 && worst <= 1e-8, "64 seeds, max err " + sig3(worst));
    ChainOptions co;
    co.horizon = 64;
    auto r = beta_limit(G, {0.5, cplx(0, 0.5)}, co);
    o.require(r.beta0 <= 1e-6 && r.classification == "plane",
              "beta(0) " + sig3(r.beta0) + " (" + r.method + ") " + r.classification);
    return o;
}

// -- 3 ----------------------------------------------------------------------
Outcome semigroup_all() {
    Outcome o;
    auto seeds = SeedGrid::circles({0.3, 0.6}, 32);
    for (const auto& name : builtin_names()) {
        auto c = builtin_config(name);
        auto r = verify_semigroup(VectorField(c.p, c.tau), 0, 1, 2, seeds, 1e-9);
        o.require(r.max_residual <= 1e-6 && r.excluded == 0, name + " " + sig3(r.max_residual));
    }
    return o;
}

// -- 4 ----------------------------------------------------------------------
struct AtlasPair {
    DilatationReport becker, weld;
};

AtlasPair becker_atlases(std::size_t rows, std::size_t cols) {
    auto p = HerglotzSpec::becker(0.5);
    auto one = HerglotzSpec::constant(1.0);
    auto fs = frames(linspace(0, 1, rows), {0.0, 0.3}, 8, cols);
    auto f = range_normalized_chain(field(p, 0.0), fs);
    auto g = decreasing_chain(field(one, 0.0), fs);
    return {dilatation_report(becker_atlas(f, p), 0.5),
            dilatation_report(build_extension(f, g, p, one, DenjoyWolffSpec::constant(0.0)), 0.5)};
}

Outcome becker_dilatation() {
    Outcome o;
    auto grid = DiskGrid::standard();
    auto cb = check_becker(HerglotzSpec::becker(0.5), grid, linspace(0, 1, 11), 0.5);
    double want = 0.5 * grid.r_max();
    o.require(std::abs(cb.value - want) <= 1e-6, "check ratio " + sig3(cb.value) + " vs " + sig3(want));
    auto base = becker_atlases(64, 256);
    auto fine = becker_atlases(128, 512);
    for (auto [label, a, b] : {std::tuple{"radial", base.becker, fine.becker}, std::tuple{"welded", base.weld, fine.weld}}) {
        o.require(a.max_formula <= 0.52 && a.max_fd <= 0.52,
                  std::string(label) + " 64x256 |mu| formula " + sig3(a.max_formula) + " fd " + sig3(a.max_fd));
        o.require(a.agreement <= 0.02, std::string(label) + " agreement " + sig3(a.agreement));
        double order = std::log2(a.agreement / b.agreement);
        o.require(order >= 1, std::string(label) + " disagreement order " + sig3(order));
    }
    return o;
}

// -- 5 ----------------------------------------------------------------------
Outcome sector_pair() {
    Outcome o;
    double k = 1.0 / 3;
    auto p = HerglotzSpec::sector(k, [](double t) { return std::polar(1.0 + 0.5 * std::sin(t), pi / 6); });
    auto r = check_pair(p, p, DiskGrid::standard(), linspace(0, 2, 21), 0.5);
    o.require(std::abs(r.value - 0.5) <= 1e-6, "pair ratio " + sig3(r.value));
    o.require(std::abs(sector_bound(k) - 0.5) <= 1e-12 && std::abs(r.value - sector_bound(k)) <= 1e-6,
              "sector bound " + sig3(sector_bound(k)));
    return o;
}

// -- 6 ----------------------------------------------------------------------
Outcome deviation_inequality() {
    Outcome o;
    auto r = field_deviation_random(10000, 2024, 1e-12);
    o.require(r.samples == 10000 && r.violations == 0,
              std::to_string(r.samples - r.violations) + "/" + std::to_string(r.samples) + " samples, max ratio " +
                  sig3(r.max_ratio));
    return o;
}

// -- 7 ----------------------------------------------------------------------
Outcome approximation() {
    Outcome o;
    auto p = HerglotzSpec::constant(1.0);
    auto tau = DenjoyWolffSpec::sampled([](double t) { return cplx(t / (1 + t)); }, 1.0);
    auto seeds = SeedGrid::circles({0.3, 0.6}, 8);
    auto cps = linspace(0, 2, 5);
    auto table = ef_convergence(p, tau, {4, 8, 16, 32}, seeds, 0, 2, cps);
    auto fs = frames(cps, {0.0, 0.3, 0.6}, 16, 16);
    ChainOptions co;
    co.tol_limit = 1e-6;
    co.horizon = 1024;
    chain_convergence(table, p, tau, fs, co);
    std::string ef = "ef", ch = "chain";
    bool under = true, converged = true;
    for (const auto& r : table.rows) {
        ef += " " + sig3(r.ef_error);
        ch += " " + sig3(r.chain_error);
        under = under && r.under_envelope && r.chain_error <= r.envelope;
        converged = converged && r.chain_converged;
    }
    o.require(table.ef_decreasing, ef);
    o.require(table.chain_decreasing && converged, ch);
    const auto& last = table.rows.back();
    o.require(last.ef_error <= 1e-3 && last.chain_error <= 1e-3, "final <= 1e-3");
    o.require(under, "under envelope (final envelope " + sig3(last.envelope) + ")");
    return o;
}

// -- 8 ----------------------------------------------------------------------
Outcome chain_pde() {
    Outcome o;
    // 128 angles resolve d/dz on |z| = 0.8 for the chordal map, whose pole
    // at 1 makes Fourier modes decay only like 0.8^n
    auto spec_at = [](double dt) { return frames({0.5 - dt, 0.5, 0.5 + dt}, {0.0, 0.2, 0.4, 0.6, 0.8}, 128, 16); };
    ChainOptions co;
    co.tol = 1e-11;
    auto becker = field(HerglotzSpec::becker(0.5), 0.0);
    double bc = verify_chain_pde(range_normalized_chain(becker, spec_at(0.01), co), becker).max_relative;
    double bf = verify_chain_pde(range_normalized_chain(becker, spec_at(0.005), co), becker).max_relative;
    auto bo = pde_order(bc, bf);
    o.require(bc <= 1e-3, "becker residual " + sig3(bc));
    o.require(bo && *bo >= 1.9, "becker order " + (bo ? sig3(*bo) : std::string("n/a")));
    auto chordal = field(HerglotzSpec::constant(1.0), 1.0);
    double cc = verify_chain_pde(range_normalized_chain(chordal, spec_at(0.01), co), chordal).max_relative;
    double cf = verify_chain_pde(range_normalized_chain(chordal, spec_at(0.005), co), chordal).max_relative;
    auto corder = pde_order(cc, cf);
    o.require(cc <= 1e-3, "chordal residual " + sig3(cc));
    // f_t is affine in t here, so the difference quotient is exact and both
    // residuals sit at the noise floor: no truncation error to measure.
    o.require(!corder || *corder >= 1.9,
              "chordal order " + (corder ? sig3(*corder) : "exact (" + sig3(cc) + ", " + sig3(cf) + " at noise floor)"));
    return o;
}

// -- 9 ----------------------------------------------------------------------
Outcome range_decay() {
    Outcome o;
    std::vector<std::pair<std::string, HerglotzSpec>> ps{
        {"constant", HerglotzSpec::constant(1.0)},
        {"becker", HerglotzSpec::becker(0.5)},
        {"mobius", HerglotzSpec::mobius_kernel([](double t) { return std::polar(1.0, 3 * t); })},
        {"tilted", HerglotzSpec::user([](cplx z, double t) { return cplx(1, std::sin(t)) + 0.5 * z; })}};
    for (auto& [name, p] : ps) {
        auto od = derivative_at_origin(field(p, 0.0), 8, 1e-10, linspace(0, 8, 33));
        double e = 0;
        for (std::size_t i = 0; i < od.times.size(); ++i)
            e = std::max(e, std::abs(std::abs(od.values[i]) - std::exp(-od.times[i])));
        o.require(e <= 1e-8, name + " " + sig3(e));
    }
    return o;
}

// -- 10 ---------------------------------------------------------------------
Outcome degenerate() {
    Outcome o;
    auto c = builtin_config("rotation");
    auto cps = c.checkpoint_times();
    bool conf = conformal_only(c.p, DiskGrid::standard(), cps);
    o.require(conf, "conformal-only (T = 0)");
    auto dir = std::filesystem::temp_directory_path() / "loewner_acceptance_rotation";
    auto s = run_pipeline(c, "extend", dir);
    bool skipped = s["pass"].get<bool>() && s["metrics"].value("extension", "") == "skipped" &&
                   !s["warnings"].empty() && !std::filesystem::exists(dir / "atlas.csv");
    o.require(skipped, "extension skipped with explanation");
    auto fr = range_normalized_chain(VectorField(c.p, c.tau), detail::frame_spec(c, cps));
    auto rot = rotation_deviation(fr);
    o.require(rot.max_deviation <= 1e-9, "frames differ from rotations by " + sig3(rot.max_deviation));
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;   ///< 0: no runtime bound
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all{
        {1, "exponential oracle", 5, exponential_oracle},
        {2, "chordal Riccati oracle", 10, chordal_oracle},
        {3, "semigroup axiom on built-in scenarios", 0, semigroup_all},
        {4, "Becker dilatation", 0, becker_dilatation},
        {5, "pair inequality and sector bound", 0, sector_pair},
        {6, "deviation inequality", 0, deviation_inequality},
        {7, "approximation convergence", 60, approximation},
        {8, "chain PDE residual", 0, chain_pde},
        {9, "range decay law", 0, range_decay},
        {10, "degenerate detection", 0, degenerate},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0) o.require(secs < c.budget_s, "runtime budget " + sig3(c.budget_s) + " s");
        std::printf("%s criterion %d: %s (%s) [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
