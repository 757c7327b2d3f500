#pragma once

// Command runners. Each command reads a validated ScenarioConfig, writes
// its artifacts under the output directory, and returns a JSON summary
//   {scenario, command, pass, checks{...}, metrics{...}, warnings[...], runtime_ms}
// where every check is {pass, value, threshold}. pass is the conjunction
// of the checks; a fatal error adds an "error" field and fails the run.

#include <chrono>

#include "io.hpp"
#include "scenario.hpp"

namespace loewner {

inline const std::vector<std::string>& pipeline_commands() {
    static const std::vector<std::string> c{"evolve", "chain", "range", "extend", "becker", "check", "approx"};
    return c;
}

namespace detail {

class Run {
public:
    json checks = json::object();
    json metrics = json::object();
    std::vector<std::string> warnings;

    void check(const std::string& name, bool pass, double value, double threshold) {
        checks[name] = {{"pass", pass}, {"value", value}, {"threshold", threshold}};
    }

    void warn(const std::vector<std::string>& w) { warnings.insert(warnings.end(), w.begin(), w.end()); }

    bool pass() const {
        for (const auto& [k, v] : checks.items())
            if (!v["pass"].get<bool>()) return false;
        return true;
    }
};

inline bool tau_is_zero(const DenjoyWolffSpec& tau) {
    auto c = std::get_if<DenjoyWolffSpec::Constant>(&tau.kind());
    return c && c->v == cplx(0.0);
}

inline FrameSpec frame_spec(const ScenarioConfig& c, std::vector<double> checkpoints) {
    FrameSpec fs;
    fs.checkpoints = std::move(checkpoints);
    std::vector<double> radii{0.0};
    for (double r : c.grid.circles)
        if (r > 0) radii.push_back(r);
    fs.grid = SeedGrid::circles(radii, c.grid.angles);
    fs.theta = angles(c.grid.theta);
    fs.delta_trace = c.grid.delta_trace;
    return fs;
}

inline ChainOptions chain_options(const ScenarioConfig& c) {
    ChainOptions o;
    o.tol = c.time.tol;
    o.horizon = c.criteria.horizon;
    o.tol_limit = c.criteria.tol_limit;
    return o;
}

inline json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

inline void run_evolve(const ScenarioConfig& c, const std::filesystem::path& dir, Run& run) {
    VectorField G(c.p, c.tau);
    auto cps = c.checkpoint_times();
    double T = c.time.t_end;
    auto seeds = SeedGrid::circles(c.grid.circles, c.grid.angles);
    auto ts = solve_forward(G, 0.0, T, seeds, c.time.tol, cps);
    run.metrics["seeds"] = seeds.size();
    run.metrics["truncated"] = ts.truncated_count();
    auto sg = verify_semigroup(G, 0.0, T / 2, T, seeds, c.time.tol);
    run.check("semigroup", sg.max_residual <= c.criteria.tol_chain, sg.max_residual, c.criteria.tol_chain);
    run.metrics["semigroup_excluded"] = sg.excluded;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t j = 0; j + 1 < seeds.size(); ++j) pairs.emplace_back(j, j + 1);
    auto sp = schwarz_pick_check(ts, pairs);
    run.check("schwarz_pick", sp.pass, sp.worst_violation, 1e-9);
    if (tau_is_zero(c.tau)) {
        auto od = derivative_at_origin(G, T, c.time.tol, cps);
        run.check("origin_derivative_quadrature", od.max_deviation <= c.criteria.tol_oracle, od.max_deviation,
                  c.criteria.tol_oracle);
        run.metrics["origin_derivative_final"] = cjson(od.values.back());
    }
    if (c.outputs.csv) io::write_trajectories(dir / "trajectories.csv", ts);
}

inline void run_chain(const ScenarioConfig& c, const std::filesystem::path& dir, Run& run) {
    VectorField G(c.p, c.tau);
    auto cps = c.checkpoint_times();
    auto opt = chain_options(c);
    auto fr = range_normalized_chain(G, frame_spec(c, cps), opt);
    run.warn(fr.warnings);
    run.check("limit_converged", fr.diag.converged, fr.diag.delta, c.criteria.tol_limit);
    run.metrics["limit_mode"] = fr.diag.mode;
    run.metrics["limit_horizon"] = fr.diag.horizon;
    auto tr = verify_transition(fr, G, opt, c.criteria.tol_chain);
    run.check("transition", tr.max_residual <= c.criteria.tol_chain, tr.max_residual, c.criteria.tol_chain);
    auto nr = check_frame_normalization(fr, G, opt, c.criteria.tol_chain);
    run.check("normalization", nr.pass, std::max(nr.value_at_origin, nr.derivative_error), c.criteria.tol_chain);
    auto ct = check_containment(fr);
    run.check("containment", ct.pass, static_cast<double>(ct.violations), 0);
    run.metrics["containment_strict"] = ct.strict;
    if (cps.size() >= 3) {
        auto pde = verify_chain_pde(fr, G, 0.8, c.criteria.tol_pde);
        run.check("pde_residual", pde.max_relative <= c.criteria.tol_pde, pde.max_relative, c.criteria.tol_pde);
        run.metrics["pde_skipped_checkpoints"] = pde.skipped;
        run.metrics["pde_spectral_tail"] = pde.spectral_tail;
        if (pde.spectral_tail > 0.1 * c.criteria.tol_pde)
            run.warnings.push_back("d/dz under-resolved on the grid circles (spectral tail " +
                                   io::num(pde.spectral_tail) + "); increase grid.angles");
    }
    if (conformal_only(c.p, DiskGrid::standard(), cps)) {
        auto rot = rotation_deviation(fr);
        run.metrics["conformal_only"] = true;
        run.check("frames_rotation", rot.max_deviation <= c.criteria.tol_rotation, rot.max_deviation,
                  c.criteria.tol_rotation);
    }
    if (c.outputs.csv) io::write_frames(dir / "frames.csv", fr);
    if (c.outputs.svg) io::write_frames_svg(dir / "frames.svg", fr);
}

inline void run_range(const ScenarioConfig& c, const std::filesystem::path&, Run& run) {
    VectorField G(c.p, c.tau);
    std::vector<cplx> probes{0.0, 0.5, cplx(0, 0.5), -0.7};
    auto rr = beta_limit(G, probes, chain_options(c), c.criteria.tol_beta);
    run.warn(rr.warnings);
    run.check("classified", rr.classification != "inconclusive", rr.beta0, c.criteria.tol_beta);
    run.metrics["beta0"] = rr.beta0;
    run.metrics["classification"] = rr.classification;
    run.metrics["radius"] = std::isfinite(rr.radius) ? json(rr.radius) : json("inf");
    run.metrics["method"] = rr.method;
    run.metrics["horizons"] = rr.horizons;
    run.metrics["beta"] = rr.beta;
}

inline double pair_constant(const ScenarioConfig& c, const std::vector<double>& times, Run& run) {
    if (c.criteria.k) return *c.criteria.k;
    double k = check_pair(c.p, c.q, DiskGrid::standard(), times, 0.0).value;
    run.warnings.push_back("criteria.k not set; using the measured pair ratio " + io::num(k));
    return k;
}

inline void dilatation_checks(const DilatationReport& dr, const ExtensionAtlas& at, const ScenarioConfig& c, Run& run) {
    double bound = dr.k + dr.tol;
    run.check("mu_formula", dr.max_formula <= bound, dr.max_formula, bound);
    run.check("mu_finite_difference", dr.max_fd <= bound, dr.max_fd, bound);
    run.check("mu_agreement", dr.agreement <= c.criteria.tol_dilatation, dr.agreement, c.criteria.tol_dilatation);
    run.check("sense_preserving", dr.sense_preserving, dr.max_fd, 1);
    run.check("atlas_accepted", !at.rejected, static_cast<double>(at.collisions), 0);
    run.metrics["k"] = dr.k;
    run.metrics["max_mu"] = std::max(dr.max_formula, dr.max_fd);
    run.metrics["atlas_rows"] = at.rows();
    run.metrics["atlas_cols"] = at.cols();
    run.metrics["masked_cells"] = dr.masked;
    run.metrics["coverage"] = at.coverage;
    run.metrics["min_separation"] = at.min_separation;
    run.warn(at.warnings);
}

inline void run_extend(const ScenarioConfig& c, const std::filesystem::path& dir, Run& run) {
    auto cps = c.checkpoint_times();
    if (conformal_only(c.p, DiskGrid::standard(), cps)) {
        run.metrics["conformal_only"] = true;
        run.metrics["extension"] = "skipped";
        run.warnings.push_back(
            "extension skipped: Re p vanishes on every sample, so the chain is a family of rotations of a single "
            "map (degeneracy time T = 0) and there is no boundary motion to weld");
        return;
    }
    auto fs = frame_spec(c, cps);
    auto opt = chain_options(c);
    auto f = range_normalized_chain(VectorField(c.p, c.tau), fs, opt);
    auto g = decreasing_chain(VectorField(c.q, c.tau), fs, c.time.tol);
    run.warn(f.warnings);
    run.warn(g.warnings);
    auto at = build_extension(f, g, c.p, c.q, c.tau);
    double k = pair_constant(c, cps, run);
    auto dr = dilatation_report(at, k, c.criteria.tol_dilatation);
    dilatation_checks(dr, at, c, run);
    if (c.outputs.csv) io::write_atlas(dir / "atlas.csv", at);
    if (c.outputs.svg) io::write_atlas_svg(dir / "atlas.svg", at, std::max<std::size_t>(at.rows() / 16, 1));
}

inline void run_becker(const ScenarioConfig& c, const std::filesystem::path& dir, Run& run) {
    if (!tau_is_zero(c.tau)) throw Error("becker command needs tau = 0");
    auto cps = c.checkpoint_times();
    if (cps.front() != 0.0) throw Error("becker command needs checkpoints starting at 0");
    auto grid = DiskGrid::standard();
    double k = c.criteria.k ? *c.criteria.k : check_becker(c.p, grid, cps, 0.0).value;
    if (!c.criteria.k) run.warnings.push_back("criteria.k not set; using the measured Becker ratio " + io::num(k));
    auto cb = check_becker(c.p, grid, cps, k, c.criteria.tol_check);
    run.check("becker_inequality", cb.pass, cb.value, cb.threshold);
    run.metrics["becker_ratio"] = cb.value;
    run.metrics["grid_r_max"] = grid.r_max();
    VectorField G(c.p, c.tau);
    auto opt = chain_options(c);
    auto f = range_normalized_chain(G, frame_spec(c, cps), opt);
    run.warn(f.warnings);
    auto at = becker_atlas(f, c.p);
    auto dr = dilatation_report(at, k, c.criteria.tol_dilatation);
    dilatation_checks(dr, at, c, run);
    double T = cps.back();
    auto samples = becker_extension(f, G, {0.5, 0.9, 1.0, std::exp(T / 2), std::exp(T)}, opt);
    if (c.outputs.csv) {
        io::write_atlas(dir / "atlas.csv", at);
        io::write_becker(dir / "becker.csv", samples);
    }
    if (c.outputs.svg) io::write_atlas_svg(dir / "atlas.svg", at, std::max<std::size_t>(at.rows() / 16, 1));
}

inline void run_check(const ScenarioConfig& c, const std::filesystem::path&, Run& run) {
    auto grid = DiskGrid::standard();
    auto times = c.checkpoint_times();
    double tol = c.criteria.tol_check;
    auto h = check_herglotz(c.p, grid, times);
    run.check("herglotz_p", h.pass, h.value, h.threshold);
    auto hq = check_herglotz(c.q, grid, times);
    run.check("herglotz_q", hq.pass, hq.value, hq.threshold);
    auto hol = check_holomorphy(c.p, grid, times, tol);
    run.check("holomorphy_p", hol.pass, hol.value, hol.threshold);
    double tau_max = 0;
    for (double t : times) tau_max = std::max(tau_max, std::abs(c.tau(t)));
    run.check("tau_modulus", tau_max <= 1 + 1e-15, tau_max, 1);
    double k = c.criteria.k.value_or(0.0);
    auto b = check_becker(c.p, grid, times, k, tol);
    run.metrics["becker_ratio"] = b.value;
    auto pr = check_pair(c.p, c.q, grid, times, k, tol);
    run.metrics["pair_ratio"] = pr.value;
    if (c.criteria.k) {
        run.check("becker_inequality", b.pass, b.value, b.threshold);
        run.check("pair_inequality", pr.pass, pr.value, pr.threshold);
    }
    if (auto s = std::get_if<HerglotzSpec::Sector>(&c.p.kind())) run.metrics["sector_bound"] = sector_bound(s->k);
    run.warn(h.warnings);
    run.warn(b.warnings);
    run.warn(pr.warnings);
    auto dev = field_deviation_random(c.approx.samples, c.approx.seed);
    run.check("deviation_inequality", dev.violations == 0, dev.max_ratio, 1);
    run.metrics["deviation_samples"] = dev.samples;
}

inline void run_approx(const ScenarioConfig& c, const std::filesystem::path& dir, Run& run) {
    const auto& a = c.approx;
    auto seeds = SeedGrid::circles(c.grid.circles, a.angles);
    auto cps = linspace(0, a.t_end, 5);
    ApproxOptions ao;
    ao.horizon = a.horizon;
    auto table = ef_convergence(c.p, c.tau, a.levels, seeds, 0.0, a.t_end, cps, ao);
    FrameSpec fs;
    fs.checkpoints = cps;
    std::vector<double> radii{0.0};
    for (double r : c.grid.circles)
        if (r > 0) radii.push_back(r);
    fs.grid = SeedGrid::circles(radii, 2 * a.angles);
    fs.theta = angles(16);
    ChainOptions co;
    co.tol_limit = a.tol_limit;
    co.horizon = a.chain_horizon;
    chain_convergence(table, c.p, c.tau, fs, co, ao);
    run.warn(table.warnings);
    bool under = true, chain_under = true, converged = true, deviation_ok = true;
    double worst_ratio = 0;
    for (const auto& r : table.rows) {
        under = under && r.under_envelope;
        chain_under = chain_under && std::isfinite(r.chain_error) && r.chain_error <= r.envelope;
        converged = converged && r.chain_converged;
        auto approx = step_approximate(c.tau, r.n, a.horizon);
        auto fd = field_deviation(c.p, c.tau, approx.spec(), DiskGrid::standard(),
                                  linspace(0, a.horizon, 4 * r.n + 1));
        deviation_ok = deviation_ok && fd.pass;
        worst_ratio = std::max(worst_ratio, fd.max_ratio);
    }
    const auto& last = table.rows.back();
    run.check("ef_decreasing", table.ef_decreasing, last.ef_error, a.tol_final);
    run.check("chain_decreasing", table.chain_decreasing, last.chain_error, a.tol_final);
    run.check("ef_final", last.ef_error <= a.tol_final, last.ef_error, a.tol_final);
    run.check("chain_final", last.chain_error <= a.tol_final, last.chain_error, a.tol_final);
    run.check("ef_under_envelope", under, last.ef_error, last.envelope);
    run.check("chain_under_envelope", chain_under, last.chain_error, last.envelope);
    run.check("chain_converged", converged, 0, 0);
    run.check("deviation_inequality", deviation_ok, worst_ratio, 1);
    run.metrics["ef_order"] = table.ef_order;
    json rows = json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"n", r.n}, {"deviation", r.deviation}, {"ef_error", r.ef_error},
                        {"chain_error", r.chain_error}, {"envelope", r.envelope}});
    run.metrics["levels"] = rows;
    if (c.outputs.csv) io::write_approx(dir / "approx.csv", table);
}

}  // namespace detail

/// Runs one command and writes the summary next to the artifacts.
inline json run_pipeline(const ScenarioConfig& c, const std::string& command, const std::filesystem::path& dir) {
    auto t0 = std::chrono::steady_clock::now();
    detail::Run run;
    json summary = {{"scenario", c.name}, {"command", command}};
    std::filesystem::create_directories(dir);
    try {
        if (command == "evolve") detail::run_evolve(c, dir, run);
        else if (command == "chain") detail::run_chain(c, dir, run);
        else if (command == "range") detail::run_range(c, dir, run);
        else if (command == "extend") detail::run_extend(c, dir, run);
        else if (command == "becker") detail::run_becker(c, dir, run);
        else if (command == "check") detail::run_check(c, dir, run);
        else if (command == "approx") detail::run_approx(c, dir, run);
        else throw Error("unknown command '" + command + "'");
        summary["pass"] = run.pass();
    } catch (const std::exception& e) {
        summary["pass"] = false;
        summary["error"] = e.what();
    }
    summary["checks"] = run.checks;
    summary["metrics"] = run.metrics;
    summary["warnings"] = run.warnings;
    summary["runtime_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream out(dir / c.outputs.summary);
    out << summary.dump(2) << '\n';
    return summary;
}

}  // namespace loewner
