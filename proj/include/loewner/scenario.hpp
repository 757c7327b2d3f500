#pragma once

// Scenario configuration: JSON descriptors for p, q and tau, time and grid
// settings, criteria, and the built-in scenario registry. Validation
// collects every problem with its field path instead of stopping at the
// first one.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>

#include <json.hpp>

#include "herglotz.hpp"

namespace loewner {

using json = nlohmann::json;

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> errs) : Error(join(errs)), errors(std::move(errs)) {}
    std::vector<std::string> errors;

private:
    static std::string join(const std::vector<std::string>& e) {
        std::string s = "invalid configuration:";
        for (const auto& x : e) s += "\n  " + x;
        return s;
    }
};

struct ScenarioConfig {
    std::string name = "custom";
    json p_desc = {{"kind", "constant"}, {"c", 1.0}};
    json q_desc = {{"kind", "constant"}, {"c", 1.0}};
    json tau_desc = {{"kind", "constant"}, {"value", 0.0}};
    HerglotzSpec p, q;
    DenjoyWolffSpec tau;

    struct Time {
        double t_end = 1;
        std::vector<double> checkpoints;   ///< empty: `samples` equally spaced nodes on [0, t_end]
        std::size_t samples = 64;
        double tol = 1e-9;
    } time;

    struct Grid {
        std::vector<double> circles{0.3, 0.6};
        std::size_t angles = 32;
        double delta_trace = 1e-3;
        std::size_t theta = 256;
    } grid;

    struct Criteria {
        std::optional<double> k;
        double tol_check = 1e-6;
        double tol_oracle = 1e-8;
        double tol_chain = 1e-6;
        double tol_pde = 1e-3;
        double tol_beta = 1e-6;
        double tol_limit = 1e-8;
        double horizon = 64;
        double tol_dilatation = 0.02;
        double tol_rotation = 1e-9;
    } criteria;

    struct Approx {
        std::vector<std::size_t> levels{4, 8, 16, 32};
        double horizon = 4;
        double t_end = 2;
        double tol_final = 1e-3;
        double tol_limit = 1e-6;
        double chain_horizon = 1024;
        std::size_t angles = 8;        ///< seeds per circle
        std::size_t samples = 10000;   ///< randomized deviation samples
        std::uint64_t seed = 1;
    } approx;

    struct Outputs {
        std::string dir = "out";
        bool csv = true;
        bool svg = true;
        std::string summary = "summary.json";
    } outputs;

    std::vector<double> checkpoint_times() const {
        if (!time.checkpoints.empty()) return time.checkpoints;
        return linspace(0, time.t_end, std::max<std::size_t>(time.samples, 2));
    }
};

namespace detail {

class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back(path + " " + msg); }

    std::optional<cplx> complex(const json& j, const std::string& path) {
        if (j.is_number()) return cplx(j.get<double>());
        if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
            return cplx(j[0].get<double>(), j[1].get<double>());
        if (j.is_object() && j.contains("re") && j["re"].is_number())
            return cplx(j["re"].get<double>(), j.value("im", 0.0));
        fail(path, "must be a number, [re, im] or {re, im}");
        return std::nullopt;
    }

    std::optional<double> real(const json& j, const std::string& path) {
        if (j.is_number()) return j.get<double>();
        fail(path, "must be a number");
        return std::nullopt;
    }

    std::vector<double> reals(const json& j, const std::string& path) {
        std::vector<double> out;
        if (!j.is_array()) {
            fail(path, "must be an array of numbers");
            return out;
        }
        for (std::size_t i = 0; i < j.size(); ++i)
            if (auto v = real(j[i], path + "[" + std::to_string(i) + "]")) out.push_back(*v);
        return out;
    }

    std::vector<cplx> complexes(const json& j, const std::string& path) {
        std::vector<cplx> out;
        if (!j.is_array()) {
            fail(path, "must be an array of complex numbers");
            return out;
        }
        for (std::size_t i = 0; i < j.size(); ++i)
            if (auto v = complex(j[i], path + "[" + std::to_string(i) + "]")) out.push_back(*v);
        return out;
    }

    // [[t, value], ...]
    std::optional<TimeTable> table(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty()) {
            fail(path, "must be a non-empty array of [t, value] pairs");
            return std::nullopt;
        }
        TimeTable tab;
        std::size_t before = errors.size();
        for (std::size_t i = 0; i < j.size(); ++i) {
            std::string p = path + "[" + std::to_string(i) + "]";
            if (!j[i].is_array() || j[i].size() != 2) {
                fail(p, "must be a [t, value] pair");
                continue;
            }
            auto t = real(j[i][0], p + "[0]");
            auto v = complex(j[i][1], p + "[1]");
            if (t && v) {
                tab.t.push_back(*t);
                tab.v.push_back(*v);
            }
        }
        if (!ascending(tab.t, path, true)) return std::nullopt;
        if (errors.size() != before) return std::nullopt;
        return tab;
    }

    bool ascending(const std::vector<double>& v, const std::string& path, bool strict) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (strict ? !(v[i] > v[i - 1]) : !(v[i] >= v[i - 1])) {
                fail(path, strict ? "must be strictly increasing" : "must be ascending");
                return false;
            }
        return true;
    }

    void positive(double v, const std::string& path) {
        if (!(v > 0)) fail(path, "must be positive");
    }
};

inline const std::set<std::string> p_kinds{"constant", "becker", "mobius_kernel", "sector", "rational_table",
                                            "user_sampled"};
inline const std::set<std::string> tau_kinds{"constant", "step", "sampled", "saturating"};

inline std::string kind_list(const std::set<std::string>& s) {
    std::string out;
    for (const auto& k : s) out += (out.empty() ? "" : ", ") + k;
    return out;
}

inline std::optional<HerglotzSpec> build_herglotz(Reader& rd, const json& d, const std::string& path) {
    if (!d.is_object() || !d.contains("kind") || !d["kind"].is_string()) {
        rd.fail(path, "must be an object with a string field 'kind'");
        return std::nullopt;
    }
    std::string kind = d["kind"];
    std::size_t before = rd.errors.size();
    if (kind == "constant") {
        auto c = rd.complex(d.value("c", json(1.0)), path + ".c");
        if (c && c->real() < 0) rd.fail(path + ".c", "must have nonnegative real part");
        if (rd.errors.size() == before) return HerglotzSpec::constant(*c);
    } else if (kind == "becker") {
        auto c = rd.complex(d.value("k", json(0.5)), path + ".k");
        if (c && !(std::abs(*c) < 1)) rd.fail(path + ".k", "must have modulus below 1");
        if (rd.errors.size() == before) return HerglotzSpec::becker(*c);
    } else if (kind == "mobius_kernel") {
        auto w = rd.real(d.value("omega", json(0.0)), path + ".omega");
        auto a = rd.real(d.value("phase", json(0.0)), path + ".phase");
        if (rd.errors.size() == before)
            return HerglotzSpec::mobius_kernel([w = *w, a = *a](double t) { return std::polar(1.0, a + w * t); });
    } else if (kind == "sector") {
        auto k = rd.real(d.value("k", json(0.0)), path + ".k");
        auto spread = rd.real(d.value("spread", json(0.0)), path + ".spread");
        if (k && !(*k >= 0 && *k < 1)) rd.fail(path + ".k", "must lie in [0,1)");
        if (k && spread && !(*spread >= 0 && *spread <= *k)) rd.fail(path + ".spread", "must lie in [0,k]");
        json prof = d.value("profile", json(1.0));
        TimeFunction f;
        if (prof.is_array() && !prof.empty() && prof[0].is_array()) {
            if (auto tab = rd.table(prof, path + ".profile")) f = *tab;
        } else if (auto c = rd.complex(prof, path + ".profile")) {
            f = [c = *c](double) { return c; };
        }
        if (rd.errors.size() == before) return HerglotzSpec::sector(*k, f, *spread);
    } else if (kind == "rational_table") {
        auto t = rd.reals(d.value("t", json(nullptr)), path + ".t");
        rd.ascending(t, path + ".t", true);
        std::vector<std::vector<cplx>> num, den;
        for (const char* key : {"num", "den"}) {
            json a = d.value(key, json(nullptr));
            std::string p = path + "." + key;
            if (!a.is_array() || a.size() != t.size()) {
                rd.fail(p, "must list one coefficient array per time node");
                continue;
            }
            for (std::size_t i = 0; i < a.size(); ++i)
                (key[0] == 'n' ? num : den).push_back(rd.complexes(a[i], p + "[" + std::to_string(i) + "]"));
        }
        if (rd.errors.size() == before) return HerglotzSpec::rational_table({t, num, den});
    } else if (kind == "user_sampled") {
        auto tab = rd.table(d.value("table", json(nullptr)), path + ".table");
        if (tab)
            for (std::size_t i = 0; i < tab->v.size(); ++i)
                if (tab->v[i].real() < 0)
                    rd.fail(path + ".table[" + std::to_string(i) + "]", "must have nonnegative real part");
        if (rd.errors.size() == before) return HerglotzSpec::user_sampled(*tab);
    } else {
        rd.fail(path + ".kind", "unknown kind '" + kind + "' (expected one of " + kind_list(p_kinds) + ")");
    }
    return std::nullopt;
}

inline std::optional<DenjoyWolffSpec> build_tau(Reader& rd, const json& d, const std::string& path) {
    if (!d.is_object() || !d.contains("kind") || !d["kind"].is_string()) {
        rd.fail(path, "must be an object with a string field 'kind'");
        return std::nullopt;
    }
    std::string kind = d["kind"];
    std::size_t before = rd.errors.size();
    auto check_modulus = [&](cplx v, const std::string& p) {
        if (std::abs(v) > 1 + 1e-15) rd.fail(p, "has modulus above 1");
    };
    if (kind == "constant") {
        auto v = rd.complex(d.value("value", json(0.0)), path + ".value");
        if (v) check_modulus(*v, path + ".value");
        if (rd.errors.size() == before) return DenjoyWolffSpec::constant(*v);
    } else if (kind == "step") {
        auto b = rd.reals(d.value("breaks", json(nullptr)), path + ".breaks");
        auto v = rd.complexes(d.value("values", json(nullptr)), path + ".values");
        rd.ascending(b, path + ".breaks", true);
        if (rd.errors.size() == before && v.size() != b.size() + 1)
            rd.fail(path + ".values", "must have one more entry than " + path + ".breaks");
        for (std::size_t i = 0; i < v.size(); ++i) check_modulus(v[i], path + ".values[" + std::to_string(i) + "]");
        if (rd.errors.size() == before) return DenjoyWolffSpec::step(b, v);
    } else if (kind == "sampled") {
        auto bound = rd.real(d.value("bound", json(1.0)), path + ".bound");
        if (bound && !(*bound >= 0 && *bound <= 1)) rd.fail(path + ".bound", "must lie in [0,1]");
        auto tab = rd.table(d.value("table", json(nullptr)), path + ".table");
        if (tab && bound)
            for (std::size_t i = 0; i < tab->v.size(); ++i)
                if (std::abs(tab->v[i]) > *bound + 1e-15)
                    rd.fail(path + ".table[" + std::to_string(i) + "]", "exceeds the declared bound");
        if (rd.errors.size() == before) return DenjoyWolffSpec::sampled(*tab, *bound);
    } else if (kind == "saturating") {
        // target * r t / (1 + r t)
        auto target = rd.complex(d.value("target", json(1.0)), path + ".target");
        auto rate = rd.real(d.value("rate", json(1.0)), path + ".rate");
        if (target) check_modulus(*target, path + ".target");
        if (rate && !(*rate >= 0)) rd.fail(path + ".rate", "must be nonnegative");
        if (rd.errors.size() == before)
            return DenjoyWolffSpec::sampled(
                [c = *target, r = *rate](double t) { return c * (r * t / (1 + r * t)); }, std::abs(*target));
    } else {
        rd.fail(path + ".kind", "unknown kind '" + kind + "' (expected one of " + kind_list(tau_kinds) + ")");
    }
    return std::nullopt;
}

inline json complex_json(cplx c) { return c.imag() == 0 ? json(c.real()) : json::array({c.real(), c.imag()}); }

}  // namespace detail

/// Descriptors of a built-in scenario as a partial config document.
/// Names: exponential, chordal-constant, rotation, becker-<k>, sector-<k>,
/// measurable-tau, step-tau.
inline json builtin_scenario(const std::string& name) {
    json one = {{"kind", "constant"}, {"c", 1.0}};
    json zero_tau = {{"kind", "constant"}, {"value", 0.0}};
    auto param = [&](const std::string& prefix) -> std::optional<double> {
        if (name.rfind(prefix, 0) != 0) return std::nullopt;
        // decimal or a/b
        std::string arg = name.substr(prefix.size());
        try {
            std::size_t slash = arg.find('/'), used = 0;
            double k = std::stod(arg.substr(0, slash), &used);
            if (used != std::min(slash, arg.size())) return std::nullopt;
            if (slash != std::string::npos) {
                double den = std::stod(arg.substr(slash + 1), &used);
                if (used != arg.size() - slash - 1) return std::nullopt;
                k /= den;
            }
            return k;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    json s = {{"name", name}};
    if (name == "exponential") {
        s["p"] = one;
        s["tau"] = zero_tau;
    } else if (name == "chordal-constant") {
        s["p"] = one;
        s["tau"] = {{"kind", "constant"}, {"value", 1.0}};
        s["time"] = {{"t_end", 4.0}};
    } else if (name == "rotation") {
        s["p"] = {{"kind", "constant"}, {"c", json::array({0.0, 1.0})}};
        s["tau"] = zero_tau;
    } else if (auto k = param("becker-")) {
        s["p"] = {{"kind", "becker"}, {"k", *k}};
        s["tau"] = zero_tau;
        s["criteria"] = {{"k", *k}};
    } else if (auto k = param("sector-")) {
        // constant profile on the edge of the sector; q = p
        json prof = detail::complex_json(std::polar(1.0, *k * pi / 2));
        s["p"] = {{"kind", "sector"}, {"k", *k}, {"profile", prof}};
        s["q"] = s["p"];
        s["tau"] = zero_tau;
        s["criteria"] = {{"k", std::sin(*k * pi / 2)}};
    } else if (name == "measurable-tau") {
        s["p"] = one;
        s["tau"] = {{"kind", "saturating"}, {"target", 1.0}, {"rate", 1.0}};
        s["time"] = {{"t_end", 2.0}};
        // the chain limit converges only algebraically in the horizon
        s["criteria"] = {{"tol_limit", 1e-6}, {"horizon", 1024.0}};
    } else if (name == "step-tau") {
        s["p"] = one;
        s["tau"] = {{"kind", "step"}, {"breaks", {1.0}}, {"values", {0.0, 0.5}}};
        s["time"] = {{"t_end", 2.0}};
    } else {
        throw ConfigError({"scenario unknown built-in '" + name +
                           "' (expected exponential, chordal-constant, rotation, becker-<k>, sector-<k>, "
                           "measurable-tau or step-tau)"});
    }
    return s;
}

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"exponential", "chordal-constant", "rotation", "becker-0.5",
                                                "sector-1/3", "measurable-tau", "step-tau"};
    return names;
}

/// Builds specs from the descriptors and checks every constraint.
inline std::vector<std::string> validate(ScenarioConfig& c) {
    detail::Reader rd;
    if (auto p = detail::build_herglotz(rd, c.p_desc, "p")) c.p = *p;
    if (auto q = detail::build_herglotz(rd, c.q_desc, "q")) c.q = *q;
    if (auto t = detail::build_tau(rd, c.tau_desc, "tau")) c.tau = *t;
    rd.positive(c.time.t_end, "time.t_end");
    rd.positive(c.time.tol, "time.tol");
    if (c.time.samples < 3) rd.fail("time.samples", "must be at least 3");
    if (rd.ascending(c.time.checkpoints, "time.checkpoints", true) && !c.time.checkpoints.empty()) {
        if (c.time.checkpoints.front() < 0 || c.time.checkpoints.back() > c.time.t_end)
            rd.fail("time.checkpoints", "must lie in [0, time.t_end]");
    }
    for (std::size_t i = 0; i < c.grid.circles.size(); ++i)
        if (!(c.grid.circles[i] >= 0 && c.grid.circles[i] < 1))
            rd.fail("grid.circles[" + std::to_string(i) + "]", "must lie in [0,1)");
    if (c.grid.angles < 1) rd.fail("grid.angles", "must be at least 1");
    if (c.grid.theta < 8) rd.fail("grid.theta", "must be at least 8");
    if (!(c.grid.delta_trace > 0 && c.grid.delta_trace < 1)) rd.fail("grid.delta_trace", "must lie in (0,1)");
    if (c.criteria.k && !(*c.criteria.k >= 0 && *c.criteria.k < 1)) rd.errors.push_back("criteria.k must lie in [0,1)");
    const std::pair<const char*, double> tols[] = {
        {"criteria.tol_check", c.criteria.tol_check},   {"criteria.tol_oracle", c.criteria.tol_oracle},
        {"criteria.tol_chain", c.criteria.tol_chain},   {"criteria.tol_pde", c.criteria.tol_pde},
        {"criteria.tol_beta", c.criteria.tol_beta},     {"criteria.tol_limit", c.criteria.tol_limit},
        {"criteria.tol_dilatation", c.criteria.tol_dilatation}, {"criteria.tol_rotation", c.criteria.tol_rotation},
        {"approx.tol_final", c.approx.tol_final},
        {"approx.tol_limit", c.approx.tol_limit}};
    for (auto [path, v] : tols) rd.positive(v, path);
    if (!(c.criteria.horizon > c.time.t_end)) rd.fail("criteria.horizon", "must exceed time.t_end");
    if (c.approx.levels.empty()) rd.fail("approx.levels", "must not be empty");
    for (std::size_t i = 0; i < c.approx.levels.size(); ++i) {
        if (c.approx.levels[i] == 0) rd.fail("approx.levels[" + std::to_string(i) + "]", "must be positive");
        if (i > 0 && !(c.approx.levels[i] > c.approx.levels[i - 1]))
            rd.fail("approx.levels", "must be strictly increasing");
    }
    rd.positive(c.approx.horizon, "approx.horizon");
    if (!(c.approx.t_end > 0 && c.approx.t_end <= c.approx.horizon))
        rd.fail("approx.t_end", "must lie in (0, approx.horizon]");
    if (!(c.approx.chain_horizon > c.approx.t_end)) rd.fail("approx.chain_horizon", "must exceed approx.t_end");
    if (c.approx.samples == 0) rd.fail("approx.samples", "must be positive");
    if (c.approx.angles == 0) rd.fail("approx.angles", "must be positive");
    return rd.errors;
}

namespace detail {

inline void merge(json& base, const json& patch) {
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object() &&
            it.key() != "p" && it.key() != "q" && it.key() != "tau")
            merge(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

template <class T>
void read_field(Reader& rd, const json& obj, const char* key, const std::string& path, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj[key];
    std::string p = path.empty() ? std::string(key) : path + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
        if (v.is_boolean()) out = v.get<bool>();
        else rd.fail(p, "must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (v.is_string()) out = v.get<std::string>();
        else rd.fail(p, "must be a string");
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
        if (auto x = rd.real(v, p)) out = *x;
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        out = rd.reals(v, p);
    } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
        out.clear();
        if (!v.is_array()) {
            rd.fail(p, "must be an array of positive integers");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].is_number_unsigned()) out.push_back(v[i].get<std::size_t>());
            else rd.fail(p + "[" + std::to_string(i) + "]", "must be a positive integer");
        }
    } else if constexpr (std::is_integral_v<T>) {
        if (v.is_number_unsigned()) out = v.get<T>();
        else rd.fail(p, "must be a nonnegative integer");
    } else {
        if (auto x = rd.real(v, p)) out = *x;
    }
}

inline void unknown_keys(Reader& rd, const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) rd.fail(path.empty() ? it.key() : path + "." + it.key(), "is not a recognized field");
    }
}

}  // namespace detail

/// Config from an in-memory document. A "scenario" field names a built-in
/// whose descriptors the remaining fields override.
inline ScenarioConfig config_from_json(json doc) {
    detail::Reader rd;
    if (!doc.is_object()) throw ConfigError({"document must be a JSON object"});
    if (doc.contains("scenario")) {
        if (!doc["scenario"].is_string()) throw ConfigError({"scenario must be a string"});
        json base = builtin_scenario(doc["scenario"]);
        json patch = doc;
        patch.erase("scenario");
        detail::merge(base, patch);
        doc = base;
    }
    ScenarioConfig c;
    detail::unknown_keys(rd, doc, "", {"name", "p", "q", "tau", "t_end", "time", "grid", "criteria", "approx", "outputs"});
    detail::read_field(rd, doc, "name", "", c.name);
    if (doc.contains("p")) c.p_desc = doc["p"];
    if (doc.contains("q")) c.q_desc = doc["q"];
    if (doc.contains("tau")) c.tau_desc = doc["tau"];
    if (doc.contains("t_end")) detail::read_field(rd, doc, "t_end", "time", c.time.t_end);
    auto section = [&](const char* key) -> const json* {
        if (!doc.contains(key)) return nullptr;
        if (!doc[key].is_object()) {
            rd.fail(key, "must be an object");
            return nullptr;
        }
        return &doc[key];
    };
    if (auto s = section("time")) {
        detail::unknown_keys(rd, *s, "time", {"t_end", "checkpoints", "samples", "tol"});
        detail::read_field(rd, *s, "t_end", "time", c.time.t_end);
        detail::read_field(rd, *s, "checkpoints", "time", c.time.checkpoints);
        detail::read_field(rd, *s, "samples", "time", c.time.samples);
        detail::read_field(rd, *s, "tol", "time", c.time.tol);
    }
    if (auto s = section("grid")) {
        detail::unknown_keys(rd, *s, "grid", {"circles", "angles", "delta_trace", "theta"});
        detail::read_field(rd, *s, "circles", "grid", c.grid.circles);
        detail::read_field(rd, *s, "angles", "grid", c.grid.angles);
        detail::read_field(rd, *s, "delta_trace", "grid", c.grid.delta_trace);
        detail::read_field(rd, *s, "theta", "grid", c.grid.theta);
    }
    if (auto s = section("criteria")) {
        detail::unknown_keys(rd, *s, "criteria",
                             {"k", "tol_check", "tol_oracle", "tol_chain", "tol_pde", "tol_beta", "tol_limit",
                              "horizon", "tol_dilatation", "tol_rotation"});
        detail::read_field(rd, *s, "k", "criteria", c.criteria.k);
        detail::read_field(rd, *s, "tol_check", "criteria", c.criteria.tol_check);
        detail::read_field(rd, *s, "tol_oracle", "criteria", c.criteria.tol_oracle);
        detail::read_field(rd, *s, "tol_chain", "criteria", c.criteria.tol_chain);
        detail::read_field(rd, *s, "tol_pde", "criteria", c.criteria.tol_pde);
        detail::read_field(rd, *s, "tol_beta", "criteria", c.criteria.tol_beta);
        detail::read_field(rd, *s, "tol_limit", "criteria", c.criteria.tol_limit);
        detail::read_field(rd, *s, "horizon", "criteria", c.criteria.horizon);
        detail::read_field(rd, *s, "tol_dilatation", "criteria", c.criteria.tol_dilatation);
        detail::read_field(rd, *s, "tol_rotation", "criteria", c.criteria.tol_rotation);
    }
    if (auto s = section("approx")) {
        detail::unknown_keys(rd, *s, "approx",
                             {"levels", "horizon", "t_end", "tol_final", "tol_limit", "chain_horizon", "angles", "samples",
                              "seed"});
        detail::read_field(rd, *s, "levels", "approx", c.approx.levels);
        detail::read_field(rd, *s, "horizon", "approx", c.approx.horizon);
        detail::read_field(rd, *s, "t_end", "approx", c.approx.t_end);
        detail::read_field(rd, *s, "tol_final", "approx", c.approx.tol_final);
        detail::read_field(rd, *s, "tol_limit", "approx", c.approx.tol_limit);
        detail::read_field(rd, *s, "chain_horizon", "approx", c.approx.chain_horizon);
        detail::read_field(rd, *s, "angles", "approx", c.approx.angles);
        detail::read_field(rd, *s, "samples", "approx", c.approx.samples);
        detail::read_field(rd, *s, "seed", "approx", c.approx.seed);
    }
    if (auto s = section("outputs")) {
        detail::unknown_keys(rd, *s, "outputs", {"dir", "csv", "svg", "summary"});
        detail::read_field(rd, *s, "dir", "outputs", c.outputs.dir);
        detail::read_field(rd, *s, "csv", "outputs", c.outputs.csv);
        detail::read_field(rd, *s, "svg", "outputs", c.outputs.svg);
        detail::read_field(rd, *s, "summary", "outputs", c.outputs.summary);
    }
    auto more = validate(c);
    rd.errors.insert(rd.errors.end(), more.begin(), more.end());
    if (!rd.errors.empty()) throw ConfigError(rd.errors);
    return c;
}

inline ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read config file " + path.string()});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({path.string() + ": " + e.what()});
    }
    return config_from_json(std::move(doc));
}

inline ScenarioConfig builtin_config(const std::string& name) { return config_from_json({{"scenario", name}}); }

}  // namespace loewner
