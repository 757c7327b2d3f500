#pragma once

// CSV and SVG emission. Numbers are printed with %.17g so that identical
// runs give byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "approx.hpp"
#include "extension.hpp"

namespace loewner::io {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
    }

    CsvWriter& header(std::initializer_list<const char*> cols) {
        bool first = true;
        for (const char* c : cols) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
        return *this;
    }

    template <class... Ts>
    void row(const Ts&... v) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(v), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double x) { return num(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(std::size_t x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "1" : "0"; }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }

    std::ofstream out_;
};

inline void write_trajectories(const std::filesystem::path& path, const TrajectorySet& ts) {
    CsvWriter w(path);
    w.header({"seed_index", "re_z0", "im_z0", "t", "re_phi", "im_phi", "re_dphi", "im_dphi", "truncated_flag"});
    for (std::size_t j = 0; j < ts.n_seeds(); ++j)
        for (std::size_t i = 0; i < ts.n_times(); ++i) {
            cplx v = ts.values[i][j], d = ts.derivs[i][j];
            w.row(j, ts.seeds[j].real(), ts.seeds[j].imag(), ts.times[i], v.real(), v.imag(), d.real(),
                  d.imag(), !finite(v));
        }
}

/// One row per checkpoint and sample point; trace points follow the
/// interior grid with kind "trace".
inline void write_frames(const std::filesystem::path& path, const ChainFrames& fr) {
    CsvWriter w(path);
    w.header({"checkpoint", "kind", "index", "re_z", "im_z", "re_value", "im_value"});
    double rho = 1 - fr.delta_trace;
    for (std::size_t i = 0; i < fr.checkpoints.size(); ++i) {
        for (std::size_t k = 0; k < fr.grid.size(); ++k) {
            cplx z = fr.grid.points[k], v = fr.interior[i][k];
            w.row(fr.checkpoints[i], "interior", k, z.real(), z.imag(), v.real(), v.imag());
        }
        for (std::size_t j = 0; j < fr.theta.size(); ++j) {
            cplx z = std::polar(rho, fr.theta[j]), v = fr.trace[i][j];
            w.row(fr.checkpoints[i], "trace", j, z.real(), z.imag(), v.real(), v.imag());
        }
    }
}

inline void write_atlas(const std::filesystem::path& path, const ExtensionAtlas& at) {
    CsvWriter w(path);
    w.header({"t", "theta", "re_src", "im_src", "re_dst", "im_dst", "re_mu_f", "im_mu_f", "re_mu_fd",
              "im_mu_fd", "masked"});
    for (std::size_t i = 0; i < at.rows(); ++i)
        for (std::size_t j = 0; j < at.cols(); ++j) {
            cplx s = at.source[i][j], d = at.target[i][j], mf = at.mu_formula[i][j], md = at.mu_fd[i][j];
            w.row(at.times[i], at.theta[j], s.real(), s.imag(), d.real(), d.imag(), mf.real(), mf.imag(),
                  md.real(), md.imag(), at.masked[i][j] != 0);
        }
}

inline void write_approx(const std::filesystem::path& path, const ApproxTable& t) {
    CsvWriter w(path);
    w.header({"n", "deviation", "ef_error", "chain_error", "gronwall_envelope", "runtime_ms"});
    for (const auto& r : t.rows) w.row(r.n, r.deviation, r.ef_error, r.chain_error, r.envelope, r.runtime_ms);
}

inline void write_becker(const std::filesystem::path& path, const BeckerSamples& s) {
    CsvWriter w(path);
    w.header({"r", "theta", "re_value", "im_value"});
    for (std::size_t i = 0; i < s.radii.size(); ++i)
        for (std::size_t j = 0; j < s.theta.size(); ++j)
            w.row(s.radii[i], s.theta[j], s.values[i][j].real(), s.values[i][j].imag());
}

// ---------------------------------------------------------------------------
// SVG

/// Collects polylines in world coordinates and writes them into a square
/// viewport with the y axis pointing up.
class SvgPlot {
public:
    explicit SvgPlot(double size = 800) : size_(size) {}

    void polyline(const std::vector<cplx>& pts, const std::string& color, bool closed, double width = 1) {
        std::vector<cplx> keep;
        for (cplx z : pts)
            if (finite(z)) keep.push_back(z);
        if (keep.size() < 2) return;
        for (cplx z : keep) {
            lo_ = {std::min(lo_.real(), z.real()), std::min(lo_.imag(), z.imag())};
            hi_ = {std::max(hi_.real(), z.real()), std::max(hi_.imag(), z.imag())};
        }
        paths_.push_back({std::move(keep), color, closed, width});
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot open " + path.string() + " for writing");
        double span = std::max(hi_.real() - lo_.real(), hi_.imag() - lo_.imag());
        if (!(span > 0)) span = 1;
        double pad = 20, scale = (size_ - 2 * pad) / span;
        char buf[64];
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size_) << "\" height=\"" << num(size_)
            << "\" viewBox=\"0 0 " << num(size_) << ' ' << num(size_) << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        for (const auto& p : paths_) {
            out << "<path fill=\"none\" stroke=\"" << p.color << "\" stroke-width=\"" << num(p.width) << "\" d=\"";
            for (std::size_t k = 0; k < p.pts.size(); ++k) {
                double x = pad + (p.pts[k].real() - lo_.real()) * scale;
                double y = size_ - pad - (p.pts[k].imag() - lo_.imag()) * scale;
                std::snprintf(buf, sizeof buf, "%c%.3f %.3f", k == 0 ? 'M' : 'L', x, y);
                out << buf;
            }
            if (p.closed) out << 'Z';
            out << "\"/>\n";
        }
        out << "</svg>\n";
    }

private:
    struct Path {
        std::vector<cplx> pts;
        std::string color;
        bool closed;
        double width;
    };

    double size_;
    cplx lo_{inf, inf}, hi_{-inf, -inf};
    std::vector<Path> paths_;
};

/// Blue to red as s goes from 0 to 1.
inline std::string time_color(double s) {
    s = std::clamp(s, 0.0, 1.0);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x30%02x", static_cast<int>(255 * s), static_cast<int>(255 * (1 - s)));
    return buf;
}

inline void write_frames_svg(const std::filesystem::path& path, const ChainFrames& fr) {
    SvgPlot plot;
    std::size_t n = fr.checkpoints.size();
    for (std::size_t i = 0; i < n; ++i)
        plot.polyline(fr.trace[i], time_color(n > 1 ? double(i) / double(n - 1) : 0.0), true);
    plot.write(path);
}

/// Source curves in grey, target curves time-colored.
inline void write_atlas_svg(const std::filesystem::path& path, const ExtensionAtlas& at, std::size_t every = 1) {
    SvgPlot plot;
    std::size_t n = at.rows();
    every = std::max<std::size_t>(every, 1);
    for (std::size_t i = 0; i < n; i += every) {
        plot.polyline(at.source[i], "#999999", true, 0.5);
        plot.polyline(at.target[i], time_color(n > 1 ? double(i) / double(n - 1) : 0.0), true);
    }
    plot.write(path);
}

}  // namespace loewner::io
