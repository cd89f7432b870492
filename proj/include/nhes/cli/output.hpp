/*
 Copyright 2026 The nonholo-es Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef NHES_CLI_OUTPUT_HPP
#define NHES_CLI_OUTPUT_HPP

#include "nhes/cli/config.hpp"

#include <charconv>
#include <filesystem>

namespace nhes::cli {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

// ---------------------------------------------------------------------------
// Trace CSV
// ---------------------------------------------------------------------------

/// Columns of a trace file: t, x1..xn, xi1..xin, y, u1..um.
struct TraceTable {
    std::vector<double> times;
    std::vector<Vector> x;
    std::vector<Vector> xi;
    std::vector<double> y;
    std::vector<Vector> u;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    int state_dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }

    static TraceTable from(const PiEpsTrajectory& traj) { return {traj.times, traj.x, traj.xi, traj.y, traj.u}; }
};

inline std::string trace_header(int n, int m) {
    std::string h = "t";
    for (int i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
    for (int i = 1; i <= n; ++i) h += ",xi" + std::to_string(i);
    h += ",y";
    for (int i = 1; i <= m; ++i) h += ",u" + std::to_string(i);
    return h;
}

inline void write_trace_csv(std::ostream& out, const TraceTable& t) {
    if (t.empty()) throw std::invalid_argument("write_trace_csv: empty trajectory");
    const int n = t.state_dim();
    const int m = static_cast<int>(t.u.front().size());
    out << trace_header(n, m) << '\n';
    for (std::size_t k = 0; k < t.size(); ++k) {
        out << format_double(t.times[k]);
        for (int i = 0; i < n; ++i) out << ',' << format_double(t.x[k][i]);
        for (int i = 0; i < n; ++i) out << ',' << format_double(t.xi[k][i]);
        out << ',' << format_double(t.y[k]);
        for (int i = 0; i < m; ++i) out << ',' << format_double(t.u[k][i]);
        out << '\n';
    }
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline TraceTable read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError({"trace file is empty"});
    const auto header = split_csv(line);
    int n = 0, m = 0;
    for (const auto& h : header) {
        if (h.rfind("xi", 0) == 0) continue;
        if (h.rfind("x", 0) == 0) ++n;
        if (h.rfind("u", 0) == 0) ++m;
    }
    if (header.empty() || header.front() != "t" || line != trace_header(n, m))
        throw ValidationError({"trace header must be " + trace_header(n, m)});
    TraceTable t;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ValidationError({"trace row " + std::to_string(row) + " has the wrong number of columns"});
        std::vector<double> v;
        try {
            for (const auto& c : cells) v.push_back(parse_double(c));
        } catch (const std::invalid_argument& e) {
            throw ValidationError({"trace row " + std::to_string(row) + ": " + e.what()});
        }
        t.times.push_back(v[0]);
        t.x.push_back(Eigen::Map<const Vector>(v.data() + 1, n));
        t.xi.push_back(Eigen::Map<const Vector>(v.data() + 1 + n, n));
        t.y.push_back(v[static_cast<std::size_t>(1 + 2 * n)]);
        t.u.push_back(Eigen::Map<const Vector>(v.data() + 2 + 2 * n, m));
    }
    return t;
}

// ---------------------------------------------------------------------------
// SVG time plots
// ---------------------------------------------------------------------------

enum class PlotStyle { plain, envelope };

inline PlotStyle parse_plot_style(const std::string& s) {
    if (s == "plain") return PlotStyle::plain;
    if (s == "envelope") return PlotStyle::envelope;
    throw ValidationError({"plot style must be 'plain' or 'envelope'"});
}

namespace detail {

inline std::string svg_num(double v) {
    // Two decimals keep files small and deterministic.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Panel {
    std::string label;
    std::vector<std::pair<std::string, std::vector<double>>> series;  // colour, values
};

inline void range_of(const Panel& p, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& [c, v] : p.series) {
        for (double y : v) {
            if (!std::isfinite(y)) continue;
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace detail

/**
 * @brief Time plots: one panel per state coordinate (x solid, xi dashed) and
 * a panel for y = J(x). The envelope style overlays the fitted decay bound on
 * an extra |x - x*| panel.
 */
inline std::string render_svg(const TraceTable& t, PlotStyle style, const Vector& x_star) {
    if (t.empty()) throw std::invalid_argument("render_svg: zero-length trajectory");
    const int n = t.state_dim();
    std::vector<detail::Panel> panels;
    for (int i = 0; i < n; ++i) {
        detail::Panel p;
        p.label = "x" + std::to_string(i + 1);
        std::vector<double> xs, xis;
        for (std::size_t k = 0; k < t.size(); ++k) {
            xs.push_back(t.x[k][i]);
            xis.push_back(t.xi[k][i]);
        }
        p.series.emplace_back("#1f77b4", std::move(xs));
        p.series.emplace_back("#ff7f0e", std::move(xis));
        panels.push_back(std::move(p));
    }
    panels.push_back({"J(x)", {{"#2ca02c", t.y}}});
    if (style == PlotStyle::envelope) {
        std::vector<double> dist;
        for (const Vector& x : t.x) dist.push_back((x - x_star).norm());
        const DecayFit fit = fit_decay(t.times, dist);
        std::vector<double> env;
        for (double tt : t.times) env.push_back(fit.bound(tt - t.times.front()));
        panels.push_back({"|x - x*|", {{"#1f77b4", dist}, {"#d62728", env}}});
    }

    const double width = 720.0, panel_h = 150.0, left = 70.0, right = 20.0, top = 20.0, gap = 40.0;
    const double plot_w = width - left - right;
    const double height = top + static_cast<double>(panels.size()) * (panel_h + gap) + 10.0;
    const double t0 = t.times.front();
    const double t1 = t.times.back() > t0 ? t.times.back() : t0 + 1.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_num(width) << "\" height=\""
       << detail::svg_num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& p = panels[pi];
        const double y0 = top + static_cast<double>(pi) * (panel_h + gap);
        double lo, hi;
        detail::range_of(p, lo, hi);
        auto sx = [&](double tt) { return left + (tt - t0) / (t1 - t0) * plot_w; };
        auto sy = [&](double v) { return y0 + panel_h - (v - lo) / (hi - lo) * panel_h; };
        os << "<g>\n<rect x=\"" << detail::svg_num(left) << "\" y=\"" << detail::svg_num(y0) << "\" width=\""
           << detail::svg_num(plot_w) << "\" height=\"" << detail::svg_num(panel_h)
           << "\" fill=\"none\" stroke=\"#444\"/>\n";
        os << "<text x=\"10\" y=\"" << detail::svg_num(y0 + panel_h / 2) << "\">" << p.label << "</text>\n";
        os << "<text x=\"" << detail::svg_num(left - 4) << "\" y=\"" << detail::svg_num(y0 + 10)
           << "\" text-anchor=\"end\">" << detail::tick(hi) << "</text>\n";
        os << "<text x=\"" << detail::svg_num(left - 4) << "\" y=\"" << detail::svg_num(y0 + panel_h)
           << "\" text-anchor=\"end\">" << detail::tick(lo) << "</text>\n";
        os << "<text x=\"" << detail::svg_num(left) << "\" y=\"" << detail::svg_num(y0 + panel_h + 14) << "\">"
           << detail::tick(t0) << "</text>\n";
        os << "<text x=\"" << detail::svg_num(left + plot_w) << "\" y=\"" << detail::svg_num(y0 + panel_h + 14)
           << "\" text-anchor=\"end\">" << detail::tick(t1) << "</text>\n";
        os << "<text x=\"" << detail::svg_num(left + plot_w / 2) << "\" y=\"" << detail::svg_num(y0 + panel_h + 14)
           << "\" text-anchor=\"middle\">time</text>\n";
        for (std::size_t si = 0; si < p.series.size(); ++si) {
            const auto& [colour, v] = p.series[si];
            os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\"";
            if (si == 1 && pi < static_cast<std::size_t>(n)) os << " stroke-dasharray=\"4 2\"";
            os << " points=\"";
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (!std::isfinite(v[k])) continue;
                os << detail::svg_num(sx(t.times[k])) << ',' << detail::svg_num(sy(v[k])) << ' ';
            }
            os << "\"/>\n";
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json fit_json(const DecayFit& f) {
    return Json{{"beta", number_or_null(f.beta)},
                {"lambda", std::isinf(f.lambda) ? Json("inf") : number_or_null(f.lambda)},
                {"rho", f.rho},
                {"initial_distance", f.initial_distance},
                {"window_start", f.window_start},
                {"window_end", f.window_end},
                {"diverged", f.diverged}};
}

inline Json run_report(const ExperimentConfig& cfg, const PiEpsTrajectory& traj) {
    Json r;
    r["config"] = to_json(cfg);
    r["termination"] = to_string(traj.termination);
    r["exit_time"] = number_or_null(traj.exit_time);
    r["warnings"] = traj.config.warnings;
    r["epsilon_used"] = traj.config.gains.epsilon;
    r["step"] = traj.step;
    r["samples"] = traj.size();
    const TrajectoryMetrics m = trajectory_metrics(traj, cfg.cost.x_star);
    Json metrics = fit_json(m.fit);
    metrics["sup_tracking_error"] = m.sup_tracking_error;
    metrics["final_cost"] = m.final_cost;
    metrics["trailing_max_distance"] = m.trailing_max_distance;
    r["metrics"] = metrics;
    r["final"] = Json{{"t", traj.times.back()},
                      {"x", detail::vector_json(traj.x.back())},
                      {"xi", detail::vector_json(traj.xi.back())}};
    return r;
}

inline Json constants_json(const ConstantEstimates& e) {
    return Json{{"M_f", e.M_f},     {"M_2f", e.M_2f},   {"M_3f", e.M_3f},   {"M_g", e.M_g},
                {"L_g", e.L_g},     {"L_2g", e.L_2g},   {"M_3g", e.M_3g},   {"alpha", e.alpha},
                {"c_w", e.c_w},     {"nu", e.nu},       {"working_set", detail::box_json(e.working_set)},
                {"samples_used", e.samples_used}};
}

inline Json sigma_json(const SigmaBounds& s) {
    return Json{{"sigma11", s.sigma11}, {"sigma12", s.sigma12}, {"sigma21", s.sigma21}, {"sigma22", s.sigma22},
                {"sigma3", s.sigma3},   {"x_star", detail::vector_json(s.x_star)},  {"j_star", s.j_star}};
}

inline Json chain_json(const ChainReport& rep) {
    Json a = Json::array();
    for (const auto& c : rep.checks) {
        a.push_back(Json{{"check", c.name},
                         {"pass", c.pass},
                         {"value", number_or_null(c.value)},
                         {"bound", number_or_null(c.bound)},
                         {"margin", number_or_null(c.margin)}});
    }
    return a;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace nhes::cli

#endif  // NHES_CLI_OUTPUT_HPP
