#include "crossdiff/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "json.hpp"

namespace crossdiff {

namespace {

using json = nlohmann::ordered_json;

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + file.string());
    }
    return out;
}

json report_json_obj(const ConditionReport& report) {
    json j;
    j["label"] = criterion_name(report.label);
    j["passed"] = report.passed;
    j["tol"] = report.tol;
    json margins = json::array();
    for (const auto& m : report.margins) {
        margins.push_back(
            {{"name", m.name}, {"value", m.value}, {"kind", margin_kind_name(m.kind)}});
    }
    j["margins"] = std::move(margins);
    if (report.witness) {
        j["witness"] = json::array({(*report.witness)[0], (*report.witness)[1]});
    }
    if (report.ellipticity) {
        j["ellipticity"] = *report.ellipticity;
    }
    if (!report.notes.empty()) {
        j["notes"] = report.notes;
    }
    return j;
}

// Minimal deterministic SVG line plot: fixed canvas, axes box, min/max tick
// labels, one polyline per series.
struct Series {
    std::string color;
    std::vector<double> x, y;
};

void write_svg_plot(const std::filesystem::path& file, const std::string& title,
                    const std::vector<Series>& series) {
    const double width = 640.0, height = 400.0;
    const double ml = 70.0, mr = 20.0, mt = 34.0, mb = 42.0;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) {
        ymax = ymin + (ymin == 0.0 ? 1.0 : std::abs(ymin) * 1e-3 + 1e-12);
    }

    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    const auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };
    char buf[128];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };

    std::ofstream out = open_out(file);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\">\n";
    out << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    out << "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"14\">"
        << title << "</text>\n";
    out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(width - ml - mr)
        << "\" height=\"" << num(height - mt - mb)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(ml) << "\" y=\"" << num(height - mb + 16)
        << "\" font-family=\"monospace\" font-size=\"11\">" << num(xmin) << "</text>\n";
    out << "<text x=\"" << num(width - mr) << "\" y=\"" << num(height - mb + 16)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" << num(xmax)
        << "</text>\n";
    out << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(height - mb)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" << num(ymin)
        << "</text>\n";
    out << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(mt + 10)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" << num(ymax)
        << "</text>\n";
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << num(px(s.x[i])) << ',' << num(py(s.y[i]));
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace

std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string margin_kind_name(MarginKind kind) {
    switch (kind) {
        case MarginKind::Slack: return "slack";
        case MarginKind::Residual: return "residual";
        case MarginKind::StrictSlack: return "strict";
    }
    return "unknown";
}

void write_diagnostics_csv(const std::filesystem::path& file, const RunResult& result,
                           int cadence) {
    if (cadence < 1) {
        throw std::invalid_argument("write_diagnostics_csv: cadence must be >= 1");
    }
    std::ofstream out = open_out(file);
    out << "step,t,entropy_raw,entropy_normalized,mass1,mass2,min_u3,dissipation,"
           "newton_iters,tau\n";
    const auto row = [&](long step, double t, double tau, const StepDiagnostics& d) {
        out << step << ',' << format_float(t) << ',' << format_float(d.entropy_raw) << ','
            << format_float(d.entropy_normalized) << ',' << format_float(d.mass1) << ','
            << format_float(d.mass2) << ',' << format_float(d.min_u3) << ','
            << format_float(d.dissipation) << ',' << d.newton_iters << ',' << format_float(tau)
            << '\n';
    };
    row(0, 0.0, 0.0, result.initial_diag);
    const std::size_t count = result.trajectory.size();
    for (std::size_t i = 0; i < count; ++i) {
        const TrajectoryPoint& p = result.trajectory[i];
        if (p.step % cadence == 0 || i + 1 == count) {
            row(p.step, p.t, p.tau, p.diag);
        }
    }
}

void write_snapshot_csv(const std::filesystem::path& file, const GridState& state) {
    std::ofstream out = open_out(file);
    out << "x,u1,u2,w1,w2\n";
    const Field2 u = state.densities();
    for (int j = 0; j < state.grid.n_cells; ++j) {
        out << format_float(state.grid.cell_center(j)) << ',' << format_float(u(0, j)) << ','
            << format_float(u(1, j)) << ',' << format_float(state.w(0, j)) << ','
            << format_float(state.w(1, j)) << '\n';
    }
}

void write_entropy_plot_svg(const std::filesystem::path& file, const RunResult& result) {
    Series s{"#1f77b4", {0.0}, {result.initial_diag.entropy_raw}};
    for (const auto& p : result.trajectory) {
        s.x.push_back(p.t);
        s.y.push_back(p.diag.entropy_raw);
    }
    write_svg_plot(file, "entropy vs t", {s});
}

void write_profiles_plot_svg(const std::filesystem::path& file, const GridState& state) {
    const Field2 u = state.densities();
    Series s1{"#1f77b4", {}, {}};
    Series s2{"#d62728", {}, {}};
    for (int j = 0; j < state.grid.n_cells; ++j) {
        const double x = state.grid.cell_center(j);
        s1.x.push_back(x);
        s1.y.push_back(u(0, j));
        s2.x.push_back(x);
        s2.y.push_back(u(1, j));
    }
    write_svg_plot(file, "final profiles: u1 (blue), u2 (red)", {s1, s2});
}

std::string report_to_json(const ConditionReport& report) {
    return report_json_obj(report).dump(2);
}

void write_run_summary(const std::filesystem::path& file, const SimConfig& cfg,
                       const RunResult& result, double wall_seconds) {
    json j;
    j["status"] = result.aborted ? "aborted" : "completed";
    if (result.aborted) j["abort_reason"] = result.abort_reason;
    j["steps"] = result.trajectory.size();
    j["t_final"] = result.final_state.t;
    j["newton_failures"] = result.newton_failures;
    j["rescaled_cells"] = result.rescaled_cells;
    j["min_density_seen"] = result.min_density_seen;
    j["region_violations"] = result.region_violations;
    if (!result.warnings.empty()) j["warnings"] = result.warnings;

    const StepDiagnostics& last =
        result.trajectory.empty() ? result.initial_diag : result.trajectory.back().diag;
    j["initial"] = {{"entropy_raw", result.initial_diag.entropy_raw},
                    {"mass1", result.initial_diag.mass1},
                    {"mass2", result.initial_diag.mass2},
                    {"min_u3", result.initial_diag.min_u3}};
    j["final"] = {{"entropy_raw", last.entropy_raw},
                  {"mass1", last.mass1},
                  {"mass2", last.mass2},
                  {"min_u3", last.min_u3}};
    j["grid"] = {{"n_cells", cfg.grid.n_cells}, {"length", cfg.grid.length}};
    j["time"] = {{"tau", cfg.tau}, {"t_end", cfg.t_end}};
    j["seed"] = cfg.seed;
    j["wall_seconds"] = wall_seconds;

    std::ofstream out = open_out(file);
    out << j.dump(2) << "\n";
}

} // namespace crossdiff
