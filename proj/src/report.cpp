#include "robest/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace robest {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> cols = {
        "scenario",      "param", "theta_star", "mu",   "N",        "dA_norm", "bu_inf", "gt_energy_ode",
        "gt_energy_fd",  "thm1",  "thm2",       "baseline", "R_gt", "R_thm1",  "R_baseline", "flags"};
    return cols;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

std::string metric_cell(const ScenarioAnalysis& a, MetricSource source) {
    auto it = a.metrics.find(source);
    return it == a.metrics.end() ? std::string{} : format_double(it->second.R);
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_summary_csv(const std::vector<ScenarioAnalysis>& analyses, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << join(summary_columns(), ',') << '\n';
    for (const auto& a : analyses) {
        for (const auto& r : a.reports) {
            const auto& k = r.constants;
            std::vector<std::string> row = {a.name,
                                            r.param_name,
                                            format_double(r.theta_star),
                                            format_double(k.mu),
                                            format_double(k.N),
                                            format_double(k.dA_norm),
                                            format_double(k.bu_inf),
                                            format_double(r.ground_truth_energy),
                                            cell(r.ground_truth_energy_fd),
                                            cell(r.theorem1),
                                            cell(r.theorem2),
                                            cell(r.gramian_baseline),
                                            metric_cell(a, MetricSource::ground_truth),
                                            metric_cell(a, MetricSource::theorem1),
                                            metric_cell(a, MetricSource::gramian_baseline),
                                            join(r.flags, ';')};
            os << join(row, ',') << '\n';
        }
    }
}

nlohmann::ordered_json to_json(const BoundReport& r) {
    const auto&            k = r.constants;
    nlohmann::ordered_json j;
    j["param_index"]            = r.param_index;
    j["param"]                  = r.param_name;
    j["theta_star"]             = r.theta_star;
    j["theorem1"]               = optional_number(r.theorem1);
    j["theorem2"]               = optional_number(r.theorem2);
    j["gramian_baseline"]       = optional_number(r.gramian_baseline);
    j["ground_truth_energy"]    = r.ground_truth_energy;
    j["ground_truth_energy_fd"] = optional_number(r.ground_truth_energy_fd);
    j["constants"]              = {{"K1", k.K1}, {"K2", k.K2},           {"K3", k.K3},
                                   {"mu", k.mu}, {"N", k.N},             {"dA_norm", k.dA_norm},
                                   {"bu_inf", k.bu_inf}, {"x0_norm", k.x0_norm}};
    j["transformed_coordinates"] = r.transformed_coordinates;
    j["transform_condition"]     = r.transform_condition;
    j["flags"]                   = r.flags;
    return j;
}

nlohmann::ordered_json to_json(const RobustnessResult& result) {
    nlohmann::ordered_json j;
    j["source"] = to_string(result.source);
    j["d_R"]    = result.d_R;
    j["R"]      = result.R;
    auto& parts = j["contributions"] = nlohmann::ordered_json::array();
    for (const auto& c : result.contributions) {
        parts.push_back({{"param_index", c.param_index},
                         {"theta_star", c.theta_star},
                         {"sensitivity_norm", c.sens_norm},
                         {"error_norm", c.err_norm},
                         {"value", c.value}});
    }
    j["warnings"] = result.warnings;
    return j;
}

nlohmann::ordered_json to_json(const ScenarioAnalysis& a) {
    nlohmann::ordered_json j;
    j["scenario"] = a.name;
    j["mode"]     = to_string(a.mode);
    j["horizon"]  = a.horizon;
    j["dt"]       = a.dt;
    j["mu"]       = a.mu;
    j["err_norm"] = a.err_norm;
    if (a.preconditioner) {
        j["preconditioner"] = {{"condition_number", a.preconditioner->condition_number},
                               {"mu_before", a.preconditioner->mu_before},
                               {"mu_after", a.preconditioner->mu_after}};
    } else {
        j["preconditioner"] = nullptr;
    }
    auto& sources = j["sources"] = nlohmann::ordered_json::array();
    for (auto s : a.sources) sources.push_back(to_string(s));
    auto& reports = j["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : a.reports) reports.push_back(to_json(r));
    auto& metrics = j["metrics"] = nlohmann::ordered_json::object();
    for (const auto& [source, result] : a.metrics) metrics[to_string(source)] = to_json(result);
    j["warnings"] = a.warnings;
    return j;
}

void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

std::string render_svg(const ScenarioAnalysis& a) {
    struct Series {
        std::string           id;
        std::string           label;
        std::string           color;
        std::vector<double>   values;  // per report, NaN when absent
    };
    std::vector<Series> series;
    auto add_series = [&](std::string id, std::string label, std::string color, auto getter) {
        Series s{std::move(id), std::move(label), std::move(color), {}};
        bool   any = false;
        for (const auto& r : a.reports) {
            std::optional<double> v = getter(r);
            any |= v.has_value();
            s.values.push_back(v.value_or(std::nan("")));
        }
        if (any) series.push_back(std::move(s));
    };
    add_series("ground_truth", "ground truth", "#333333",
               [](const BoundReport& r) -> std::optional<double> { return r.ground_truth_energy; });
    add_series("theorem1", "thm1 bound", "#1f77b4", [](const BoundReport& r) { return r.theorem1; });
    add_series("theorem2", "thm2 bound", "#2ca02c", [](const BoundReport& r) { return r.theorem2; });
    add_series("gramian_baseline", "Gramian baseline", "#d62728",
               [](const BoundReport& r) { return r.gramian_baseline; });

    // Log10 axis over positive values.
    double lo = 0.0, hi = 1.0;
    bool   init = false;
    for (const auto& s : series)
        for (double v : s.values)
            if (v > 0.0 && std::isfinite(v)) {
                const double l = std::log10(v);
                lo             = init ? std::min(lo, l) : l;
                hi             = init ? std::max(hi, l) : l;
                init           = true;
            }
    lo = std::floor(lo) - 1.0;
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;

    const double width = 720, height = 420, left = 80, right = 200, top = 50, bottom = 60;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    const std::size_t groups = std::max<std::size_t>(a.reports.size(), 1);
    const double group_w = plot_w / static_cast<double>(groups);
    const double bar_w   = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(series.size(), 1));
    auto y_of = [&](double log_v) { return top + plot_h * (hi - log_v) / (hi - lo); };

    std::ostringstream os;
    os.precision(6);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "  <title>" << xml_escape(a.name) << ": sensitivity energy, ground truth vs. bounds</title>\n"
       << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
       << "  <text x=\"" << left << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\">"
       << xml_escape(a.name) << " (" << to_string(a.mode) << ")</text>\n";

    os << "  <g id=\"axes\" stroke=\"black\" font-family=\"sans-serif\" font-size=\"11\">\n"
       << "    <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
       << "\"/>\n"
       << "    <line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
       << top + plot_h << "\"/>\n";
    for (double d = lo; d <= hi + 1e-9; d += 1.0) {
        os << "    <text x=\"" << left - 8 << "\" y=\"" << y_of(d) + 4 << "\" text-anchor=\"end\" stroke=\"none\">1e"
           << static_cast<int>(d) << "</text>\n";
    }
    os << "  </g>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        os << "  <g id=\"series-" << ser.id << "\" fill=\"" << ser.color << "\">\n";
        for (std::size_t g = 0; g < ser.values.size(); ++g) {
            const double v = ser.values[g];
            if (!(v > 0.0) || !std::isfinite(v)) continue;
            const double x = left + group_w * (static_cast<double>(g) + 0.1) + bar_w * static_cast<double>(s);
            const double y = y_of(std::log10(v));
            os << "    <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w << "\" height=\""
               << top + plot_h - y << "\"><title>" << xml_escape(ser.label) << ": " << format_double(v)
               << "</title></rect>\n";
        }
        os << "  </g>\n";
    }

    os << "  <g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n";
    for (std::size_t g = 0; g < a.reports.size(); ++g) {
        os << "    <text x=\"" << left + group_w * (static_cast<double>(g) + 0.5) << "\" y=\"" << top + plot_h + 20
           << "\">" << xml_escape(a.reports[g].param_name) << "</text>\n";
    }
    os << "  </g>\n";

    os << "  <g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    double ly = top + 10;
    for (const auto& ser : series) {
        os << "    <rect x=\"" << width - right + 20 << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\""
           << ser.color << "\"/>\n";
        os << "    <text x=\"" << width - right + 38 << "\" y=\"" << ly << "\">" << xml_escape(ser.label);
        auto it = a.metrics.find(metric_source_from_string(ser.id));
        if (it != a.metrics.end()) os << " (R = " << format_double(it->second.R).substr(0, 8) << ")";
        os << "</text>\n";
        ly += 20;
    }
    os << "  </g>\n</svg>\n";
    return os.str();
}

void write_svg(const ScenarioAnalysis& analysis, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << render_svg(analysis);
}

}  // namespace robest
