#include "robest/config.hpp"

#include <fstream>
#include <sstream>
#include <string_view>

#include "robest/error.hpp"

namespace robest {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) detail::reject(std::string(what) + ": expected a non-empty array of rows");
    // A flat array is a column vector.
    if (!j.front().is_array()) {
        Vector v(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
        return v;
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Matrix     m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            detail::reject(std::string(what) + ": ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

ParamVectorSpec spec_from_json(const json& j) {
    if (!j.is_object()) detail::reject("scenario: 'params' must be an object with names and nominal");
    return {j.at("names").get<std::vector<std::string>>(), j.at("nominal").get<std::vector<double>>()};
}

StateSpace state_space_from_json(const json& j, const ParamVectorSpec& spec) {
    if (!j.is_object()) detail::reject("scenario: system must be an object with A, B, C, x0");
    StateSpace ss;
    ss.spec = spec;
    ss.A    = param_matrix_from_json(j.at("A"), spec);
    ss.B    = param_matrix_from_json(j.at("B"), spec);
    ss.C    = param_matrix_from_json(j.at("C"), spec);
    ss.D    = j.contains("D") ? param_matrix_from_json(j.at("D"), spec) : ParamMatrix::zero(ss.C.rows(), ss.B.cols());
    ss.x0   = j.contains("x0") ? param_matrix_from_json(j.at("x0"), spec) : ParamMatrix::zero(ss.A.rows(), 1);
    ss.validate();
    return ss;
}

std::vector<MetricSource> sources_from_json(const json& j) {
    std::vector<MetricSource> out;
    for (const auto& s : j) {
        const auto source = metric_source_from_string(s.get<std::string>());
        if (source == MetricSource::ground_truth) detail::reject("bounds: ground_truth is always computed");
        out.push_back(source);
    }
    return out;
}

}  // namespace

ParamMatrix param_matrix_from_json(const json& j, const ParamVectorSpec& spec) {
    if (j.is_array()) return ParamMatrix::constant(matrix_from_json(j, "matrix"));
    if (!j.is_object()) detail::reject("ParamMatrix: expected an object or a nested array");
    const auto  rows = j.at("rows").get<Eigen::Index>();
    const auto  cols = j.at("cols").get<Eigen::Index>();
    if (rows <= 0 || cols <= 0) detail::reject("ParamMatrix: rows and cols must be positive");
    ParamMatrix pm(rows, cols);
    for (const auto& term : j.value("terms", json::array())) {
        Monomial::Exponents exps;
        const json powers = term.value("powers", json::object());
        for (const auto& [name, power] : powers.items()) {
            auto index = spec.index_of(name);
            if (!index) detail::reject("ParamMatrix: unknown parameter '" + name + "'");
            const int p = power.get<int>();
            if (p < 0) detail::reject("ParamMatrix: negative power for '" + name + "'");
            exps[*index] += static_cast<unsigned>(p);
        }
        Matrix coeff = matrix_from_json(term.at("coeff"), "ParamMatrix coeff");
        if (coeff.rows() != rows || coeff.cols() != cols) {
            std::ostringstream os;
            os << "ParamMatrix: coefficient is " << coeff.rows() << "x" << coeff.cols() << ", declared " << rows << "x"
               << cols;
            detail::reject(os.str());
        }
        pm = pm.with_term(Monomial(std::move(exps)), coeff);
    }
    return pm;
}

json param_matrix_to_json(const ParamMatrix& pm, const ParamVectorSpec& spec) {
    json terms = json::array();
    for (const auto& [monomial, coeff] : pm.terms()) {
        json powers = json::object();
        for (const auto& [index, power] : monomial.exponents()) powers[spec.names.at(index)] = power;
        terms.push_back({{"powers", powers}, {"coeff", matrix_to_json(coeff)}});
    }
    return {{"rows", pm.rows()}, {"cols", pm.cols()}, {"terms", terms}};
}

InputSignal input_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return InputSignal::zero(get_or<Eigen::Index>(j, "channels", 1));
    if (kind == "step") return InputSignal::step(matrix_from_json(j.at("amplitude"), "step amplitude").col(0));
    if (kind == "sinusoid")
        return InputSignal::sinusoid(matrix_from_json(j.at("amplitude"), "sinusoid amplitude").col(0),
                                     j.at("frequency").get<double>());
    if (kind == "piecewise") {
        std::vector<Vector> values;
        for (const auto& v : j.at("values")) values.push_back(matrix_from_json(v, "piecewise value").col(0));
        return InputSignal::piecewise(j.at("breakpoints").get<std::vector<double>>(), std::move(values));
    }
    detail::reject("input: unknown kind '" + kind + "'");
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.name        = j.at("name").get<std::string>();
    s.description = get_or<std::string>(j, "description", "");
    const ParamVectorSpec spec = spec_from_json(j.at("params"));
    s.truth    = state_space_from_json(j.at("truth"), spec);
    s.estimate = state_space_from_json(j.at("estimate"), spec);
    s.input    = j.contains("input") ? input_from_json(j.at("input")) : InputSignal::step(Vector::Ones(s.truth.inputs()));
    if (j.contains("horizon") && !j.at("horizon").is_null()) {
        if (!j.at("horizon").is_string() || j.at("horizon").get<std::string>() != "auto")
            s.horizon = j.at("horizon").get<double>();
    }
    if (j.contains("params_of_interest")) {
        for (const auto& name : j.at("params_of_interest")) {
            auto index = spec.index_of(name.get<std::string>());
            if (!index) detail::reject("scenario '" + s.name + "': unknown parameter of interest");
            s.params_of_interest.push_back(*index);
        }
    } else {
        for (std::size_t i = 0; i < spec.size(); ++i) s.params_of_interest.push_back(i);
    }
    if (j.contains("fd_step") && !j.at("fd_step").is_null()) s.fd_step = j.at("fd_step").get<double>();
    s.bounds = j.contains("bounds") ? sources_from_json(j.at("bounds"))
                                    : std::vector<MetricSource>{MetricSource::theorem1, MetricSource::gramian_baseline};
    s.validate();
    return s;
}

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) detail::reject("config: top level must be an object");
    RunConfig cfg;
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("mode")) cfg.analysis.mode = analysis_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("dt") && !j.at("dt").is_null()) cfg.analysis.dt = j.at("dt").get<double>();
    if (j.contains("bounds")) cfg.analysis.bounds = sources_from_json(j.at("bounds"));
    cfg.analysis.theorem2_strict = get_or<bool>(j, "theorem2_strict", true);
    cfg.analysis.metric.perfect_estimator_is_robust = get_or<bool>(j, "perfect_estimator_is_robust", false);
    cfg.write_trajectories = get_or<bool>(j, "write_trajectories", true);
    cfg.threads            = get_or<int>(j, "threads", 0);

    if (!j.contains("scenarios") || !j.at("scenarios").is_array() || j.at("scenarios").empty())
        detail::reject("config: 'scenarios' must be a non-empty array");
    for (const auto& entry : j.at("scenarios")) {
        if (entry.is_string()) {
            const std::string ref = entry.get<std::string>();
            if (ref.rfind("preset:", 0) != 0) detail::reject("config: scenario reference '" + ref + "' must start with preset:");
            const std::string name = ref.substr(std::string_view("preset:").size());
            if (name == "all") {
                for (auto& s : paper_scenarios()) cfg.scenarios.push_back(std::move(s));
            } else {
                cfg.scenarios.push_back(paper_scenario(name));
            }
        } else if (entry.is_object() && entry.contains("random")) {
            const json& r     = entry.at("random");
            const int   count = get_or<int>(r, "count", 1);
            const int   n     = get_or<int>(r, "n", 3);
            const double delta = get_or<double>(r, "delta", 0.5);
            const std::string kind = get_or<std::string>(r, "kind", "dynamics");
            for (int c = 0; c < count; ++c) {
                const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(c);
                if (kind == "dynamics") cfg.scenarios.push_back(random_stable_augmented(n, seed, delta));
                else if (kind == "initial_condition") cfg.scenarios.push_back(random_stable_initial_condition(n, seed, delta));
                else detail::reject("config: unknown random kind '" + kind + "'");
            }
        } else if (entry.is_object()) {
            cfg.scenarios.push_back(scenario_from_json(entry));
        } else {
            detail::reject("config: scenario entries must be strings or objects");
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) detail::reject("cannot read config file " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        detail::reject("config " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

}  // namespace robest
