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
#ifndef NHES_CLI_CONFIG_HPP
#define NHES_CLI_CONFIG_HPP

#include "nhes/cost.hpp"
#include "nhes/tuner.hpp"

#include <fstream>
#include <set>
#include <json.hpp>

namespace nhes::cli {

using Json = nlohmann::ordered_json;

/// Declared output files; empty names are skipped.
struct Outputs {
    std::string trace_csv = "trace.csv";
    std::string report_json = "report.json";
    std::string plot_svg = "plot.svg";
};

/**
 * @brief One experiment as read from a JSON config.
 *
 * Selection indices are 1-based in the file and 0-based here. Sections
 * `working_set`, `budget` and `samples` are only read by the tuning
 * commands.
 */
struct ExperimentConfig {
    std::string system = "brockett";
    std::optional<Box> domain;
    std::string pair = "linear";
    double gamma1 = 20.0;
    double gamma2 = 1.0;
    std::vector<int> k{1, 2, 3};
    double mu = 0.5;
    double eta = 1.0;
    std::vector<int> s1{0, 1};
    std::vector<std::pair<int, int>> s2{{0, 1}};
    std::vector<int> kappa{4};
    double epsilon = 0.1;
    Vector x0 = Vector{{1.0, -1.0, 1.0}};
    Vector xi0 = Vector{{-1.0, 1.0, 1.0}};
    double horizon = 40.0;
    FeedbackMode feedback = FeedbackMode::sampled;
    int substeps_per_period = 32;
    long long record_stride = 0;
    bool pin_x_to_xi = false;
    QuadraticCost cost = QuadraticCost::isotropic(Vector::Zero(3));
    double cost_shift = 0.0;
    std::uint64_t seed = 1;
    Outputs outputs;
    std::string plot_style = "plain";

    std::optional<Box> working_set;
    std::size_t samples = 200;
    TuningBudget budget;
    std::vector<double> eps_ladder{0.1, 0.05, 0.025, 0.0125};
};

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

namespace detail {

inline Json vector_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Json box_json(const Box& b) { return Json{{"lower", vector_json(b.lower)}, {"upper", vector_json(b.upper)}}; }

/// Collects type errors while reading a JSON object and flags unknown keys.
class Reader {
public:
    Reader(const Json& j, std::string where, std::vector<std::string>& errors)
        : j_(j), where_(std::move(where)), errors_(errors) {
        if (!j_.is_object()) errors_.push_back(where_ + ": expected an object");
    }

    bool has(const char* key) {
        seen_.insert(key);
        return j_.is_object() && j_.contains(key);
    }

    template <class T>
    void get(const char* key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const std::exception&) {
            errors_.push_back(path(key) + ": wrong type");
        }
    }

    void get_vector(const char* key, Vector& out) {
        if (!has(key)) return;
        try {
            const auto v = j_.at(key).get<std::vector<double>>();
            out = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
        } catch (const std::exception&) {
            errors_.push_back(path(key) + ": expected an array of numbers");
        }
    }

    void get_box(const char* key, std::optional<Box>& out) {
        if (!has(key)) return;
        Reader r(j_.at(key), path(key), errors_);
        Box b;
        r.get_vector("lower", b.lower);
        r.get_vector("upper", b.upper);
        r.finish();
        if (b.lower.size() != b.upper.size() || b.lower.size() == 0)
            errors_.push_back(path(key) + ": lower and upper must be nonempty and of equal length");
        else if (!(b.lower.array() <= b.upper.array()).all())
            errors_.push_back(path(key) + ": lower must not exceed upper");
        else
            out = b;
    }

    const Json& at(const char* key) const { return j_.at(key); }
    std::string path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

    void finish() {
        if (!j_.is_object()) return;
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) errors_.push_back(path(it.key().c_str()) + ": unknown key");
        }
    }

private:
    const Json& j_;
    std::string where_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

}  // namespace detail

inline Json to_json(const ExperimentConfig& c) {
    Json j;
    j["system"] = c.system;
    if (c.domain) j["domain"] = detail::box_json(*c.domain);
    j["pair"] = c.pair;
    j["gamma1"] = c.gamma1;
    j["gamma2"] = c.gamma2;
    j["k"] = c.k;
    j["mu"] = c.mu;
    j["eta"] = c.eta;
    Json s1 = Json::array();
    for (int i : c.s1) s1.push_back(i + 1);
    j["s1"] = s1;
    Json s2 = Json::array();
    for (auto [a, b] : c.s2) s2.push_back(Json::array({a + 1, b + 1}));
    j["s2"] = s2;
    j["kappa"] = c.kappa;
    j["epsilon"] = c.epsilon;
    j["x0"] = detail::vector_json(c.x0);
    j["xi0"] = detail::vector_json(c.xi0);
    j["horizon"] = c.horizon;
    j["feedback"] = to_string(c.feedback);
    j["substeps_per_period"] = c.substeps_per_period;
    j["record_stride"] = c.record_stride;
    j["pin_x_to_xi"] = c.pin_x_to_xi;
    j["cost"] = Json{{"x_star", detail::vector_json(c.cost.x_star)},
                     {"weights", detail::vector_json(c.cost.weights)},
                     {"offset", c.cost.offset}};
    j["cost_shift"] = c.cost_shift;
    j["seed"] = c.seed;
    j["outputs"] = Json{{"trace_csv", c.outputs.trace_csv},
                        {"report_json", c.outputs.report_json},
                        {"plot_svg", c.outputs.plot_svg}};
    j["plot_style"] = c.plot_style;
    if (c.working_set) j["working_set"] = detail::box_json(*c.working_set);
    j["samples"] = c.samples;
    j["budget"] = Json{{"delta", c.budget.delta},       {"rho", c.budget.rho},
                       {"rho1", c.budget.rho1},         {"rho2", c.budget.rho2},
                       {"varsigma", c.budget.varsigma}, {"lambda2", c.budget.lambda2},
                       {"delta_x", c.budget.delta_x}};
    j["eps_ladder"] = c.eps_ladder;
    return j;
}

/// Builds the plant named by the config, restricted to its domain when given.
inline ControlSystem make_system(const ExperimentConfig& c) {
    ControlSystem sys = SystemRegistry::instance().make(c.system);
    if (c.domain) return sys.with_domain(*c.domain);
    return sys;
}

inline BracketSelection selection_of(const ExperimentConfig& c) { return BracketSelection{c.s1, c.s2, c.kappa}; }

inline SimConfig sim_config(const ExperimentConfig& c) {
    SimConfig s;
    s.gains = {c.gamma1, c.epsilon};
    s.sched = DitherSchedule{c.k, c.mu, c.eta};
    s.pair = pair_library(c.pair, c.gamma2);
    s.sel = selection_of(c);
    s.x0 = c.x0;
    s.xi0 = c.xi0;
    s.horizon = c.horizon;
    s.substeps_per_period = c.substeps_per_period;
    s.record_stride = c.record_stride;
    s.feedback = c.feedback;
    s.pin_x_to_xi = c.pin_x_to_xi;
    s.cost_shift = c.cost_shift;
    return s;
}

/// Cross-checks a parsed config against its plant and the simulation rules.
inline std::vector<std::string> config_problems(const ExperimentConfig& c) {
    std::vector<std::string> errors;
    if (!SystemRegistry::instance().contains(c.system)) {
        errors.push_back("system: unknown system '" + c.system + "'");
        return errors;
    }
    const auto names = pair_names();
    if (std::find(names.begin(), names.end(), c.pair) == names.end())
        errors.push_back("pair: unknown generating pair '" + c.pair + "'");
    if (!(c.gamma2 > 0.0)) errors.push_back("gamma2 must be positive");
    if (c.plot_style != "plain" && c.plot_style != "envelope")
        errors.push_back("plot_style must be 'plain' or 'envelope'");
    if (!errors.empty()) return errors;
    try {
        const ControlSystem sys = make_system(c);
        if (c.cost.x_star.size() != sys.state_dim() || c.cost.weights.size() != sys.state_dim())
            errors.push_back("cost: x_star and weights must have n entries");
        else if (!(c.cost.weights.array() > 0.0).all())
            errors.push_back("cost: weights must be positive");
        for (auto& e : sim_config(c).problems(sys)) errors.push_back(std::move(e));
        if (c.working_set && c.working_set->dim() != sys.state_dim())
            errors.push_back("working_set must have n coordinates");
    } catch (const ValidationError& e) {
        for (const auto& m : e.errors()) errors.push_back(m);
    }
    return errors;
}

inline ExperimentConfig config_from_json(const Json& root) {
    std::vector<std::string> errors;
    // A report embeds its config under "config"; accept it directly.
    const Json& j = (root.is_object() && root.contains("config") && !root.contains("system")) ? root.at("config") : root;
    ExperimentConfig c;
    detail::Reader r(j, "", errors);
    r.get("system", c.system);
    r.get_box("domain", c.domain);
    r.get("pair", c.pair);
    r.get("gamma1", c.gamma1);
    r.get("gamma2", c.gamma2);
    r.get("k", c.k);
    r.get("mu", c.mu);
    r.get("eta", c.eta);
    std::vector<int> s1_one;
    if (r.has("s1")) {
        r.get("s1", s1_one);
        c.s1.clear();
        for (int i : s1_one) c.s1.push_back(i - 1);
    }
    if (r.has("s2")) {
        std::vector<std::vector<int>> pairs;
        r.get("s2", pairs);
        c.s2.clear();
        for (const auto& p : pairs) {
            if (p.size() != 2)
                errors.push_back("s2: each entry must be a pair [i, j]");
            else
                c.s2.emplace_back(p[0] - 1, p[1] - 1);
        }
        if (!r.has("kappa")) c.kappa = BracketSelection::with_default_kappa(c.s1, c.s2).kappa;
    }
    r.get("kappa", c.kappa);
    r.get("epsilon", c.epsilon);
    r.get_vector("x0", c.x0);
    r.get_vector("xi0", c.xi0);
    r.get("horizon", c.horizon);
    if (r.has("feedback")) {
        std::string f;
        r.get("feedback", f);
        if (f == "sampled")
            c.feedback = FeedbackMode::sampled;
        else if (f == "continuous")
            c.feedback = FeedbackMode::continuous;
        else
            errors.push_back("feedback must be 'sampled' or 'continuous'");
    }
    r.get("substeps_per_period", c.substeps_per_period);
    r.get("record_stride", c.record_stride);
    r.get("pin_x_to_xi", c.pin_x_to_xi);
    const bool x_star_given = j.is_object() && j.contains("cost");
    if (r.has("cost")) {
        detail::Reader cr(r.at("cost"), "cost", errors);
        std::string type = "quadratic";
        cr.get("type", type);
        if (type != "quadratic") errors.push_back("cost.type: only 'quadratic' is supported");
        cr.get_vector("x_star", c.cost.x_star);
        c.cost.weights = Vector::Ones(c.cost.x_star.size());
        cr.get_vector("weights", c.cost.weights);
        cr.get("offset", c.cost.offset);
        cr.finish();
    }
    r.get("cost_shift", c.cost_shift);
    r.get("seed", c.seed);
    if (r.has("outputs")) {
        detail::Reader orr(r.at("outputs"), "outputs", errors);
        c.outputs = Outputs{"", "", ""};
        orr.get("trace_csv", c.outputs.trace_csv);
        orr.get("report_json", c.outputs.report_json);
        orr.get("plot_svg", c.outputs.plot_svg);
        orr.finish();
    }
    r.get("plot_style", c.plot_style);
    r.get_box("working_set", c.working_set);
    r.get("samples", c.samples);
    if (r.has("budget")) {
        detail::Reader br(r.at("budget"), "budget", errors);
        br.get("delta", c.budget.delta);
        br.get("rho", c.budget.rho);
        br.get("rho1", c.budget.rho1);
        br.get("rho2", c.budget.rho2);
        br.get("varsigma", c.budget.varsigma);
        br.get("lambda2", c.budget.lambda2);
        br.get("delta_x", c.budget.delta_x);
        br.finish();
    }
    r.get("eps_ladder", c.eps_ladder);
    r.finish();
    if (errors.empty() && !x_star_given && SystemRegistry::instance().contains(c.system)) {
        const int n = make_system(c).state_dim();
        c.cost = QuadraticCost::isotropic(Vector::Zero(n));
    }
    if (errors.empty()) errors = config_problems(c);
    if (!errors.empty()) throw ValidationError(errors);
    return c;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({"cannot open config file '" + path + "'"});
    try {
        return Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ValidationError({std::string("config parse error: ") + e.what()});
    }
}

inline ExperimentConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

inline std::vector<std::string> preset_names() { return {"brockett-durr", "brockett-vanishing"}; }

/**
 * Brockett experiments with J = |x|^2, gamma1 = 20, gamma2 = 1, kappa12 = 4,
 * k = (1, 2, 3), x0 = (1, -1, 1), xi0 = (-1, 1, 1) over 40 time units.
 * Both use continuous feedback: sample-and-hold at gamma1 epsilon >= 1 is not
 * contracting.
 */
inline ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.feedback = FeedbackMode::continuous;
    c.working_set = Box::cube(3, -0.5, 0.5);
    c.budget.delta = 0.05;
    c.budget.rho = 0.5;
    c.budget.varsigma = 2.0;
    c.budget.rho1 = 1e10;
    if (name == "brockett-durr") {
        c.pair = "linear";
        c.epsilon = 0.1;
        c.mu = 0.5;
    } else if (name == "brockett-vanishing") {
        c.pair = "tanh_vanishing";
        c.epsilon = 0.25;
        c.mu = 1.0;
    } else {
        throw ValidationError({"unknown preset '" + name + "'"});
    }
    return c;
}

}  // namespace nhes::cli

#endif  // NHES_CLI_CONFIG_HPP
