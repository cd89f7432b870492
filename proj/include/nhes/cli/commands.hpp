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
#ifndef NHES_CLI_COMMANDS_HPP
#define NHES_CLI_COMMANDS_HPP

#include "nhes/cli/output.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

namespace nhes::cli {

namespace fs = std::filesystem;

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitValidation = 2,
    kExitDomain = 3,
    kExitNumerical = 4,
    kExitInfeasible = 5,
};

/// Machine-readable error record printed on stderr.
inline Json error_record(int code, const std::string& kind, const std::vector<std::string>& messages) {
    return Json{{"status", "error"}, {"kind", kind}, {"exit_code", code}, {"errors", messages}};
}

/**
 * @brief Maps an exception from a command to an exit code and error record.
 *
 * Must be called from inside a catch block.
 */
inline std::pair<int, Json> classify_current_exception() {
    try {
        throw;
    } catch (const ValidationError& e) {
        return {kExitValidation, error_record(kExitValidation, "validation", e.errors())};
    } catch (const InfeasibleBudget& e) {
        return {kExitInfeasible, error_record(kExitInfeasible, "infeasible_budget",
                                              {std::string(e.what()) + " [" + e.constraint() + "]"})};
    } catch (const DomainError& e) {
        return {kExitDomain, error_record(kExitDomain, "domain_exit", {e.what()})};
    } catch (const RankDeficiencyError& e) {
        return {kExitNumerical, error_record(kExitNumerical, "rank_deficiency", {e.what()})};
    } catch (const NumericalError& e) {
        return {kExitNumerical, error_record(kExitNumerical, "numerical_blowup", {e.what()})};
    } catch (const HypothesisError& e) {
        return {kExitValidation, error_record(kExitValidation, "hypothesis", {e.what()})};
    } catch (const std::invalid_argument& e) {
        return {kExitValidation, error_record(kExitValidation, "validation", {e.what()})};
    } catch (const std::exception& e) {
        return {kExitFailure, error_record(kExitFailure, "error", {e.what()})};
    }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunOutcome {
    PiEpsTrajectory traj;
    Json report;
    int exit_code = kExitOk;
};

/// Simulates a validated config; no files are touched.
inline RunOutcome execute(const ExperimentConfig& cfg) {
    const auto problems = config_problems(cfg);
    if (!problems.empty()) throw ValidationError(problems);
    RunOutcome out;
    out.traj = simulate(make_system(cfg), cfg.cost.as_field(), sim_config(cfg));
    out.report = run_report(cfg, out.traj);
    out.exit_code = out.traj.termination == Termination::domain_exit ? kExitDomain : kExitOk;
    return out;
}

inline std::string trace_csv_text(const PiEpsTrajectory& traj) {
    std::ostringstream os;
    write_trace_csv(os, TraceTable::from(traj));
    return os.str();
}

/// Writes the declared outputs of a finished run into out_dir.
inline void write_outputs(const ExperimentConfig& cfg, const RunOutcome& run, const fs::path& out_dir) {
    if (!cfg.outputs.trace_csv.empty()) write_text_file(out_dir / cfg.outputs.trace_csv, trace_csv_text(run.traj));
    if (!cfg.outputs.report_json.empty())
        write_text_file(out_dir / cfg.outputs.report_json, run.report.dump(2) + "\n");
    if (!cfg.outputs.plot_svg.empty()) {
        write_text_file(out_dir / cfg.outputs.plot_svg,
                        render_svg(TraceTable::from(run.traj), parse_plot_style(cfg.plot_style), cfg.cost.x_star));
    }
}

// ---------------------------------------------------------------------------
// check-system, estimate-constants, tune, verify-expansion
// ---------------------------------------------------------------------------

/// Compact set used for sampling: the working set, else a bounded domain, else [-1, 1]^n.
inline Box sampling_set(const ExperimentConfig& cfg, const ControlSystem& sys) {
    if (cfg.working_set) return *cfg.working_set;
    if (sys.domain().bounded()) return sys.domain();
    return Box::cube(sys.state_dim(), -1.0, 1.0);
}

inline Json check_system(const ExperimentConfig& cfg) {
    const ControlSystem sys = make_system(cfg);
    const BracketSelection sel = selection_of(cfg);
    const Box set = sampling_set(cfg, sys);
    std::vector<Vector> pts = grid_points(set, 5);
    for (auto& p : sample_points(set, cfg.samples, cfg.seed)) pts.push_back(std::move(p));
    const RankReport rank = check_rank_condition(sys, sel, pts);
    Json j{{"system", sys.name()},
           {"state_dim", sys.state_dim()},
           {"input_dim", sys.input_dim()},
           {"points", pts.size()},
           {"rank_ok", rank.ok},
           {"worst_condition", number_or_null(rank.worst_condition)},
           {"worst_point", detail::vector_json(rank.worst_point)},
           {"rank_deficient_points", rank.witnesses.size()}};
    if (rank.ok) j["alpha"] = estimate_alpha(sys, sel, set, static_cast<int>(std::max<std::size_t>(cfg.samples, 27)));
    return j;
}

/// Everything the tuner derives from a config.
struct TuneOutcome {
    ConstantEstimates constants;
    SigmaBounds sigma;
    TuningResult result;
};

inline Box require_working_set(const ExperimentConfig& cfg) {
    if (!cfg.working_set) throw ValidationError({"working_set is required for constant estimation and tuning"});
    return *cfg.working_set;
}

inline std::pair<ConstantEstimates, SigmaBounds> estimate_all(const ExperimentConfig& cfg) {
    const Box working = require_working_set(cfg);
    const ControlSystem sys = make_system(cfg);
    const auto sc = sim_config(cfg);
    ConstantEstimates est = estimate_constants(sys, sc.sel, sc.pair, sc.sched, cfg.cost.as_field(), working,
                                               cfg.samples, cfg.seed, cfg.cost_shift);
    SigmaBounds sig = estimate_sigma(cfg.cost.as_field(), cfg.cost.gradient_field(), cfg.cost.hessian_field(),
                                     working, cfg.cost.x_star, cfg.samples, cfg.seed);
    return {std::move(est), std::move(sig)};
}

inline TuneOutcome tune(const ExperimentConfig& cfg) {
    auto [est, sig] = estimate_all(cfg);
    TuningResult res = compute_bounds(est, sig, cfg.budget);
    return {std::move(est), std::move(sig), std::move(res)};
}

inline Json recommendation_json(const Recommendation& r) {
    return Json{{"mu", r.mu}, {"gamma1", r.gamma1}, {"epsilon", r.epsilon}, {"eta", r.eta}};
}

inline Json tuning_json(const ExperimentConfig& cfg, const TuneOutcome& t) {
    const TuningResult& r = t.result;
    const auto& b = r.model->budget();
    Json j;
    j["constants"] = constants_json(t.constants);
    j["sigma"] = sigma_json(t.sigma);
    j["budget"] = Json{{"delta", b.delta},   {"rho", b.rho},         {"rho1", b.rho1},        {"rho2", b.rho2},
                       {"varsigma", b.varsigma}, {"lambda2", b.lambda2}, {"delta_x", b.delta_x}};
    j["bounds"] = Json{{"mu_bar", r.mu_bar},
                       {"mu_binding", r.mu_binding},
                       {"mu0", r.mu0},
                       {"mu_hat1", number_or_null(r.mu_hat1)},
                       {"mu_rate", r.mu_rate},
                       {"mu_budget", r.mu_budget},
                       {"gamma1_bar_at_mu_bar", r.gamma1_bar(r.mu_bar)},
                       {"predicted_beta", r.predicted_beta},
                       {"predicted_lambda", r.predicted_lambda}};
    const Recommendation rec = recommend(r);
    j["recommended"] = recommendation_json(rec);
    j["recommended"]["holds_per_unit_time"] = 1.0 / rec.epsilon;
    try {
        j["recommended_slowed"] = recommendation_json(recommend_slowed(r, cfg.gamma1));
    } catch (const InfeasibleBudget& e) {
        j["recommended_slowed"] = Json{{"error", e.what()}};
    }
    const ChainReport chain = validate_chain(r, cfg.mu, cfg.gamma1, cfg.epsilon, cfg.eta);
    j["config_chain"] = Json{{"all_pass", chain.all_pass()}, {"checks", chain_json(chain)}};
    return j;
}

/// Geometric mu ladder starting at the config's mu.
inline std::vector<double> mu_ladder(double mu) { return {mu, mu / 2.0, mu / 4.0, mu / 8.0, mu / 16.0}; }

/**
 * @brief Numerical expansion checks at the config's operating point.
 *
 * Reports the stabilizer remainder along eps_ladder and the one-period
 * defect of the averaged gradient step along a halving mu ladder, each with
 * its log-log slope (both near 1.5 when the expansion holds).
 */
inline Json verify_expansion(const ExperimentConfig& cfg) {
    const ControlSystem sys = make_system(cfg);
    const BracketSelection sel = selection_of(cfg);
    const auto sc = sim_config(cfg);
    Json j;
    const RemainderScaling rs = remainder_scaling(sys, sel, cfg.gamma1, cfg.x0, cfg.xi0, cfg.eps_ladder);
    j["stabilizer_remainder"] = Json{{"eps", rs.eps},
                                     {"norms", rs.norms},
                                     {"slope", number_or_null(rs.slope)},
                                     {"inconclusive", rs.inconclusive}};
    // A coarse mu can throw the seeker out of the pair's domain; keep the rest of the ladder.
    std::vector<double> used_mu, defects;
    Json points = Json::array();
    for (double mu : mu_ladder(cfg.mu)) {
        DitherSchedule sched{cfg.k, mu, cfg.eta};
        try {
            const double d = one_period_gradient_defect(sys, sel, cfg.cost.as_field(), cfg.cost.gradient_field(),
                                                        sc.pair, sched, cfg.xi0);
            used_mu.push_back(mu);
            defects.push_back(d);
            points.push_back(Json{{"mu", mu}, {"defect", d}});
        } catch (const std::exception& e) {
            points.push_back(Json{{"mu", mu}, {"defect", nullptr}, {"error", e.what()}});
        }
    }
    j["gradient_step_defect"] = Json{
        {"points", points},
        {"slope", used_mu.size() >= 3 ? number_or_null(loglog_slope(used_mu, defects)) : Json(nullptr)}};
    return j;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Axis values of a sweep; empty axes keep the base value.
struct SweepAxes {
    std::vector<std::string> pair;
    std::vector<double> mu;
    std::vector<double> eta;
    std::vector<double> gamma1;
    std::vector<double> epsilon;
};

struct SweepSpec {
    ExperimentConfig base;
    SweepAxes axes;

    std::size_t size() const {
        auto len = [](std::size_t s) { return std::max<std::size_t>(s, 1); };
        return len(axes.pair.size()) * len(axes.mu.size()) * len(axes.eta.size()) * len(axes.gamma1.size()) *
               len(axes.epsilon.size());
    }

    /// Grid point `index` in row-major order (pair slowest, epsilon fastest).
    ExperimentConfig point(std::size_t index) const {
        ExperimentConfig c = base;
        auto pick = [&index](const auto& axis, auto& field) {
            if (axis.empty()) return;
            field = axis[index % axis.size()];
            index /= axis.size();
        };
        pick(axes.epsilon, c.epsilon);
        pick(axes.gamma1, c.gamma1);
        pick(axes.eta, c.eta);
        pick(axes.mu, c.mu);
        pick(axes.pair, c.pair);
        return c;
    }
};

/**
 * @brief Parses {"base": {...} | "preset": name, "axes": {...}}.
 *
 * Axis names are epsilon, mu, gamma1, eta (number lists) and pair (string
 * list). At least one axis must be present and every axis nonempty.
 */
inline SweepSpec sweep_from_json(const Json& j) {
    std::vector<std::string> errors;
    if (!j.is_object()) throw ValidationError({"sweep spec must be a JSON object"});
    SweepSpec spec;
    const bool has_base = j.contains("base"), has_preset = j.contains("preset");
    if (has_base == has_preset) errors.push_back("sweep spec needs exactly one of 'base' or 'preset'");
    try {
        if (has_base && !has_preset) spec.base = config_from_json(j.at("base"));
        if (has_preset && !has_base) {
            if (!j.at("preset").is_string()) throw ValidationError({"preset must be a string"});
            spec.base = preset(j.at("preset").get<std::string>());
        }
    } catch (const ValidationError& e) {
        for (const auto& m : e.errors()) errors.push_back("base: " + m);
    }
    if (!j.contains("axes") || !j.at("axes").is_object() || j.at("axes").empty()) {
        errors.push_back("axes: at least one axis is required");
    } else {
        detail::Reader r(j.at("axes"), "axes", errors);
        r.get("pair", spec.axes.pair);
        r.get("mu", spec.axes.mu);
        r.get("eta", spec.axes.eta);
        r.get("gamma1", spec.axes.gamma1);
        r.get("epsilon", spec.axes.epsilon);
        r.finish();
        for (const auto& [name, value] : j.at("axes").items())
            if (value.is_array() && value.empty()) errors.push_back("axes." + name + ": must be nonempty");
    }
    for (const auto& [key, value] : j.items())
        if (key != "base" && key != "preset" && key != "axes") errors.push_back("unknown key '" + key + "'");
    if (!errors.empty()) throw ValidationError(errors);
    return spec;
}

/// One summary row.
struct SweepRow {
    std::size_t index = 0;
    ExperimentConfig config;
    std::string status = "ok";
    std::string termination;
    TrajectoryMetrics metrics;
    std::string chain = "n/a";
    std::string error;

    bool ok() const { return status == "ok"; }
};

inline std::string sweep_csv_header() {
    return "index,pair,mu,eta,gamma1,epsilon,status,termination,lambda,beta,rho,sup_tracking_error,final_cost,"
           "trailing_max_distance,chain,error";
}

inline std::string sweep_csv_row(const SweepRow& r) {
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(std::isnan(v) ? "nan" : v > 0 ? "inf" : "-inf"); };
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    std::ostringstream os;
    os << r.index << ',' << r.config.pair << ',' << format_double(r.config.mu) << ',' << format_double(r.config.eta)
       << ',' << format_double(r.config.gamma1) << ',' << format_double(r.config.epsilon) << ',' << r.status << ','
       << r.termination;
    if (r.termination.empty()) {
        os << ",,,,,,,";
    } else {
        os << ',' << num(r.metrics.fit.lambda) << ',' << num(r.metrics.fit.beta) << ',' << num(r.metrics.fit.rho) << ','
           << num(r.metrics.sup_tracking_error) << ',' << num(r.metrics.final_cost) << ','
           << num(r.metrics.trailing_max_distance) << ',';
    }
    os << r.chain << ',' << err;
    return os.str();
}

/// Worker count: requested (0 means hardware), capped by NONHOLO_ES_THREADS and the grid size.
inline std::size_t effective_parallelism(std::size_t requested, std::size_t points) {
    std::size_t p = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NONHOLO_ES_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) p = std::min(p, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(p, points));
}

inline SweepRow run_point(const SweepSpec& spec, std::size_t index,
                          const std::map<std::string, std::shared_ptr<const TuningResult>>& tuned) {
    SweepRow row;
    row.index = index;
    row.config = spec.point(index);
    try {
        if (spec.base.working_set) {
            const auto it = tuned.find(row.config.pair + "|" + format_double(row.config.mu) + "|" +
                                       format_double(row.config.eta));
            if (it == tuned.end() || !it->second) {
                row.chain = "infeasible";
            } else {
                const ChainReport rep =
                    validate_chain(*it->second, row.config.mu, row.config.gamma1, row.config.epsilon, row.config.eta);
                row.chain = rep.all_pass() ? "pass" : "fail";
            }
        }
        const RunOutcome run = execute(row.config);
        row.termination = to_string(run.traj.termination);
        row.metrics = trajectory_metrics(run.traj, row.config.cost.x_star);
        if (run.exit_code == kExitDomain) row.status = "domain_exit";
    } catch (...) {
        auto [code, record] = classify_current_exception();
        row.status = record["kind"].get<std::string>();
        std::string msg;
        for (const auto& m : record["errors"]) msg += (msg.empty() ? "" : "; ") + m.get<std::string>();
        row.error = msg;
    }
    return row;
}

struct SweepSummary {
    std::size_t points = 0;
    std::size_t failures = 0;
    bool all_failed() const { return points > 0 && failures == points; }
};

/**
 * @brief Runs every grid point on a worker pool and streams rows to `out`.
 *
 * Workers only compute; this thread is the single writer and emits rows in
 * grid order as soon as each prefix is complete.
 */
inline SweepSummary run_sweep(const SweepSpec& spec, std::size_t parallelism, std::ostream& out) {
    const std::size_t total = spec.size();
    // Tuning depends on (pair, mu, eta) only; evaluate each once up front.
    std::map<std::string, std::shared_ptr<const TuningResult>> tuned;
    if (spec.base.working_set) {
        for (std::size_t i = 0; i < total; ++i) {
            ExperimentConfig c = spec.point(i);
            const std::string key = c.pair + "|" + format_double(c.mu) + "|" + format_double(c.eta);
            if (tuned.count(key)) continue;
            try {
                tuned[key] = std::make_shared<const TuningResult>(tune(c).result);
            } catch (const std::exception&) {
                tuned[key] = nullptr;
            }
        }
    }

    std::vector<std::optional<SweepRow>> rows(total);
    std::mutex mtx;
    std::condition_variable ready;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            SweepRow row = run_point(spec, i, tuned);
            {
                std::lock_guard lock(mtx);
                rows[i] = std::move(row);
            }
            ready.notify_one();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < effective_parallelism(parallelism, total); ++w) pool.emplace_back(worker);

    SweepSummary summary;
    summary.points = total;
    out << sweep_csv_header() << '\n';
    for (std::size_t i = 0; i < total; ++i) {
        std::unique_lock lock(mtx);
        ready.wait(lock, [&] { return rows[i].has_value(); });
        const SweepRow row = std::move(*rows[i]);
        rows[i].reset();
        lock.unlock();
        if (!row.ok()) ++summary.failures;
        out << sweep_csv_row(row) << '\n';
        out.flush();
    }
    for (auto& t : pool) t.join();
    return summary;
}

}  // namespace nhes::cli

#endif  // NHES_CLI_COMMANDS_HPP
