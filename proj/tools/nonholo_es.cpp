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
// nonholo_es: command line driver for simulation, tuning and sweeps.

#include "nhes/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace nhes;
using namespace nhes::cli;

struct Options {
    std::string config;
    std::string preset;
    std::string out_dir = ".";
    std::size_t parallelism = 0;
    std::string trace;
    std::string style = "plain";
    std::vector<double> x_star;
    std::string output;
};

ExperimentConfig load(const Options& o) {
    if (!o.config.empty() && !o.preset.empty()) throw ValidationError({"use either --config or --preset, not both"});
    if (!o.preset.empty()) return preset(o.preset);
    if (o.config.empty()) throw ValidationError({"one of --config or --preset is required"});
    return load_config(o.config);
}

void emit(const Json& j, const fs::path& file) {
    std::cout << j.dump(2) << '\n';
    write_text_file(file, j.dump(2) + "\n");
}

int cmd_run(const Options& o) {
    const ExperimentConfig cfg = load(o);
    const RunOutcome run = execute(cfg);
    write_outputs(cfg, run, o.out_dir);
    for (const auto& w : run.traj.config.warnings) std::cerr << "warning: " << w << '\n';
    const Json& m = run.report["metrics"];
    std::cout << "termination " << run.report["termination"].get<std::string>() << ", lambda " << m["lambda"].dump()
              << ", rho " << m["rho"].dump() << ", sup tracking error " << m["sup_tracking_error"].dump() << '\n';
    return run.exit_code;
}

int cmd_sweep(const Options& o) {
    if (o.config.empty()) throw ValidationError({"sweep needs --config pointing at a sweep spec"});
    const SweepSpec spec = sweep_from_json(read_json_file(o.config));
    const std::size_t threads = effective_parallelism(o.parallelism, spec.size());
    std::cout << "sweep: " << spec.size() << " grid points on " << threads << " worker(s)" << std::endl;
    const fs::path path = fs::path(o.out_dir) / "summary.csv";
    fs::create_directories(o.out_dir);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    const SweepSummary s = run_sweep(spec, threads, out);
    std::cout << "wrote " << path.string() << ": " << s.points - s.failures << " ok, " << s.failures << " failed\n";
    return s.all_failed() ? kExitFailure : kExitOk;
}

int cmd_check_system(const Options& o) {
    const Json j = check_system(load(o));
    emit(j, fs::path(o.out_dir) / "check_system.json");
    return j["rank_ok"].get<bool>() ? kExitOk : kExitNumerical;
}

int cmd_estimate_constants(const Options& o) {
    const auto [est, sig] = estimate_all(load(o));
    emit(Json{{"constants", constants_json(est)}, {"sigma", sigma_json(sig)}}, fs::path(o.out_dir) / "constants.json");
    return kExitOk;
}

int cmd_tune(const Options& o) {
    const ExperimentConfig cfg = load(o);
    emit(tuning_json(cfg, tune(cfg)), fs::path(o.out_dir) / "tuning.json");
    return kExitOk;
}

int cmd_verify_expansion(const Options& o) {
    emit(verify_expansion(load(o)), fs::path(o.out_dir) / "expansion.json");
    return kExitOk;
}

int cmd_plot(const Options& o) {
    if (o.trace.empty()) throw ValidationError({"plot needs --trace"});
    std::ifstream in(o.trace);
    if (!in) throw ValidationError({"cannot open trace '" + o.trace + "'"});
    const TraceTable t = read_trace_csv(in);
    if (t.empty()) throw ValidationError({"trace has no samples"});
    Vector x_star = Vector::Zero(t.state_dim());
    if (!o.x_star.empty()) {
        if (static_cast<int>(o.x_star.size()) != t.state_dim())
            throw ValidationError({"--x-star must have " + std::to_string(t.state_dim()) + " entries"});
        x_star = Eigen::Map<const Vector>(o.x_star.data(), t.state_dim());
    }
    const fs::path path = o.output.empty() ? fs::path(o.out_dir) / "plot.svg" : fs::path(o.output);
    write_text_file(path, render_svg(t, parse_plot_style(o.style), x_star));
    std::cout << "wrote " << path.string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extremum seeking for nonholonomic driftless systems"};
    app.require_subcommand(1);
    Options o;

    auto add_source = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON config file");
        sub->add_option("--preset", o.preset, "Built-in experiment")
            ->check(CLI::IsMember(preset_names()));
        sub->add_option("--out-dir", o.out_dir, "Directory for output files");
    };

    std::function<int(const Options&)> action;
    auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->callback([&action, fn] { action = fn; });
        return sub;
    };

    add_source(add("run", "Simulate one experiment and write trace, report and plot", cmd_run));
    CLI::App* sweep = add("sweep", "Run a parameter grid and write summary.csv", cmd_sweep);
    sweep->add_option("--config", o.config, "JSON sweep spec")->required();
    sweep->add_option("--out-dir", o.out_dir, "Directory for summary.csv");
    sweep->add_option("--parallelism", o.parallelism, "Worker threads (0 = hardware)");
    add_source(add("check-system", "Check the bracket rank condition on the working set", cmd_check_system));
    add_source(add("estimate-constants", "Estimate the Lipschitz and growth constants", cmd_estimate_constants));
    add_source(add("tune", "Compute mu_bar, gamma1_bar, eps_bar and a recommended point", cmd_tune));
    add_source(add("verify-expansion", "Check remainder and gradient-step scaling", cmd_verify_expansion));
    CLI::App* plot = add("plot", "Render an SVG from a trace CSV", cmd_plot);
    plot->add_option("--trace", o.trace, "Trace CSV")->required();
    plot->add_option("--style", o.style, "plain or envelope")->check(CLI::IsMember({"plain", "envelope"}));
    plot->add_option("--x-star", o.x_star, "Target point for the envelope panel")->delimiter(',');
    plot->add_option("--out-dir", o.out_dir, "Directory for plot.svg");
    plot->add_option("-o,--output", o.output, "Output file (overrides --out-dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        return action(o);
    } catch (...) {
        auto [code, record] = classify_current_exception();
        std::cerr << record.dump(2) << '\n';
        return code;
    }
}
