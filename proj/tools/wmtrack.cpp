#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "wmtrack/errors.hpp"

using namespace wmtrack;
using namespace wmtrack::cli;

namespace {

constexpr int kOk = 0;
constexpr int kConfigFailure = 1;
constexpr int kRuntimeFailure = 2;

int report(const char* kind, const std::string& message, const std::vector<std::string>& violations, int code) {
    nlohmann::json j = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    if (!violations.empty()) j["error"]["violations"] = violations;
    std::cerr << j.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak-measurement nuclear spin tracking: simulate, sweep, analyze, filter"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> engine;
    int jobs = 1;
    app.add_option("--config", config_path, "JSON config, or an output CSV with an embedded config");
    app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--out", out, "output directory (beats $WMTRACK_OUT_DIR and the config)");
    app.add_option("--engine", engine, "simulation engine")->check(CLI::IsMember({"dm", "analytic"}));
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* sim = app.add_subcommand("simulate", "run one protocol and write a trace CSV");
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep, fit every point, write a summary CSV");
    auto* analyze = app.add_subcommand("analyze", "spectrum and fits of a stored trace");
    auto* filter = app.add_subcommand("filter", "tabulate the decoupling filter function");
    for (auto* s : {sim, sweep, analyze, filter}) s->fallthrough();

    std::string trace_path;
    std::optional<int> pad;
    std::optional<double> threshold;
    std::vector<double> noise_band;
    bool normalize = false, unfold = false;
    analyze->add_option("trace", trace_path, "trace CSV")->required();
    analyze->add_option("--pad", pad, "zero-padding factor")->check(CLI::PositiveNumber);
    analyze->add_option("--threshold", threshold, "peak threshold in baseline deviations");
    analyze->add_option("--noise-band", noise_band, "noise band LO HI in Hz for normalization")->expected(2);
    analyze->add_flag("--normalize", normalize, "divide the spectrum by the noise-band deviation");
    analyze->add_flag("--unfold", unfold, "report peaks at unfolded absolute frequencies");

    std::optional<double> f_tb, f_tau, f_ts, f_lo, f_hi;
    std::optional<int> f_points;
    filter->add_option("--t-beta", f_tb, "interaction time, s");
    filter->add_option("--tau", f_tau, "half pulse spacing, s");
    filter->add_option("--t-s", f_ts, "dwell time, s");
    filter->add_option("--f-lo", f_lo, "band start, Hz");
    filter->add_option("--f-hi", f_hi, "band end, Hz");
    filter->add_option("--points", f_points, "number of samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report("UsageError", e.what(), {}, kConfigFailure);
    }

    try {
        RunConfig cfg;
        bool needs_config = sim->parsed() || sweep->parsed();
        if (config_path) cfg = load_config(*config_path);
        else if (needs_config) throw ConfigError({"--config is required for this command"});
        if (seed) cfg.seed = *seed;
        if (engine) cfg.engine.kind = *engine;
        if (pad) cfg.analysis.pad_factor = *pad;
        if (threshold) cfg.analysis.threshold = *threshold;
        if (!noise_band.empty()) cfg.analysis.noise_band = Band{noise_band[0], noise_band[1]};
        if (normalize || !noise_band.empty()) cfg.analysis.normalize = true;
        if (unfold) cfg.analysis.unfold = true;
        if (f_tb) cfg.filter.t_beta = f_tb;
        if (f_tau) cfg.filter.tau = f_tau;
        if (f_ts) cfg.filter.t_s = f_ts;
        if (f_lo) cfg.filter.f_lo_hz = f_lo;
        if (f_hi) cfg.filter.f_hi_hz = f_hi;
        if (f_points) cfg.filter.points = *f_points;

        std::string dir = resolve_out_dir(cfg, out);
        std::vector<std::string> written;
        if (sim->parsed()) written = cmd_simulate(cfg, dir, jobs);
        else if (sweep->parsed()) written = cmd_sweep(cfg, dir, jobs);
        else if (analyze->parsed()) written = cmd_analyze(cfg, trace_path, dir);
        else written = cmd_filter(cfg, dir);
        for (auto& w : written) std::cout << w << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        return report(e.kind(), e.what(), e.violations, kConfigFailure);
    } catch (const FormatError& e) {
        return report(e.kind(), e.what(), {}, kConfigFailure);
    } catch (const Error& e) {
        return report(e.kind(), e.what(), {}, kRuntimeFailure);
    } catch (const std::exception& e) {
        return report("Error", e.what(), {}, kRuntimeFailure);
    }
}
