#include "cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>

#include "cli/io.hpp"
#include "wmtrack/analytic.hpp"
#include "wmtrack/engine.hpp"
#include "wmtrack/errors.hpp"
#include "wmtrack/noise.hpp"

namespace wmtrack::cli {

namespace fs = std::filesystem;

std::string resolve_out_dir(const RunConfig& cfg, const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    if (cfg.output_dir) return *cfg.output_dir;
    return "out";
}

namespace {

SimResult simulate_analytic(const RunConfig& cfg, const Protocol& p) {
    SpinSystem sys = to_system(cfg);
    const auto& wm = p.weak_meas;
    double beta = sys.coupling(0) * wm.t_beta;
    // fraction of each period the meter spends in m_S = -1 sets the hyperfine shift
    double minus_time = wm.t_beta + (p.mid_pi ? p.t_d : 0.0);
    double omega = sys.larmor() + 0.5 * sys.nuclei[0].a_par * minus_time / p.t_s;
    WeakMeasParams wp{beta, p.t_s, omega, cfg.engine.dephasing_rate};
    SimResult r;
    r.t_s = p.t_s;
    r.t0 = p.t_s;
    r.samples = simulate_bloch_trace(wp, p.n_samples);
    double scale = 0.0;
    if (p.init_rotation && p.polarization.kind == PolarizationKind::ideal) scale = p.polarization.p;
    for (double& s : r.samples) s *= scale;
    if (cfg.engine.photons) {
        Rng rng = make_rng(cfg.seed, 0);
        for (double s : r.samples)
            r.counts.push_back(photon_readout(s, cfg.noise.readout, rng, cfg.engine.readout_repetitions));
    }
    r.meta = {{"t_s", p.t_s},       {"tau", wm.tau},       {"t_beta", wm.t_beta},
              {"n_pulses", double(wm.n_pulses)},           {"t_d", p.t_d},
              {"readout_overhead", p.readout_overhead},    {"seed", double(cfg.seed)},  {"t0", p.t_s},
              {"beta", beta},       {"alpha", sys.larmor() * p.t_s}, {"runs", 1.0}};
    return r;
}

std::string kind_of(const std::exception& e) {
    if (auto* w = dynamic_cast<const Error*>(&e)) return w->kind();
    return "Error";
}

}  // namespace

SimResult simulate(const RunConfig& cfg, const Protocol& protocol, int jobs) {
    if (cfg.engine.kind == "analytic") return simulate_analytic(cfg, protocol);
    Engine engine(to_system(cfg), to_engine_options(cfg));
    auto rec = run_averaged(engine, protocol, cfg.seed, cfg.engine.runs, jobs);
    SimResult r;
    r.t_s = protocol.t_s;
    r.samples = std::move(rec.samples);
    r.counts = std::move(rec.counts);
    r.meta = std::move(rec.meta);
    r.meta.erase("stream");
    r.t0 = r.meta.at("t0");
    return r;
}

std::string trace_csv(const RunConfig& cfg, const SimResult& r) {
    CsvHeader h{"wmtrack trace", canonical(cfg), {{"engine", cfg.engine.kind}}};
    for (auto& [k, v] : r.meta) h.meta.push_back({k, num(v)});
    h.meta.push_back({"n_samples", std::to_string(r.samples.size())});
    bool counts = !r.counts.empty();
    std::vector<std::vector<std::string>> rows;
    rows.reserve(r.samples.size());
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        std::vector<std::string> row = {std::to_string(i), num(r.t0 + static_cast<double>(i) * r.t_s), num(r.samples[i])};
        if (counts) row.push_back(i < r.counts.size() ? std::to_string(r.counts[i]) : "");
        rows.push_back(std::move(row));
    }
    std::vector<std::string> cols = {"index", "time_s", "signal"};
    if (counts) cols.push_back("counts");
    return render_csv(h, cols, rows);
}

SummaryRow fit_row(double axis, const SimResult& r) {
    SummaryRow row;
    row.axis = axis;
    try {
        row.fit = fit_decaying_sinusoid(TimeTrace{r.samples, r.t_s, r.t0});
        row.ok = row.fit.converged && !row.fit.degenerate;
        if (!row.ok) row.error = row.fit.degenerate ? "degenerate fit" : "fit did not converge";
    } catch (const std::exception& e) {
        row.fit.params.setConstant(std::nan(""));
        row.fit.covariance.setConstant(std::nan(""));
        row.error = kind_of(e) + ": " + e.what();
    }
    return row;
}

namespace {

json fit_json(const FitResult& f, const std::vector<std::string>& names) {
    json j;
    for (int i = 0; i < 4; ++i) {
        j[names[i]] = f.params[i];
        j[names[i] + "_err"] = f.error(i);
    }
    j["converged"] = f.converged;
    j["degenerate"] = f.degenerate;
    j["residual_norm"] = f.residual_norm;
    j["iterations"] = f.iterations;
    return j;
}

json nan_safe(json j) {
    // JSON has no NaN; report it as null
    if (j.is_number_float() && !std::isfinite(j.get<double>())) return nullptr;
    if (j.is_object() || j.is_array())
        for (auto& v : j) v = nan_safe(v);
    return j;
}

}  // namespace

std::vector<std::string> cmd_simulate(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    validate(cfg, false);
    Protocol p = build_protocol(to_protocol_config(cfg));
    auto r = simulate(cfg, p, jobs);
    std::string path = (fs::path(out_dir) / "trace.csv").string();
    write_file(path, trace_csv(cfg, r));
    return {path};
}

std::vector<std::string> cmd_sweep(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    validate(cfg, true);
    auto points = sweep_points(cfg);
    std::vector<SimResult> results(points.size());
    std::vector<SummaryRow> rows(points.size());
    std::vector<std::string> files(points.size());
    std::mutex io;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                results[i] = simulate(points[i].config, points[i].protocol, 1);
                rows[i] = fit_row(points[i].axis_value, results[i]);
                char name[32];
                std::snprintf(name, sizeof name, "point_%03zu.csv", i);
                files[i] = (fs::path(out_dir) / "points" / name).string();
                std::string text = trace_csv(points[i].config, results[i]);
                std::lock_guard lock(io);
                write_file(files[i], text);
            } catch (...) {
                std::lock_guard lock(io);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::string axis = sweep_axis_name(cfg.sweep->axis);
    CsvHeader h{"wmtrack sweep summary", canonical(cfg), {{"axis", axis}, {"points", std::to_string(points.size())}}};
    std::vector<std::vector<std::string>> table;
    json fits = json::array();
    for (auto& r : rows) {
        auto& f = r.fit;
        table.push_back({num(r.axis), num(f.params[kA0]), num(f.error(kA0)), num(f.params[kGamma]),
                         num(f.error(kGamma)), num(f.params[kF0]), num(f.error(kF0)), r.ok ? "1" : "0"});
        json cov = json::array();
        for (int a = 0; a < 4; ++a) {
            json rowj = json::array();
            for (int b = 0; b < 4; ++b) rowj.push_back(f.covariance(a, b));
            cov.push_back(rowj);
        }
        fits.push_back({{"axis", r.axis},
                        {"params", {f.params[0], f.params[1], f.params[2], f.params[3]}},
                        {"covariance", cov},
                        {"fit_ok", r.ok},
                        {"note", r.error}});
    }
    std::vector<std::string> written = files;
    std::string summary = (fs::path(out_dir) / "summary.csv").string();
    write_file(summary,
               render_csv(h, {"axis", "A0", "A0_err", "gamma_s", "gamma_err", "f0_hz", "f0_err", "fit_ok"}, table));
    written.push_back(summary);
    std::string fit_path = (fs::path(out_dir) / "summary_fits.json").string();
    json report = {{"config_sha1", git_sha1(canonical(cfg))},
                   {"parameter_order", {"A0", "gamma_s", "f0_hz", "phi0"}},
                   {"points", fits}};
    write_file(fit_path, nan_safe(report).dump(2) + "\n");
    written.push_back(fit_path);

    if (cfg.sweep->axis == SweepAxis::alpha) {
        std::vector<std::vector<std::string>> matrix;
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto spec = power_spectrum(TimeTrace{results[i].samples, results[i].t_s}, cfg.analysis.pad_factor);
            Band band = cfg.analysis.noise_band.value_or(Band{0.0, 0.5 / results[i].t_s});
            std::vector<double> norm(spec.power.size(), std::nan(""));
            try {
                norm = normalize_baseline(spec, band).power;
            } catch (const Error&) {
            }
            for (std::size_t k = 0; k < spec.freqs.size(); ++k)
                matrix.push_back({num(points[i].axis_value), num(spec.freqs[k]), num(norm[k])});
        }
        CsvHeader mh{"wmtrack alpha-sweep spectra", canonical(cfg), {{"pad_factor", std::to_string(cfg.analysis.pad_factor)}}};
        std::string path = (fs::path(out_dir) / "alpha_spectra.csv").string();
        write_file(path, render_csv(mh, {"axis", "freq_hz", "power_norm"}, matrix));
        written.push_back(path);
    }
    return written;
}

std::vector<std::string> cmd_analyze(const RunConfig& cfg, const std::string& trace_path, const std::string& out_dir) {
    const auto& a = cfg.analysis;
    std::vector<std::string> bad;
    if (a.pad_factor < 1) bad.push_back("analysis.pad_factor must be >= 1");
    if (a.max_peaks < 1) bad.push_back("analysis.max_peaks must be >= 1");
    if (!(a.threshold > 0.0)) bad.push_back("analysis.threshold must be positive");
    if (a.noise_band && !(a.noise_band->lo < a.noise_band->hi)) bad.push_back("analysis.noise_band_hz must satisfy lo < hi");
    if (!bad.empty()) throw ConfigError(bad);

    TraceFile t = read_trace(trace_path);
    double t_s = t.meta.at("t_s");
    double t0 = t.meta.count("t0") ? t.meta.at("t0") : 0.0;
    TimeTrace trace{t.signal, t_s, t0};
    Spectrum spec = power_spectrum(trace, a.pad_factor);
    std::optional<Spectrum> norm;
    if (a.normalize) norm = normalize_baseline(spec, a.noise_band.value_or(Band{0.0, 0.5 / t_s}));

    std::optional<FilterSpec> filter;
    if (a.unfold) {
        auto tau = t.meta.find("tau");
        auto tb = t.meta.find("t_beta");
        if (tau == t.meta.end() || tb == t.meta.end())
            throw FormatError("alias unfolding needs tau and t_beta metadata in the trace");
        filter = FilterSpec{tb->second, tau->second, t_s};
        filter->validate();
    }

    std::string stem = fs::path(trace_path).stem().string();
    std::string config = canonical(cfg);
    std::string source_sha = t.config.empty() ? "" : git_sha1(t.config);

    CsvHeader h{"wmtrack spectrum", config,
                {{"source_config_sha1", source_sha}, {"t_s", num(t_s)}, {"pad_factor", std::to_string(a.pad_factor)},
                 {"n_samples", std::to_string(t.signal.size())}}};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < spec.freqs.size(); ++i)
        rows.push_back({num(spec.freqs[i]), num(spec.power[i]), norm ? num(norm->power[i]) : ""});
    std::string spec_path = (fs::path(out_dir) / (stem + "_spectrum.csv")).string();
    write_file(spec_path, render_csv(h, {"freq_hz", "power", "power_norm"}, rows));

    json report;
    report["config_sha1"] = git_sha1(config);
    report["source_config_sha1"] = source_sha;
    report["t_s"] = t_s;
    report["n_samples"] = t.signal.size();
    try {
        report["sinusoid"] = fit_json(fit_decaying_sinusoid(trace), {"A0", "gamma_s", "f0_hz", "phi0"});
    } catch (const std::exception& e) {
        report["sinusoid"] = {{"error", kind_of(e)}, {"message", e.what()}};
    }
    LorentzOptions lo;
    lo.threshold = a.threshold;
    for (auto [key, variant] : {std::pair{"lorentzian", LorentzVariant::standard},
                                std::pair{"lorentzian_paper", LorentzVariant::paper}}) {
        try {
            auto f = fit_lorentzian(spec, variant, lo);
            json j = fit_json(f, {"S0", "hwhm_hz", "f0_hz", "S1"});
            j["decay_rate_s"] = lorentzian_decay_rate(f);
            report[key] = j;
        } catch (const std::exception& e) {
            report[key] = {{"error", kind_of(e)}, {"message", e.what()}};
        }
    }
    json peaks = json::array();
    double min_sep = 4.0 / (static_cast<double>(t.signal.size()) * t_s);
    auto found = find_peaks(spec, a.threshold, min_sep);
    if (found.size() > static_cast<std::size_t>(a.max_peaks)) found.resize(a.max_peaks);
    for (auto i : found) {
        json p = {{"freq_hz", spec.freqs[i]}, {"power", spec.power[i]}};
        if (norm) p["power_norm"] = norm->power[i];
        if (filter) p["unfolded_hz"] = unfold_alias(spec.freqs[i], *filter);
        peaks.push_back(p);
    }
    report["peaks"] = peaks;
    std::string fit_path = (fs::path(out_dir) / (stem + "_fit.json")).string();
    write_file(fit_path, nan_safe(report).dump(2) + "\n");
    return {spec_path, fit_path};
}

std::vector<std::string> cmd_filter(const RunConfig& cfg, const std::string& out_dir) {
    const auto& fc = cfg.filter;
    FilterSpec spec;
    if (fc.t_beta && fc.tau && fc.t_s) {
        spec = FilterSpec{*fc.t_beta, *fc.tau, *fc.t_s};
    } else {
        validate(cfg, false);
        Protocol p = build_protocol(to_protocol_config(cfg));
        spec = FilterSpec{fc.t_beta.value_or(p.weak_meas.t_beta), fc.tau.value_or(p.weak_meas.tau), fc.t_s.value_or(p.t_s)};
    }
    std::vector<std::string> bad;
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        bad = e.violations;
    }
    if (fc.points < 2) bad.push_back("filter.points must be >= 2");
    if (!bad.empty()) throw ConfigError(bad);

    double lo = fc.f_lo_hz.value_or(std::max(0.0, spec.f_c() - 4.0 / spec.t_beta));
    double hi = fc.f_hi_hz.value_or(spec.f_c() + 4.0 / spec.t_beta);
    if (!(lo >= 0.0 && lo < hi)) throw ConfigError({"filter band must satisfy 0 <= f_lo_hz < f_hi_hz"});

    CsvHeader h{"wmtrack filter function", canonical(cfg),
                {{"t_beta", num(spec.t_beta)},
                 {"tau", num(spec.tau)},
                 {"t_s", num(spec.t_s)},
                 {"f_c_hz", num(spec.f_c())},
                 {"inv_t_beta_hz", num(1.0 / spec.t_beta)},
                 {"nyquist_hz", num(spec.nyquist())},
                 {"fwhm_power_hz", num(filter_bandwidth(spec))},
                 {"fwhm_amplitude_hz", num(filter_bandwidth_amplitude(spec))}}};
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < fc.points; ++i) {
        double f = lo + (hi - lo) * i / (fc.points - 1);
        double w = filter_function(f, spec);
        rows.push_back({num(f), num(w), num(w * w)});
    }
    std::string path = (fs::path(out_dir) / "filter.csv").string();
    write_file(path, render_csv(h, {"freq_hz", "w", "w_sq"}, rows));
    return {path};
}

}  // namespace wmtrack::cli
