#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/io.hpp"
#include "wmtrack/errors.hpp"

using namespace wmtrack;
using namespace wmtrack::cli;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("wmtrack_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json minimal_json() {
    return json::parse(R"({
        "schema_version": 1,
        "system": {"b0_t": 0.2, "nuclei": [{"a_par_hz": 0.0, "a_perp_hz": 147000.0}]},
        "protocol": {"preset": "weak-trace", "n_pulses": 2, "t_beta_s": 1e-6, "t_s": 5.3e-6, "n_samples": 128},
        "engine": {"coupling": "effective", "dephasing_rate_per_s": 2000.0}
    })");
}

std::vector<std::string> violations_of(const json& j) {
    try {
        auto c = parse_config(j);
        validate(c, c.sweep.has_value());
    } catch (const ConfigError& e) {
        return e.violations;
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& what) {
    for (auto& s : v)
        if (s.find(what) != std::string::npos) return true;
    return false;
}

std::vector<std::string> column(const std::string& csv, int col) {
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> out;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.push_back("");
        out.push_back(f.at(col));
    }
    return out;
}

std::string meta_value(const std::string& csv, const std::string& key) {
    std::istringstream in(csv);
    std::string line, tag = "# " + key + " = ";
    while (std::getline(in, line))
        if (line.rfind(tag, 0) == 0) return line.substr(tag.size());
    return "";
}

int run(const std::string& args, const std::string& prefix = "") {
    int status = std::system((prefix + WMTRACK_BIN + " " + args).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing is strict and reports every problem at once") {
    auto j = minimal_json();
    j["bogus"] = 1;
    j["protocol"]["tua_s"] = 1e-7;
    j["engine"]["coupling"] = "magic";
    j["system"]["b0_t"] = "0.2";
    auto v = violations_of(j);
    CHECK(v.size() == 4);
    CHECK(mentions(v, "unknown key bogus"));
    CHECK(mentions(v, "unknown key protocol.tua_s"));
    CHECK(mentions(v, "engine.coupling"));
    CHECK(mentions(v, "system.b0_t must be a number"));

    auto k = minimal_json();
    k.erase("schema_version");
    CHECK(mentions(violations_of(k), "schema_version is required"));
    k["schema_version"] = 2;
    CHECK(mentions(violations_of(k), "unsupported schema_version"));

    auto bad = minimal_json();
    bad["protocol"]["n_samples"] = 0;
    bad["system"]["nuclei"][0]["a_perp_hz"] = -1.0;
    bad["engine"]["runs"] = 0;
    bad["sweep"] = {{"axis", "beta"}, {"values", json::array()}};
    auto pv = violations_of(bad);
    CHECK(pv.size() >= 4);
    CHECK(mentions(pv, "n_samples"));
    CHECK(mentions(pv, "a_perp"));
    CHECK(mentions(pv, "engine.runs"));
    CHECK(mentions(pv, "sweep.values must not be empty"));

    auto many = minimal_json();
    for (int i = 0; i < 3; ++i) many["system"]["nuclei"].push_back({{"a_par_hz", 1e3}, {"a_perp_hz", 1e3}});
    CHECK(mentions(violations_of(many), "at most 3 nuclei"));
}

TEST_CASE("config survives a write and read cycle exactly") {
    auto j = minimal_json();
    j["sweep"] = {{"axis", "t_beta"}, {"values", {3.9e-6, 0.1 + 0.2, 1.0 / 3.0 * 1e-6}}};
    j["noise"] = {{"drift", {{"amplitude_t", 1e-7}, {"correlation_time_s", 0.3}}}};
    j["analysis"] = {{"noise_band_hz", {1e3, 2e4}}, {"unfold", true}};
    j["protocol"]["last"] = "-x";
    j["system"]["nuclei"][0]["a_par_hz"] = 0.1 + 0.7;
    RunConfig c = parse_config(j);
    RunConfig again = parse_config(json::parse(canonical(c)));
    CHECK(canonical(again) == canonical(c));
    CHECK(again.sweep->values[1] == 0.1 + 0.2);
    CHECK(again.protocol.last == MeterAxis::minus_x);
    CHECK(to_system(again).nuclei[0].a_par == to_system(c).nuclei[0].a_par);
    c.output_dir = "/somewhere";
    CHECK(canonical(c) == canonical(again));
}

TEST_CASE("output directory precedence") {
    RunConfig c;
    ::unsetenv(kOutDirEnv);
    CHECK(resolve_out_dir(c, std::nullopt) == "out");
    c.output_dir = "from_config";
    CHECK(resolve_out_dir(c, std::nullopt) == "from_config");
    ::setenv(kOutDirEnv, "from_env", 1);
    CHECK(resolve_out_dir(c, std::nullopt) == "from_env");
    CHECK(resolve_out_dir(c, std::string("from_flag")) == "from_flag");
    ::unsetenv(kOutDirEnv);
}

TEST_CASE("helpers") {
    // known value of `printf 'hello\n' | git hash-object --stdin`
    CHECK(git_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0})
        CHECK(std::stod(num(v)) == v);
    CHECK(num(std::nan("")) == "nan");
    CHECK_THROWS_AS(parse_trace("index,time_s,signal\n0,0,1\n"), FormatError);
    CHECK_THROWS_AS(parse_trace("# t_s = 1e-6\nindex,time_s,signal\n0,0,1\n2,0,1\n"), FormatError);
    CHECK_THROWS_AS(parse_trace("# t_s = 1e-6\nindex,time,signal\n0,0,1\n"), FormatError);
    CHECK_THROWS_AS(parse_trace("# t_s = 1e-6\nindex,time_s,signal\n0,0,abc\n"), FormatError);
    CHECK_THROWS_AS(parse_trace("# t_s = 1e-6\nindex,time_s,signal\n"), FormatError);
    auto t = parse_trace("# t_s = 2e-6\n# t0 = 2e-6\nindex,time_s,signal,counts\n0,2e-6,0.5,3\n1,4e-6,-0.5,\n");
    CHECK(t.signal == std::vector<double>{0.5, -0.5});
    CHECK(t.counts[0] == 3.0);
    CHECK(!t.counts[1]);
    CHECK(t.meta.at("t0") == 2e-6);
}

TEST_CASE("simulate writes n rows and is reproducible") {
    auto dir = scratch("simulate");
    RunConfig c = parse_config(minimal_json());
    auto files = cmd_simulate(c, (dir / "a").string());
    REQUIRE(files.size() == 1);
    std::string text = slurp(files[0]);
    CHECK(column(text, 0).size() == 128);
    CHECK(column(text, 0).back() == "127");
    CHECK(meta_value(text, "t_s") == "5.3e-06");
    CHECK(text.find("# config_sha1: " + git_sha1(canonical(c))) != std::string::npos);

    // stochastic records: same seed twice, and a rerun from the embedded config
    auto j = minimal_json();
    j["engine"]["record"] = "trajectory";
    j["engine"]["photons"] = true;
    j["engine"]["reinit_kicks"] = true;
    j["engine"]["runs"] = 3;
    j["seed"] = 99;
    RunConfig s = parse_config(j);
    std::string one = slurp(cmd_simulate(s, (dir / "b").string())[0]);
    std::string two = slurp(cmd_simulate(s, (dir / "c").string(), 3)[0]);
    CHECK(one == two);
    CHECK(column(one, 3).front() != "");
    RunConfig embedded = load_config((dir / "b" / "trace.csv").string());
    CHECK(slurp(cmd_simulate(embedded, (dir / "d").string())[0]) == one);
    s.seed = 100;
    CHECK(slurp(cmd_simulate(s, (dir / "e").string())[0]) != one);
}

TEST_CASE("a strong measurement collapses the trace") {
    auto dir = scratch("strong");
    auto j = minimal_json();
    j["system"]["b0_t"] = 0.20344509;
    j["protocol"] = {{"preset", "weak-trace"}, {"n_pulses", 2}, {"t_s", 7e-6}, {"n_samples", 64}};
    double g = 2.0 * 147000.0;
    j["protocol"]["t_beta_s"] = 66.3 * pi / 180.0 / g;
    j["engine"]["dephasing_rate_per_s"] = 1.0 / 134e-6;
    RunConfig c = parse_config(j);
    auto files = cmd_simulate(c, dir.string());
    auto t = read_trace(files[0]);
    auto fit = fit_decaying_sinusoid(TimeTrace{t.signal, t.meta.at("t_s"), t.meta.at("t0")});
    CHECK(fit.params[kGamma] > 5.0 / 134e-6);
    CHECK(fit.params[kA0] == Approx(0.5 * std::sin(66.3 * pi / 180.0)).epsilon(1e-3));
}

TEST_CASE("sweep summary equals the spectra API on the written traces") {
    auto dir = scratch("sweep");
    auto j = minimal_json();
    j["system"]["b0_t"] = 0.20344509;
    j["protocol"]["t_s"] = 7e-6;
    j["protocol"].erase("t_beta_s");
    j["sweep"] = {{"axis", "beta"}, {"values", {0.3, 0.05, 0.6, 0.15}}};
    RunConfig c = parse_config(j);
    auto files = cmd_sweep(c, (dir / "a").string(), 1);
    std::string summary = slurp(dir / "a" / "summary.csv");
    auto axis = column(summary, 0);
    REQUIRE(axis.size() == 4);
    CHECK(axis == std::vector<std::string>{"0.05", "0.15", "0.3", "0.6"});
    auto a0 = column(summary, 1), gam = column(summary, 3), f0 = column(summary, 5), f0e = column(summary, 6);
    for (int i = 0; i < 4; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "point_%03d.csv", i);
        auto t = read_trace((dir / "a" / "points" / name).string());
        auto fit = fit_decaying_sinusoid(TimeTrace{t.signal, t.meta.at("t_s"), t.meta.at("t0")});
        CHECK(a0[i] == num(fit.params[kA0]));
        CHECK(gam[i] == num(fit.params[kGamma]));
        CHECK(f0[i] == num(fit.params[kF0]));
        CHECK(f0e[i] == num(fit.error(kF0)));
        CHECK(column(summary, 7)[i] == "1");
        CHECK(fit.params[kA0] == Approx(0.5 * std::sin(std::stod(axis[i]))).epsilon(1e-3));
    }
    cmd_sweep(c, (dir / "b").string(), 4);
    CHECK(slurp(dir / "b" / "summary.csv") == summary);
    CHECK(slurp(dir / "b" / "points" / "point_002.csv") == slurp(dir / "a" / "points" / "point_002.csv"));

    // one point is the same experiment as simulate
    auto single = j;
    single["sweep"]["values"] = {0.3};
    cmd_sweep(parse_config(single), (dir / "c").string(), 1);
    RunConfig point = load_config((dir / "c" / "points" / "point_000.csv").string());
    CHECK(!point.sweep);
    auto sim = cmd_simulate(point, (dir / "d").string());
    CHECK(slurp(sim[0]) == slurp(dir / "c" / "points" / "point_000.csv"));
    auto an = cmd_analyze(point, sim[0], (dir / "d").string());
    auto report = json::parse(slurp(an[1]));
    CHECK(num(report["sinusoid"]["A0"].get<double>()) == column(slurp(dir / "c" / "summary.csv"), 1)[0]);
}

TEST_CASE("alpha sweep emits the normalised spectra matrix") {
    auto dir = scratch("alpha");
    auto j = minimal_json();
    j["protocol"] = {{"preset", "alpha-sweep"}, {"n_pulses", 2}, {"t_beta_s", 0.5e-6}, {"n_samples", 64},
                     {"t_s_start", 3.56e-6}, {"t_s_stop", 3.6e-6}, {"t_s_step", 1e-8}};
    j["sweep"] = {{"axis", "alpha"}};
    RunConfig c = parse_config(j);
    auto files = cmd_sweep(c, dir.string(), 2);
    std::string matrix = slurp(dir / "alpha_spectra.csv");
    auto ax = column(matrix, 0);
    CHECK(ax.size() == 5u * 129u);
    CHECK(std::stod(ax.front()) == Approx(to_system(c).larmor() * 3.56e-6));
    CHECK(column(slurp(dir / "summary.csv"), 0).size() == 5);
}

TEST_CASE("analyze") {
    auto dir = scratch("analyze");
    RunConfig c = parse_config(minimal_json());
    auto trace = cmd_simulate(c, dir.string())[0];
    auto first = cmd_analyze(c, trace, (dir / "a").string());
    auto second = cmd_analyze(c, trace, (dir / "b").string());
    CHECK(slurp(first[0]) == slurp(second[0]));
    CHECK(slurp(first[1]) == slurp(second[1]));
    auto spec = slurp(first[0]);
    CHECK(meta_value(spec, "source_config_sha1") == git_sha1(canonical(c)));

    // two tones of different strength, written by hand
    double ts = 4e-6;
    std::string text = "# t_s = 4e-06\nindex,time_s,signal\n";
    for (int k = 0; k < 512; ++k) {
        double t = k * ts;
        double v = 0.3 * std::exp(-300.0 * t) * std::sin(2.0 * pi * 31e3 * t) +
                   0.1 * std::exp(-300.0 * t) * std::sin(2.0 * pi * 87e3 * t + 1.0);
        text += std::to_string(k) + "," + num(t) + "," + num(v) + "\n";
    }
    write_file((dir / "two.csv").string(), text);
    RunConfig a;
    a.analysis.max_peaks = 2;
    auto out = cmd_analyze(a, (dir / "two.csv").string(), (dir / "c").string());
    auto report = json::parse(slurp(out[1]));
    REQUIRE(report["peaks"].size() == 2);
    CHECK(report["peaks"][0]["freq_hz"].get<double>() == Approx(31e3).epsilon(0.01));
    CHECK(report["peaks"][1]["freq_hz"].get<double>() == Approx(87e3).epsilon(0.01));
    CHECK(report["peaks"][0]["power"].get<double>() > report["peaks"][1]["power"].get<double>());

    write_file((dir / "broken.csv").string(), "# t_s = 1e-6\nindex,time_s,signal\n0,0,1\n1,1e-6\n");
    CHECK_THROWS_AS(cmd_analyze(a, (dir / "broken.csv").string(), dir.string()), FormatError);
    a.analysis.unfold = true;
    CHECK_THROWS_AS(cmd_analyze(a, (dir / "two.csv").string(), dir.string()), FormatError);
}

TEST_CASE("analyze unfolds an undersampled decoupling trace") {
    auto dir = scratch("unfold");
    auto j = json::parse(R"({
        "schema_version": 1,
        "system": {"b0_t": 0.20123, "nuclei": [{"a_par_hz": 0.0, "a_perp_hz": 5000.0}]},
        "protocol": {"preset": "bath-spectrum", "tau_s": 1.16e-7, "n_pulses": 8, "t_s": 5.68e-6, "n_samples": 1520},
        "analysis": {"unfold": true, "max_peaks": 1}
    })");
    RunConfig c = parse_config(j);
    double f_l = to_system(c).larmor() / (2.0 * pi);
    auto trace = cmd_simulate(c, dir.string())[0];
    auto report = json::parse(slurp(cmd_analyze(c, trace, dir.string())[1]));
    REQUIRE(report["peaks"].size() == 1);
    double bin = 1.0 / (1520 * 5.68e-6);
    CHECK(std::abs(report["peaks"][0]["unfolded_hz"].get<double>() - f_l) < bin);
    CHECK(report["peaks"][0]["unfolded_hz"].get<double>() == Approx(2.1549e6).epsilon(1e-3));
}

TEST_CASE("filter command") {
    auto dir = scratch("filter");
    RunConfig c;
    c.filter.t_beta = 1.856e-6;
    c.filter.tau = 1.16e-7;
    c.filter.t_s = 5.68e-6;
    c.filter.points = 4001;
    std::string text = slurp(cmd_filter(c, (dir / "a").string())[0]);
    double fc = std::stod(meta_value(text, "f_c_hz"));
    CHECK(fc == Approx(2.154e6).epsilon(1e-3));
    CHECK(std::stod(meta_value(text, "inv_t_beta_hz")) == Approx(1.0 / 1.856e-6));
    CHECK(std::stod(meta_value(text, "nyquist_hz")) == Approx(0.5 / 5.68e-6));

    // scan the emitted samples for the half-power width
    auto f = column(text, 0), w2 = column(text, 2);
    double peak = 0.0;
    for (auto& s : w2) peak = std::max(peak, std::stod(s));
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::stod(w2[i]) >= 0.5 * peak && std::abs(std::stod(f[i]) - fc) < 1.0 / 1.856e-6) {
            if (lo == 0) lo = std::stod(f[i]);
            hi = std::stod(f[i]);
        }
    double step = std::stod(f[1]) - std::stod(f[0]);
    CHECK(std::abs((hi - lo) - std::stod(meta_value(text, "fwhm_power_hz"))) < 2.0 * step);

    c.filter.tau = 2.32e-7;
    std::string doubled = slurp(cmd_filter(c, (dir / "b").string())[0]);
    CHECK(std::stod(meta_value(doubled, "f_c_hz")) == Approx(fc / 2.0));
    c.filter.tau = -1.0;
    CHECK_THROWS_AS(cmd_filter(c, (dir / "c").string()), ConfigError);
}

TEST_CASE("binary exit codes, error format and output directory override") {
    auto dir = scratch("binary");
    std::ofstream(dir / "good.json") << minimal_json().dump();
    auto bad = minimal_json();
    bad["extra"] = true;
    std::ofstream(dir / "bad.json") << bad.dump();

    CHECK(run("simulate --config " + (dir / "good.json").string() + " --out " + (dir / "o1").string() + " >/dev/null") == 0);
    CHECK(fs::exists(dir / "o1" / "trace.csv"));
    CHECK(run("simulate --config " + (dir / "bad.json").string() + " 2>" + (dir / "err.txt").string()) == 1);
    auto err = json::parse(slurp(dir / "err.txt"));
    CHECK(err["error"]["kind"] == "ConfigError");
    CHECK(err["error"]["violations"][0] == "unknown key extra");
    CHECK(run("simulate 2>/dev/null") == 1);
    CHECK(run("frobnicate 2>/dev/null") == 1);
    CHECK(run("analyze " + (dir / "good.json").string() + " --out " + (dir / "o2").string() + " 2>/dev/null") == 1);
    CHECK(run("simulate --config " + (dir / "good.json").string() + " --out /proc/wmtrack_no 2>/dev/null") == 2);

    // flag beats environment beats config
    auto cfg = minimal_json();
    cfg["output_dir"] = (dir / "from_config").string();
    std::ofstream(dir / "dir.json") << cfg.dump();
    std::string env = "WMTRACK_OUT_DIR=" + (dir / "from_env").string() + " ";
    CHECK(run("simulate --config " + (dir / "dir.json").string() + " >/dev/null", "env -u WMTRACK_OUT_DIR ") == 0);
    CHECK(fs::exists(dir / "from_config" / "trace.csv"));
    CHECK(run("simulate --config " + (dir / "dir.json").string() + " >/dev/null", env) == 0);
    CHECK(fs::exists(dir / "from_env" / "trace.csv"));
    CHECK(run("simulate --config " + (dir / "dir.json").string() + " --out " + (dir / "from_flag").string() + " >/dev/null", env) == 0);
    CHECK(fs::exists(dir / "from_flag" / "trace.csv"));
    CHECK(slurp(dir / "from_flag" / "trace.csv") == slurp(dir / "from_env" / "trace.csv"));
}
