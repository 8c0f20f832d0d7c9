#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wmtrack/errors.hpp"

namespace wmtrack::cli {

namespace {

class Fields {
public:
    Fields(const json& j, std::string path, std::vector<std::string>& bad, std::set<std::string> allowed)
        : j_(j), path_(std::move(path)), bad_(bad) {
        if (!j.is_object()) {
            bad_.push_back(where("") + " must be an object");
            ok_ = false;
            return;
        }
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!allowed.count(it.key())) bad_.push_back("unknown key " + where(it.key()));
    }

    void get(const std::string& key, double& out) {
        if (auto* v = find(key)) {
            if (v->is_number()) out = v->get<double>();
            else type_error(key, "a number");
        }
    }
    void get(const std::string& key, int& out) {
        if (auto* v = find(key)) {
            if (v->is_number_integer()) out = v->get<int>();
            else type_error(key, "an integer");
        }
    }
    void get(const std::string& key, std::uint64_t& out) {
        if (auto* v = find(key)) {
            if (v->is_number_integer() && (v->is_number_unsigned() || v->get<std::int64_t>() >= 0))
                out = v->get<std::uint64_t>();
            else type_error(key, "a non-negative integer");
        }
    }
    void get(const std::string& key, bool& out) {
        if (auto* v = find(key)) {
            if (v->is_boolean()) out = v->get<bool>();
            else type_error(key, "a boolean");
        }
    }
    void get(const std::string& key, std::string& out) {
        if (auto* v = find(key)) {
            if (v->is_string()) out = v->get<std::string>();
            else type_error(key, "a string");
        }
    }
    template <class T>
    void get(const std::string& key, std::optional<T>& out) {
        if (!find(key)) return;
        T v{};
        std::size_t before = bad_.size();
        get(key, v);
        if (bad_.size() == before) out = v;
    }
    void get(const std::string& key, std::vector<double>& out) {
        auto* v = find(key);
        if (!v) return;
        if (!v->is_array()) return type_error(key, "an array of numbers");
        out.clear();
        for (auto& x : *v) {
            if (!x.is_number()) return type_error(key, "an array of numbers");
            out.push_back(x.get<double>());
        }
    }

    const json* find(const std::string& key) const {
        if (!ok_) return nullptr;
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return nullptr;
        return &*it;
    }
    std::string where(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "config" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    void type_error(const std::string& key, const char* what) { bad_.push_back(where(key) + " must be " + what); }

    const json& j_;
    std::string path_;
    std::vector<std::string>& bad_;
    bool ok_ = true;
};

template <class E>
void get_enum(Fields& f, const std::string& key, E& out, std::vector<std::string>& bad,
              const std::vector<std::pair<std::string, E>>& names) {
    std::string s;
    if (!f.find(key)) return;
    std::size_t before = bad.size();
    f.get(key, s);
    if (bad.size() != before) return;
    for (auto& [n, e] : names)
        if (n == s) {
            out = e;
            return;
        }
    std::string list;
    for (auto& [n, e] : names) list += (list.empty() ? "" : ", ") + n;
    bad.push_back(f.where(key) + ": unknown value \"" + s + "\" (expected " + list + ")");
}

const std::vector<std::pair<std::string, MeterAxis>> kAxes = {
    {"x", MeterAxis::x}, {"y", MeterAxis::y}, {"-x", MeterAxis::minus_x}, {"-y", MeterAxis::minus_y}};
const std::vector<std::pair<std::string, PulseCycling>> kCycling = {{"cpmg", PulseCycling::cpmg},
                                                                    {"xy8", PulseCycling::xy8}};
const std::vector<std::pair<std::string, PolarizationKind>> kPol = {
    {"none", PolarizationKind::none}, {"ideal", PolarizationKind::ideal}, {"repetitive", PolarizationKind::repetitive}};
const std::vector<std::pair<std::string, Coupling>> kCoupling = {{"cpmg", Coupling::cpmg},
                                                                 {"effective", Coupling::effective}};
const std::vector<std::pair<std::string, RecordMode>> kRecord = {{"ensemble", RecordMode::ensemble},
                                                                 {"trajectory", RecordMode::trajectory}};
const std::vector<std::pair<std::string, SweepAxis>> kSweep = {{"beta", SweepAxis::beta},
                                                               {"t_s", SweepAxis::t_s},
                                                               {"t_beta", SweepAxis::t_beta},
                                                               {"alpha", SweepAxis::alpha},
                                                               {"polarization", SweepAxis::polarization}};
const std::vector<std::pair<std::string, std::string>> kEngines = {{"dm", "dm"}, {"analytic", "analytic"}};
const std::vector<std::pair<std::string, std::string>> kPresets = {{"weak-trace", "weak-trace"},
                                                                   {"alpha-sweep", "alpha-sweep"},
                                                                   {"bath-spectrum", "bath-spectrum"},
                                                                   {"ramsey", "ramsey"},
                                                                   {"dd-sweep", "dd-sweep"}};

template <class E>
std::string name_of(E e, const std::vector<std::pair<std::string, E>>& names) {
    for (auto& [n, v] : names)
        if (v == e) return n;
    return "?";
}

void parse_system(const json& j, SystemConfig& s, std::vector<std::string>& bad) {
    Fields f(j, "system", bad, {"b0_t", "gamma_n", "nuclei"});
    f.get("b0_t", s.b0_t);
    f.get("gamma_n", s.gamma_n);
    if (auto* n = f.find("nuclei")) {
        if (!n->is_array()) {
            bad.push_back("system.nuclei must be an array");
            return;
        }
        for (std::size_t i = 0; i < n->size(); ++i) {
            NucleusConfig nc;
            Fields g((*n)[i], "system.nuclei[" + std::to_string(i) + "]", bad, {"a_par_hz", "a_perp_hz"});
            g.get("a_par_hz", nc.a_par_hz);
            g.get("a_perp_hz", nc.a_perp_hz);
            s.nuclei.push_back(nc);
        }
    }
}

void parse_protocol(const json& j, ProtocolConfig& p, std::vector<std::string>& bad) {
    Fields f(j, "protocol", bad,
             {"preset", "tau_s", "n_pulses", "t_beta_s", "t_s", "n_samples", "mid_pi", "readout_overhead_s",
              "init_rotation", "first", "last", "cycling", "polarization", "t_s_start", "t_s_stop", "t_s_step"});
    get_enum(f, "preset", p.preset, bad, kPresets);
    f.get("tau_s", p.tau);
    f.get("n_pulses", p.n_pulses);
    f.get("t_beta_s", p.t_beta);
    f.get("t_s", p.t_s);
    f.get("n_samples", p.n_samples);
    f.get("mid_pi", p.mid_pi);
    f.get("readout_overhead_s", p.readout_overhead);
    f.get("init_rotation", p.init_rotation);
    get_enum(f, "first", p.first, bad, kAxes);
    if (f.find("last")) {
        MeterAxis a = MeterAxis::y;
        std::size_t before = bad.size();
        get_enum(f, "last", a, bad, kAxes);
        if (bad.size() == before) p.last = a;
    }
    get_enum(f, "cycling", p.cycling, bad, kCycling);
    f.get("t_s_start", p.t_s_start);
    f.get("t_s_stop", p.t_s_stop);
    f.get("t_s_step", p.t_s_step);
    if (auto* pol = f.find("polarization")) {
        Fields g(*pol, "protocol.polarization", bad, {"kind", "p", "reps", "partial_angle_rad", "contact_time_s"});
        get_enum(g, "kind", p.polarization.kind, bad, kPol);
        g.get("p", p.polarization.p);
        g.get("reps", p.polarization.reps);
        g.get("partial_angle_rad", p.polarization.partial_angle);
        g.get("contact_time_s", p.polarization.contact_time);
    }
}

void parse_engine(const json& j, EngineConfig& e, std::vector<std::string>& bad) {
    Fields f(j, "engine", bad,
             {"kind", "coupling", "record", "dephasing_rate_per_s", "runs", "reinit_kicks", "photons",
              "readout_repetitions", "check_invariants"});
    get_enum(f, "kind", e.kind, bad, kEngines);
    get_enum(f, "coupling", e.coupling, bad, kCoupling);
    get_enum(f, "record", e.record, bad, kRecord);
    f.get("dephasing_rate_per_s", e.dephasing_rate);
    f.get("runs", e.runs);
    f.get("reinit_kicks", e.reinit_kicks);
    f.get("photons", e.photons);
    f.get("readout_repetitions", e.readout_repetitions);
    f.get("check_invariants", e.check_invariants);
}

void parse_noise(const json& j, NoiseConfig& n, std::vector<std::string>& bad) {
    Fields f(j, "noise", bad, {"drift", "readout"});
    if (auto* d = f.find("drift")) {
        DriftModel m;
        Fields g(*d, "noise.drift", bad, {"amplitude_t", "correlation_time_s"});
        g.get("amplitude_t", m.amplitude);
        g.get("correlation_time_s", m.correlation_time);
        n.drift = m;
    }
    if (auto* r = f.find("readout")) {
        Fields g(*r, "noise.readout", bad, {"epsilon", "c0", "t_readout_s"});
        g.get("epsilon", n.readout.epsilon);
        g.get("c0", n.readout.c0);
        g.get("t_readout_s", n.readout.t_readout);
    }
}

void parse_band(Fields& f, const std::string& key, std::optional<Band>& out, std::vector<std::string>& bad) {
    std::vector<double> v;
    if (!f.find(key)) return;
    std::size_t before = bad.size();
    f.get(key, v);
    if (bad.size() != before) return;
    if (v.size() != 2) {
        bad.push_back(f.where(key) + " must hold two numbers [lo, hi]");
        return;
    }
    out = Band{v[0], v[1]};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot read config file " + path});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string sweep_axis_name(SweepAxis a) { return name_of(a, kSweep); }

RunConfig parse_config(const json& j) {
    std::vector<std::string> bad;
    RunConfig c;
    Fields f(j, "", bad,
             {"schema_version", "system", "protocol", "engine", "noise", "sweep", "analysis", "filter", "seed",
              "output_dir"});
    if (!j.is_object()) throw ConfigError(bad);
    if (!f.find("schema_version")) {
        bad.push_back("schema_version is required");
    } else {
        int v = 0;
        f.get("schema_version", v);
        if (v != kSchemaVersion) bad.push_back("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
    if (auto* s = f.find("system")) parse_system(*s, c.system, bad);
    if (auto* p = f.find("protocol")) parse_protocol(*p, c.protocol, bad);
    if (auto* e = f.find("engine")) parse_engine(*e, c.engine, bad);
    if (auto* n = f.find("noise")) parse_noise(*n, c.noise, bad);
    if (auto* s = f.find("sweep")) {
        SweepConfig sw;
        Fields g(*s, "sweep", bad, {"axis", "values"});
        if (!g.find("axis")) bad.push_back("sweep.axis is required");
        get_enum(g, "axis", sw.axis, bad, kSweep);
        g.get("values", sw.values);
        c.sweep = sw;
    }
    if (auto* a = f.find("analysis")) {
        Fields g(*a, "analysis", bad, {"pad_factor", "threshold", "normalize", "noise_band_hz", "unfold", "max_peaks"});
        g.get("pad_factor", c.analysis.pad_factor);
        g.get("threshold", c.analysis.threshold);
        g.get("normalize", c.analysis.normalize);
        parse_band(g, "noise_band_hz", c.analysis.noise_band, bad);
        g.get("unfold", c.analysis.unfold);
        g.get("max_peaks", c.analysis.max_peaks);
    }
    if (auto* fl = f.find("filter")) {
        Fields g(*fl, "filter", bad, {"t_beta_s", "tau_s", "t_s", "f_lo_hz", "f_hi_hz", "points"});
        g.get("t_beta_s", c.filter.t_beta);
        g.get("tau_s", c.filter.tau);
        g.get("t_s", c.filter.t_s);
        g.get("f_lo_hz", c.filter.f_lo_hz);
        g.get("f_hi_hz", c.filter.f_hi_hz);
        g.get("points", c.filter.points);
    }
    f.get("seed", c.seed);
    f.get("output_dir", c.output_dir);
    if (!bad.empty()) throw ConfigError(bad);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::string text = read_file(path);
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] != '{') {
        // an output file: pick up its embedded config line
        std::istringstream in(text);
        std::string line;
        const std::string tag = "# config: ";
        while (std::getline(in, line)) {
            if (line.rfind(tag, 0) == 0) {
                text = line.substr(tag.size());
                first = 0;
                break;
            }
            if (line.empty() || line[0] != '#') break;
        }
        if (first != 0) throw ConfigError({path + " holds neither JSON nor an embedded config line"});
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({path + ": " + e.what()});
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json nuclei = json::array();
    for (auto& n : c.system.nuclei) nuclei.push_back({{"a_par_hz", n.a_par_hz}, {"a_perp_hz", n.a_perp_hz}});
    j["system"] = {{"b0_t", c.system.b0_t}, {"gamma_n", c.system.gamma_n}, {"nuclei", nuclei}};

    const auto& p = c.protocol;
    json pj = {{"preset", p.preset},
               {"readout_overhead_s", p.readout_overhead},
               {"init_rotation", p.init_rotation},
               {"first", name_of(p.first, kAxes)},
               {"cycling", name_of(p.cycling, kCycling)},
               {"t_s_start", p.t_s_start},
               {"t_s_stop", p.t_s_stop},
               {"t_s_step", p.t_s_step},
               {"polarization",
                {{"kind", name_of(p.polarization.kind, kPol)},
                 {"p", p.polarization.p},
                 {"reps", p.polarization.reps},
                 {"partial_angle_rad", p.polarization.partial_angle},
                 {"contact_time_s", p.polarization.contact_time}}}};
    if (p.tau) pj["tau_s"] = *p.tau;
    if (p.n_pulses) pj["n_pulses"] = *p.n_pulses;
    if (p.t_beta) pj["t_beta_s"] = *p.t_beta;
    if (p.t_s) pj["t_s"] = *p.t_s;
    if (p.n_samples) pj["n_samples"] = *p.n_samples;
    if (p.mid_pi) pj["mid_pi"] = *p.mid_pi;
    if (p.last) pj["last"] = name_of(*p.last, kAxes);
    j["protocol"] = pj;

    const auto& e = c.engine;
    j["engine"] = {{"kind", e.kind},
                   {"coupling", name_of(e.coupling, kCoupling)},
                   {"record", name_of(e.record, kRecord)},
                   {"dephasing_rate_per_s", e.dephasing_rate},
                   {"runs", e.runs},
                   {"reinit_kicks", e.reinit_kicks},
                   {"photons", e.photons},
                   {"readout_repetitions", e.readout_repetitions},
                   {"check_invariants", e.check_invariants}};

    json nj = {{"readout",
                {{"epsilon", c.noise.readout.epsilon},
                 {"c0", c.noise.readout.c0},
                 {"t_readout_s", c.noise.readout.t_readout}}}};
    if (c.noise.drift)
        nj["drift"] = {{"amplitude_t", c.noise.drift->amplitude},
                       {"correlation_time_s", c.noise.drift->correlation_time}};
    j["noise"] = nj;

    if (c.sweep) j["sweep"] = {{"axis", sweep_axis_name(c.sweep->axis)}, {"values", c.sweep->values}};

    json aj = {{"pad_factor", c.analysis.pad_factor},
               {"threshold", c.analysis.threshold},
               {"normalize", c.analysis.normalize},
               {"unfold", c.analysis.unfold},
               {"max_peaks", c.analysis.max_peaks}};
    if (c.analysis.noise_band) aj["noise_band_hz"] = {c.analysis.noise_band->lo, c.analysis.noise_band->hi};
    j["analysis"] = aj;

    json fj = {{"points", c.filter.points}};
    if (c.filter.t_beta) fj["t_beta_s"] = *c.filter.t_beta;
    if (c.filter.tau) fj["tau_s"] = *c.filter.tau;
    if (c.filter.t_s) fj["t_s"] = *c.filter.t_s;
    if (c.filter.f_lo_hz) fj["f_lo_hz"] = *c.filter.f_lo_hz;
    if (c.filter.f_hi_hz) fj["f_hi_hz"] = *c.filter.f_hi_hz;
    j["filter"] = fj;

    j["seed"] = c.seed;
    if (c.output_dir) j["output_dir"] = *c.output_dir;
    return j;
}

std::string canonical(const RunConfig& cfg) {
    RunConfig c = cfg;
    c.output_dir.reset();
    return to_json(c).dump();
}

SpinSystem to_system(const RunConfig& cfg) {
    SpinSystem s;
    s.b0 = cfg.system.b0_t;
    s.gamma_n = cfg.system.gamma_n;
    for (auto& n : cfg.system.nuclei) s.nuclei.push_back({hz_to_rad(n.a_par_hz), hz_to_rad(n.a_perp_hz)});
    return s;
}

EngineOptions to_engine_options(const RunConfig& cfg) {
    EngineOptions o;
    o.coupling = cfg.engine.coupling;
    o.mode = cfg.engine.record;
    o.dephasing_rate = cfg.engine.dephasing_rate;
    o.drift = cfg.noise.drift;
    o.reinit_kicks = cfg.engine.reinit_kicks;
    o.kick_t_readout = cfg.noise.readout.t_readout;
    o.photons = cfg.engine.photons;
    o.readout = cfg.noise.readout;
    o.readout_repetitions = cfg.engine.readout_repetitions;
    o.check_invariants = cfg.engine.check_invariants;
    return o;
}

ProtocolConfig to_protocol_config(const RunConfig& cfg) {
    ProtocolConfig p = cfg.protocol;
    p.gamma_n = cfg.system.gamma_n;
    p.b0 = cfg.system.b0_t;
    p.a_par = cfg.system.nuclei.empty() ? 0.0 : hz_to_rad(cfg.system.nuclei[0].a_par_hz);
    return p;
}

namespace {

void collect(std::vector<std::string>& bad, const std::string& prefix, const auto& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        for (auto& v : e.violations) bad.push_back(prefix + v);
    } catch (const Error& e) {
        bad.push_back(prefix + e.what());
    }
}

}  // namespace

void validate(const RunConfig& c, bool need_sweep) {
    std::vector<std::string> bad;
    collect(bad, "system: ", [&] { to_system(c).validate(); });
    collect(bad, "protocol: ", [&] { build_protocol(to_protocol_config(c)); });
    collect(bad, "noise: ", [&] { c.noise.readout.validate(); });
    if (c.noise.drift) {
        if (!(c.noise.drift->amplitude >= 0.0)) bad.push_back("noise.drift.amplitude_t must be non-negative");
        if (!(c.noise.drift->correlation_time > 0.0)) bad.push_back("noise.drift.correlation_time_s must be positive");
    }
    const auto& e = c.engine;
    if (e.runs < 1) bad.push_back("engine.runs must be >= 1");
    if (!(e.readout_repetitions > 0.0)) bad.push_back("engine.readout_repetitions must be positive");
    if (!(e.dephasing_rate >= 0.0)) bad.push_back("engine.dephasing_rate_per_s must be non-negative");
    if (e.kind == "analytic") {
        if (c.system.nuclei.size() != 1) bad.push_back("the analytic engine models exactly one nucleus");
        else if (!(c.system.nuclei[0].a_perp_hz > 0.0)) bad.push_back("the analytic engine needs a_perp_hz > 0");
        if (c.protocol.polarization.kind == PolarizationKind::repetitive)
            bad.push_back("the analytic engine supports polarization none or ideal");
        if (e.record != RecordMode::ensemble) bad.push_back("the analytic engine records the ensemble only");
        if (c.protocol.preset != "weak-trace" && c.protocol.preset != "alpha-sweep" && c.protocol.preset != "bath-spectrum")
            bad.push_back("the analytic engine runs weak-measurement traces only");
    }
    if (c.analysis.pad_factor < 1) bad.push_back("analysis.pad_factor must be >= 1");
    if (c.analysis.max_peaks < 1) bad.push_back("analysis.max_peaks must be >= 1");
    if (!(c.analysis.threshold > 0.0)) bad.push_back("analysis.threshold must be positive");
    if (c.analysis.noise_band && !(c.analysis.noise_band->lo < c.analysis.noise_band->hi))
        bad.push_back("analysis.noise_band_hz must satisfy lo < hi");
    if (c.filter.points < 2) bad.push_back("filter.points must be >= 2");
    if (c.filter.f_lo_hz && !(*c.filter.f_lo_hz >= 0.0)) bad.push_back("filter.f_lo_hz must be non-negative");
    if (c.filter.f_lo_hz && c.filter.f_hi_hz && !(*c.filter.f_lo_hz < *c.filter.f_hi_hz))
        bad.push_back("filter band must satisfy f_lo_hz < f_hi_hz");

    if (need_sweep) {
        if (!c.sweep) {
            bad.push_back("sweep section is required");
        } else {
            const auto& s = *c.sweep;
            if (s.values.empty() && s.axis != SweepAxis::alpha) bad.push_back("sweep.values must not be empty");
            for (double v : s.values) {
                if (!std::isfinite(v)) bad.push_back("sweep.values must be finite");
                else if (s.axis == SweepAxis::polarization && !(v >= -1.0 && v <= 1.0))
                    bad.push_back("sweep.values for polarization must lie in [-1, 1]");
                else if (s.axis != SweepAxis::polarization && !(v > 0.0))
                    bad.push_back("sweep.values for " + sweep_axis_name(s.axis) + " must be positive");
            }
            if ((s.axis == SweepAxis::beta) && (c.system.nuclei.empty() || !(c.system.nuclei[0].a_perp_hz > 0.0)))
                bad.push_back("a beta sweep needs nucleus 0 with a_perp_hz > 0");
            if (s.axis == SweepAxis::alpha && !(c.system.b0_t * c.system.gamma_n > 0.0))
                bad.push_back("an alpha sweep needs a positive Larmor frequency");
            if (bad.empty()) collect(bad, "sweep: ", [&] { sweep_points(c); });
        }
    }
    if (!bad.empty()) throw ConfigError(bad);
}

std::vector<SweepPoint> sweep_points(const RunConfig& cfg) {
    if (!cfg.sweep) throw ConfigError({"sweep section is required"});
    const auto& s = *cfg.sweep;
    SpinSystem sys = to_system(cfg);
    std::vector<std::pair<double, RunConfig>> pts;
    RunConfig base = cfg;
    base.sweep.reset();

    if (s.axis == SweepAxis::alpha && s.values.empty()) {
        auto grid = build_alpha_sweep(to_protocol_config(base));
        for (auto& p : grid) {
            RunConfig c = base;
            c.protocol.t_s = p.t_s;
            pts.push_back({sys.larmor() * p.t_s, c});
        }
    }
    for (double v : s.values) {
        RunConfig c = base;
        switch (s.axis) {
            case SweepAxis::beta: c.protocol.t_beta = v / sys.coupling(0); break;
            case SweepAxis::t_beta: c.protocol.t_beta = v; break;
            case SweepAxis::t_s: c.protocol.t_s = v; break;
            case SweepAxis::alpha: c.protocol.t_s = v / sys.larmor(); break;
            case SweepAxis::polarization:
                c.protocol.polarization.kind = PolarizationKind::ideal;
                c.protocol.polarization.p = v;
                break;
        }
        pts.push_back({v, c});
    }
    std::stable_sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });

    std::vector<SweepPoint> out;
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        try {
            out.push_back({pts[i].first, build_protocol(to_protocol_config(pts[i].second)), pts[i].second});
        } catch (const ConfigError& e) {
            for (auto& v : e.violations) bad.push_back("point " + std::to_string(i) + ": " + v);
        }
    }
    if (!bad.empty()) throw ConfigError(bad);
    return out;
}

}  // namespace wmtrack::cli
