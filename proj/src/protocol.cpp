#include "wmtrack/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "wmtrack/errors.hpp"

namespace wmtrack {

std::vector<std::string> Protocol::violations() const {
    std::vector<std::string> bad;
    const auto& w = weak_meas;
    if (!(w.tau > 0.0)) bad.push_back("tau must be positive");
    if (w.n_pulses < 2 || w.n_pulses % 2 != 0) bad.push_back("n_pulses must be even and >= 2");
    if (!(w.t_beta > 0.0)) bad.push_back("t_beta must be positive");
    if (w.tau > 0.0 && std::abs(w.t_beta - 2.0 * w.tau * w.n_pulses) > 1e-9 * w.t_beta)
        bad.push_back("t_beta must equal 2 tau N");
    if (!(t_s > 0.0)) bad.push_back("t_s must be positive");
    if (!(readout_overhead >= 0.0)) bad.push_back("readout overhead must be non-negative");
    if (t_s < w.t_beta + readout_overhead - 1e-12 * t_s)
        bad.push_back("t_s must be at least t_beta + readout overhead");
    if (t_d < 0.0) bad.push_back("padding delay t_d must be non-negative");
    if (std::abs(t_d - std::max(0.0, t_s - w.t_beta - readout_overhead)) > 1e-12 * std::max(t_s, 1e-9))
        bad.push_back("t_d must equal t_s - t_beta - overhead");
    if (n_samples < 1) bad.push_back("n_samples must be >= 1");
    const auto& pol = polarization;
    if (pol.kind == PolarizationKind::ideal && !(pol.p >= 0.0 && pol.p <= 1.0))
        bad.push_back("polarization p must lie in [0, 1]");
    if (pol.kind == PolarizationKind::repetitive) {
        if (pol.reps < 1) bad.push_back("polarization reps must be >= 1");
        if (!(pol.partial_angle >= 0.0 && pol.partial_angle <= pi / 2))
            bad.push_back("polarization partial angle must lie in [0, pi/2]");
    }
    return bad;
}

void Protocol::validate() const {
    auto bad = violations();
    if (!bad.empty()) throw ConfigError(bad);
}

void FilterSpec::validate() const {
    std::vector<std::string> bad;
    if (!(t_beta > 0.0)) bad.push_back("t_beta must be positive");
    if (!(tau > 0.0)) bad.push_back("tau must be positive");
    if (!(t_s > 0.0)) bad.push_back("t_s must be positive");
    if (!bad.empty()) throw ConfigError(bad);
}

double resonance_delay(double gamma_n, double b0, double a_par) {
    double w = gamma_n * b0 + 0.5 * a_par;
    if (!(w > 0.0)) throw DomainError("resonance_delay: gamma_n*b0 + a_par/2 must be positive");
    return pi / (2.0 * w);
}

double filter_function(double f, const FilterSpec& spec) {
    f = std::abs(f);
    if (f == 0.0) return 0.0;
    double x = pi * f * spec.t_beta;
    double sinc = std::sin(x) / x;
    double theta = two_pi * f * spec.tau;
    double k = std::round((theta - pi / 2) / pi);
    double u = theta - (2.0 * k + 1.0) * pi / 2;
    if (std::abs(u) >= 1e-4) return sinc * (1.0 - 1.0 / std::cos(theta));

    // near a secant pole: sin(x)/cos(theta) has a finite limit only when
    // t_beta/(2 tau) is an integer and the numerator vanishes with it
    double ratio_n = spec.t_beta / (2.0 * spec.tau);
    double n_int = std::round(ratio_n);
    double q = n_int * (2.0 * k + 1.0);
    if (std::abs(ratio_n - n_int) > 1e-9 || std::fmod(q, 2.0) != 0.0)
        return sinc * (1.0 - 1.0 / std::cos(theta));
    double cos_a0 = std::fmod(q / 2.0, 2.0) == 0.0 ? 1.0 : -1.0;
    double sign_k = std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0;
    double dirichlet = u == 0.0 ? n_int : std::sin(n_int * u) / std::sin(u);
    // cos(theta) = -(-1)^k sin(u), sin(x) = cos(a0) sin(N u)
    double sin_over_cos = -sign_k * cos_a0 * dirichlet;
    return sinc - sin_over_cos / x;
}

namespace {

double half_max_width(const FilterSpec& spec, const std::function<double(double)>& resp) {
    spec.validate();
    double fc = spec.f_c();
    double span = std::min(2.0 / spec.t_beta, 0.9 * fc);
    int grid = 4001;
    double best_f = fc;
    double best = resp(fc);
    for (int i = 0; i < grid; ++i) {
        double f = fc - span + 2.0 * span * i / (grid - 1);
        double v = resp(f);
        if (v > best) {
            best = v;
            best_f = f;
        }
    }
    double half = 0.5 * best;
    auto cross = [&](double dir) {
        double step = span / 2000.0;
        double inner = best_f;
        double outer = best_f;
        while (true) {
            outer = inner + dir * step;
            if (outer <= 0.0 || std::abs(outer - best_f) > 4.0 * span)
                throw DomainError("filter response has no half-maximum crossing");
            if (resp(outer) < half) break;
            inner = outer;
        }
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (inner + outer);
            if (resp(mid) >= half) inner = mid;
            else outer = mid;
        }
        return 0.5 * (inner + outer);
    };
    return cross(1.0) - cross(-1.0);
}

}  // namespace

double filter_bandwidth(const FilterSpec& spec) {
    return half_max_width(spec, [&](double f) {
        double w = filter_function(f, spec);
        return w * w;
    });
}

double filter_bandwidth_amplitude(const FilterSpec& spec) {
    return half_max_width(spec, [&](double f) { return std::abs(filter_function(f, spec)); });
}

double optimal_interaction_time(double gamma_n, double t_s, double g) {
    if (!(gamma_n > 0.0 && t_s > 0.0 && g > 0.0))
        throw DomainError("optimal_interaction_time needs positive inputs");
    return std::sqrt(4.0 * gamma_n * t_s / (g * g));
}

double optimal_coupling(double gamma_n, double t_s, double t_beta) {
    if (!(gamma_n > 0.0 && t_s > 0.0 && t_beta > 0.0))
        throw DomainError("optimal_coupling needs positive inputs");
    return std::sqrt(4.0 * gamma_n * t_s) / t_beta;
}

ProtocolKind parse_preset(const std::string& name) {
    if (name == "weak-trace") return ProtocolKind::weak_trace;
    if (name == "alpha-sweep") return ProtocolKind::alpha_sweep;
    if (name == "bath-spectrum") return ProtocolKind::bath_spectrum;
    if (name == "ramsey") return ProtocolKind::ramsey;
    if (name == "dd-sweep") return ProtocolKind::dd_sweep;
    throw ConfigError({"unknown protocol preset '" + name + "'"});
}

std::string preset_name(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::weak_trace: return "weak-trace";
        case ProtocolKind::alpha_sweep: return "alpha-sweep";
        case ProtocolKind::bath_spectrum: return "bath-spectrum";
        case ProtocolKind::ramsey: return "ramsey";
        case ProtocolKind::dd_sweep: return "dd-sweep";
    }
    return "?";
}

MeterAxis parse_axis(const std::string& s) {
    if (s == "x") return MeterAxis::x;
    if (s == "y") return MeterAxis::y;
    if (s == "-x") return MeterAxis::minus_x;
    if (s == "-y") return MeterAxis::minus_y;
    throw ConfigError({"unknown meter axis '" + s + "'"});
}

std::string axis_name(MeterAxis a) {
    switch (a) {
        case MeterAxis::x: return "x";
        case MeterAxis::y: return "y";
        case MeterAxis::minus_x: return "-x";
        case MeterAxis::minus_y: return "-y";
    }
    return "?";
}

Protocol build_protocol(const ProtocolConfig& cfg) {
    std::vector<std::string> bad;
    Protocol p;
    p.kind = parse_preset(cfg.preset);
    bool bath = p.kind == ProtocolKind::bath_spectrum;

    std::optional<double> t_beta = cfg.t_beta;
    if (!t_beta && bath && !cfg.n_pulses) t_beta = 1.86e-6;

    double tau = 0.0;
    int n = 0;
    if (cfg.tau) {
        tau = *cfg.tau;
    } else if (t_beta && cfg.n_pulses) {
        tau = *t_beta / (2.0 * *cfg.n_pulses);
    } else {
        try {
            tau = resonance_delay(cfg.gamma_n, cfg.b0, cfg.a_par);
        } catch (const DomainError&) {
            bad.push_back("tau not given and no positive resonance (set b0 or tau)");
        }
    }
    if (cfg.n_pulses) {
        n = *cfg.n_pulses;
    } else if (t_beta && tau > 0.0) {
        n = std::max(2, 2 * static_cast<int>(std::lround(*t_beta / (4.0 * tau))));
    } else {
        n = 8;
    }
    if (cfg.tau && cfg.n_pulses && t_beta && std::abs(*t_beta - 2.0 * tau * n) > 1e-9 * *t_beta)
        bad.push_back("tau, n_pulses and t_beta are inconsistent (t_beta != 2 tau N)");

    p.weak_meas.tau = tau;
    p.weak_meas.n_pulses = n;
    p.weak_meas.t_beta = 2.0 * tau * n;
    p.weak_meas.first = cfg.first;
    p.weak_meas.cycling = cfg.cycling;
    p.weak_meas.last = cfg.last.value_or(p.kind == ProtocolKind::dd_sweep ? cfg.first : MeterAxis::y);

    p.polarization = cfg.polarization;
    p.init_rotation = cfg.init_rotation;
    p.readout_overhead = cfg.readout_overhead;
    p.mid_pi = cfg.mid_pi.value_or(false);

    double t_s_default = bath ? 5.68e-6 : p.weak_meas.t_beta + p.readout_overhead;
    if (p.kind == ProtocolKind::alpha_sweep) t_s_default = cfg.t_s_start;
    p.t_s = cfg.t_s.value_or(t_s_default);

    int n_default = 256;
    if (bath) n_default = 1520;
    if (p.kind == ProtocolKind::ramsey) n_default = 64;
    if (p.kind == ProtocolKind::dd_sweep) n_default = 1;
    p.n_samples = cfg.n_samples.value_or(n_default);

    // rounding residue of t_s = t_beta + overhead is not a real delay
    p.t_d = p.t_s - p.weak_meas.t_beta - p.readout_overhead;
    if (std::abs(p.t_d) <= 1e-12 * std::max(p.t_s, 1e-9)) p.t_d = 0.0;

    for (auto& s : p.violations()) bad.push_back(s);
    if (!bad.empty()) {
        std::sort(bad.begin(), bad.end());
        bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
        throw ConfigError(bad);
    }
    return p;
}

std::vector<Protocol> build_alpha_sweep(const ProtocolConfig& cfg) {
    if (!(cfg.t_s_step > 0.0) || !(cfg.t_s_stop >= cfg.t_s_start))
        throw ConfigError({"alpha sweep needs t_s_step > 0 and t_s_stop >= t_s_start"});
    long count = std::lround((cfg.t_s_stop - cfg.t_s_start) / cfg.t_s_step) + 1;
    std::vector<Protocol> out;
    out.reserve(count);
    for (long i = 0; i < count; ++i) {
        ProtocolConfig c = cfg;
        c.preset = "alpha-sweep";
        c.t_s = cfg.t_s_start + static_cast<double>(i) * cfg.t_s_step;
        out.push_back(build_protocol(c));
    }
    return out;
}

double fold(double f, double f_s) {
    return std::abs(f - f_s * std::round(f / f_s));
}

double unfold_alias(double f_peak, const FilterSpec& spec) {
    double fs = spec.f_s();
    double fc = spec.f_c();
    double k = std::floor(fc / fs);
    double best = f_peak;
    double best_d = std::numeric_limits<double>::infinity();
    for (double kk = std::max(0.0, k - 1.0); kk <= k + 2.0; kk += 1.0) {
        for (double c : {kk * fs - f_peak, kk * fs + f_peak}) {
            if (c < 0.0) continue;
            double d = std::abs(c - fc);
            if (d < best_d || (d == best_d && c < best)) {
                best = c;
                best_d = d;
            }
        }
    }
    return best;
}

Band admissible_band(const FilterSpec& spec) {
    double half = spec.nyquist();
    double m = std::floor(spec.f_c() / half);
    return {m * half, (m + 1.0) * half};
}

}  // namespace wmtrack
