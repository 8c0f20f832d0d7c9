#include "wmtrack/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wmtrack/errors.hpp"
#include "wmtrack/units.hpp"

namespace wmtrack {

namespace {

double wrap_pi(double a) {
    a = std::remainder(a, two_pi);
    return a <= -pi ? a + two_pi : a;
}

// alpha reduced to (-pi/2, pi/2] together with the multiple of pi removed
double reduce_half_turn(double a, double* k_out = nullptr) {
    double k = std::ceil(a / pi - 0.5);
    double r = a - k * pi;
    if (r <= -pi / 2) {
        r += pi;
        k -= 1;
    }
    if (k_out) *k_out = k;
    return r;
}

}  // namespace

void WeakMeasParams::validate() const {
    std::vector<std::string> bad;
    if (!(beta >= 0.0 && beta <= pi / 2)) bad.push_back("beta must lie in [0, pi/2]");
    if (!(t_s > 0.0)) bad.push_back("t_s must be positive");
    if (!(gamma_n >= 0.0)) bad.push_back("gamma_n must be non-negative");
    if (!std::isfinite(omega0)) bad.push_back("omega0 must be finite");
    if (!bad.empty()) throw ConfigError(bad);
}

double BlochState::r() const { return std::hypot(x, y); }
double BlochState::phi() const { return std::atan2(y, x); }

BlochState BlochState::in_plane(double r, double phi) {
    return {r * std::cos(phi), r * std::sin(phi), 0.0};
}

double phase_kick(double phi, double beta) {
    // the y component shrinks by cos(beta); atan2 keeps the half plane
    double after = std::atan2(std::sin(phi) * std::cos(beta), std::cos(phi));
    return wrap_pi(after - phi);
}

double phase_kick_small_angle(double phi, double beta) {
    return -0.25 * beta * beta * std::sin(2.0 * phi);
}

double amplitude_factor(double phi, double beta) {
    double s = std::sin(phi);
    double c = std::cos(beta);
    return std::sqrt(1.0 - s * s * (1.0 - c * c));
}

double measurement_decay_rate(const WeakMeasParams& p) {
    return p.beta * p.beta / (4.0 * p.t_s);
}

double measurement_decay_rate_exact(const WeakMeasParams& p) {
    double c = std::cos(p.beta);
    if (!(c > 0.0)) throw DomainError("exact decay rate needs |beta| < pi/2");
    return -0.5 * std::log(c) / p.t_s;
}

double locking_range(double beta) { return 0.25 * beta * beta; }

double locking_range_exact(double beta) {
    double s = std::sqrt(std::cos(beta));
    return std::atan(1.0 / s) - std::atan(s);
}

double steady_state_angle(double alpha, double beta) {
    double a = reduce_half_turn(alpha);
    if (a == 0.0) return 0.0;
    if (beta == 0.0) throw OutsideLockingRange("no locking range at beta = 0");
    double x = 4.0 * std::tan(a) / (beta * beta);
    if (std::abs(x) > 1.0) throw OutsideLockingRange("alpha mod pi exceeds the locking range");
    return 0.5 * std::asin(x);
}

double steady_state_angle_small_angle(double alpha, double beta) {
    double a = reduce_half_turn(alpha);
    if (a == 0.0) return 0.0;
    if (beta == 0.0) throw OutsideLockingRange("no locking range at beta = 0");
    return 2.0 * a / (beta * beta);
}

double sync_decay_rate(double alpha, const WeakMeasParams& p) {
    double s = std::sin(steady_state_angle(alpha, p.beta));
    return 2.0 * measurement_decay_rate(p) * s * s;
}

double sync_decay_rate_small_angle(double alpha, const WeakMeasParams& p) {
    double a = reduce_half_turn(alpha);
    double d = locking_range(p.beta);
    if (a == 0.0) return 0.0;
    if (std::abs(a) > d) throw OutsideLockingRange("alpha mod pi exceeds the locking range");
    return measurement_decay_rate(p) * a * a / (2.0 * d * d);
}

SyncResult average_frequency(const WeakMeasParams& p) {
    SyncResult out;
    out.delta_max = locking_range(p.beta);
    double gb = measurement_decay_rate(p);
    if (gb == 0.0) {
        out.avg_omega = p.omega0;
        return out;
    }
    double k = 0.0;
    double a = reduce_half_turn(p.alpha(), &k);
    double base = k * pi / p.t_s;
    double w = a / p.t_s;  // omega0 modulo k*pi/t_s
    if (std::abs(a) <= out.delta_max) {
        out.locked = true;
        out.avg_omega = base;
        double x = std::clamp(4.0 * std::tan(a) / (p.beta * p.beta), -1.0, 1.0);
        out.phi_ss = 0.5 * std::asin(x);
        return out;
    }
    double ratio = gb / w;
    out.avg_omega = base + w * std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
    return out;
}

std::vector<BlochState> simulate_bloch_states(const WeakMeasParams& p, int n, BlochState initial) {
    p.validate();
    if (n < 1) throw DomainError("simulate_bloch_trace needs n >= 1");
    std::vector<BlochState> states;
    states.reserve(n);
    double r = initial.r();
    double phi = initial.phi();
    double z = initial.z;
    double alpha = p.alpha();
    double damp = std::exp(-p.gamma_n * p.t_s);
    double cb = std::cos(p.beta);
    for (int i = 0; i < n; ++i) {
        phi = wrap_pi(phi + alpha);
        r *= damp;
        states.push_back(BlochState{r * std::cos(phi), r * std::sin(phi), z});
        r *= amplitude_factor(phi, p.beta);
        phi = wrap_pi(phi + phase_kick(phi, p.beta));
        z *= cb;
    }
    return states;
}

std::vector<double> simulate_bloch_trace(const WeakMeasParams& p, int n, BlochState initial) {
    auto states = simulate_bloch_states(p, n, initial);
    std::vector<double> out(states.size());
    double sb = std::sin(p.beta);
    for (size_t i = 0; i < states.size(); ++i) out[i] = 0.5 * sb * states[i].x;
    return out;
}

}  // namespace wmtrack
