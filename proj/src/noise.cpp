#include "wmtrack/noise.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "wmtrack/errors.hpp"
#include "wmtrack/units.hpp"

namespace wmtrack {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return Rng(seq);
}

void ReadoutModel::validate() const {
    std::vector<std::string> bad;
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) bad.push_back("readout epsilon must lie in [0, 1]");
    if (!(c0 > 0.0)) bad.push_back("readout c0 must be positive");
    if (!(t_readout >= 0.0)) bad.push_back("t_readout must be non-negative");
    if (!bad.empty()) throw ConfigError(bad);
}

void NoiseModel::validate() const {
    std::vector<std::string> bad;
    if (!(dipolar_hz >= 0.0)) bad.push_back("dipolar rate must be non-negative");
    if (!(drift.amplitude >= 0.0)) bad.push_back("drift amplitude must be non-negative");
    if (!(drift.correlation_time > 0.0)) bad.push_back("drift correlation time must be positive");
    if (!(gamma_gamma >= 0.0)) bad.push_back("gamma_gamma must be non-negative");
    if (!bad.empty()) throw ConfigError(bad);
}

DriftState DriftState::stationary(const DriftModel& m, Rng& rng) {
    std::normal_distribution<double> n01;
    return {m.amplitude * n01(rng)};
}

double mean_counts(double sz, const ReadoutModel& model) {
    // m_S = 0 (sz = +1/2) is the bright state
    return model.c0 * (1.0 - model.epsilon * (0.5 - sz));
}

std::uint64_t photon_readout(double sz, const ReadoutModel& model, Rng& rng, double repetitions) {
    double mu = repetitions * mean_counts(sz, model);
    if (mu <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> pd(mu);
    return pd(rng);
}

double reinit_kick_rate(double a_par, double t_readout, double t_s) {
    if (!(t_s > 0.0)) throw DomainError("reinit_kick_rate needs t_s > 0");
    double g = a_par * t_readout;
    return g * g / (2.0 * t_s);
}

double kick_coupling_for_rate(double rate, double t_readout, double t_s) {
    if (!(t_readout > 0.0)) throw DomainError("kick_coupling_for_rate needs t_readout > 0");
    return std::sqrt(2.0 * t_s * rate) / t_readout;
}

double sample_reinit_kick(double a_par, double t_readout, Rng& rng) {
    if (a_par == 0.0 || t_readout == 0.0) return 0.0;
    std::normal_distribution<double> n01;
    return a_par * t_readout * n01(rng);
}

double drift_step(DriftState& state, double dt, Rng& rng, const DriftModel& model) {
    if (!(dt > 0.0)) throw DomainError("drift_step needs dt > 0");
    if (model.amplitude == 0.0) {
        state.delta_b = 0.0;
        return 0.0;
    }
    // exact Ornstein-Uhlenbeck transition
    double e = std::exp(-dt / model.correlation_time);
    std::normal_distribution<double> n01;
    state.delta_b = state.delta_b * e + model.amplitude * std::sqrt(-std::expm1(-2.0 * dt / model.correlation_time)) * n01(rng);
    return state.delta_b;
}

double drift_equivalent_rate(const NoiseModel& noise) {
    return std::abs(noise.gamma_n) * noise.drift.amplitude / two_pi;
}

double intrinsic_dephasing(const NoiseModel& noise) {
    noise.validate();
    return noise.dipolar_hz + drift_equivalent_rate(noise) + noise.gamma_gamma;
}

double snr_crossover(double t2dd, double t2n) { return 1.0 / std::sqrt(t2n * t2dd); }

double snr_estimate(double g, const ReadoutModel& ro, double t2dd, double t2n) {
    if (!(g > 0.0 && t2dd > 0.0 && t2n > 0.0)) throw DomainError("snr_estimate needs positive inputs");
    if (g > snr_crossover(t2dd, t2n)) return ro.epsilon * std::sqrt(ro.c0 / t2n);
    return ro.epsilon * std::sqrt(ro.c0 * g * g * t2dd);
}

}  // namespace wmtrack
