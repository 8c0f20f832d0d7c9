#pragma once

#include <cstdint>
#include <random>

namespace wmtrack {

using Rng = std::mt19937_64;

// independent stream per (seed, stream id)
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

struct ReadoutModel {
    double epsilon = 0.35;
    double c0 = 0.1;
    double t_readout = 2.8e-6;
    void validate() const;
};

struct DriftModel {
    double amplitude = 0.0;         // T, stationary std of delta B0
    double correlation_time = 1.0;  // s
};

struct DriftState {
    double delta_b = 0.0;
    static DriftState stationary(const DriftModel& m, Rng& rng);
};

struct NoiseModel {
    double dipolar_hz = 0.0;   // 1/s
    DriftModel drift;
    double gamma_n = 0.0;      // rad/s/T, converts field drift to a rate
    double gamma_gamma = 0.0;  // 1/s
    void validate() const;
};

double mean_counts(double sz, const ReadoutModel& model);
// Poisson count summed over `repetitions` identical readouts
std::uint64_t photon_readout(double sz, const ReadoutModel& model, Rng& rng, double repetitions = 1.0);

double reinit_kick_rate(double a_par, double t_readout, double t_s);
double kick_coupling_for_rate(double rate, double t_readout, double t_s);
double sample_reinit_kick(double a_par, double t_readout, Rng& rng);

double drift_step(DriftState& state, double dt, Rng& rng, const DriftModel& model);
double drift_equivalent_rate(const NoiseModel& noise);
double intrinsic_dephasing(const NoiseModel& noise);

double snr_estimate(double g, const ReadoutModel& ro, double t2dd, double t2n);
double snr_crossover(double t2dd, double t2n);

}  // namespace wmtrack
