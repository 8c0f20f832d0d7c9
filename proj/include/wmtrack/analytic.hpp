#pragma once

#include <optional>
#include <vector>

namespace wmtrack {

struct WeakMeasParams {
    double beta = 0.0;     // rad
    double t_s = 1e-6;     // s
    double omega0 = 0.0;   // rad/s
    double gamma_n = 0.0;  // 1/s

    double alpha() const { return omega0 * t_s; }
    void validate() const;
};

struct BlochState {
    double x = 1.0;
    double y = 0.0;
    double z = 0.0;

    double r() const;
    double phi() const;
    static BlochState in_plane(double r, double phi);
};

struct SyncResult {
    bool locked = false;
    double avg_omega = 0.0;
    double delta_max = 0.0;
    std::optional<double> phi_ss;
};

double phase_kick(double phi, double beta);
double phase_kick_small_angle(double phi, double beta);
double amplitude_factor(double phi, double beta);

// Gamma_beta = beta^2/(4 t_s). The _exact form is the ensemble rate away from lock:
// one step maps the in-plane vector by diag(1, cos beta) * R(alpha), whose complex
// eigenvalues have modulus sqrt(cos beta), so Gamma = -ln(cos beta)/(2 t_s)
double measurement_decay_rate(const WeakMeasParams& p);
double measurement_decay_rate_exact(const WeakMeasParams& p);

double locking_range(double beta);
double locking_range_exact(double beta);

double steady_state_angle(double alpha, double beta);
double steady_state_angle_small_angle(double alpha, double beta);

double sync_decay_rate(double alpha, const WeakMeasParams& p);
double sync_decay_rate_small_angle(double alpha, const WeakMeasParams& p);

SyncResult average_frequency(const WeakMeasParams& p);

// signal is the meter <Sz> = sin(beta) * <Ix> = sin(beta) * x / 2
std::vector<double> simulate_bloch_trace(const WeakMeasParams& p, int n, BlochState initial = {});
std::vector<BlochState> simulate_bloch_states(const WeakMeasParams& p, int n, BlochState initial = {});

}  // namespace wmtrack
