#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wmtrack/units.hpp"

namespace wmtrack {

enum class MeterAxis { x, y, minus_x, minus_y };
enum class PulseCycling { cpmg, xy8 };
enum class PolarizationKind { none, ideal, repetitive };
enum class ProtocolKind { weak_trace, alpha_sweep, bath_spectrum, ramsey, dd_sweep };

struct Polarization {
    PolarizationKind kind = PolarizationKind::ideal;
    double p = 1.0;              // used by ideal
    int reps = 1;                // used by repetitive
    double partial_angle = pi / 2;
    double contact_time = 0.0;   // bookkeeping only
};

struct WeakMeasSpec {
    double tau = 0.0;
    int n_pulses = 2;
    double t_beta = 0.0;  // = 2 tau N
    MeterAxis first = MeterAxis::x;
    MeterAxis last = MeterAxis::y;
    PulseCycling cycling = PulseCycling::cpmg;
};

struct Protocol {
    ProtocolKind kind = ProtocolKind::weak_trace;
    Polarization polarization;
    bool init_rotation = true;   // nuclear pi/2 about Y after polarization
    WeakMeasSpec weak_meas;
    double t_s = 0.0;
    double readout_overhead = 2.8e-6;
    double t_d = 0.0;
    bool mid_pi = false;
    int n_samples = 1;

    double measurement_time() const { return weak_meas.t_beta; }
    std::vector<std::string> violations() const;
    void validate() const;
};

struct ProtocolConfig {
    std::string preset = "weak-trace";
    std::optional<double> tau;
    std::optional<int> n_pulses;
    std::optional<double> t_beta;
    std::optional<double> t_s;
    std::optional<int> n_samples;
    std::optional<bool> mid_pi;
    double readout_overhead = 2.8e-6;
    Polarization polarization;
    bool init_rotation = true;
    MeterAxis first = MeterAxis::x;
    std::optional<MeterAxis> last;
    PulseCycling cycling = PulseCycling::cpmg;
    // used to derive tau when it is not given
    double gamma_n = gamma_c13;
    double b0 = 0.0;
    double a_par = 0.0;
    // alpha-sweep grid of dwell times
    double t_s_start = 3.56e-6;
    double t_s_stop = 4.05e-6;
    double t_s_step = 10e-9;
};

struct FilterSpec {
    double t_beta = 0.0;
    double tau = 0.0;
    double t_s = 0.0;

    double f_c() const { return 1.0 / (4.0 * tau); }
    double f_s() const { return 1.0 / t_s; }
    double nyquist() const { return 0.5 / t_s; }
    void validate() const;
};

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

double resonance_delay(double gamma_n, double b0, double a_par);

double filter_function(double f, const FilterSpec& spec);
// FWHM of the power response |W|^2 around f_c, found numerically
double filter_bandwidth(const FilterSpec& spec);
// same for the amplitude response |W|
double filter_bandwidth_amplitude(const FilterSpec& spec);

double optimal_interaction_time(double gamma_n, double t_s, double g);
double optimal_coupling(double gamma_n, double t_s, double t_beta);

ProtocolKind parse_preset(const std::string& name);
std::string preset_name(ProtocolKind k);
MeterAxis parse_axis(const std::string& s);
std::string axis_name(MeterAxis a);

Protocol build_protocol(const ProtocolConfig& cfg);
std::vector<Protocol> build_alpha_sweep(const ProtocolConfig& cfg);

double fold(double f, double f_s);
double unfold_alias(double f_peak, const FilterSpec& spec);
// the band on which unfold_alias inverts fold: the Nyquist zone holding f_c
Band admissible_band(const FilterSpec& spec);

}  // namespace wmtrack
