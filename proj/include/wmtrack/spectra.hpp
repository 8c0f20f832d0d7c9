#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "wmtrack/protocol.hpp"

namespace wmtrack {

struct TimeTrace {
    std::vector<double> samples;
    double t_s = 1.0;
    double t0 = 0.0;  // time of the first sample; fits report amplitude and phase at t = 0

    std::size_t n() const { return samples.size(); }
    void validate() const;
};

struct Spectrum {
    std::vector<double> freqs;  // Hz
    std::vector<double> power;
    int pad_factor = 1;
    bool normalized = false;

    double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

enum class FitModel { decaying_sinusoid, lorentzian_standard, lorentzian_paper };
enum class LorentzVariant { standard, paper };

// parameter slots of FitResult::params
inline constexpr int kA0 = 0;
inline constexpr int kS0 = 0;
inline constexpr int kGamma = 1;  // 1/s for sinusoids, HWHM in Hz for Lorentzians
inline constexpr int kF0 = 2;     // Hz
inline constexpr int kPhi0 = 3;
inline constexpr int kS1 = 3;

struct FitResult {
    FitModel model = FitModel::decaying_sinusoid;
    Eigen::Vector4d params = Eigen::Vector4d::Zero();
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;

    double value(int i) const { return params[i]; }
    double error(int i) const;
};

struct SinusoidGuess {
    std::optional<double> f0;     // Hz
    std::optional<double> gamma;  // 1/s
    std::optional<double> a0;
    std::optional<double> phi0;
};

struct LorentzOptions {
    double threshold = 4.0;           // in baseline standard deviations
    std::optional<Band> window;       // restrict peak search and fit to this range
    int min_half_width_bins = 8;
    double half_width_in_hwhm = 6.0;
};

struct LinearityPoint {
    double x = 0.0;
    double y = 0.0;
    double sigma = 1.0;
};

struct LinearityResult {
    double slope = 0.0;
    double slope_err = 0.0;
    double intercept = 0.0;
    double intercept_err = 0.0;
    double chi2 = 0.0;
    double p_value = 1.0;
    int k = 0;
};

Spectrum power_spectrum(const TimeTrace& trace, int pad_factor = 4);
double total_power(const Spectrum& spec);

FitResult fit_decaying_sinusoid(const TimeTrace& trace, const SinusoidGuess& init = {});
double decaying_sinusoid(const Eigen::Vector4d& params, double t);

FitResult fit_lorentzian(const Spectrum& spec, LorentzVariant variant = LorentzVariant::standard,
                         const LorentzOptions& opt = {});
double lorentzian(const Eigen::Vector4d& params, double f, LorentzVariant variant = LorentzVariant::standard);
// decay rate (1/s) matching a fitted Lorentzian half width
double lorentzian_decay_rate(const FitResult& fit);

struct Baseline {
    double level = 0.0;
    double spread = 0.0;
};
Baseline robust_baseline(const std::vector<double>& values);

std::size_t detect_peak(const Spectrum& spec, double threshold = 4.0, std::optional<Band> window = {});
std::vector<std::size_t> find_peaks(const Spectrum& spec, double threshold, double min_separation_hz);

Spectrum normalize_baseline(const Spectrum& spec, Band noise_band);

LinearityResult peak_linearity(const std::vector<LinearityPoint>& points);
double chi2_pvalue(double chi2, int k);

}  // namespace wmtrack
