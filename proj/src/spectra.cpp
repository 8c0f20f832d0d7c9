#include "wmtrack/spectra.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include "wmtrack/errors.hpp"
#include "wmtrack/lm.hpp"
#include "wmtrack/units.hpp"

namespace wmtrack {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double wrap_phase(double a) {
    a = std::remainder(a, two_pi);
    return a <= -pi ? a + two_pi : a;
}

double median(std::vector<double> v) {
    auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
        double lo = *std::max_element(v.begin(), mid);
        m = 0.5 * (m + lo);
    }
    return m;
}

}  // namespace

void TimeTrace::validate() const {
    if (samples.size() < 4) throw DegenerateInput("time trace needs at least 4 samples");
    if (!(t_s > 0.0)) throw DomainError("time trace dwell must be positive");
    if (!std::isfinite(t0)) throw DomainError("time trace start must be finite");
    for (double v : samples)
        if (!std::isfinite(v)) throw DegenerateInput("time trace contains non-finite samples");
}

double FitResult::error(int i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }

Spectrum power_spectrum(const TimeTrace& trace, int pad_factor) {
    trace.validate();
    if (pad_factor < 1) throw DomainError("pad factor must be >= 1");
    const std::size_t n = trace.n();
    const std::size_t len = n * static_cast<std::size_t>(pad_factor);
    const std::size_t nbins = len / 2 + 1;
    double mean = std::accumulate(trace.samples.begin(), trace.samples.end(), 0.0) / static_cast<double>(n);

    double* in = fftw_alloc_real(len);
    fftw_complex* out = fftw_alloc_complex(nbins);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(len), in, out, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < len; ++i) in[i] = i < n ? trace.samples[i] - mean : 0.0;
    fftw_execute(plan);

    Spectrum s;
    s.pad_factor = pad_factor;
    s.freqs.resize(nbins);
    s.power.resize(nbins);
    const double df = 1.0 / (static_cast<double>(len) * trace.t_s);
    for (std::size_t k = 0; k < nbins; ++k) {
        double w = (k == 0 || (len % 2 == 0 && k == len / 2)) ? 1.0 : 2.0;
        double re = out[k][0];
        double im = out[k][1];
        s.freqs[k] = static_cast<double>(k) * df;
        s.power[k] = w * (re * re + im * im) / static_cast<double>(len);
    }
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return s;
}

double total_power(const Spectrum& spec) {
    return std::accumulate(spec.power.begin(), spec.power.end(), 0.0);
}

double decaying_sinusoid(const Eigen::Vector4d& p, double t) {
    return p[kA0] * std::exp(-p[kGamma] * t) * std::sin(two_pi * p[kF0] * t + p[kPhi0]);
}

FitResult fit_decaying_sinusoid(const TimeTrace& trace, const SinusoidGuess& init) {
    trace.validate();
    const int n = static_cast<int>(trace.n());
    if (n < 8) throw DegenerateInput("decaying sinusoid fit needs at least 8 samples");
    const auto& x = trace.samples;
    const double ts = trace.t_s;

    FitResult res;
    res.model = FitModel::decaying_sinusoid;
    double peak_abs = 0.0;
    for (double v : x) peak_abs = std::max(peak_abs, std::abs(v));
    if (peak_abs == 0.0) {
        res.converged = true;
        res.degenerate = true;
        return res;
    }

    // in units of cycles and nepers per sample
    Spectrum sp = power_spectrum(trace, 4);
    double df = 1.0 / (4.0 * n);
    double f_guess;
    if (init.f0) {
        f_guess = std::abs(*init.f0) * ts;
    } else {
        auto it = std::max_element(sp.power.begin() + 1, sp.power.end());
        f_guess = static_cast<double>(it - sp.power.begin()) * df;
    }
    std::vector<double> gammas;
    if (init.gamma) {
        gammas.push_back(std::max(0.0, *init.gamma * ts));
    } else {
        gammas.push_back(0.0);
        for (int i = 0; i <= 32; ++i) gammas.push_back(std::pow(10.0, -5.0 + 5.3 * i / 32.0));
    }
    std::vector<double> freqs;
    if (init.f0) {
        freqs.push_back(f_guess);
    } else {
        for (int i = -8; i <= 8; ++i) freqs.push_back(std::clamp(f_guess + 0.25 * i * df, 0.0, 0.5));
    }

    Eigen::Vector4d p0;
    double best = std::numeric_limits<double>::infinity();
    for (double f : freqs) {
        for (double g : gammas) {
            double ss = 0, cc = 0, sc = 0, xs = 0, xc = 0, xx = 0;
            for (int k = 0; k < n; ++k) {
                double e = std::exp(-g * k);
                double s = e * std::sin(two_pi * f * k);
                double c = e * std::cos(two_pi * f * k);
                ss += s * s;
                cc += c * c;
                sc += s * c;
                xs += x[k] * s;
                xc += x[k] * c;
                xx += x[k] * x[k];
            }
            double det = ss * cc - sc * sc;
            if (!(det > 1e-14 * ss * cc)) continue;
            double a = (xs * cc - xc * sc) / det;
            double b = (xc * ss - xs * sc) / det;
            double rss = xx - a * xs - b * xc;
            if (rss < best) {
                best = rss;
                // a sin + b cos = A sin(theta + phi)
                p0 << std::hypot(a, b), g, f, std::atan2(b, a);
            }
        }
    }
    if (!std::isfinite(best)) p0 << peak_abs, 0.0, f_guess, 0.0;
    if (init.a0) p0[0] = *init.a0;
    if (init.phi0) p0[3] = *init.phi0;

    auto model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
        r.resize(n);
        J.resize(n, 4);
        for (int k = 0; k < n; ++k) {
            double e = std::exp(-p[1] * k);
            double th = two_pi * p[2] * k + p[3];
            double s = std::sin(th);
            double c = std::cos(th);
            r[k] = p[0] * e * s - x[k];
            J(k, 0) = e * s;
            J(k, 1) = -k * p[0] * e * s;
            J(k, 2) = two_pi * k * p[0] * e * c;
            J(k, 3) = p[0] * e * c;
        }
    };
    auto project = [](Eigen::VectorXd& p) { p[1] = std::max(p[1], 0.0); };
    LmResult lm = levenberg_marquardt(model, Eigen::VectorXd(p0), project);

    Eigen::Vector4d p = lm.params;
    Eigen::Vector4d sign = Eigen::Vector4d::Ones();
    if (p[0] < 0.0) {
        p[0] = -p[0];
        p[3] += pi;
        sign[0] = -1.0;
    }
    double fr = p[2] - std::round(p[2]);
    if (fr < 0.0) {
        fr = -fr;
        p[3] = pi - p[3];
        sign[2] = -sign[2];
        sign[3] = -1.0;
    }
    p[2] = fr;
    p[3] = wrap_phase(p[3]);

    Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
    if (n > 4) {
        double s2 = lm.rss / (n - 4);
        Eigen::Matrix4d A = lm.jtj;
        Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
        Eigen::Matrix4d inv = lu.isInvertible() ? Eigen::Matrix4d(lu.inverse())
                                                : Eigen::Matrix4d(A.completeOrthogonalDecomposition().pseudoInverse());
        cov = s2 * inv;
    }
    Eigen::Vector4d scale(1.0, 1.0 / ts, 1.0 / ts, 1.0);
    Eigen::Vector4d d = scale.cwiseProduct(sign);
    cov = d.asDiagonal() * cov * d.asDiagonal();
    cov = 0.5 * (cov + cov.transpose()).eval();

    res.params << p[0], p[1] / ts, p[2] / ts, p[3];
    if (trace.t0 != 0.0) {
        // move the reference time from the first sample back to t = 0
        const double t0 = trace.t0;
        const double grow = std::exp(res.params[1] * t0);
        Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
        T(0, 0) = grow;
        T(0, 1) = res.params[0] * t0 * grow;
        T(3, 2) = -two_pi * t0;
        res.params[0] *= grow;
        res.params[3] = wrap_phase(res.params[3] - two_pi * res.params[2] * t0);
        cov = T * cov * T.transpose();
        cov = 0.5 * (cov + cov.transpose()).eval();
    }
    res.covariance = cov;
    res.residual_norm = std::sqrt(lm.rss);
    res.iterations = lm.iterations;
    res.converged = lm.converged;
    return res;
}

double lorentzian(const Eigen::Vector4d& p, double f, LorentzVariant variant) {
    double g2 = p[kGamma] * p[kGamma];
    double d = variant == LorentzVariant::standard ? (f - p[kF0]) * (f - p[kF0]) + g2 : (f * f - p[kF0] * p[kF0]) + g2;
    return p[kS0] * g2 / d + p[kS1];
}

double lorentzian_decay_rate(const FitResult& fit) { return two_pi * fit.params[kGamma]; }

Baseline robust_baseline(const std::vector<double>& values) {
    if (values.empty()) throw EmptyBand("no values for baseline");
    double m = median(values);
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - m);
    return {m, 1.4826 * median(dev)};
}

namespace {

std::pair<std::size_t, std::size_t> window_range(const Spectrum& spec, const std::optional<Band>& w) {
    std::size_t lo = 0;
    std::size_t hi = spec.freqs.size();
    if (w) {
        lo = std::lower_bound(spec.freqs.begin(), spec.freqs.end(), w->lo) - spec.freqs.begin();
        hi = std::upper_bound(spec.freqs.begin(), spec.freqs.end(), w->hi) - spec.freqs.begin();
    }
    return {lo, hi};
}

}  // namespace

std::size_t detect_peak(const Spectrum& spec, double threshold, std::optional<Band> window) {
    if (spec.power.size() < 2) throw PeakNotFound("spectrum too short");
    auto [lo, hi] = window_range(spec, window);
    // skip the DC bin, which mean subtraction empties
    lo = std::max<std::size_t>(lo, 1);
    if (hi <= lo) throw PeakNotFound("peak window contains no bins");
    Baseline b = robust_baseline(std::vector<double>(spec.power.begin() + 1, spec.power.end()));
    auto it = std::max_element(spec.power.begin() + lo, spec.power.begin() + hi);
    double excess = *it - b.level;
    if (!(excess > 0.0) || !(excess > threshold * b.spread)) throw PeakNotFound("no bin exceeds the baseline threshold");
    return static_cast<std::size_t>(it - spec.power.begin());
}

std::vector<std::size_t> find_peaks(const Spectrum& spec, double threshold, double min_separation_hz) {
    std::vector<std::size_t> out;
    if (spec.power.size() < 3) return out;
    Baseline b = robust_baseline(std::vector<double>(spec.power.begin() + 1, spec.power.end()));
    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < spec.power.size(); ++i) {
        double v = spec.power[i];
        if (v >= spec.power[i - 1] && v > spec.power[i + 1] && v - b.level > threshold * b.spread && v > b.level)
            cand.push_back(i);
    }
    std::sort(cand.begin(), cand.end(), [&](auto a, auto c) { return spec.power[a] > spec.power[c]; });
    for (auto i : cand) {
        bool far = std::all_of(out.begin(), out.end(), [&](auto j) {
            return std::abs(spec.freqs[i] - spec.freqs[j]) >= min_separation_hz;
        });
        if (far) out.push_back(i);
    }
    return out;
}

FitResult fit_lorentzian(const Spectrum& spec, LorentzVariant variant, const LorentzOptions& opt) {
    std::size_t i0 = detect_peak(spec, opt.threshold, opt.window);
    auto [wlo, whi] = window_range(spec, opt.window);
    wlo = std::max<std::size_t>(wlo, 1);
    const auto& P = spec.power;
    const double df = spec.bin_width();
    Baseline b = robust_baseline(std::vector<double>(P.begin() + wlo, P.begin() + whi));
    double half = b.level + 0.5 * (P[i0] - b.level);
    std::size_t l = i0, r = i0;
    while (l > wlo && P[l - 1] >= half) --l;
    while (r + 1 < whi && P[r + 1] >= half) ++r;
    double hw_bins = std::max(0.5, 0.5 * static_cast<double>(r - l + 1));
    long reach = std::max<long>(opt.min_half_width_bins, std::lround(std::ceil(opt.half_width_in_hwhm * hw_bins)));
    std::size_t lo = static_cast<std::size_t>(std::max<long>(static_cast<long>(wlo), static_cast<long>(i0) - reach));
    std::size_t hi = std::min<std::size_t>(whi, i0 + static_cast<std::size_t>(reach) + 1);
    const int m = static_cast<int>(hi - lo);
    if (m < 8) throw PeakNotFound("fewer than 8 bins around the detected peak");

    double pscale = std::max(std::abs(P[i0]), 1e-300);
    double f_min = spec.freqs[lo];
    double f_max = spec.freqs[hi - 1];
    // parameters are scaled to O(1) for conditioning: S/pscale, width and f0 in bins
    Eigen::VectorXd p0(4);
    p0 << (P[i0] - b.level) / pscale, hw_bins, spec.freqs[i0] / df, b.level / pscale;

    auto model = [&](const Eigen::VectorXd& q, Eigen::VectorXd& res, Eigen::MatrixXd& J) {
        res.resize(m);
        J.resize(m, 4);
        double S0 = q[0] * pscale;
        double G = q[1] * df;
        double f0 = q[2] * df;
        for (int k = 0; k < m; ++k) {
            double f = spec.freqs[lo + k];
            double u = variant == LorentzVariant::standard ? (f - f0) * (f - f0) : (f * f - f0 * f0);
            double D = u + G * G;
            res[k] = (S0 * G * G / D + q[3] * pscale - P[lo + k]) / pscale;
            J(k, 0) = G * G / D;
            J(k, 1) = 2.0 * S0 * G * u / (D * D) * df / pscale;
            double dD_df0 = variant == LorentzVariant::standard ? -2.0 * (f - f0) : -2.0 * f0;
            J(k, 2) = -S0 * G * G * dD_df0 / (D * D) * df / pscale;
            J(k, 3) = 1.0;
        }
    };
    auto project = [&](Eigen::VectorXd& q) {
        q[1] = std::abs(q[1]);
        q[2] = std::clamp(q[2], f_min / df, f_max / df);
    };
    LmResult lm = levenberg_marquardt(model, p0, project);

    FitResult out;
    out.model = variant == LorentzVariant::standard ? FitModel::lorentzian_standard : FitModel::lorentzian_paper;
    Eigen::Vector4d scale(pscale, df, df, pscale);
    out.params = lm.params.cwiseProduct(scale);
    if (m > 4) {
        double s2 = lm.rss / (m - 4);
        Eigen::Matrix4d A = lm.jtj;
        Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
        Eigen::Matrix4d inv = lu.isInvertible() ? Eigen::Matrix4d(lu.inverse())
                                                : Eigen::Matrix4d(A.completeOrthogonalDecomposition().pseudoInverse());
        Eigen::Matrix4d cov = s2 * scale.asDiagonal() * inv * scale.asDiagonal();
        out.covariance = 0.5 * (cov + cov.transpose());
    }
    out.residual_norm = std::sqrt(lm.rss) * pscale;
    out.iterations = lm.iterations;
    out.converged = lm.converged;
    return out;
}

Spectrum normalize_baseline(const Spectrum& spec, Band noise_band) {
    std::vector<double> v;
    for (std::size_t i = 0; i < spec.freqs.size(); ++i)
        if (spec.freqs[i] >= noise_band.lo && spec.freqs[i] <= noise_band.hi) v.push_back(spec.power[i]);
    if (v.size() < 2) throw EmptyBand("noise band holds fewer than two bins");
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    if (!(sd > 0.0)) throw DegenerateInput("noise band has zero spread");
    Spectrum out = spec;
    for (double& p : out.power) p /= sd;
    out.normalized = true;
    return out;
}

double chi2_pvalue(double chi2, int k) {
    if (k < 1) throw DomainError("chi2 p-value needs k >= 1");
    if (chi2 <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * k, 0.5 * chi2);
}

LinearityResult peak_linearity(const std::vector<LinearityPoint>& pts) {
    if (pts.size() < 3) throw DegenerateInput("linearity fit needs at least 3 points");
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (const auto& p : pts) {
        if (!(p.sigma > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y))
            throw DegenerateInput("linearity points need finite values and positive uncertainties");
        double w = 1.0 / (p.sigma * p.sigma);
        S += w;
        Sx += w * p.x;
        Sy += w * p.y;
        Sxx += w * p.x * p.x;
        Sxy += w * p.x * p.y;
    }
    double delta = S * Sxx - Sx * Sx;
    if (!(delta > 1e-14 * S * Sxx)) throw DegenerateInput("linearity points have no spread in x");
    LinearityResult r;
    r.slope = (S * Sxy - Sx * Sy) / delta;
    r.intercept = (Sxx * Sy - Sx * Sxy) / delta;
    r.slope_err = std::sqrt(S / delta);
    r.intercept_err = std::sqrt(Sxx / delta);
    for (const auto& p : pts) {
        double z = (p.y - r.slope * p.x - r.intercept) / p.sigma;
        r.chi2 += z * z;
    }
    r.k = static_cast<int>(pts.size());
    r.p_value = chi2_pvalue(r.chi2, r.k);
    return r;
}

}  // namespace wmtrack
