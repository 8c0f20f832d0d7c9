#pragma once

// Reference implementations used only by the tests.  They take a different
// route than the library code so that agreement means something.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// tangent sum rule: tan(delta) = -tan(phi)(1 - cos b)/(1 + tan^2(phi) cos b)
inline double kick_tangent(double phi, double beta) {
    double t = std::tan(phi);
    double c = std::cos(beta);
    return std::atan(-t * (1.0 - c) / (1.0 + t * t * c));
}

// Bloch vector map of one measurement: y and z scaled by cos(beta)
inline void measure_vector(double& x, double& y, double& z, double beta) {
    (void)x;
    y *= std::cos(beta);
    z *= std::cos(beta);
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// 2 pi / integral of d phi / omega(phi), omega = w0 - G sin(2 phi)
inline double mean_rate(double w0, double g) {
    double T = simpson([&](double phi) { return 1.0 / (w0 - g * std::sin(2.0 * phi)); }, 0.0, 2.0 * pi, 200000);
    return 2.0 * pi / T;
}

// O(N^2) one-sided periodogram with the same normalisation as the library
inline std::vector<double> naive_power(std::vector<double> x, int pad) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= x.size();
    for (double& v : x) v -= m;
    std::size_t L = x.size() * pad;
    std::vector<double> out(L / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n)
            acc += x[n] * std::polar(1.0, -2.0 * pi * double(k) * double(n) / double(L));
        double w = (k == 0 || (L % 2 == 0 && k == L / 2)) ? 1.0 : 2.0;
        out[k] = w * std::norm(acc) / double(L);
    }
    return out;
}

inline std::vector<double> damped_sine(int n, double a0, double gamma, double f, double phi) {
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = a0 * std::exp(-gamma * k) * std::sin(2.0 * pi * f * k + phi);
    return x;
}

// ordinary least squares slope/intercept
inline std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {b, (sy - b * sx) / n};
}

}  // namespace oracle
