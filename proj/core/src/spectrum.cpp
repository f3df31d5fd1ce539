#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "slgfm/errors.hpp"
#include "slgfm/simulator.hpp"

namespace slgfm {

namespace {

constexpr double kPi = std::numbers::pi;

/// In-place iterative radix-2 Cooley-Tukey transform; size must be a power
/// of two.
void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / len;
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) {
            x /= static_cast<double>(n);
        }
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

/// Removes the least-squares line a + b*t from y (in place).
void detrend(std::vector<double>& y) {
    const std::size_t n = y.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        sx += t;
        sy += y[i];
        sxx += t * t;
        sxy += t * y[i];
    }
    const double den = n * sxx - sx * sx;
    const double b = (den != 0.0) ? (n * sxy - sx * sy) / den : 0.0;
    const double a = (sy - b * sx) / n;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] -= a + b * static_cast<double>(i);
    }
}

}  // namespace

FftReport dominant_frequency(const SimTrace& tr, const std::string& signal,
                             std::pair<double, double> window) {
    const std::vector<double>& y_full = tr.signal(signal);
    if (tr.t.size() < 2 || y_full.size() != tr.t.size()) {
        throw std::invalid_argument("dominant_frequency: trace too short");
    }
    const double t0 = tr.t.front();
    const double dt = tr.t[1] - tr.t[0];
    if (window.first < t0 - 0.5 * dt || window.second > tr.t.back() + 0.5 * dt ||
        window.first >= window.second) {
        throw std::invalid_argument(
            "dominant_frequency: window outside the recorded trace");
    }
    const std::size_t i0 = static_cast<std::size_t>(
        std::ceil((window.first - t0) / dt - 1e-9));
    const std::size_t i1 = static_cast<std::size_t>(
        std::floor((window.second - t0) / dt + 1e-9));
    if (i1 >= tr.t.size() || i1 <= i0) {
        throw std::invalid_argument(
            "dominant_frequency: window outside the recorded trace");
    }
    const std::size_t n = i1 - i0 + 1;
    if (n < 1024) {
        throw WindowTooShort(
            "dominant_frequency: fewer than 1024 samples in the window");
    }

    std::vector<double> y(y_full.begin() + i0, y_full.begin() + i1 + 1);
    detrend(y);

    // Peak search on the Hann-windowed spectrum (zero-padded for a finer
    // interpolation grid).
    const std::size_t npad = 2 * next_pow2(n);
    std::vector<std::complex<double>> Y(npad, 0.0);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w =
            0.5 * (1.0 - std::cos(2.0 * kPi * i / (n - 1)));
        Y[i] = y[i] * w;
        wsum += w;
    }
    fft(Y, false);

    const double bin_hz = 1.0 / (static_cast<double>(npad) * dt);
    // Skip the lowest few (unpadded) bins: the droop transient parks energy
    // near DC.
    const std::size_t kmin = std::max<std::size_t>(
        2, static_cast<std::size_t>(4 * npad / n));
    std::size_t kpk = kmin;
    double apk = 0.0;
    for (std::size_t k = kmin; k <= npad / 2; ++k) {
        const double a = std::abs(Y[k]);
        if (a > apk) {
            apk = a;
            kpk = k;
        }
    }
    // Quadratic (three-point) peak refinement.
    double delta = 0.0;
    double peak_mag = apk;
    if (kpk > 0 && kpk < npad / 2) {
        const double al = std::abs(Y[kpk - 1]);
        const double ar = std::abs(Y[kpk + 1]);
        const double den = al - 2.0 * apk + ar;
        if (den != 0.0) {
            delta = std::clamp(0.5 * (al - ar) / den, -0.5, 0.5);
            peak_mag = apk - 0.25 * (al - ar) * delta;
        }
    }
    const double f_peak = (static_cast<double>(kpk) + delta) * bin_hz;

    FftReport rep;
    rep.dominant_freq_hz = f_peak;
    rep.amplitude = 2.0 * peak_mag / wsum;
    rep.window_start = window.first;
    rep.window_end = window.second;

    // Growth rate: analytic signal restricted to a band around the peak
    // (un-windowed data, so the envelope is not shaped by the Hann taper),
    // then a least-squares slope of its log magnitude.
    std::vector<std::complex<double>> Z(npad, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Z[i] = y[i];
    }
    fft(Z, false);
    const std::size_t band_lo = static_cast<std::size_t>(
        std::max(1.0, std::floor(0.7 * f_peak / bin_hz)));
    const std::size_t band_hi = std::min(
        npad / 2, static_cast<std::size_t>(std::ceil(1.3 * f_peak / bin_hz)));
    for (std::size_t k = 0; k < npad; ++k) {
        if (k >= band_lo && k <= band_hi) {
            Z[k] *= 2.0;  // analytic signal: keep positive frequencies doubled
        } else {
            Z[k] = 0.0;
        }
    }
    fft(Z, true);

    const std::size_t trim = n / 10;  // discard windowing edge effects
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = trim; i + trim < n; ++i) {
        const double env = std::max(std::abs(Z[i]), 1e-300);
        const double t = static_cast<double>(i) * dt;
        const double le = std::log(env);
        sx += t;
        sy += le;
        sxx += t * t;
        sxy += t * le;
        ++cnt;
    }
    const double den2 = cnt * sxx - sx * sx;
    rep.growth_rate = (den2 != 0.0) ? (cnt * sxy - sx * sy) / den2 : 0.0;
    return rep;
}

}  // namespace slgfm
