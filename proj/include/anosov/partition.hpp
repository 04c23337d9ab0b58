#pragma once

// Smooth partitions of unity on the circle by x-strips: sum_k P_k(x)^2 = 1,
// each P_k a band-limited trigonometric polynomial in x.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/linalg.hpp"
#include "anosov/trig_polynomial.hpp"

namespace anosov {

namespace detail {

// Gaussian-mollified indicator of [lo, hi), periodized
inline double smooth_indicator(double x, double lo, double hi, double sigma) {
    const double s = std::sqrt(2.0) * sigma;
    double v = 0.0;
    for (int m = -2; m <= 2; ++m) v += 0.5 * (std::erf((x + m - lo) / s) - std::erf((x + m - hi) / s));
    return v;
}

// Fourier coefficients |m| <= L of a function of x sampled at M points
inline TrigPolynomial band_limit(const std::vector<double>& samples, int L) {
    const std::size_t M = samples.size();
    CVector v(samples.begin(), samples.end());
    const CVector f = dft(v);
    const double scale = 1.0 / std::sqrt(double(M));
    std::map<std::int64_t, Complex> c;
    for (int m = 0; m <= L; ++m) {
        const Complex cm = f[static_cast<std::size_t>(m)] * scale;
        const Complex cn = f[(M - static_cast<std::size_t>(m)) % M] * scale;
        // the samples are real: symmetrize exactly
        const Complex sym = 0.5 * (cm + std::conj(cn));
        if (m == 0) {
            c[0] = sym.real();
        } else {
            c[m] = sym;
            c[-m] = std::conj(sym);
        }
    }
    return TrigPolynomial::x_only(c);
}

inline constexpr std::size_t kBandSamples = 8192;

}  // namespace detail

// Band-limited smoothed indicator of the strip [center - width/2, center + width/2).
inline TrigPolynomial smooth_strip(double center, double width, double sigma, int band_limit) {
    if (!(sigma > 0.0) || !(width > 0.0) || band_limit < 0) throw InputError("smooth_strip: bad parameters");
    std::vector<double> s(detail::kBandSamples);
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = detail::smooth_indicator(double(i) / double(s.size()), center - width / 2, center + width / 2, sigma);
    return detail::band_limit(s, band_limit);
}

struct SmoothPartition {
    int K = 1;
    double width = 0.0;  // Gaussian smoothing width
    int band_limit = 0;
    double offset = 0.0;  // left edge of the first strip
    std::vector<TrigPolynomial> atoms;
    double defect = 0.0;  // max |sum P_k^2 - 1| on the check grid
};

inline double partition_defect(const std::vector<TrigPolynomial>& atoms, std::size_t points) {
    double worst = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = double(i) / double(points);
        double s = 0.0;
        for (const auto& p : atoms) s += std::norm(p.evaluate(x, 0.0));
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

// Defaults that pass the 1e-10 check for K <= 3: width 0.05, band limit 96.
inline SmoothPartition build_partition(int K, double width = 0.05, int band_limit = 96, double offset = 0.0) {
    if (K < 1) throw InputError("build_partition: K must be at least 1");
    SmoothPartition part;
    part.K = K;
    part.width = width;
    part.band_limit = band_limit;
    part.offset = offset;
    if (K == 1) {
        part.atoms.push_back(TrigPolynomial::constant(1.0));
        return part;
    }
    if (!(width > 0.0)) throw InputError("build_partition: smoothing width must be positive");
    if (6.0 * width > 1.0 / K)
        throw InputError("build_partition: width " + std::to_string(width) +
                         " lets non-adjacent strips overlap; need 6 * width <= 1/K");
    const std::size_t M = detail::kBandSamples;
    std::vector<std::vector<double>> q(static_cast<std::size_t>(K), std::vector<double>(M));
    for (int k = 0; k < K; ++k)
        for (std::size_t i = 0; i < M; ++i)
            q[static_cast<std::size_t>(k)][i] = detail::smooth_indicator(double(i) / double(M), offset + double(k) / K,
                                                                         offset + double(k + 1) / K, width);
    for (std::size_t i = 0; i < M; ++i) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) s += q[static_cast<std::size_t>(k)][i] * q[static_cast<std::size_t>(k)][i];
        const double r = 1.0 / std::sqrt(s);
        for (int k = 0; k < K; ++k) q[static_cast<std::size_t>(k)][i] *= r;
    }
    for (int k = 0; k < K; ++k) part.atoms.push_back(detail::band_limit(q[static_cast<std::size_t>(k)], band_limit));
    part.defect = partition_defect(part.atoms, std::max<std::size_t>(4 * std::size_t(K) * std::size_t(K), 4096));
    if (part.defect > 1e-10)
        throw InputError("build_partition: sum of squares deviates from 1 by " + std::to_string(part.defect) +
                         " after band-limiting to " + std::to_string(band_limit) + "; raise the band limit");
    return part;
}

}  // namespace anosov
