#pragma once

// Quantized torus: H_N = C^N in the position basis (sites j / N), Weyl and
// positive quantization of trigonometric polynomials, Husimi densities.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/linalg.hpp"
#include "anosov/trig_polynomial.hpp"

namespace anosov {

struct PlanckData {
    std::size_t N = 2;
    double hbar = 1.0 / (4.0 * std::numbers::pi);

    static PlanckData make(long long n) {
        if (n < 2) throw InputError("PlanckData: N must be at least 2, got " + std::to_string(n));
        return {static_cast<std::size_t>(n), 1.0 / (2.0 * std::numbers::pi * double(n))};
    }
};

struct QuantumState {
    PlanckData plk;
    CVector amplitudes;
    bool normalized = false;

    static QuantumState from(PlanckData plk, CVector v) {
        if (v.size() != plk.N) throw InputError("QuantumState: expected " + std::to_string(plk.N) + " amplitudes");
        const double n = norm(v);
        if (n == 0.0) throw InputError("QuantumState: zero vector");
        for (auto& z : v) z /= n;
        return {plk, std::move(v), true};
    }

    static QuantumState position(PlanckData plk, std::size_t j) {
        CVector v(plk.N);
        v[j % plk.N] = 1.0;
        return {plk, std::move(v), true};
    }
};

struct TorusOperator {
    PlanckData plk;
    Matrix matrix;
    std::optional<TrigPolynomial> symbol;
};

namespace detail {

// exp(i pi m / N) for m in [0, 2N), conjugate-symmetric so that Weyl
// operators of real symbols come out exactly Hermitian
inline std::vector<Complex> half_roots(std::size_t n) {
    const std::size_t m2 = 2 * n;
    std::vector<Complex> t(m2);
    for (std::size_t m = 0; m <= n; ++m) {
        const double ang = std::numbers::pi * double(m) / double(n);
        t[m] = {std::cos(ang), std::sin(ang)};
        if (m > 0 && m < n) t[m2 - m] = std::conj(t[m]);
    }
    t[0] = 1.0;
    t[n] = -1.0;
    if (n % 2 == 0) {
        t[n / 2] = kI;
        t[3 * n / 2] = -kI;
    }
    return t;
}

inline long long lmod(long long a, long long m) {
    const long long r = a % m;
    return r < 0 ? r + m : r;
}

// accumulate c * W(k) into m, with
//   (W(a, b) psi)(j) = exp(i pi a b / N) exp(2 pi i a j / N) psi(j + b)
inline void add_weyl(Matrix& m, Frequency k, Complex c, const std::vector<Complex>& roots) {
    const long long n = static_cast<long long>(m.rows());
    const long long a = lmod(k.x, 2 * n), b = k.xi;
    const long long base = lmod(a * lmod(b, 2 * n), 2 * n);
    for (long long j = 0; j < n; ++j) {
        const long long ph = lmod(base + 2 * a * j, 2 * n);
        m(static_cast<std::size_t>(j), static_cast<std::size_t>(lmod(j + b, n))) += c * roots[static_cast<std::size_t>(ph)];
    }
}

inline void check_aliasing(const TrigPolynomial& a, const PlanckData& plk, const char* where) {
    if (2 * a.degree() >= static_cast<std::int64_t>(plk.N))
        throw AliasingError(std::string(where) + ": symbol degree " + std::to_string(a.degree()) +
                            " must be below N/2 = " + std::to_string(double(plk.N) / 2.0));
}

}  // namespace detail

inline Matrix weyl_operator(Frequency k, const PlanckData& plk) {
    Matrix m(plk.N, plk.N);
    detail::add_weyl(m, k, 1.0, detail::half_roots(plk.N));
    return m;
}

// W(k) m and m W(k) in O(N^2), using that W(k) is a phased permutation
inline Matrix weyl_times(Frequency k, const Matrix& m) {
    const long long n = static_cast<long long>(m.rows());
    const auto roots = detail::half_roots(m.rows());
    const long long a = detail::lmod(k.x, 2 * n);
    const long long base = detail::lmod(a * detail::lmod(k.xi, 2 * n), 2 * n);
    Matrix out(m.rows(), m.cols());
    for (long long j = 0; j < n; ++j) {
        const Complex z = roots[static_cast<std::size_t>(detail::lmod(base + 2 * a * j, 2 * n))];
        const auto src = m.row(static_cast<std::size_t>(detail::lmod(j + k.xi, n)));
        auto dst = out.row(static_cast<std::size_t>(j));
        for (std::size_t c = 0; c < m.cols(); ++c) dst[c] = z * src[c];
    }
    return out;
}

inline Matrix times_weyl(const Matrix& m, Frequency k) {
    const long long n = static_cast<long long>(m.cols());
    const auto roots = detail::half_roots(m.cols());
    const long long a = detail::lmod(k.x, 2 * n);
    const long long base = detail::lmod(a * detail::lmod(k.xi, 2 * n), 2 * n);
    Matrix out(m.rows(), m.cols());
    for (long long j = 0; j < n; ++j) {
        const Complex z = roots[static_cast<std::size_t>(detail::lmod(base + 2 * a * j, 2 * n))];
        const auto l = static_cast<std::size_t>(detail::lmod(j + k.xi, n));
        for (std::size_t r = 0; r < m.rows(); ++r) out(r, l) = m(r, static_cast<std::size_t>(j)) * z;
    }
    return out;
}

// sum_k a_k W(k) for arbitrary integer k; frequencies at or beyond N/2 are
// lattice translations, no longer a faithful symbol
inline Matrix weyl_sum(const TrigPolynomial& a, const PlanckData& plk) {
    const auto roots = detail::half_roots(plk.N);
    Matrix m(plk.N, plk.N);
    for (const auto& [k, v] : a.coefficients()) detail::add_weyl(m, k, v, roots);
    return m;
}

inline TorusOperator weyl_quantize(const TrigPolynomial& a, const PlanckData& plk) {
    detail::check_aliasing(a, plk, "weyl_quantize");
    return {plk, weyl_sum(a, plk), a};
}

// Gaussian-smeared symbol: mode k damped by exp(-pi (w k_x^2 + k_xi^2 / w) / (2N)).
inline TrigPolynomial antiwick_symbol(const TrigPolynomial& a, const PlanckData& plk, double width = 1.0) {
    if (!(width > 0.0)) throw InputError("antiwick_quantize: width must be positive");
    TrigPolynomial::Coefficients c;
    for (const auto& [k, v] : a.coefficients()) {
        const double q = width * double(k.x) * double(k.x) + double(k.xi) * double(k.xi) / width;
        c[k] = v * std::exp(-std::numbers::pi * q / (2.0 * double(plk.N)));
    }
    return TrigPolynomial(std::move(c));
}

inline TorusOperator antiwick_quantize(const TrigPolynomial& a, const PlanckData& plk, double width = 1.0) {
    detail::check_aliasing(a, plk, "antiwick_quantize");
    TorusOperator op = weyl_quantize(antiwick_symbol(a, plk, width), plk);
    op.symbol = a;
    return op;
}

// Multiplication operator for a symbol of x alone: diag(a(j / N)). The
// Weyl sum of x-only modes samples a exactly at the sites, so no degree cap
// applies here.
inline Matrix multiplication_operator(const TrigPolynomial& a, const PlanckData& plk) {
    if (!a.is_x_only()) throw InputError("multiplication_operator: symbol depends on xi");
    return weyl_sum(a, plk);
}

inline std::vector<double> site_values(const TrigPolynomial& a, const PlanckData& plk) {
    const Matrix m = multiplication_operator(a, plk);
    std::vector<double> d(plk.N);
    for (std::size_t j = 0; j < plk.N; ++j) d[j] = m(j, j).real();
    return d;
}

// ---------------------------------------------------------------------------
// Husimi density on a G x G grid of phase-space points (i / G, j / G)

inline CVector coherent_state(double q, double p, const PlanckData& plk) {
    const std::size_t n = plk.N;
    const double dn = double(n);
    CVector c(n);
    for (std::size_t j = 0; j < n; ++j) {
        Complex s{};
        for (int m = -3; m <= 3; ++m) {
            const double d = double(j) / dn - q - double(m);
            const double ph = 2.0 * std::numbers::pi * dn * p * (double(j) / dn - double(m));
            s += std::exp(-std::numbers::pi * dn * d * d) * Complex(std::cos(ph), std::sin(ph));
        }
        c[j] = s;
    }
    normalize(c);
    return c;
}

struct HusimiGrid {
    std::size_t G = 0;
    std::vector<double> values;  // row-major, index i * G + j for (x, xi) = (i / G, j / G)
    double total = 0.0;

    double operator()(std::size_t i, std::size_t j) const { return values[i * G + j]; }

    void write_csv(std::ostream& os) const {
        os << "x,xi,value\n";
        char buf[96];
        for (std::size_t i = 0; i < G; ++i)
            for (std::size_t j = 0; j < G; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", double(i) / double(G), double(j) / double(G),
                              values[i * G + j]);
                os << buf;
            }
    }
};

inline HusimiGrid husimi(const QuantumState& u, std::size_t G) {
    if (G < 1) throw InputError("husimi: grid must be at least 1 x 1");
    HusimiGrid h;
    h.G = G;
    h.values.resize(G * G);
    for (std::size_t i = 0; i < G; ++i)
        for (std::size_t j = 0; j < G; ++j) {
            const CVector c = coherent_state(double(i) / double(G), double(j) / double(G), u.plk);
            h.values[i * G + j] = std::norm(dot(c, u.amplitudes));
        }
    for (double v : h.values) h.total += v;
    return h;
}

}  // namespace anosov
