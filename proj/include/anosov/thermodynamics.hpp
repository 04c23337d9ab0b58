#pragma once

// Thermodynamic formalism for a hyperbolic toral map: periodic-orbit
// pressure, the pressure curve s -> P(s a + phi^u), its Legendre transform
// H(delta), and the exact dynamical variance.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/toral_map.hpp"
#include "anosov/trig_polynomial.hpp"

namespace anosov {

// Birkhoff sums S_n f over Fix(A^n), one entry per periodic orbit with the
// orbit length as weight (S_n f is constant along an orbit).
struct BirkhoffSpectrum {
    int period = 0;
    std::vector<double> sums;
    std::vector<double> weights;
    double total_weight = 0.0;  // |Fix(A^n)|
    double min_sum = 0.0;
    double max_sum = 0.0;

    // (1/n) log sum_x exp(s S_n f(x)) and its s-derivative
    struct Value {
        double value;
        double derivative;
    };

    Value log_partition(double s) const {
        double m = -std::numeric_limits<double>::infinity();
        for (double v : sums) m = std::max(m, s * v);
        double z = 0.0, zv = 0.0;
        for (std::size_t i = 0; i < sums.size(); ++i) {
            const double e = weights[i] * std::exp(s * sums[i] - m);
            z += e;
            zv += e * sums[i];
        }
        return {(m + std::log(z)) / period, zv / z / period};
    }
};

namespace detail {

// exp(2 pi i m / den) for m in [0, den), with the table conjugate-symmetric
// to the last bit
inline std::vector<Complex> unit_roots(i64 den) {
    std::vector<Complex> t(static_cast<std::size_t>(den));
    for (i64 m = 0; m <= den / 2; ++m) {
        const double ang = 2.0 * std::numbers::pi * double(m) / double(den);
        t[static_cast<std::size_t>(m)] = {std::cos(ang), std::sin(ang)};
        if (m > 0) t[static_cast<std::size_t>(den - m)] = std::conj(t[static_cast<std::size_t>(m)]);
    }
    return t;
}

inline double eval_rational(const TrigPolynomial& f, const std::array<i64, 2>& p, i64 den,
                            const std::vector<Complex>& roots) {
    Complex s{};
    for (const auto& [k, v] : f.coefficients()) {
        const i64 m = mod(mod(k.x, den) * p[0] + mod(k.xi, den) * p[1], den);
        s += v * roots[static_cast<std::size_t>(m)];
    }
    return s.real();
}

}  // namespace detail

inline void require_real(const TrigPolynomial& f, const char* where) {
    if (!f.is_real(1e-12)) throw InputError(std::string(where) + ": observable is not real-valued");
}

inline BirkhoffSpectrum birkhoff_spectrum(const HyperbolicToralMap& map, const TrigPolynomial& f, int n) {
    require_real(f, "birkhoff_spectrum");
    const PeriodicPointSet fix = periodic_points(map, n);
    const i64 den = fix.den;
    const auto roots = detail::unit_roots(den);
    const IntMatrix2& a = map.matrix();
    std::vector<char> seen(fix.size(), 0);
    BirkhoffSpectrum spec;
    spec.period = n;
    spec.total_weight = double(fix.size());
    for (std::size_t idx = 0; idx < fix.size(); ++idx) {
        if (seen[idx]) continue;
        std::array<i64, 2> p = fix.points[idx];
        double orbit_sum = 0.0;
        int len = 0;
        do {
            seen[fix.index_of(p)] = 1;
            orbit_sum += detail::eval_rational(f, p, den, roots);
            ++len;
            const auto q = a.apply(p);
            p = {mod(q[0], den), mod(q[1], den)};
        } while (fix.index_of(p) != idx);
        spec.sums.push_back(orbit_sum * double(n / len));
        spec.weights.push_back(double(len));
    }
    spec.min_sum = *std::min_element(spec.sums.begin(), spec.sums.end());
    spec.max_sum = *std::max_element(spec.sums.begin(), spec.sums.end());
    return spec;
}

struct PressureEstimate {
    int order = 0;
    double value = 0.0;
    double previous = 0.0;  // P_{n-1}, NaN for n = 1
    double convergence() const { return value - previous; }
};

// P_n(f) = (1/n) log sum_{x in Fix(A^n)} exp(S_n f(x))
inline PressureEstimate topological_pressure(const HyperbolicToralMap& map, const TrigPolynomial& f, int n) {
    PressureEstimate est;
    est.order = n;
    est.value = birkhoff_spectrum(map, f, n).log_partition(1.0).value;
    est.previous = n > 1 ? birkhoff_spectrum(map, f, n - 1).log_partition(1.0).value
                         : std::numeric_limits<double>::quiet_NaN();
    return est;
}

// s -> P_n(s a + phi^u), phi^u = -log lambda, sampled on a grid and
// evaluable anywhere through the underlying Birkhoff spectrum.
class PressureCurve {
public:
    PressureCurve(std::shared_ptr<const BirkhoffSpectrum> spec, double log_lambda, std::vector<double> s_grid)
        : spec_(std::move(spec)), log_lambda_(log_lambda), s_grid_(std::move(s_grid)) {
        values_.reserve(s_grid_.size());
        for (double s : s_grid_) values_.push_back((*this)(s));
    }

    double operator()(double s) const { return spec_->log_partition(s).value - log_lambda_; }
    double derivative(double s) const { return spec_->log_partition(s).derivative; }

    // central second difference at s
    double second_difference(double s, double h = 1e-3) const {
        return ((*this)(s + h) + (*this)(s - h) - 2.0 * (*this)(s)) / (h * h);
    }

    const std::vector<double>& s_grid() const { return s_grid_; }
    const std::vector<double>& values() const { return values_; }
    int orbit_order() const { return spec_->period; }
    double log_lambda() const { return log_lambda_; }
    const BirkhoffSpectrum& spectrum() const { return *spec_; }

    // range of attainable Birkhoff averages, i.e. of slopes P'(s)
    double min_slope() const { return spec_->min_sum / spec_->period; }
    double max_slope() const { return spec_->max_sum / spec_->period; }

    // most negative discrete second difference along the grid
    double worst_convexity_defect() const {
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < s_grid_.size(); ++i) {
            const double h1 = s_grid_[i] - s_grid_[i - 1];
            const double h2 = s_grid_[i + 1] - s_grid_[i];
            const double d2 = ((values_[i + 1] - values_[i]) / h2 - (values_[i] - values_[i - 1]) / h1) /
                              (0.5 * (h1 + h2));
            worst = std::min(worst, d2);
        }
        return worst;
    }

    void write_csv(std::ostream& os) const;

private:
    std::shared_ptr<const BirkhoffSpectrum> spec_;
    double log_lambda_;
    std::vector<double> s_grid_;
    std::vector<double> values_;
};

inline PressureCurve pressure_curve(const HyperbolicToralMap& map, const TrigPolynomial& a,
                                    std::vector<double> s_grid, int n) {
    require_real(a, "pressure_curve");
    if (std::abs(a.mean()) > 1e-12)
        throw InputError("pressure_curve: observable must have zero mean, got a(0) = " +
                         std::to_string(a.mean().real()) + (a.mean().imag() != 0.0 ? " (complex)" : ""));
    if (!std::is_sorted(s_grid.begin(), s_grid.end())) throw InputError("pressure_curve: s grid must be sorted");
    auto spec = std::make_shared<const BirkhoffSpectrum>(birkhoff_spectrum(map, a, n));
    return PressureCurve(std::move(spec), map.log_lambda(), std::move(s_grid));
}

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t i = 0; i < count; ++i) g[i] = lo + (hi - lo) * double(i) / double(count - 1);
    return g;
}

// ---------------------------------------------------------------------------
// Rate function H(delta) = inf_s { -s delta + P(s a + phi^u) }

struct RateFunction {
    std::vector<double> delta_grid;
    std::vector<double> values;       // -inf where the level is unattainable
    std::vector<double> minimizer_s;  // NaN where unattainable
    std::vector<bool> unattainable;

    void write_csv(std::ostream& os) const;
};

struct RateValue {
    double value = 0.0;
    double s_star = 0.0;
    bool unattainable = false;
};

inline RateValue rate_at(const PressureCurve& curve, double delta) {
    RateValue r;
    if (curve.max_slope() - curve.min_slope() <= 1e-15 && std::abs(delta - curve.max_slope()) <= 1e-15) {
        // degenerate flat curve: every s is a minimizer
        r.value = curve(0.0) - delta * 0.0;
        r.s_star = 0.0;
        return r;
    }
    // Outside (min, max) of the Birkhoff averages the infimum runs off to -inf.
    if (delta >= curve.max_slope() || delta <= curve.min_slope()) {
        r.value = -std::numeric_limits<double>::infinity();
        r.s_star = std::numeric_limits<double>::quiet_NaN();
        r.unattainable = true;
        return r;
    }
    auto g = [&](double s) { return -s * delta + curve(s); };
    auto dg = [&](double s) { return -delta + curve.derivative(s); };

    double lo = -50.0, hi = 50.0;
    for (int i = 0; i < 60 && dg(hi) < 0.0; ++i) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 60 && dg(lo) > 0.0; ++i) {
        hi = lo;
        lo *= 2.0;
    }
    if (dg(hi) < 0.0 || dg(lo) > 0.0) {
        r.value = -std::numeric_limits<double>::infinity();
        r.s_star = std::numeric_limits<double>::quiet_NaN();
        r.unattainable = true;
        return r;
    }

    // golden-section narrowing on the convex objective
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 60 && (b - a) > 1e-6 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - invphi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + invphi * (b - a);
            gd = g(d);
        }
    }
    // derivative bisection, falling back to the full bracket if the golden
    // bracket lost the sign change to roundoff
    if (dg(a) > 0.0 || dg(b) < 0.0) {
        a = lo;
        b = hi;
    }
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        if (dg(m) < 0.0)
            a = m;
        else
            b = m;
    }
    r.s_star = 0.5 * (a + b);
    r.value = g(r.s_star);
    return r;
}

inline RateFunction rate_function(const PressureCurve& curve, std::vector<double> delta_grid) {
    if (curve.worst_convexity_defect() < -1e-6) throw InputError("rate_function: pressure curve is not convex");
    RateFunction rf;
    rf.delta_grid = std::move(delta_grid);
    for (double d : rf.delta_grid) {
        const RateValue r = rate_at(curve, d);
        rf.values.push_back(r.value);
        rf.minimizer_s.push_back(r.s_star);
        rf.unattainable.push_back(r.unattainable);
    }
    return rf;
}

// ---------------------------------------------------------------------------
// Dynamical variance, exact through Fourier orthogonality

// C(t) = int a . (a o A^t) dLeb
inline double correlation(const HyperbolicToralMap& map, const TrigPolynomial& a, int t) {
    const TrigPolynomial moved = map.pullback(a, t);
    Complex s{};
    for (const auto& [k, v] : moved.coefficients()) s += v * a.coefficient(-k);
    return s.real();
}

struct VarianceResult {
    double sigma2 = 0.0;
    std::vector<double> correlations;  // C(0), C(1), ... up to the last evaluated lag
    bool truncated = false;            // t_max reached before the correlations died out
};

// sigma^2(a) = sum_{|t| <= t_max} C(t).  Correlations vanish identically once
// every mode of a o A^{+-t} has left the support of a for good: the
// Euclidean length of B^t k (B = A^T) is a convex function of t, so a mode
// that is longer than every support mode and still growing never returns.
inline VarianceResult dynamical_variance(const HyperbolicToralMap& map, const TrigPolynomial& a, int t_max) {
    require_real(a, "dynamical_variance");
    if (std::abs(a.mean()) > 1e-12) throw InputError("dynamical_variance: observable must have zero mean");
    VarianceResult res;
    res.correlations.push_back(correlation(map, a, 0));
    res.sigma2 = res.correlations[0];
    if (a.empty()) return res;

    double radius = 0.0;
    for (const auto& [k, v] : a.coefficients()) radius = std::max(radius, std::hypot(double(k.x), double(k.xi)));
    const IntMatrix2 fwd = map.matrix().transpose();
    const IntMatrix2 bwd = map.matrix().inverse_unimodular().transpose();
    std::vector<std::array<i64, 2>> kf, kb;
    for (const auto& [k, v] : a.coefficients()) {
        kf.push_back({k.x, k.xi});
        kb.push_back({k.x, k.xi});
    }
    auto escaped = [&](std::vector<std::array<i64, 2>>& modes, const IntMatrix2& step) {
        bool all = true;
        for (auto& k : modes) {
            const double before = std::hypot(double(k[0]), double(k[1]));
            k = step.apply(k);
            const double after = std::hypot(double(k[0]), double(k[1]));
            if (!(after > before && after > radius)) all = false;
        }
        return all;
    };

    res.truncated = true;
    for (int t = 1; t <= t_max; ++t) {
        const double cf = correlation(map, a, t);
        const double cb = correlation(map, a, -t);
        res.correlations.push_back(cf);
        res.sigma2 += cf + cb;
        const bool ef = escaped(kf, fwd);
        const bool eb = escaped(kb, bwd);
        if (ef && eb) {
            res.truncated = false;
            break;
        }
    }
    return res;
}

inline void PressureCurve::write_csv(std::ostream& os) const {
    os << "s,P\n";
    char buf[80];
    for (std::size_t i = 0; i < s_grid_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s_grid_[i], values_[i]);
        os << buf;
    }
}

inline void RateFunction::write_csv(std::ostream& os) const {
    os << "delta,H,s_star\n";
    char buf[96];
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", delta_grid[i], values[i], minimizer_s[i]);
        os << buf;
    }
}

}  // namespace anosov
