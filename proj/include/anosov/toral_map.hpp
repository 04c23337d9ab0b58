#pragma once

// Hyperbolic toral automorphisms and exact enumeration of their periodic
// points.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/trig_polynomial.hpp"

namespace anosov {

using i64 = std::int64_t;

struct IntMatrix2 {
    i64 a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]

    friend bool operator==(const IntMatrix2&, const IntMatrix2&) = default;

    i64 det() const { return a * d - b * c; }
    i64 trace() const { return a + d; }
    IntMatrix2 transpose() const { return {a, c, b, d}; }

    friend IntMatrix2 operator*(const IntMatrix2& x, const IntMatrix2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }

    IntMatrix2 pow(int n) const {
        IntMatrix2 r{};
        for (int i = 0; i < n; ++i) r = r * (*this);
        return r;
    }

    // exact for |det| = 1
    IntMatrix2 inverse_unimodular() const {
        const i64 dt = det();
        return {d * dt, -b * dt, -c * dt, a * dt};
    }

    std::array<i64, 2> apply(std::array<i64, 2> v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }

    std::string str() const {
        return "[[" + std::to_string(a) + "," + std::to_string(b) + "],[" + std::to_string(c) + "," +
               std::to_string(d) + "]]";
    }
};

// Hyperbolic unimodular integer matrix acting on T^2 = R^2/Z^2 by
// (x, xi) -> A (x, xi) mod 1.
class HyperbolicToralMap {
public:
    const IntMatrix2& matrix() const { return m_; }
    double lambda() const { return lambda_; }
    // expansion rate per step; also serves as chi_max and -phi^u
    double log_lambda() const { return log_lambda_; }

    TrigPolynomial pullback(const TrigPolynomial& f, int steps = 1) const {
        if (steps < 0) {
            const IntMatrix2 inv = m_.inverse_unimodular().pow(-steps);
            return f.compose(inv.a, inv.b, inv.c, inv.d);
        }
        const IntMatrix2 p = m_.pow(steps);
        return f.compose(p.a, p.b, p.c, p.d);
    }

    std::array<double, 2> apply(double x, double xi) const {
        double nx = double(m_.a) * x + double(m_.b) * xi;
        double nxi = double(m_.c) * x + double(m_.d) * xi;
        nx -= std::floor(nx);
        nxi -= std::floor(nxi);
        return {nx, nxi};
    }

private:
    friend HyperbolicToralMap make_map(const IntMatrix2&);
    IntMatrix2 m_;
    double lambda_ = 1.0;
    double log_lambda_ = 0.0;
};

inline HyperbolicToralMap make_map(const IntMatrix2& m) {
    const i64 det = m.det();
    const i64 tr = m.trace();
    if (det != 1 && det != -1)
        throw InputError("make_map: |det| must be 1, got det = " + std::to_string(det) + " for " + m.str());
    if (std::llabs(tr) <= 2)
        throw InputError("make_map: not hyperbolic, |trace| = " + std::to_string(std::llabs(tr)) + " <= 2 for " +
                         m.str());
    HyperbolicToralMap map;
    map.m_ = m;
    // largest root modulus of x^2 - tr x + det
    const double t = std::abs(double(tr));
    map.lambda_ = (t + std::sqrt(t * t - 4.0 * double(det))) / 2.0;
    map.log_lambda_ = std::log(map.lambda_);
    return map;
}

inline HyperbolicToralMap cat_map() { return make_map({2, 1, 1, 1}); }

// ---------------------------------------------------------------------------
// Periodic points

inline constexpr int kMaxPeriod = 14;

inline i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

// Smith normal form P M Q = diag(d1, d2), d1 | d2, P and Q unimodular.
struct SmithForm {
    IntMatrix2 p, q;
    i64 d1 = 0, d2 = 0;
};

inline SmithForm smith_normal_form(IntMatrix2 m) {
    IntMatrix2 p{}, q{};
    auto swap_rows = [&] {
        std::swap(m.a, m.c);
        std::swap(m.b, m.d);
        std::swap(p.a, p.c);
        std::swap(p.b, p.d);
    };
    auto swap_cols = [&] {
        std::swap(m.a, m.b);
        std::swap(m.c, m.d);
        std::swap(q.a, q.b);
        std::swap(q.c, q.d);
    };
    for (int guard = 0; guard < 1000; ++guard) {
        // move the smallest nonzero entry to (0, 0)
        i64 best = 0;
        int where = -1;
        const i64 vals[4] = {m.a, m.b, m.c, m.d};
        for (int i = 0; i < 4; ++i)
            if (vals[i] != 0 && (where < 0 || std::llabs(vals[i]) < best)) {
                best = std::llabs(vals[i]);
                where = i;
            }
        if (where < 0) return {p, q, 0, 0};
        if (where >= 2) swap_rows();
        if (where % 2 == 1) swap_cols();
        // eliminate (1, 0) with row ops and (0, 1) with column ops
        const i64 qr = m.c / m.a;
        m.c -= qr * m.a;
        m.d -= qr * m.b;
        p.c -= qr * p.a;
        p.d -= qr * p.b;
        const i64 qc = m.b / m.a;
        m.b -= qc * m.a;
        m.d -= qc * m.c;
        q.b -= qc * q.a;
        q.d -= qc * q.c;
        if (m.b != 0 || m.c != 0) continue;
        if (m.d % m.a != 0) {
            // add row 1 to row 0 and keep reducing
            m.b += m.d;
            p.a += p.c;
            p.b += p.d;
            continue;
        }
        if (m.a < 0) {
            m.a = -m.a;
            p.a = -p.a;
            p.b = -p.b;
        }
        if (m.d < 0) {
            m.d = -m.d;
            p.c = -p.c;
            p.d = -p.d;
        }
        return {p, q, m.a, m.d};
    }
    throw InputError("smith_normal_form: no convergence");
}

// Fixed points of A^n on the torus as rational points num / den.
struct PeriodicPointSet {
    int period = 0;
    i64 den = 1;
    std::vector<std::array<i64, 2>> points;

    // flat index of a point of this set, in [0, size)
    std::size_t index_of(const std::array<i64, 2>& pt) const {
        const auto y = qinv_.apply(pt);
        const i64 i = mod(y[0], den) / (den / d1_);
        const i64 j = mod(y[1], den);
        return static_cast<std::size_t>(i * d2_ + j);
    }

    std::size_t size() const { return points.size(); }

private:
    friend PeriodicPointSet periodic_points(const HyperbolicToralMap&, int);
    IntMatrix2 qinv_;
    i64 d1_ = 1, d2_ = 1;
};

inline PeriodicPointSet periodic_points(const HyperbolicToralMap& map, int n) {
    if (n < 1 || n > kMaxPeriod)
        throw CapError("periodic_points: period " + std::to_string(n) + " outside [1, " +
                       std::to_string(kMaxPeriod) + "]");
    IntMatrix2 m = map.matrix().pow(n);
    m.a -= 1;
    m.d -= 1;
    const SmithForm s = smith_normal_form(m);
    if (s.d1 == 0 || s.d2 == 0) throw InputError("periodic_points: A^n - I is singular");
    PeriodicPointSet set;
    set.period = n;
    set.den = s.d2;
    set.d1_ = s.d1;
    set.d2_ = s.d2;
    set.qinv_ = s.q.inverse_unimodular();
    set.points.reserve(static_cast<std::size_t>(s.d1 * s.d2));
    const i64 step = s.d2 / s.d1;
    for (i64 i = 0; i < s.d1; ++i)
        for (i64 j = 0; j < s.d2; ++j) {
            // x = Q y with y = (i / d1, j / d2)
            const auto x = s.q.apply({i * step, j});
            set.points.push_back({mod(x[0], s.d2), mod(x[1], s.d2)});
        }
    return set;
}

// |det(A^n - I)|
inline i64 periodic_point_count(const HyperbolicToralMap& map, int n) {
    IntMatrix2 m = map.matrix().pow(n);
    m.a -= 1;
    m.d -= 1;
    return std::llabs(m.det());
}

}  // namespace anosov
