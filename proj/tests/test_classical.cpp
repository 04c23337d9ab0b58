#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "anosov/thermodynamics.hpp"

using namespace anosov;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kLambda = (3.0 + std::sqrt(5.0)) / 2.0;

TrigPolynomial two_cos_x() { return TrigPolynomial::cosine({1, 0}, 2.0); }

}  // namespace

TEST_CASE("make_map: cat map eigenvalue", "[classical][map]") {
    const auto m = cat_map();
    CHECK_THAT(m.lambda(), WithinAbs(2.6180340, 1e-7));
    CHECK_THAT(m.log_lambda(), WithinAbs(0.9624237, 1e-7));
    // characteristic polynomial x^2 - 3x + 1
    CHECK_THAT(m.lambda() * m.lambda() - 3.0 * m.lambda() + 1.0, WithinAbs(0.0, 1e-13));
}

TEST_CASE("make_map: rejections and squares", "[classical][map]") {
    CHECK_THROWS_AS(make_map({1, 0, 0, 1}), InputError);
    CHECK_THROWS_AS(make_map({2, 0, 0, 1}), InputError);
    CHECK_THROWS_AS(make_map({1, 1, 0, 1}), InputError);
    const auto sq = make_map(cat_map().matrix().pow(2));
    CHECK_THAT(sq.log_lambda(), WithinRel(2.0 * cat_map().log_lambda(), 1e-14));
    // negative trace and det = -1 are allowed
    const auto neg = make_map({-2, 1, 1, -1});
    CHECK_THAT(neg.lambda(), WithinAbs(kLambda, 1e-13));
    const auto flip = make_map({3, 1, 1, 0});
    CHECK_THAT(flip.lambda(), WithinAbs((3.0 + std::sqrt(13.0)) / 2.0, 1e-14));
    CHECK_THROWS_AS(make_map({1, 1, 1, 0}), InputError);
}

TEST_CASE("smith normal form reproduces the matrix", "[classical][periodic]") {
    for (const IntMatrix2 m : {IntMatrix2{4, 6, 2, 8}, IntMatrix2{1, 1, 1, 0}, IntMatrix2{0, 3, 5, 0},
                               IntMatrix2{-7, 2, 9, 12}}) {
        const SmithForm s = smith_normal_form(m);
        const IntMatrix2 d = s.p * m * s.q;
        CHECK(d.b == 0);
        CHECK(d.c == 0);
        CHECK(d.a == s.d1);
        CHECK(d.d == s.d2);
        CHECK(s.d2 % s.d1 == 0);
        CHECK(std::llabs(s.p.det()) == 1);
        CHECK(std::llabs(s.q.det()) == 1);
    }
}

TEST_CASE("periodic points: small periods", "[classical][periodic]") {
    const auto m = cat_map();
    CHECK(periodic_points(m, 1).size() == 1);
    CHECK(periodic_points(m, 1).points[0] == std::array<i64, 2>{0, 0});
    CHECK(periodic_points(m, 2).size() == 5);
    CHECK(periodic_points(m, 4).size() == 45);
    CHECK_THROWS_AS(periodic_points(m, 15), CapError);
    CHECK_THROWS_AS(periodic_points(m, 0), CapError);
}

TEST_CASE("periodic points: counts match the trace formula", "[classical][periodic][property]") {
    const auto m = cat_map();
    for (int n = 1; n <= 10; ++n) {
        const double expect = std::pow(kLambda, n) + std::pow(kLambda, -n) - 2.0;
        CHECK(double(periodic_point_count(m, n)) == std::round(expect));
        CHECK(periodic_points(m, n).size() == std::size_t(periodic_point_count(m, n)));
    }
}

TEST_CASE("periodic points are distinct fixed points of A^n", "[classical][periodic][property]") {
    for (const IntMatrix2 a : {IntMatrix2{2, 1, 1, 1}, IntMatrix2{3, 2, 4, 3}, IntMatrix2{3, 1, 1, 0}}) {
        const auto m = make_map(a);
        for (int n = 1; n <= 6; ++n) {
            const PeriodicPointSet s = periodic_points(m, n);
            const IntMatrix2 an = a.pow(n);
            std::vector<char> hit(s.size(), 0);
            for (const auto& p : s.points) {
                const auto q = an.apply(p);
                CHECK(mod(q[0], s.den) == p[0]);
                CHECK(mod(q[1], s.den) == p[1]);
                const std::size_t idx = s.index_of(p);
                REQUIRE(idx < s.size());
                CHECK(hit[idx] == 0);
                hit[idx] = 1;
            }
        }
    }
}

TEST_CASE("pressure normalisations at n = 12", "[classical][pressure]") {
    const auto m = cat_map();
    const PressureEstimate p0 = topological_pressure(m, {}, 12);
    CHECK_THAT(p0.value, WithinAbs(std::log(103680.0) / 12.0, 1e-12));
    CHECK_THAT(p0.value, WithinAbs(m.log_lambda(), 1e-3));
    const PressureEstimate pu = topological_pressure(m, TrigPolynomial::constant(-m.log_lambda()), 12);
    CHECK_THAT(pu.value, WithinAbs(0.0, 1e-3));
    CHECK(std::abs(pu.convergence()) < 1e-3);
}

TEST_CASE("pressure: constant shift and monotonicity", "[classical][pressure][property]") {
    const auto m = cat_map();
    const TrigPolynomial f = two_cos_x();
    const double base = topological_pressure(m, f, 8).value;
    for (double c : {-1.5, 0.25, 3.0}) {
        const double shifted = topological_pressure(m, f + TrigPolynomial::constant(c), 8).value;
        CHECK_THAT(shifted, WithinAbs(base + c, 1e-12));
    }
    // f <= f + g whenever g = 1 + cos >= 0
    const TrigPolynomial g = TrigPolynomial::constant(1.0) + TrigPolynomial::cosine({1, 1});
    CHECK(topological_pressure(m, f, 8).value <= topological_pressure(m, f + g, 8).value + 1e-12);
    CHECK_THROWS_AS(topological_pressure(m, TrigPolynomial::sine({1, 0}) * Complex(0, 1), 4), InputError);
}

TEST_CASE("pressure: Birkhoff sums agree with direct iteration", "[classical][pressure]") {
    const auto m = cat_map();
    const TrigPolynomial f = two_cos_x() + TrigPolynomial::sine({1, 2}, 0.5);
    const int n = 5;
    const PeriodicPointSet fix = periodic_points(m, n);
    double z = 0.0;
    for (const auto& p : fix.points) {
        double x = double(p[0]) / double(fix.den), xi = double(p[1]) / double(fix.den), s = 0.0;
        for (int t = 0; t < n; ++t) {
            s += f.evaluate(x, xi).real();
            const auto q = m.apply(x, xi);
            x = q[0];
            xi = q[1];
        }
        z += std::exp(s);
    }
    CHECK_THAT(topological_pressure(m, f, n).value, WithinAbs(std::log(z) / n, 1e-10));
}

TEST_CASE("pressure curve: 2cos(2 pi x)", "[classical][pressure]") {
    const auto m = cat_map();
    const PressureCurve c = pressure_curve(m, two_cos_x(), linspace(-2.0, 2.0, 41), 12);
    CHECK(c.worst_convexity_defect() >= -1e-6);
    CHECK_THAT(c(0.0), WithinAbs(0.0, 1e-3));
    CHECK_THAT(c.derivative(0.0), WithinAbs(0.0, 1e-12));
    for (double v : c.values()) CHECK(v >= c(0.0) - 1e-12);
    std::ostringstream os;
    c.write_csv(os);
    CHECK(os.str().rfind("s,P\n", 0) == 0);
}

TEST_CASE("pressure curve: zero observable and bad input", "[classical][pressure]") {
    const auto m = cat_map();
    const PressureCurve c = pressure_curve(m, {}, linspace(-1.0, 1.0, 5), 12);
    for (double v : c.values()) CHECK_THAT(v, WithinAbs(0.0, 1e-3));
    CHECK(c.values().front() == c.values().back());
    CHECK_THROWS_AS(pressure_curve(m, TrigPolynomial::constant(0.5), {0.0}, 4), InputError);
    CHECK_THROWS_AS(pressure_curve(m, two_cos_x(), {1.0, 0.0}, 4), InputError);
}

TEST_CASE("variance: examples", "[classical][variance]") {
    const auto m = cat_map();
    CHECK(dynamical_variance(m, {}, 10).sigma2 == 0.0);
    const VarianceResult v = dynamical_variance(m, two_cos_x(), 50);
    CHECK_FALSE(v.truncated);
    CHECK_THAT(v.sigma2, WithinAbs(2.0, 1e-14));
    // single pair of modes
    const TrigPolynomial single = TrigPolynomial::sine({3, -1}, 0.7);
    CHECK_THAT(dynamical_variance(m, single, 50).sigma2, WithinAbs(2.0 * 0.35 * 0.35, 1e-14));
}

TEST_CASE("variance: coboundaries vanish", "[classical][variance][property]") {
    const auto m = cat_map();
    for (const TrigPolynomial& h : {TrigPolynomial::cosine({1, 0}), TrigPolynomial::sine({2, 1}, 0.3),
                                   TrigPolynomial::cosine({1, 0}) + TrigPolynomial::cosine({0, 3}, -2.0)}) {
        const TrigPolynomial a = m.pullback(h) - h;
        const VarianceResult v = dynamical_variance(m, a, 50);
        CHECK_FALSE(v.truncated);
        CHECK(std::abs(v.sigma2) <= 1e-10);
    }
}

TEST_CASE("variance: correlation oracle by quadrature", "[classical][variance]") {
    const auto m = cat_map();
    const TrigPolynomial a = two_cos_x() + TrigPolynomial::cosine({2, 1});
    // midpoint rule is exact for trigonometric polynomials of low enough degree
    const int g = 64;
    for (int t = 0; t <= 2; ++t) {
        const TrigPolynomial at = m.pullback(a, t);
        double s = 0.0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                const double x = (i + 0.5) / g, xi = (j + 0.5) / g;
                s += a.evaluate(x, xi).real() * at.evaluate(x, xi).real();
            }
        CHECK_THAT(correlation(m, a, t), WithinAbs(s / (g * g), 1e-12));
    }
}

TEST_CASE("variance matches the pressure second difference", "[classical][variance][pressure]") {
    const auto m = cat_map();
    for (const TrigPolynomial& a : {two_cos_x(), two_cos_x() + TrigPolynomial::cosine({2, 1})}) {
        const double sigma2 = dynamical_variance(m, a, 50).sigma2;
        const PressureCurve c = pressure_curve(m, a, {0.0}, 14);
        CHECK(std::abs(c.second_difference(0.0) - sigma2) <= 0.05 * sigma2);
    }
}

TEST_CASE("rate function: shape", "[classical][rate]") {
    const auto m = cat_map();
    const PressureCurve c = pressure_curve(m, two_cos_x(), linspace(-2.0, 2.0, 41), 14);
    const RateFunction rf = rate_function(c, linspace(-0.4, 0.4, 41));
    const RateValue h0 = rate_at(c, 0.0);
    CHECK(std::abs(h0.value) <= 1e-6);
    CHECK(rate_at(c, 0.2).value < -1e-3);
    CHECK(rate_at(c, -0.2).value < -1e-3);
    for (double v : rf.values) CHECK(v <= 1e-6);
    for (std::size_t i = 1; i + 1 < rf.values.size(); ++i)
        CHECK(rf.values[i - 1] + rf.values[i + 1] - 2.0 * rf.values[i] <= 1e-9);
}

TEST_CASE("rate function: brute-force grid oracle", "[classical][rate]") {
    const auto m = cat_map();
    const PressureCurve c = pressure_curve(m, two_cos_x(), {0.0}, 12);
    for (double delta : {0.1, -0.25, 0.5}) {
        const RateValue r = rate_at(c, delta);
        double best = std::numeric_limits<double>::infinity(), arg = 0.0;
        for (int i = -20000; i <= 20000; ++i) {
            const double s = i * 5e-4;
            const double g = -s * delta + c(s);
            if (g < best) {
                best = g;
                arg = s;
            }
        }
        CHECK_THAT(r.value, WithinAbs(best, 1e-6));
        CHECK(r.value <= best + 1e-12);
        CHECK_THAT(r.s_star, WithinAbs(arg, 1e-3));
    }
}

TEST_CASE("rate function: unattainable levels", "[classical][rate]") {
    const auto m = cat_map();
    const PressureCurve c = pressure_curve(m, two_cos_x(), {0.0}, 10);
    const RateValue r = rate_at(c, 2.5);
    CHECK(r.unattainable);
    CHECK(std::isinf(r.value));
    CHECK(r.value < 0.0);
    CHECK(rate_at(c, -2.5).unattainable);
    const PressureCurve flat = pressure_curve(m, {}, {0.0}, 12);
    CHECK(std::abs(rate_at(flat, 0.0).value) <= 1e-3);
    CHECK(rate_at(flat, 0.1).unattainable);
}
