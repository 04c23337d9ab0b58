#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "anosov/propagator.hpp"
#include "test_helpers.hpp"

using namespace anosov;
using Catch::Matchers::WithinAbs;

namespace {

TrigPolynomial random_real_symbol(std::mt19937_64& rng, int degree) {
    std::normal_distribution<double> g;
    TrigPolynomial::Coefficients c;
    for (int a = -degree; a <= degree; ++a)
        for (int b = -degree; b <= degree; ++b) {
            const Frequency k{a, b};
            if (c.count(k)) continue;
            const Complex v(g(rng), g(rng));
            c[k] = v;
            c[-k] = std::conj(v);
        }
    c[{0, 0}] = g(rng);
    return TrigPolynomial(std::move(c));
}

}  // namespace

TEST_CASE("planck data", "[quant]") {
    const PlanckData p = PlanckData::make(64);
    CHECK(p.N == 64);
    CHECK_THAT(p.hbar * 2.0 * std::numbers::pi * 64.0, WithinAbs(1.0, 1e-15));
    CHECK_THROWS_AS(PlanckData::make(1), InputError);
}

TEST_CASE("weyl: identity, hermiticity and trace", "[quant][weyl]") {
    std::mt19937_64 rng(12);
    for (long long n : {64, 128, 256}) {
        const PlanckData plk = PlanckData::make(n);
        const Matrix one = weyl_quantize(TrigPolynomial::constant(1.0), plk).matrix;
        CHECK(max_abs_diff(one, Matrix::identity(plk.N)) == 0.0);
        const TrigPolynomial a = random_real_symbol(rng, 3);
        const Matrix op = weyl_quantize(a, plk).matrix;
        CHECK(op.hermitian_defect() <= 1e-12);
        CHECK(std::abs(op.trace() / double(n) - a.mean()) <= 1e-12);
    }
}

TEST_CASE("weyl: traceless translations by direct geometric sum", "[quant][weyl]") {
    const PlanckData plk = PlanckData::make(12);
    for (int a = -11; a <= 11; ++a)
        for (int b = -11; b <= 11; ++b) {
            if (a == 0 && b == 0) continue;
            const Matrix w = weyl_operator({a, b}, plk);
            // oracle: only b = 0 contributes, sum_j exp(2 pi i a j / N) = 0
            CHECK(std::abs(w.trace()) <= 1e-12);
            CHECK(w.unitarity_defect() <= 1e-13);
        }
}

TEST_CASE("weyl: matrix entries against the defining formula", "[quant][weyl]") {
    const PlanckData plk = PlanckData::make(10);
    const long long n = 10;
    for (const Frequency k : {Frequency{1, 0}, Frequency{0, 1}, Frequency{2, -3}, Frequency{-4, 4}}) {
        const Matrix w = weyl_operator(k, plk);
        for (long long j = 0; j < n; ++j)
            for (long long l = 0; l < n; ++l) {
                const bool hit = ((j + k.xi) % n + n) % n == l;
                const double ph = std::numbers::pi * double(k.x * k.xi + 2 * k.x * j) / double(n);
                const Complex expect = hit ? std::polar(1.0, ph) : Complex{};
                CHECK(std::abs(w(std::size_t(j), std::size_t(l)) - expect) <= 1e-13);
            }
    }
}

TEST_CASE("weyl: fast products with translations", "[quant][weyl]") {
    std::mt19937_64 rng(2);
    const PlanckData plk = PlanckData::make(9);
    const Matrix m = testing::random_matrix(9, rng);
    for (const Frequency k : {Frequency{1, 0}, Frequency{0, -2}, Frequency{5, 7}}) {
        CHECK(max_abs_diff(weyl_times(k, m), weyl_operator(k, plk) * m) <= 1e-13);
        CHECK(max_abs_diff(times_weyl(m, k), m * weyl_operator(k, plk)) <= 1e-13);
    }
}

TEST_CASE("weyl: multiplication operator for x-only symbols", "[quant][weyl]") {
    const PlanckData plk = PlanckData::make(16);
    const TrigPolynomial a = TrigPolynomial::cosine({1, 0}, 2.0) + TrigPolynomial::sine({3, 0}, 0.5);
    const Matrix m = multiplication_operator(a, plk);
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t l = 0; l < 16; ++l) {
            const Complex expect = j == l ? a.evaluate(double(j) / 16.0, 0.0) : Complex{};
            CHECK(std::abs(m(j, l) - expect) <= 1e-14);
        }
    CHECK_THROWS_AS(multiplication_operator(TrigPolynomial::cosine({0, 1}), plk), InputError);
}

TEST_CASE("weyl: linearity and norm bound", "[quant][weyl][property]") {
    std::mt19937_64 rng(4);
    const PlanckData plk = PlanckData::make(40);
    for (int trial = 0; trial < 5; ++trial) {
        const TrigPolynomial a = random_real_symbol(rng, 2);
        const TrigPolynomial b = random_real_symbol(rng, 3);
        const Complex al(0.3, -1.2), be(2.0, 0.5);
        const Matrix lhs = weyl_quantize(a * al + b * be, plk).matrix;
        const Matrix rhs = weyl_quantize(a, plk).matrix * al + weyl_quantize(b, plk).matrix * be;
        CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
        CHECK(operator_norm(weyl_quantize(a, plk).matrix) <= a.l1_norm() * (1 + 1e-10));
    }
}

TEST_CASE("weyl: aliasing precondition", "[quant][weyl]") {
    const PlanckData plk = PlanckData::make(8);
    CHECK_NOTHROW(weyl_quantize(TrigPolynomial::cosine({3, 0}), plk));
    CHECK_THROWS_AS(weyl_quantize(TrigPolynomial::cosine({4, 0}), plk), AliasingError);
    CHECK_THROWS_AS(antiwick_quantize(TrigPolynomial::cosine({1, 4}), plk), AliasingError);
}

TEST_CASE("anti-Wick: positivity and identity", "[quant][antiwick]") {
    const TrigPolynomial a = TrigPolynomial::constant(1.0) + TrigPolynomial::cosine({1, 0});
    for (long long n : {64, 128, 256}) {
        const PlanckData plk = PlanckData::make(n);
        const Matrix op = antiwick_quantize(a, plk).matrix;
        CHECK(extremal_eigen(op, Extreme::min).value >= -1e-10);
        CHECK(max_abs_diff(antiwick_quantize(TrigPolynomial::constant(1.0), plk).matrix,
                           Matrix::identity(plk.N)) == 0.0);
    }
    // a nonnegative symbol with both directions and a squeezed width
    const TrigPolynomial b = TrigPolynomial::constant(1.0) + TrigPolynomial::cosine({1, 1}, 0.5) +
                             TrigPolynomial::cosine({2, -1}, 0.5);
    const Matrix op = antiwick_quantize(b, PlanckData::make(64), 2.0).matrix;
    CHECK(extremal_eigen(op, Extreme::min).value >= -1e-10);
    CHECK_THROWS_AS(antiwick_quantize(b, PlanckData::make(64), 0.0), InputError);
}

TEST_CASE("anti-Wick: distance to Weyl decays with N", "[quant][antiwick]") {
    const TrigPolynomial a = TrigPolynomial::constant(1.0) + TrigPolynomial::cosine({1, 0}) +
                             TrigPolynomial::cosine({1, 2}, 0.4);
    std::vector<double> lx, ly;
    for (long long n : {32, 64, 128, 256}) {
        const PlanckData plk = PlanckData::make(n);
        const double d = operator_norm(antiwick_quantize(a, plk).matrix - weyl_quantize(a, plk).matrix);
        lx.push_back(std::log(double(n)));
        ly.push_back(std::log(d));
    }
    const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 4; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    CHECK(sxy / sxx <= -0.4);
}

TEST_CASE("husimi: mass and concentration", "[quant][husimi]") {
    const PlanckData plk = PlanckData::make(32);
    const std::size_t G = 32;
    const QuantumState pos = QuantumState::position(plk, 8);
    const HusimiGrid h = husimi(pos, G);
    for (double v : h.values) CHECK(v >= 0.0);
    CHECK(std::abs(h.total - double(G * G) / 32.0) <= 0.05 * double(G * G) / 32.0);
    // ridge along x = 8/32 = 0.25, i.e. row i = 8
    for (std::size_t j = 0; j < G; ++j) {
        CHECK(h(8, j) > 10.0 * h(16, j));
        CHECK(h(8, j) > 10.0 * h(0, j));
    }
    // the Fourier image puts the ridge at a fixed momentum instead
    const QuantumState mom = QuantumState::from(plk, dft(pos.amplitudes));
    const HusimiGrid hm = husimi(mom, G);
    std::size_t best = 0;
    for (std::size_t j = 0; j < G; ++j)
        if (hm(0, j) > hm(0, best)) best = j;
    for (std::size_t i = 0; i < G; ++i) CHECK(hm(i, best) > 10.0 * hm(i, (best + G / 2) % G));
    std::ostringstream os;
    h.write_csv(os);
    CHECK(os.str().rfind("x,xi,value\n", 0) == 0);
}

TEST_CASE("cat propagator: unitarity and exact Egorov at N = 128", "[quant][propagator]") {
    const auto map = cat_map();
    const PlanckData plk = PlanckData::make(128);
    const TorusOperator u = cat_propagator(map, plk);
    CHECK(u.matrix.unitarity_defect() <= 1e-12);
    CHECK(u.matrix(0, 0).real() >= 0.0);
    double worst = 0.0;
    for (int a = -8; a <= 8; ++a)
        for (int b = -8; b <= 8; ++b) worst = std::max(worst, egorov_mode_defect({a, b}, map, u));
    CHECK(worst <= 1e-10);
    // spot check with explicit conjugation
    const IntMatrix2 bt = map.matrix().transpose();
    for (const Frequency k : {Frequency{1, 0}, Frequency{-3, 8}}) {
        const auto bk = bt.apply({k.x, k.xi});
        const Matrix lhs = u.matrix.adjoint() * weyl_operator(k, plk) * u.matrix;
        CHECK(operator_norm(lhs - weyl_operator({bk[0], bk[1]}, plk)) <= 1e-10);
    }
}

TEST_CASE("cat propagator: n-step Egorov", "[quant][propagator]") {
    const auto map = cat_map();
    const PlanckData plk = PlanckData::make(128);
    const TorusOperator u = cat_propagator(map, plk);
    // degree 1 stays below N/2 = 64 for n <= 3 under A^T: 1, 3, 8, 21, 55, 144
    const TrigPolynomial a = TrigPolynomial::cosine({1, 0}, 2.0) + TrigPolynomial::sine({0, 1});
    CHECK(egorov_defect(a, 0, map, u) == 0.0);
    for (int n = 1; n <= 4; ++n) CHECK(egorov_defect(a, n, map, u) <= 1e-9 * n);
    CHECK_THROWS_AS(egorov_defect(a, 6, map, u), AliasingError);
    const PlanckData big = PlanckData::make(256);
    CHECK(egorov_defect(TrigPolynomial::cosine({1, 0}), 3, map, big) <= 1e-9);
}

TEST_CASE("cat propagator: n-step Egorov for n <= 10 at large N", "[quant][propagator]") {
    // sqrt of the cat matrix direction: a low-growth map keeps degrees small
    const auto map = make_map({1, 1, 1, 2});
    const PlanckData plk = PlanckData::make(256);
    const TorusOperator u = cat_propagator(map, plk);
    const TrigPolynomial a = TrigPolynomial::cosine({0, 1});
    int reached = 0;
    for (int n = 1; n <= 10; ++n) {
        if (2 * map.pullback(a, n).degree() >= 256) break;
        CHECK(egorov_defect(a, n, map, u) <= 1e-9 * n);
        reached = n;
    }
    CHECK(reached >= 5);
}

TEST_CASE("cat propagator: translation Egorov past the aliasing cap", "[quant][propagator]") {
    const auto map = cat_map();
    const TorusOperator u = cat_propagator(map, PlanckData::make(128));
    const TrigPolynomial a = TrigPolynomial::cosine({1, 0}, 2.0) + TrigPolynomial::cosine({2, 1}) +
                             TrigPolynomial::sine({-1, 2}, 0.5);
    for (int n : {1, 4, 10}) CHECK(egorov_translation_defect(a, n, map, u) <= 1e-9 * n);
}

TEST_CASE("cat propagator: one-step relation iterated equals the n-step one", "[quant][propagator][property]") {
    const auto map = cat_map();
    const PlanckData plk = PlanckData::make(64);
    const Matrix u = cat_propagator(map, plk).matrix;
    Matrix un = Matrix::identity(64);
    for (int t = 0; t < 3; ++t) un = un * u;
    const IntMatrix2 b3 = map.matrix().transpose().pow(3);
    for (const Frequency k : {Frequency{1, 0}, Frequency{0, 1}, Frequency{1, -1}}) {
        const auto k3 = b3.apply({k.x, k.xi});
        const Matrix lhs = un.adjoint() * weyl_operator(k, plk) * un;
        CHECK(max_abs_diff(lhs, weyl_operator({k3[0], k3[1]}, plk)) <= 1e-10);
    }
}

TEST_CASE("cat propagator: parity admissibility", "[quant][propagator]") {
    CHECK_THROWS_WITH(cat_propagator(cat_map(), PlanckData::make(65)), Catch::Matchers::ContainsSubstring("even"));
    CHECK_FALSE(propagator_admissible(cat_map(), 65));
    const auto checker = make_map({1, 2, 2, 5});
    REQUIRE(propagator_admissible(checker, 65));
    const PlanckData plk = PlanckData::make(65);
    const Matrix u = cat_propagator(checker, plk).matrix;
    CHECK(u.unitarity_defect() <= 1e-12);
    const auto k = checker.matrix().transpose().apply({1, 2});
    CHECK(max_abs_diff(u.adjoint() * weyl_operator({1, 2}, plk) * u, weyl_operator({k[0], k[1]}, plk)) <= 1e-10);
    CHECK_THROWS_AS(cat_propagator(make_map({3, 1, 1, 0}), PlanckData::make(8)), InputError);
}

TEST_CASE("cat propagator: spectrum on the unit circle", "[quant][propagator]") {
    const PlanckData plk = PlanckData::make(96);
    const SpectralResult s = eigendecompose(cat_propagator(cat_map(), plk).matrix, MatrixKind::unitary);
    for (const Complex z : s.eigenvalues) CHECK_THAT(std::abs(z), WithinAbs(1.0, 1e-10));
    CHECK(s.eigenvectors.unitarity_defect() <= 1e-9);
}
