#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "anosov/linalg.hpp"
#include "test_helpers.hpp"

using namespace anosov;
using Catch::Matchers::WithinAbs;

TEST_CASE("dft of a delta is constant", "[linalg][dft]") {
    CVector v(4);
    v[0] = 1.0;
    const CVector f = dft(v);
    for (const auto& z : f) {
        CHECK_THAT(z.real(), WithinAbs(0.5, 1e-15));
        CHECK_THAT(z.imag(), WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("dft is an isometry and idft inverts it", "[linalg][dft]") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 5u, 12u, 64u, 100u, 256u}) {
        const CVector v = testing::random_vector(n, rng);
        const CVector f = dft(v);
        CHECK(std::abs(norm(f) - norm(v)) <= 1e-12 * norm(v));
        const CVector back = idft(f);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back[i] - v[i]));
        CHECK(err <= 1e-12);
    }
}

TEST_CASE("radix-2 path agrees with the direct sum", "[linalg][dft]") {
    std::mt19937_64 rng(3);
    const std::size_t n = 32;
    const CVector v = testing::random_vector(n, rng);
    const CVector f = dft(v);
    for (std::size_t m = 0; m < n; ++m) {
        Complex s{};
        for (std::size_t j = 0; j < n; ++j)
            s += std::polar(1.0, -2.0 * std::numbers::pi * double(m * j) / double(n)) * v[j];
        s /= std::sqrt(double(n));
        CHECK(std::abs(s - f[m]) <= 1e-12);
    }
}

TEST_CASE("eigendecompose: diagonal unitary", "[linalg][eig]") {
    const CVector d{1.0, kI, -1.0};
    const SpectralResult s = eigendecompose(Matrix::diagonal(d), MatrixKind::unitary);
    const auto ph = s.phases();
    REQUIRE(ph.size() == 3);
    CHECK_THAT(ph[0], WithinAbs(0.0, 1e-14));
    CHECK_THAT(ph[1], WithinAbs(std::numbers::pi / 2, 1e-14));
    CHECK_THAT(ph[2], WithinAbs(std::numbers::pi, 1e-14));
    for (std::size_t k = 0; k < 3; ++k) CHECK_THAT(std::abs(s.eigenvectors(k, k)), WithinAbs(1.0, 1e-14));
}

TEST_CASE("eigendecompose: planar rotation", "[linalg][eig]") {
    const double theta = 0.7;
    Matrix r(2, 2);
    r(0, 0) = std::cos(theta);
    r(0, 1) = -std::sin(theta);
    r(1, 0) = std::sin(theta);
    r(1, 1) = std::cos(theta);
    const auto ph = eigendecompose(r, MatrixKind::unitary).phases();
    CHECK_THAT(ph[0], WithinAbs(-theta, 1e-14));
    CHECK_THAT(ph[1], WithinAbs(theta, 1e-14));
}

TEST_CASE("eigendecompose: Haar unitary residuals and completeness", "[linalg][eig]") {
    std::mt19937_64 rng(2024);
    const std::size_t n = 64;
    const Matrix u = testing::haar_unitary(n, rng);
    const SpectralResult s = eigendecompose(u, MatrixKind::unitary);
    // independent residual oracle
    for (std::size_t j = 0; j < n; ++j) {
        const CVector v = s.eigenvectors.column(j);
        const CVector uv = u * std::span<const Complex>(v);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r += std::norm(uv[i] - s.eigenvalues[j] * v[i]);
        CHECK(std::sqrt(r) <= 1e-10);
        CHECK_THAT(std::abs(s.eigenvalues[j]), WithinAbs(1.0, 1e-10));
    }
    const Matrix proj = s.eigenvectors * s.eigenvectors.adjoint();
    CHECK(max_abs_diff(proj, Matrix::identity(n)) <= 1e-9);
    const auto ph = s.phases();
    CHECK(std::is_sorted(ph.begin(), ph.end()));
}

TEST_CASE("eigendecompose: degenerate unitary spectrum", "[linalg][eig]") {
    // V diag(phases with multiplicity) V^dagger
    std::mt19937_64 rng(5);
    const std::size_t n = 40;
    const Matrix v = testing::haar_unitary(n, rng);
    CVector d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::polar(1.0, 0.5 * double(i % 4));
    const Matrix u = v * Matrix::diagonal(d) * v.adjoint();
    const SpectralResult s = eigendecompose(u, MatrixKind::unitary);
    CHECK(s.worst_residual <= 1e-10);
    CHECK(max_abs_diff(s.eigenvectors.adjoint() * s.eigenvectors, Matrix::identity(n)) <= 1e-9);
}

TEST_CASE("eigendecompose rejects kind violations", "[linalg][eig]") {
    Matrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;
    CHECK_THROWS_AS(eigendecompose(a, MatrixKind::unitary), InputError);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(eigendecompose(a, MatrixKind::hermitian), InputError);
    CHECK_THROWS_AS(eigendecompose(Matrix(2, 3), MatrixKind::hermitian), InputError);
}

TEST_CASE("extremal_eigen examples", "[linalg][eig]") {
    CHECK_THAT(extremal_eigen(Matrix::identity(6), Extreme::min).value, WithinAbs(1.0, 1e-14));
    CVector d(7);
    for (std::size_t i = 0; i < 7; ++i) d[i] = double(i + 1);
    CHECK_THAT(extremal_eigen(Matrix::diagonal(d), Extreme::max).value, WithinAbs(7.0, 1e-13));

    std::mt19937_64 rng(9);
    const Matrix q = testing::haar_unitary(12, rng);
    const Matrix gram = q.adjoint() * q;
    CHECK_THAT(extremal_eigen(gram, Extreme::min).value, WithinAbs(1.0, 1e-12));
    CHECK_THAT(extremal_eigen(gram, Extreme::max).value, WithinAbs(1.0, 1e-12));
}

TEST_CASE("extremal_eigen min bounds every Rayleigh quotient", "[linalg][eig][property]") {
    std::mt19937_64 rng(77);
    const Matrix h = testing::random_hermitian(24, rng);
    const ExtremalEigen lo = extremal_eigen(h, Extreme::min);
    const ExtremalEigen hi = extremal_eigen(h, Extreme::max);
    CHECK(lo.residual <= 1e-10 * h.norm1());
    for (int probe = 0; probe < 100; ++probe) {
        const CVector v = testing::random_vector(24, rng);
        const double rq = dot(v, h * std::span<const Complex>(v)).real() / std::norm(norm(v));
        CHECK(lo.value <= rq + 1e-12);
        CHECK(rq <= hi.value + 1e-12);
    }
}

TEST_CASE("operator_norm examples", "[linalg][norm]") {
    std::mt19937_64 rng(1);
    CHECK_THAT(operator_norm(testing::haar_unitary(16, rng)), WithinAbs(1.0, 1e-8));
    CHECK(operator_norm(Matrix(5, 5)) == 0.0);

    const CVector u = testing::random_vector(10, rng);
    const CVector v = testing::random_vector(10, rng);
    Matrix r1(10, 10);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) r1(i, j) = u[i] * std::conj(v[j]);
    const double expect = norm(u) * norm(v);
    CHECK(std::abs(operator_norm(r1) - expect) <= 1e-8 * expect);
}

TEST_CASE("operator_norm agrees with the Hermitian eigensolver", "[linalg][norm]") {
    std::mt19937_64 rng(4);
    const Matrix a = testing::random_matrix(20, rng);
    const double viaeig = std::sqrt(extremal_eigen(a.adjoint() * a, Extreme::max).value);
    CHECK(std::abs(operator_norm(a) - viaeig) <= 1e-8 * viaeig);
}

TEST_CASE("spectral_bound dominates operator_norm", "[linalg][norm][property]") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = testing::random_matrix(16, rng);
        CHECK(operator_norm(a) <= a.spectral_bound() * (1 + 1e-12));
    }
    CHECK_THAT(Matrix::identity(7).spectral_bound(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("operator_norm is submultiplicative", "[linalg][norm][property]") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = testing::random_matrix(32, rng);
        const Matrix b = testing::random_matrix(32, rng);
        CHECK(operator_norm(a * b) <= operator_norm(a) * operator_norm(b) * (1 + 1e-10));
    }
}

TEST_CASE("matrix csv dump format", "[linalg]") {
    Matrix m(1, 2);
    m(0, 1) = Complex(0.5, -1.0);
    std::ostringstream os;
    m.write_csv(os);
    CHECK(os.str() == "row,col,re,im\n0,0,0,0\n0,1,0.5,-1\n");
}
