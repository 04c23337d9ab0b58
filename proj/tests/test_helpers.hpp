#pragma once

#include <random>

#include "anosov/linalg.hpp"

namespace anosov::testing {

inline CVector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector v(n);
    for (auto& z : v) z = Complex(g(rng), g(rng));
    return v;
}

inline Matrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (auto& z : m.data()) z = Complex(g(rng), g(rng));
    return m;
}

inline Matrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    Matrix m = random_matrix(n, rng);
    return (m + m.adjoint()) * Complex(0.5);
}

// Haar unitary: Gram-Schmidt QR of a complex Gaussian matrix with the
// diagonal-phase correction.
inline Matrix haar_unitary(std::size_t n, std::mt19937_64& rng) {
    Matrix g = random_matrix(n, rng);
    Matrix q(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        CVector v = g.column(c);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < c; ++k) {
                const CVector qk = q.column(k);
                const Complex p = dot(qk, v);
                for (std::size_t i = 0; i < n; ++i) v[i] -= p * qk[i];
            }
        normalize(v);
        q.set_column(c, v);
    }
    return q;
}

}  // namespace anosov::testing
