#pragma once

// Quantum cat map: a unitary U_N with U^dagger W(k) U = W(A^T k) exactly.
// A^T is factored into shears T_s = [[1, s], [0, 1]] and the quarter turn
// R = [[0, -1], [1, 0]]; a shear quantizes to the chirp
// diag(exp(i pi s j^2 / N)) and R to the unitary DFT.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/linalg.hpp"
#include "anosov/quantization.hpp"
#include "anosov/toral_map.hpp"

namespace anosov {

namespace detail {

struct Factor {
    enum Kind { shear, turn, parity } kind;
    i64 s = 0;
};

// checkerboard matrices: congruent to I or [[0,1],[1,0]] mod 2
inline bool checkerboard(const IntMatrix2& m) {
    auto odd = [](i64 v) { return (v % 2 + 2) % 2 == 1; };
    return (odd(m.a) && odd(m.d) && !odd(m.b) && !odd(m.c)) || (!odd(m.a) && !odd(m.d) && odd(m.b) && odd(m.c));
}

// B = M_n ... M_1, returned in the order M_1, ..., M_n.
inline std::vector<Factor> factor_sl2(IntMatrix2 b, bool even_shears) {
    std::vector<Factor> left;  // L_1, L_2, ... applied on the left of B
    IntMatrix2 c = b;
    for (int guard = 0; c.c != 0; ++guard) {
        if (guard > 200) throw InputError("cat_propagator: factorisation did not terminate");
        i64 s;
        if (even_shears) {
            s = 2 * static_cast<i64>(std::llround(double(c.a) / (2.0 * double(c.c))));
        } else {
            s = static_cast<i64>(std::llround(double(c.a) / double(c.c)));
        }
        // T_{-s} C
        c.a -= s * c.c;
        c.b -= s * c.d;
        left.push_back({Factor::shear, s});  // its inverse is T_s
        // R^{-1} C
        c = {c.c, c.d, -c.a, -c.b};
        left.push_back({Factor::turn, 0});  // its inverse is R
    }
    // c = [[e, u], [0, e]] with e = +-1
    std::vector<Factor> out;
    if (c.a == 1) {
        out.push_back({Factor::shear, c.b});
    } else {
        out.push_back({Factor::shear, -c.b});
        out.push_back({Factor::parity, 0});
    }
    // B = L_1^{-1} ... L_k^{-1} D, so M_1 = D and M_n = L_1^{-1}
    for (auto it = left.rbegin(); it != left.rend(); ++it) out.push_back(*it);
    return out;
}

}  // namespace detail

inline bool propagator_admissible(const HyperbolicToralMap& map, std::size_t N) {
    return map.matrix().det() == 1 && (N % 2 == 0 || detail::checkerboard(map.matrix()));
}

inline TorusOperator cat_propagator(const HyperbolicToralMap& map, const PlanckData& plk) {
    const IntMatrix2& a = map.matrix();
    if (a.det() != 1)
        throw InputError("cat_propagator: orientation-reversing map " + a.str() + " has no unitary quantization here");
    const bool odd = plk.N % 2 == 1;
    if (odd && !detail::checkerboard(a))
        throw InputError("cat_propagator: map " + a.str() + " is not quantizable at odd N = " +
                         std::to_string(plk.N) + "; admissible N: even");
    const std::size_t n = plk.N;
    const long long nn = static_cast<long long>(n);
    const auto roots = detail::half_roots(n);
    const auto factors = detail::factor_sl2(a.transpose(), odd);

    // U = V(M_1) V(M_2) ... V(M_n), built by right multiplication
    Matrix u = Matrix::identity(n);
    for (const auto& f : factors) {
        switch (f.kind) {
            case detail::Factor::shear: {
                if (f.s == 0) break;
                for (std::size_t j = 0; j < n; ++j) {
                    const long long jj = static_cast<long long>(j);
                    const auto ph = detail::lmod(detail::lmod(f.s, 2 * nn) * detail::lmod(jj * jj, 2 * nn), 2 * nn);
                    const Complex z = roots[static_cast<std::size_t>(ph)];
                    for (std::size_t r = 0; r < n; ++r) u(r, j) *= z;
                }
                break;
            }
            case detail::Factor::turn:
                for (std::size_t r = 0; r < n; ++r) {
                    const CVector row = dft(u.row(r));
                    std::copy(row.begin(), row.end(), u.row(r).begin());
                }
                break;
            case detail::Factor::parity: {
                Matrix p(n, n);
                for (std::size_t r = 0; r < n; ++r)
                    for (std::size_t j = 0; j < n; ++j) p(r, (n - j) % n) = u(r, j);
                u = std::move(p);
                break;
            }
        }
    }
    // fix the global phase on the first significant entry
    for (const Complex z : u.data())
        if (std::abs(z) > 1e-12) {
            u *= std::conj(z) / std::abs(z);
            break;
        }
    return {plk, std::move(u), std::nullopt};
}

// Upper bound sqrt(||X||_1 ||X||_inf) on || U^dagger W(k) U - W(A^T k) ||,
// with X = W(k) U - U W(A^T k) (same spectral norm).
inline double egorov_mode_defect(Frequency k, const HyperbolicToralMap& map, const TorusOperator& u) {
    const auto bk = map.matrix().transpose().apply({k.x, k.xi});
    return (weyl_times(k, u.matrix) - times_weyl(u.matrix, {bk[0], bk[1]})).spectral_bound();
}

// || U^{-n} Op(a) U^n - Op(a o A^n) ||
inline double egorov_defect(const TrigPolynomial& a, int n, const HyperbolicToralMap& map, const TorusOperator& u) {
    if (n < 0) throw InputError("egorov_defect: n must be nonnegative");
    const TrigPolynomial moved = map.pullback(a, n);
    if (2 * moved.degree() >= static_cast<std::int64_t>(u.plk.N))
        throw AliasingError("egorov_defect: degree of a o A^" + std::to_string(n) + " is " +
                            std::to_string(moved.degree()) + ", beyond the Ehrenfest-type cap N/2 = " +
                            std::to_string(double(u.plk.N) / 2.0));
    Matrix x = weyl_quantize(a, u.plk).matrix;
    const Matrix ud = u.matrix.adjoint();
    for (int t = 0; t < n; ++t) x = ud * x * u.matrix;
    return operator_norm(x - weyl_quantize(moved, u.plk).matrix);
}

// Same conjugation without the cap: a o A^n is assembled from the moved
// translations W((A^T)^n k) even once they wrap around the lattice.
inline double egorov_translation_defect(const TrigPolynomial& a, int n, const HyperbolicToralMap& map,
                                        const TorusOperator& u) {
    if (n < 0) throw InputError("egorov_translation_defect: n must be nonnegative");
    Matrix x = weyl_sum(a, u.plk);
    const Matrix ud = u.matrix.adjoint();
    for (int t = 0; t < n; ++t) x = ud * x * u.matrix;
    return operator_norm(x - weyl_sum(map.pullback(a, n), u.plk));
}

inline double egorov_defect(const TrigPolynomial& a, int n, const HyperbolicToralMap& map, const PlanckData& plk) {
    return egorov_defect(a, n, map, cat_propagator(map, plk));
}

}  // namespace anosov
