#pragma once

// Dense complex linear algebra used by every other module: a row-major
// matrix type, the unitary DFT, a Hessenberg/shifted-QR eigensolver for
// unitary and Hermitian matrices, extremal eigenpairs and operator norms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anosov/errors.hpp"

namespace anosov {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr Complex kI{0.0, 1.0};

inline double norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
    // <a|b>, conjugate-linear in a
    Complex s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline void normalize(CVector& v) {
    const double n = norm(v);
    if (n == 0.0) throw InputError("cannot normalize the zero vector");
    for (auto& z : v) z /= n;
}

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const Complex> d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    CVector column(std::size_t c) const {
        CVector v(rows_);
        for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
        return v;
    }

    void set_column(std::size_t c, std::span<const Complex> v) {
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
    }

    std::span<Complex> data() { return data_; }
    std::span<const Complex> data() const { return data_; }

    Matrix adjoint() const {
        Matrix m(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Matrix& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
    friend Matrix operator*(Complex s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw InputError("matrix product: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        const std::size_t n = b.cols_;
        for (std::size_t i = 0; i < a.rows_; ++i) {
            Complex* ci = c.data_.data() + i * n;
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                const Complex* bk = b.data_.data() + k * n;
                for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
            }
        }
        return c;
    }

    friend CVector operator*(const Matrix& a, std::span<const Complex> v) {
        if (a.cols_ != v.size()) throw InputError("matrix-vector product: dimension mismatch");
        CVector out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            const Complex* ai = a.data_.data() + i * a.cols_;
            Complex s{};
            for (std::size_t k = 0; k < a.cols_; ++k) s += ai[k] * v[k];
            out[i] = s;
        }
        return out;
    }

    // A^dagger v without forming the adjoint.
    CVector adjoint_times(std::span<const Complex> v) const {
        if (rows_ != v.size()) throw InputError("adjoint product: dimension mismatch");
        CVector out(cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            const Complex* ai = data_.data() + i * cols_;
            const Complex vi = v[i];
            for (std::size_t k = 0; k < cols_; ++k) out[k] += std::conj(ai[k]) * vi;
        }
        return out;
    }

    void scale_rows(std::span<const double> d) {
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) *= d[r];
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    // max column sum, the ||A||_1 estimate used for relative tolerances
    double norm1() const {
        double m = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
            m = std::max(m, s);
        }
        return m;
    }

    // max row sum
    double norm_inf() const {
        double m = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < cols_; ++c) s += std::abs((*this)(r, c));
            m = std::max(m, s);
        }
        return m;
    }

    // sqrt(||A||_1 ||A||_inf), a cheap upper bound on the spectral norm
    double spectral_bound() const { return std::sqrt(norm1() * norm_inf()); }

    double frobenius() const { return norm(data_); }

    Complex trace() const {
        Complex t{};
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    // max |A - A^dagger|
    double hermitian_defect() const {
        double m = 0.0;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        return m;
    }

    // max |A^dagger A - I|
    double unitarity_defect() const {
        const Matrix g = adjoint() * (*this);
        double m = 0.0;
        for (std::size_t r = 0; r < g.rows_; ++r)
            for (std::size_t c = 0; c < g.cols_; ++c)
                m = std::max(m, std::abs(g(r, c) - (r == c ? 1.0 : 0.0)));
        return m;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    // Debug dump, one "row,col,re,im" line per entry.
    void write_csv(std::ostream& os) const {
        os << "row,col,re,im\n";
        char buf[96];
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) {
                std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", r, c, (*this)(r, c).real(),
                              (*this)(r, c).imag());
                os << buf;
            }
    }

private:
    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// ---------------------------------------------------------------------------
// Discrete Fourier transform, unitary normalisation:
//   (F v)_m = N^{-1/2} sum_j exp(-2 pi i m j / N) v_j

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// exp(sign * 2 pi i k / n) evaluated from the reduced index so that the
// table is exact under k -> k mod n.
inline Complex root_of_unity(long long k, long long n, int sign) {
    k %= n;
    if (k < 0) k += n;
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    return {std::cos(ang), std::sin(ang)};
}

inline void fft_radix2(CVector& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        std::vector<Complex> w(half);
        for (std::size_t k = 0; k < half; ++k)
            w[k] = root_of_unity(static_cast<long long>(k), static_cast<long long>(len), sign);
        for (std::size_t i = 0; i < n; i += len)
            for (std::size_t k = 0; k < half; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + half] * w[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
    }
}

inline CVector transform(std::span<const Complex> v, int sign) {
    const std::size_t n = v.size();
    if (n == 0) throw InputError("dft: empty vector");
    CVector out;
    if (is_power_of_two(n)) {
        out.assign(v.begin(), v.end());
        fft_radix2(out, sign);
    } else {
        out.assign(n, Complex{});
        std::vector<Complex> table(n);
        for (std::size_t k = 0; k < n; ++k)
            table[k] = root_of_unity(static_cast<long long>(k), static_cast<long long>(n), sign);
        for (std::size_t m = 0; m < n; ++m) {
            Complex s{};
            for (std::size_t j = 0; j < n; ++j) s += table[(m * j) % n] * v[j];
            out[m] = s;
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& z : out) z *= scale;
    return out;
}

}  // namespace detail

inline CVector dft(std::span<const Complex> v) { return detail::transform(v, -1); }
inline CVector idft(std::span<const Complex> v) { return detail::transform(v, +1); }

// ---------------------------------------------------------------------------
// Eigendecomposition

enum class MatrixKind { unitary, hermitian };

struct SpectralResult {
    CVector eigenvalues;  // sorted: by phase in (-pi, pi] (unitary) or ascending (hermitian)
    Matrix eigenvectors;  // orthonormal columns
    double worst_residual = 0.0;

    // eigenphases in (-pi, pi], valid for unitary input
    std::vector<double> phases() const {
        std::vector<double> p(eigenvalues.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::arg(eigenvalues[i]);
        return p;
    }
};

namespace detail {

struct Givens {
    double c = 1.0;
    Complex s{};
};

// Rotation G = [[c, s], [-conj(s), c]] with G (f, g)^T = (r, 0)^T.
inline Givens make_givens(Complex f, Complex g, Complex* r = nullptr) {
    Givens rot;
    const double af = std::abs(f);
    const double ag = std::abs(g);
    if (ag == 0.0) {
        if (r) *r = f;
        return rot;
    }
    if (af == 0.0) {
        rot.c = 0.0;
        rot.s = std::conj(g) / ag;
        if (r) *r = ag;
        return rot;
    }
    const double rho = std::hypot(af, ag);
    rot.c = af / rho;
    rot.s = (f / af) * std::conj(g) / rho;
    if (r) *r = f / af * rho;
    return rot;
}

// rows i, j of m, columns [c0, c1)
inline void rotate_rows(Matrix& m, std::size_t i, std::size_t j, const Givens& g, std::size_t c0, std::size_t c1) {
    auto ri = m.row(i);
    auto rj = m.row(j);
    for (std::size_t c = c0; c < c1; ++c) {
        const Complex x = ri[c];
        const Complex y = rj[c];
        ri[c] = g.c * x + g.s * y;
        rj[c] = -std::conj(g.s) * x + g.c * y;
    }
}

// columns i, j of m (multiplication by G^dagger on the right), rows [r0, r1)
inline void rotate_cols(Matrix& m, std::size_t i, std::size_t j, const Givens& g, std::size_t r0, std::size_t r1) {
    const Complex cs = std::conj(g.s);
    for (std::size_t r = r0; r < r1; ++r) {
        const Complex x = m(r, i);
        const Complex y = m(r, j);
        m(r, i) = x * g.c + y * cs;
        m(r, j) = -x * g.s + y * g.c;
    }
}

// Householder reduction to upper Hessenberg form, A = Q H Q^dagger.
inline void hessenberg(Matrix& h, Matrix& q) {
    const std::size_t n = h.rows();
    CVector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const Complex x0 = h(k + 1, k);
        const Complex phase = std::abs(x0) == 0.0 ? Complex{1.0} : x0 / std::abs(x0);
        const Complex alpha = -phase * xnorm;
        std::fill(v.begin(), v.end(), Complex{});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
        if (vnorm == 0.0) continue;
        const double beta = 2.0 / vnorm;
        // H <- (I - beta v v^dagger) H
        for (std::size_t c = k; c < n; ++c) {
            Complex s{};
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, c);
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) h(i, c) -= v[i] * s;
        }
        // H <- H (I - beta v v^dagger), Q <- Q (I - beta v v^dagger)
        auto apply_right = [&](Matrix& m) {
            for (std::size_t r = 0; r < n; ++r) {
                auto row = m.row(r);
                Complex s{};
                for (std::size_t i = k + 1; i < n; ++i) s += row[i] * v[i];
                s *= beta;
                for (std::size_t i = k + 1; i < n; ++i) row[i] -= s * std::conj(v[i]);
            }
        };
        apply_right(h);
        apply_right(q);
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

inline Complex wilkinson_shift(const Matrix& t, std::size_t iu, int iter) {
    if (iter == 10 || iter == 30) {
        // exceptional shift
        const double s = std::abs(t(iu, iu - 1).real()) + (iu >= 2 ? std::abs(t(iu - 1, iu - 2).real()) : 0.0);
        return t(iu, iu) + s;
    }
    Complex a = t(iu - 1, iu - 1), b = t(iu - 1, iu), c = t(iu, iu - 1), d = t(iu, iu);
    const double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
    if (scale == 0.0) return 0.0;
    a /= scale;
    b /= scale;
    c /= scale;
    d /= scale;
    const Complex bc = b * c;
    const Complex diff = a - d;
    const Complex disc = std::sqrt(diff * diff + 4.0 * bc);
    const Complex det = a * d - bc;
    const Complex tr = a + d;
    Complex e1 = (tr + disc) / 2.0;
    Complex e2 = (tr - disc) / 2.0;
    if (std::abs(e1) > std::abs(e2)) {
        e2 = det / e1;
    } else if (std::abs(e2) != 0.0) {
        e1 = det / e2;
    }
    const Complex shift = std::abs(e1 - d) < std::abs(e2 - d) ? e1 : e2;
    return shift * scale;
}

// Implicitly shifted complex QR on an upper Hessenberg matrix, reducing it
// to upper triangular (Schur) form and accumulating the rotations into q.
inline void schur_qr(Matrix& t, Matrix& q, double anorm) {
    const std::size_t n = t.rows();
    if (n <= 1) return;
    const double eps = std::numeric_limits<double>::epsilon();
    const std::size_t max_iter = 100 * n;
    std::size_t iu = n - 1;
    std::size_t total = 0;
    int iter = 0;
    auto negligible = [&](std::size_t i) {
        const double sub = std::abs(t(i, i - 1));
        return sub <= eps * (std::abs(t(i, i)) + std::abs(t(i - 1, i - 1))) || sub <= eps * eps * anorm;
    };
    while (true) {
        while (iu > 0 && negligible(iu)) {
            t(iu, iu - 1) = 0.0;
            --iu;
            iter = 0;
        }
        if (iu == 0) break;
        ++iter;
        if (++total > max_iter) {
            double worst = 0.0;
            for (std::size_t i = 1; i < n; ++i) worst = std::max(worst, std::abs(t(i, i - 1)));
            throw ConvergenceError("shifted QR did not converge within 100*N sweeps", worst);
        }
        std::size_t il = iu - 1;
        while (il > 0 && !negligible(il)) --il;
        if (il > 0) t(il, il - 1) = 0.0;

        const Complex shift = wilkinson_shift(t, iu, iter);
        Givens g = make_givens(t(il, il) - shift, t(il + 1, il));
        rotate_rows(t, il, il + 1, g, il, n);
        rotate_cols(t, il, il + 1, g, 0, std::min(il + 2, iu) + 1);
        rotate_cols(q, il, il + 1, g, 0, n);
        for (std::size_t i = il + 1; i < iu; ++i) {
            Complex r;
            g = make_givens(t(i, i - 1), t(i + 1, i - 1), &r);
            t(i, i - 1) = r;
            t(i + 1, i - 1) = 0.0;
            rotate_rows(t, i, i + 1, g, i, n);
            rotate_cols(t, i, i + 1, g, 0, std::min(i + 2, iu) + 1);
            rotate_cols(q, i, i + 1, g, 0, n);
        }
    }
}

inline double first_significant_arg(const Matrix& v, std::size_t col) {
    double vmax = 0.0;
    for (std::size_t r = 0; r < v.rows(); ++r) vmax = std::max(vmax, std::abs(v(r, col)));
    for (std::size_t r = 0; r < v.rows(); ++r)
        if (std::abs(v(r, col)) > 1e-6 * vmax) return std::arg(v(r, col));
    return 0.0;
}

inline double residual(const Matrix& a, const Matrix& vecs, std::size_t j, Complex mu) {
    const CVector v = vecs.column(j);
    CVector av = a * std::span<const Complex>(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::norm(av[i] - mu * v[i]);
    return std::sqrt(s);
}

}  // namespace detail

// Full spectral decomposition of a unitary or Hermitian matrix.
// Both kinds are normal, so the Schur vectors are the eigenvectors.
inline SpectralResult eigendecompose(const Matrix& a, MatrixKind kind) {
    if (!a.square()) throw InputError("eigendecompose: matrix is not square");
    if (!a.all_finite()) throw InputError("eigendecompose: non-finite entries");
    const std::size_t n = a.rows();
    SpectralResult res;
    if (n == 0) return res;
    const double anorm = std::max(a.norm1(), std::numeric_limits<double>::min());
    if (kind == MatrixKind::unitary) {
        const double d = a.unitarity_defect();
        if (d > 1e-10 * anorm) throw InputError("eigendecompose: matrix is not unitary (defect " + std::to_string(d) + ")");
    } else {
        const double d = a.hermitian_defect();
        if (d > 1e-10 * anorm)
            throw InputError("eigendecompose: matrix is not Hermitian (defect " + std::to_string(d) + ")");
    }

    Matrix t = a;
    Matrix q = Matrix::identity(n);
    detail::hessenberg(t, q);
    detail::schur_qr(t, q, anorm);

    std::vector<Complex> mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = t(i, i);
        if (kind == MatrixKind::hermitian) mu[i] = mu[i].real();
    }
    auto key = [&](std::size_t i) {
        if (kind == MatrixKind::hermitian) return mu[i].real();
        double ph = std::arg(mu[i]);
        if (ph <= -std::numbers::pi + 1e-15) ph = std::numbers::pi;
        return ph;
    };
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> keys(n), args(n);
    for (std::size_t i = 0; i < n; ++i) {
        keys[i] = key(i);
        args[i] = detail::first_significant_arg(q, i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (std::abs(keys[x] - keys[y]) > 1e-12) return keys[x] < keys[y];
        return args[x] < args[y];
    });

    res.eigenvalues.resize(n);
    res.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        res.eigenvalues[k] = mu[j];
        for (std::size_t r = 0; r < n; ++r) res.eigenvectors(r, k) = q(r, j);
    }
    for (std::size_t k = 0; k < n; ++k)
        res.worst_residual =
            std::max(res.worst_residual, detail::residual(a, res.eigenvectors, k, res.eigenvalues[k]));
    if (res.worst_residual > 1e-9 * anorm)
        throw ConvergenceError("eigendecompose: residual above 1e-9*|A|", res.worst_residual);
    return res;
}

struct ExtremalEigen {
    double value = 0.0;
    CVector vector;
    double residual = 0.0;
};

enum class Extreme { min, max };

// Smallest or largest eigenpair of a Hermitian matrix.
inline ExtremalEigen extremal_eigen(const Matrix& h, Extreme which) {
    const SpectralResult s = eigendecompose(h, MatrixKind::hermitian);
    const std::size_t idx = which == Extreme::min ? 0 : s.eigenvalues.size() - 1;
    ExtremalEigen e;
    e.vector = s.eigenvectors.column(idx);
    const CVector hv = h * std::span<const Complex>(e.vector);
    e.value = dot(e.vector, hv).real();  // Rayleigh quotient
    double r = 0.0;
    for (std::size_t i = 0; i < hv.size(); ++i) r += std::norm(hv[i] - e.value * e.vector[i]);
    e.residual = std::sqrt(r);
    const double hn = std::max(h.norm1(), std::numeric_limits<double>::min());
    if (e.residual > 1e-10 * hn) throw ConvergenceError("extremal_eigen: Rayleigh residual too large", e.residual);
    return e;
}

namespace detail {

inline double power_iteration(const Matrix& a, CVector v, std::size_t max_iter) {
    double rho = 0.0;
    double nv = norm(v);
    for (auto& z : v) z /= nv;
    int stable = 0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        CVector w = a * std::span<const Complex>(v);
        CVector x = a.adjoint_times(w);
        const double next = norm(w);  // ||A v|| with ||v|| = 1, a lower bound on ||A||
        const double nx = norm(x);
        if (nx == 0.0) return next;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] / nx;
        if (std::abs(next - rho) <= 1e-13 * next) {
            if (++stable >= 3) return next;
        } else {
            stable = 0;
        }
        rho = next;
    }
    return -rho - 1.0;  // negative marks non-convergence, magnitude carries the estimate
}

}  // namespace detail

// Largest singular value: power iteration on A^dagger A from two
// deterministic starts; when the top singular values cluster and the
// iteration stalls, fall back to the dense Hermitian eigensolver on A^dagger A.
inline double operator_norm(const Matrix& a) {
    if (!a.square()) throw InputError("operator_norm: matrix is not square");
    const std::size_t n = a.cols();
    if (n == 0 || a.max_abs() == 0.0) return 0.0;
    const std::size_t cap = 400;
    CVector v1(n), v2(n);
    for (std::size_t i = 0; i < n; ++i) {
        v1[i] = Complex(1.0 + 0.1 * std::sin(1.0 + i), 0.3 * std::cos(2.0 * i));
        v2[i] = Complex(std::cos(0.7 * i * i + 0.3), std::sin(1.3 * i + 0.1));
    }
    const double r1 = detail::power_iteration(a, v1, cap);
    const double r2 = r1 < 0.0 ? -1.0 : detail::power_iteration(a, v2, cap);
    if (r1 >= 0.0 && r2 >= 0.0) return std::max(r1, r2);
    const ExtremalEigen top = extremal_eigen(a.adjoint() * a, Extreme::max);
    return std::sqrt(std::max(0.0, top.value));
}

}  // namespace anosov
