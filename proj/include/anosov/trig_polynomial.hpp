#pragma once

// Observables on the 2-torus stored as finitely many Fourier modes,
//   a(x, xi) = sum_k a_k exp(2 pi i (k.x * x + k.xi * xi)).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "anosov/errors.hpp"

namespace anosov {

using Complex = std::complex<double>;

struct Frequency {
    std::int64_t x = 0;   // frequency along the position coordinate
    std::int64_t xi = 0;  // frequency along the momentum coordinate

    friend auto operator<=>(const Frequency&, const Frequency&) = default;
    Frequency operator-() const { return {-x, -xi}; }
    friend Frequency operator+(Frequency a, Frequency b) { return {a.x + b.x, a.xi + b.xi}; }
    std::int64_t sup_norm() const { return std::max(x < 0 ? -x : x, xi < 0 ? -xi : xi); }
};

class TrigPolynomial {
public:
    using Coefficients = std::map<Frequency, Complex>;

    TrigPolynomial() = default;
    explicit TrigPolynomial(Coefficients c) : coeffs_(std::move(c)) { prune(); }

    static TrigPolynomial constant(Complex c) { return TrigPolynomial({{Frequency{0, 0}, c}}); }

    // amp * cos(2 pi (k.x x + k.xi xi))
    static TrigPolynomial cosine(Frequency k, double amp = 1.0) {
        if (k == Frequency{}) return constant(amp);
        return TrigPolynomial({{k, amp / 2.0}, {-k, amp / 2.0}});
    }

    // amp * sin(2 pi (k.x x + k.xi xi))
    static TrigPolynomial sine(Frequency k, double amp = 1.0) {
        if (k == Frequency{}) return {};
        return TrigPolynomial({{k, Complex(0.0, -amp / 2.0)}, {-k, Complex(0.0, amp / 2.0)}});
    }

    // Function of x only, from its coefficients c_m for m = -L..L.
    static TrigPolynomial x_only(const std::map<std::int64_t, Complex>& c) {
        Coefficients out;
        for (const auto& [m, v] : c) out[{m, 0}] = v;
        return TrigPolynomial(std::move(out));
    }

    const Coefficients& coefficients() const { return coeffs_; }

    Complex coefficient(Frequency k) const {
        const auto it = coeffs_.find(k);
        return it == coeffs_.end() ? Complex{} : it->second;
    }

    // Liouville (Lebesgue) average
    Complex mean() const { return coefficient({0, 0}); }

    std::int64_t degree() const {
        std::int64_t d = 0;
        for (const auto& [k, v] : coeffs_) d = std::max(d, k.sup_norm());
        return d;
    }

    bool empty() const { return coeffs_.empty(); }

    bool is_real(double tol = 1e-14) const {
        for (const auto& [k, v] : coeffs_)
            if (std::abs(v - std::conj(coefficient(-k))) > tol * (1.0 + std::abs(v))) return false;
        return true;
    }

    bool is_x_only() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.first.xi == 0; });
    }

    // sum_k |a_k|, which bounds both sup|a| and the quantized operator norm
    double l1_norm() const {
        double s = 0.0;
        for (const auto& [k, v] : coeffs_) s += std::abs(v);
        return s;
    }

    Complex evaluate(double x, double xi) const {
        Complex s{};
        for (const auto& [k, v] : coeffs_) {
            const double ph = 2.0 * std::numbers::pi * (double(k.x) * x + double(k.xi) * xi);
            s += v * Complex(std::cos(ph), std::sin(ph));
        }
        return s;
    }

    // a o A for an integer matrix A = [[a, b], [c, d]] acting on (x, xi):
    // the mode k moves to A^T k.
    TrigPolynomial compose(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) const {
        Coefficients out;
        for (const auto& [k, v] : coeffs_) out[{a * k.x + c * k.xi, b * k.x + d * k.xi}] += v;
        return TrigPolynomial(std::move(out));
    }

    TrigPolynomial& operator+=(const TrigPolynomial& o) {
        for (const auto& [k, v] : o.coeffs_) coeffs_[k] += v;
        prune();
        return *this;
    }
    TrigPolynomial& operator-=(const TrigPolynomial& o) {
        for (const auto& [k, v] : o.coeffs_) coeffs_[k] -= v;
        prune();
        return *this;
    }
    TrigPolynomial& operator*=(Complex s) {
        for (auto& [k, v] : coeffs_) v *= s;
        prune();
        return *this;
    }
    friend TrigPolynomial operator+(TrigPolynomial a, const TrigPolynomial& b) { return a += b; }
    friend TrigPolynomial operator-(TrigPolynomial a, const TrigPolynomial& b) { return a -= b; }
    friend TrigPolynomial operator*(TrigPolynomial a, Complex s) { return a *= s; }
    friend TrigPolynomial operator*(Complex s, TrigPolynomial a) { return a *= s; }

    // pointwise product (convolution of coefficients)
    friend TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b) {
        Coefficients out;
        for (const auto& [k1, v1] : a.coeffs_)
            for (const auto& [k2, v2] : b.coeffs_) out[k1 + k2] += v1 * v2;
        return TrigPolynomial(std::move(out));
    }

    // Plain-text form: one "k1 k2 re im" line per mode ('#' starts a comment).
    static TrigPolynomial parse(std::istream& in, const std::string& source = "<stream>") {
        Coefficients out;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::int64_t k1, k2;
            double re, im;
            if (!(ls >> k1)) continue;
            std::string rest;
            if (!(ls >> k2 >> re >> im) || (ls >> rest))
                throw InputError(source + ":" + std::to_string(lineno) + ": expected 'k1 k2 re im'");
            out[{k1, k2}] += Complex(re, im);
        }
        return TrigPolynomial(std::move(out));
    }

    static TrigPolynomial load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw InputError("cannot open observable file '" + path + "'");
        return parse(f, path);
    }

    void write(std::ostream& os) const {
        char buf[128];
        for (const auto& [k, v] : coeffs_) {
            std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n", static_cast<long long>(k.x),
                          static_cast<long long>(k.xi), v.real(), v.imag());
            os << buf;
        }
    }

private:
    void prune() {
        std::erase_if(coeffs_, [](const auto& kv) { return kv.second == Complex{}; });
    }

    Coefficients coeffs_;
};

}  // namespace anosov
