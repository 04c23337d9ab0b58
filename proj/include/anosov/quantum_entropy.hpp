#pragma once

// Refined quantum partitions pi_alpha = P_{a_{n-1}}(n-1) ... P_{a_0}(0),
// with A(t) = U^{-t} A U^t, and the entropies built from them.
//
// Writing A_alpha = P_{a_{n-1}} U P_{a_{n-2}} U ... U P_{a_0} gives
// pi_alpha = U^{-(n-1)} A_alpha, so norms of pi_alpha and of pi_alpha u are
// those of A_alpha, and A_{alpha k} = P_k U A_alpha extends a word by one
// letter with a single product.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/linalg.hpp"
#include "anosov/parallel.hpp"
#include "anosov/partition.hpp"
#include "anosov/quantization.hpp"
#include "anosov/semiclassical.hpp"

namespace anosov {

inline constexpr double kMaxWords = 1e6;

struct QuantumPartition {
    PlanckData plk;
    int K = 1;
    std::vector<std::vector<double>> diag;  // P_k(j / N)
    Matrix U, Ud;
};

inline QuantumPartition quantize_partition(const SmoothPartition& part, const TorusOperator& u) {
    QuantumPartition q;
    q.plk = u.plk;
    q.K = part.K;
    for (const auto& p : part.atoms) q.diag.push_back(site_values(p, u.plk));
    q.U = u.matrix;
    q.Ud = u.matrix.adjoint();
    return q;
}

inline double ipow(int K, int n) { return std::pow(double(K), double(n)); }

inline void check_word_cap(int K, int n, const char* where) {
    if (n < 0) throw InputError(std::string(where) + ": word length must be nonnegative");
    if (ipow(K, n) > kMaxWords)
        throw CapError(std::string(where) + ": K^n = " + std::to_string(ipow(K, n)) + " words exceeds the cap 1e6");
}

// pi_alpha as an explicit matrix
inline Matrix refined_operator(const std::vector<int>& alpha, const QuantumPartition& q) {
    if (alpha.empty()) throw InputError("refined_operator: empty word");
    const std::size_t n = q.plk.N;
    Matrix a = Matrix::identity(n);
    for (std::size_t t = 0; t < alpha.size(); ++t) {
        if (alpha[t] < 0 || alpha[t] >= q.K) throw InputError("refined_operator: letter out of range");
        if (t > 0) a = q.U * a;
        a.scale_rows(q.diag[static_cast<std::size_t>(alpha[t])]);
    }
    for (std::size_t t = 1; t < alpha.size(); ++t) a = q.Ud * a;
    return a;
}

inline double shannon(const std::vector<double>& w) {
    // a single outcome carries no information, whatever the roundoff in its weight
    if (w.size() <= 1) return 0.0;
    double h = 0.0;
    for (double p : w)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

struct EntropyReport {
    int n = 0;
    int K = 1;
    double h_plus = 0.0;
    double h_minus = 0.0;
    // indexed by the word code sum_t a_t K^(n-1-t) (first letter most significant)
    std::vector<double> weights_plus;   // ||pi_alpha u||^2
    std::vector<double> weights_minus;  // ||pi_alpha^dagger u||^2
    double sum_plus() const { return std::accumulate(weights_plus.begin(), weights_plus.end(), 0.0); }
    double sum_minus() const { return std::accumulate(weights_minus.begin(), weights_minus.end(), 0.0); }
};

namespace detail {

inline CVector scaled(const std::vector<double>& d, std::span<const Complex> v) {
    CVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = d[i] * v[i];
    return out;
}

inline std::size_t word_count(int K, int n) { return static_cast<std::size_t>(std::llround(ipow(K, n))); }

// ||A_alpha u||^2 for every word of length n
inline std::vector<double> plus_weights(const QuantumPartition& q, std::span<const Complex> u, int n) {
    std::vector<double> w(word_count(q.K, n), 0.0);
    if (n == 0) {
        w.assign(1, std::norm(norm(u)));
        return w;
    }
    auto rec = [&](auto&& self, const CVector& v, int depth, std::size_t code) -> void {
        if (depth == n) {
            w[code] = std::norm(norm(v));
            return;
        }
        const CVector uv = depth == 0 ? v : q.U * std::span<const Complex>(v);
        for (int k = 0; k < q.K; ++k) self(self, scaled(q.diag[static_cast<std::size_t>(k)], uv), depth + 1, code * q.K + k);
    };
    rec(rec, CVector(u.begin(), u.end()), 0, 0);
    return w;
}

// ||pi_alpha^dagger u||^2 = ||P_{a_0} U^dag P_{a_1} ... U^dag P_{a_{n-1}} U^{n-1} u||^2,
// enumerated from the last letter
inline std::vector<double> minus_weights(const QuantumPartition& q, std::span<const Complex> u, int n) {
    std::vector<double> w(word_count(q.K, n), 0.0);
    if (n == 0) {
        w.assign(1, std::norm(norm(u)));
        return w;
    }
    CVector z(u.begin(), u.end());
    for (int t = 1; t < n; ++t) z = q.U * std::span<const Complex>(z);
    auto rec = [&](auto&& self, const CVector& v, int depth, std::size_t code, std::size_t stride) -> void {
        if (depth == n) {
            w[code] = std::norm(norm(v));
            return;
        }
        const CVector uv = depth == 0 ? v : q.Ud * std::span<const Complex>(v);
        for (int k = 0; k < q.K; ++k)
            self(self, scaled(q.diag[static_cast<std::size_t>(k)], uv), depth + 1, code + std::size_t(k) * stride,
                 stride * std::size_t(q.K));
    };
    rec(rec, z, 0, 0, 1);
    return w;
}

}  // namespace detail

inline EntropyReport quantum_entropies(const QuantumState& u, int n, const QuantumPartition& q) {
    check_word_cap(q.K, n, "quantum_entropies");
    EntropyReport r;
    r.n = n;
    r.K = q.K;
    r.weights_plus = detail::plus_weights(q, u.amplitudes, n);
    r.weights_minus = detail::minus_weights(q, u.amplitudes, n);
    r.h_plus = shannon(r.weights_plus);
    r.h_minus = shannon(r.weights_minus);
    return r;
}

struct AveragedEntropyReport : EntropyReport {
    // sum_t theta_t h(U^t u), the lower bound given by concavity
    double mean_h_plus = 0.0;
    double mean_h_minus = 0.0;
};

inline AveragedEntropyReport averaged_entropies(const QuantumState& u, const TimeWeights& theta, int n,
                                                const QuantumPartition& q) {
    check_word_cap(q.K, n, "averaged_entropies");
    AveragedEntropyReport r;
    r.n = n;
    r.K = q.K;
    r.weights_plus.assign(detail::word_count(q.K, n), 0.0);
    r.weights_minus.assign(detail::word_count(q.K, n), 0.0);
    CVector v = detail::propagate(q.U, u.amplitudes, theta.offset);
    for (std::size_t i = 0; i < theta.weights.size(); ++i) {
        if (i > 0) v = q.U * std::span<const Complex>(v);
        const double th = theta.weights[i];
        if (th == 0.0) continue;
        const auto wp = detail::plus_weights(q, v, n);
        const auto wm = detail::minus_weights(q, v, n);
        for (std::size_t c = 0; c < wp.size(); ++c) {
            r.weights_plus[c] += th * wp[c];
            r.weights_minus[c] += th * wm[c];
        }
        r.mean_h_plus += th * shannon(wp);
        r.mean_h_minus += th * shannon(wm);
    }
    r.h_plus = shannon(r.weights_plus);
    r.h_minus = shannon(r.weights_minus);
    return r;
}

// ---------------------------------------------------------------------------
// c = max over words of length L of ||pi_beta||, by depth-first search with
// the bound ||A_{beta gamma}|| <= ||A_beta|| used to prune subtrees.

struct NormSearch {
    int length = 0;
    double value = 0.0;  // largest norm found (exact when complete)
    double upper = 0.0;  // rigorous upper bound, equal to value when complete
    std::size_t products = 0;
    std::size_t leaves = 0;
    bool complete = true;  // false when the product budget ran out
};

namespace detail {

inline double cheap_bound(const Matrix& a) { return std::min(a.frobenius(), a.spectral_bound()); }

struct SearchState {
    const QuantumPartition* q;
    int length;
    std::size_t budget;
    NormSearch res;
};

inline void search(SearchState& s, const Matrix& a, int depth) {
    if (depth == s.length) {
        if (cheap_bound(a) > s.res.value) {
            s.res.value = std::max(s.res.value, operator_norm(a));
            ++s.res.leaves;
        }
        return;
    }
    if (s.res.products >= s.budget) {
        s.res.complete = false;
        s.res.upper = std::max(s.res.upper, cheap_bound(a));
        return;
    }
    const Matrix ua = s.q->U * a;
    ++s.res.products;
    std::vector<Matrix> kids;
    std::vector<double> bound;
    for (int k = 0; k < s.q->K; ++k) {
        Matrix c = ua;
        c.scale_rows(s.q->diag[static_cast<std::size_t>(k)]);
        bound.push_back(cheap_bound(c));
        kids.push_back(std::move(c));
    }
    std::vector<std::size_t> order(kids.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return bound[x] > bound[y]; });
    for (std::size_t i : order)
        if (bound[i] > s.res.value) search(s, kids[i], depth + 1);
}

}  // namespace detail

inline NormSearch max_refined_norm(const QuantumPartition& q, int length, unsigned threads = 1,
                                   std::size_t budget = 200000) {
    NormSearch total;
    total.length = length;
    // K = 1 makes every refined operator a unitary
    if (length == 0 || q.K == 1) {
        total.value = total.upper = 1.0;
        return total;
    }
    std::vector<NormSearch> per(static_cast<std::size_t>(q.K));
    parallel_for(per.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            detail::SearchState s{&q, length, budget / per.size() + 1, {}};
            Matrix a = Matrix::diagonal(CVector(q.diag[k].begin(), q.diag[k].end()));
            detail::search(s, a, 1);
            per[k] = s.res;
        }
    });
    for (const auto& r : per) {
        total.value = std::max(total.value, r.value);
        total.upper = std::max(total.upper, r.upper);
        total.products += r.products;
        total.leaves += r.leaves;
        total.complete = total.complete && r.complete;
    }
    total.upper = std::max(total.upper, total.value);
    return total;
}

// c(n) = max_{alpha, alpha'} ||pi_alpha'(n) pi_alpha||; the product is
// pi_{alpha alpha'}, a word of length 2n.
inline NormSearch uncertainty_constant(const QuantumPartition& q, int n, unsigned threads = 1) {
    return max_refined_norm(q, 2 * n, threads);
}

struct UncertaintyReport {
    int n = 0;
    double c = 1.0;
    double h_plus_evolved = 0.0;  // h_n^+(U^n u)
    double h_minus = 0.0;         // h_n^-(u)
    double lhs() const { return h_plus_evolved + h_minus; }
    double rhs() const { return -2.0 * std::log(c); }
    double gap() const { return lhs() - rhs(); }
    bool holds() const { return gap() >= -1e-8; }
    // the energy cutoff is the identity on H_N, so no leakage term enters
    static constexpr bool cutoff_is_identity = true;
};

inline UncertaintyReport uncertainty_check(const QuantumState& u, int n, const QuantumPartition& q, double c) {
    UncertaintyReport r;
    r.n = n;
    r.c = c;
    const QuantumState moved{u.plk, detail::propagate(q.U, u.amplitudes, n), true};
    r.h_plus_evolved = quantum_entropies(moved, n, q).h_plus;
    r.h_minus = quantum_entropies(u, n, q).h_minus;
    return r;
}

inline UncertaintyReport uncertainty_check(const QuantumState& u, int n, const QuantumPartition& q) {
    return uncertainty_check(u, n, q, uncertainty_constant(q, n).value);
}

// floor((1 - delta) log N / log lambda)
inline int ehrenfest(const PlanckData& plk, double delta, double log_lambda) {
    if (!(delta >= 0.0 && delta < 1.0)) throw InputError("ehrenfest: delta must lie in [0, 1)");
    return int(std::floor((1.0 - delta) * std::log(double(plk.N)) / log_lambda + 1e-12));
}

struct NormDecayRow {
    int n = 0;
    NormSearch search;
};

struct NormDecayTable {
    std::size_t N = 0;
    std::vector<NormDecayRow> rows;
    int ehrenfest_time = 0;
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();  // slope of log c(n) in n
    double predicted_rate = 0.0;                                    // -log(lambda) / 2
    double predicted_prefactor = 0.0;                               // hbar^{-1/2}
    bool all_complete = true;

    void write_csv(std::ostream& os) const {
        os << "N,n,value,upper,complete\n";
        char buf[128];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%d\n", N, r.n, r.search.value, r.search.upper,
                          int(r.search.complete));
            os << buf;
        }
    }
};

inline NormDecayTable norm_decay_scan(const QuantumPartition& q, int n_max, double log_lambda, unsigned threads = 1) {
    NormDecayTable t;
    t.N = q.plk.N;
    t.ehrenfest_time = ehrenfest(q.plk, 0.0, log_lambda);
    if (n_max > t.ehrenfest_time + 4)
        throw InputError("norm_decay_scan: n_max = " + std::to_string(n_max) + " exceeds the Ehrenfest time + 4 = " +
                         std::to_string(t.ehrenfest_time + 4));
    t.predicted_rate = -0.5 * log_lambda;
    t.predicted_prefactor = 1.0 / std::sqrt(q.plk.hbar);
    std::vector<double> x, y;
    for (int n = 0; n <= n_max; ++n) {
        NormDecayRow row{n, uncertainty_constant(q, n, threads)};
        t.all_complete = t.all_complete && row.search.complete;
        if (n >= 1 && n <= t.ehrenfest_time && row.search.value > 0.0) {
            x.push_back(n);
            y.push_back(std::log(row.search.value));
        }
        t.rows.push_back(row);
    }
    if (x.size() >= 2) t.fitted_rate = least_squares_slope(x, y);
    return t;
}

struct SubadditivityReport {
    int n0 = 0, m = 0;
    double r_plus = 0.0;   // h+_{n0+m}(u) - h+_m(u) - h+_{n0}(U^m u)
    double r_minus = 0.0;  // same for h-
    bool theorem_regime = false;  // n0 + m <= Ehrenfest time
    double defect() const { return std::max({0.0, r_plus, r_minus}); }
};

inline SubadditivityReport subadditivity_check(const QuantumState& u, int n0, int m, const QuantumPartition& q,
                                               double log_lambda) {
    if (n0 < 1 || m < 1) throw InputError("subadditivity_check: n0 and m must be positive");
    SubadditivityReport r;
    r.n0 = n0;
    r.m = m;
    r.theorem_regime = n0 + m <= ehrenfest(q.plk, 0.0, log_lambda);
    const EntropyReport whole = quantum_entropies(u, n0 + m, q);
    const EntropyReport head = quantum_entropies(u, m, q);
    const QuantumState moved{u.plk, detail::propagate(q.U, u.amplitudes, m), true};
    const EntropyReport tail = quantum_entropies(moved, n0, q);
    r.r_plus = whole.h_plus - head.h_plus - tail.h_plus;
    r.r_minus = whole.h_minus - head.h_minus - tail.h_minus;
    return r;
}

// ---------------------------------------------------------------------------
// Entropy per step over an N sweep, against the target (1/2) log lambda

struct EntropyRow {
    std::size_t N = 0;
    int n = 0;
    std::size_t word_count = 0;
    double h_plus = 0.0;   // h_n^+ / n
    double h_minus = 0.0;  // h_n^- / n
    double bound = 0.0;    // (1/2) log lambda
};

struct LimitEntropyReport {
    std::vector<EntropyRow> rows;
    double lower_target = 0.0;  // (1/2) log lambda, an analogy only
    double upper = 0.0;         // log lambda

    void write_csv(std::ostream& os) const {
        os << "N,n,word_count,h_plus,h_minus,bound\n";
        char buf[160];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%zu,%.17g,%.17g,%.17g\n", r.N, r.n, r.word_count, r.h_plus,
                          r.h_minus, r.bound);
            os << buf;
        }
    }
};

inline EntropyRow entropy_row(const QuantumState& u, int n, const QuantumPartition& q, double log_lambda) {
    const EntropyReport e = quantum_entropies(u, n, q);
    return {q.plk.N, n, detail::word_count(q.K, n), e.h_plus / n, e.h_minus / n, 0.5 * log_lambda};
}

inline LimitEntropyReport limit_entropy_estimate(const std::vector<QuantumState>& states,
                                                 const std::vector<QuantumPartition>& parts, int n, double log_lambda) {
    if (states.size() != parts.size()) throw InputError("limit_entropy_estimate: one partition per state");
    if (n < 1) throw InputError("limit_entropy_estimate: n must be positive");
    LimitEntropyReport rep;
    rep.lower_target = 0.5 * log_lambda;
    rep.upper = log_lambda;
    for (std::size_t i = 0; i < states.size(); ++i) rep.rows.push_back(entropy_row(states[i], n, parts[i], log_lambda));
    return rep;
}

}  // namespace anosov
