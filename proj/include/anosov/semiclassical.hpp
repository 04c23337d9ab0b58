#pragma once

// Time-averaged semiclassical measures of state families on the quantized
// torus, generalized orthonormal families, and the deviation-probability
// experiment.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "anosov/counter_rng.hpp"
#include "anosov/errors.hpp"
#include "anosov/linalg.hpp"
#include "anosov/parallel.hpp"
#include "anosov/propagator.hpp"
#include "anosov/quantization.hpp"
#include "anosov/thermodynamics.hpp"

namespace anosov {

// theta_t >= 0 on t = offset, offset + 1, ..., summing to one
struct TimeWeights {
    int offset = 0;
    std::vector<double> weights{1.0};

    static TimeWeights make(int offset, std::vector<double> w) {
        if (w.empty()) throw InputError("TimeWeights: empty weight list");
        double s = 0.0;
        for (double v : w) {
            if (!(v >= 0.0)) throw InputError("TimeWeights: weights must be nonnegative");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-12) throw InputError("TimeWeights: weights sum to " + std::to_string(s));
        return {offset, std::move(w)};
    }
    static TimeWeights delta(int t = 0) { return {t, {1.0}}; }
    static TimeWeights uniform(int T) {
        if (T < 1) throw InputError("TimeWeights: window length must be at least 1");
        return {0, std::vector<double>(static_cast<std::size_t>(T), 1.0 / T)};
    }
    // the short window floor(log N) (at least one step)
    static TimeWeights log_window(std::size_t N) { return uniform(std::max(1, int(std::floor(std::log(double(N)))))); }

    TimeWeights shifted(int s) const { return {offset + s, weights}; }
    int last() const { return offset + int(weights.size()) - 1; }
};

struct GOFamily {
    PlanckData plk;
    std::vector<CVector> states;
    std::vector<double> probabilities;
    std::string provenance;

    std::size_t size() const { return states.size(); }
};

inline GOFamily make_family(PlanckData plk, std::vector<CVector> states, std::vector<double> probs,
                            std::string provenance) {
    if (states.size() != probs.size() || states.empty())
        throw InputError("GOFamily: need one probability per state and at least one state");
    double s = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw InputError("GOFamily: negative probability");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw InputError("GOFamily: probabilities sum to " + std::to_string(s));
    for (const auto& v : states) {
        if (v.size() != plk.N) throw InputError("GOFamily: state of wrong dimension");
        if (std::abs(norm(v) - 1.0) > 1e-8) throw InputError("GOFamily: state is not normalized");
    }
    return {plk, std::move(states), std::move(probs), std::move(provenance)};
}

inline GOFamily gof_eigenbasis(const TorusOperator& u) {
    const SpectralResult s = eigendecompose(u.matrix, MatrixKind::unitary);
    const std::size_t n = u.plk.N;
    std::vector<CVector> states;
    for (std::size_t j = 0; j < n; ++j) states.push_back(s.eigenvectors.column(j));
    return make_family(u.plk, std::move(states), std::vector<double>(n, 1.0 / double(n)), "eigenbasis");
}

inline GOFamily gof_position(const PlanckData& plk) {
    std::vector<CVector> states;
    for (std::size_t j = 0; j < plk.N; ++j) states.push_back(QuantumState::position(plk, j).amplitudes);
    return make_family(plk, std::move(states), std::vector<double>(plk.N, 1.0 / double(plk.N)), "position");
}

// normalized complex Gaussian vector number `index` of stream `seed`
inline CVector random_state(std::size_t N, std::uint64_t seed, std::uint64_t index) {
    const CounterRng rng(seed, 7);
    CVector v(N);
    for (std::size_t i = 0; i < N; ++i) {
        const std::uint64_t c = 2 * (index * N + i);
        v[i] = {rng.normal(c), rng.normal(c + 1)};
    }
    normalize(v);
    return v;
}

inline GOFamily gof_random(const PlanckData& plk, std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw InputError("gof_random: samples must be at least 1");
    std::vector<CVector> states;
    states.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) states.push_back(random_state(plk.N, seed, s));
    return make_family(plk, std::move(states), std::vector<double>(samples, 1.0 / double(samples)),
                       "random(" + std::to_string(seed) + ")");
}

// Hermitian probes with entries of unit scale
inline std::vector<Matrix> random_hermitian_probes(std::size_t N, std::size_t count, std::uint64_t seed) {
    const CounterRng rng(seed, 11);
    std::vector<Matrix> out;
    std::uint64_t c = 0;
    for (std::size_t p = 0; p < count; ++p) {
        Matrix b(N, N);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i; j < N; ++j) {
                const Complex z(rng.normal(c), i == j ? 0.0 : rng.normal(c + 1));
                c += 2;
                b(i, j) = z;
                b(j, i) = std::conj(z);
            }
        out.push_back(std::move(b));
    }
    return out;
}

struct GofReport {
    double norm_defect = 0.0;        // condition (1): max | ||u|| - 1 |
    bool window_vacuous = true;      // condition (2): spectral window is all of H_N
    double trace_defect = 0.0;       // condition (3): max_B | E<u|B|u> - Tr B / N |
    double trace_defect_scaled = 0.0;  // the same divided by ||B|| per probe
    bool norms_pass = false;
    bool trace_pass = false;
    bool pass() const { return norms_pass && trace_pass; }
};

// tol applies to condition (3) relative to each probe's operator norm
inline GofReport verify_gof(const GOFamily& fam, const std::vector<Matrix>& probes, double tol) {
    GofReport r;
    for (const auto& v : fam.states) r.norm_defect = std::max(r.norm_defect, std::abs(norm(v) - 1.0));
    r.norms_pass = r.norm_defect <= 1e-8;
    for (const Matrix& b : probes) {
        Complex avg{};
        for (std::size_t w = 0; w < fam.size(); ++w)
            avg += fam.probabilities[w] * dot(fam.states[w], b * std::span<const Complex>(fam.states[w]));
        const double d = std::abs(avg - b.trace() / double(fam.plk.N));
        r.trace_defect = std::max(r.trace_defect, d);
        r.trace_defect_scaled = std::max(r.trace_defect_scaled, d / std::max(operator_norm(b), 1e-300));
    }
    r.trace_pass = r.trace_defect_scaled <= tol;
    return r;
}

inline GOFamily evolve_family(const GOFamily& fam, const TorusOperator& u, int t) {
    GOFamily out = fam;
    for (auto& v : out.states)
        for (int s = 0; s < std::abs(t); ++s) v = t > 0 ? u.matrix * std::span<const Complex>(v) : u.matrix.adjoint_times(v);
    return out;
}

// ---------------------------------------------------------------------------
// mu_{hbar, omega}(a x theta) = sum_t theta_t <U^t u | Op(a) | U^t u>

namespace detail {

inline CVector apply_symbol(const TrigPolynomial& a, const PlanckData& plk, std::span<const Complex> v) {
    const auto roots = half_roots(plk.N);
    const long long n = static_cast<long long>(plk.N);
    CVector out(plk.N);
    for (const auto& [k, c] : a.coefficients()) {
        const long long x = lmod(k.x, 2 * n);
        const long long base = lmod(x * lmod(k.xi, 2 * n), 2 * n);
        for (long long j = 0; j < n; ++j)
            out[static_cast<std::size_t>(j)] += c * roots[static_cast<std::size_t>(lmod(base + 2 * x * j, 2 * n))] *
                                                v[static_cast<std::size_t>(lmod(j + k.xi, n))];
    }
    return out;
}

inline CVector propagate(const Matrix& u, CVector v, int t) {
    for (int s = 0; s < std::abs(t); ++s) v = t > 0 ? u * std::span<const Complex>(v) : u.adjoint_times(v);
    return v;
}

}  // namespace detail

struct MeasureEstimate {
    Complex value;
};

inline MeasureEstimate semiclassical_measure(const QuantumState& u, const TrigPolynomial& a, const TimeWeights& theta,
                                             const TorusOperator& prop) {
    detail::check_aliasing(a, u.plk, "semiclassical_measure");
    CVector v = detail::propagate(prop.matrix, u.amplitudes, theta.offset);
    Complex s{};
    for (std::size_t i = 0; i < theta.weights.size(); ++i) {
        if (i > 0) v = prop.matrix * std::span<const Complex>(v);
        if (theta.weights[i] != 0.0) s += theta.weights[i] * dot(v, detail::apply_symbol(a, u.plk, v));
    }
    return {s};
}

// real parts of the measures of every family member, in family order
inline std::vector<double> family_measures(const GOFamily& fam, const TrigPolynomial& a, const TimeWeights& theta,
                                           const TorusOperator& prop, unsigned threads = 1) {
    detail::check_aliasing(a, fam.plk, "family_measures");
    std::vector<double> out(fam.size());
    parallel_for(fam.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w)
            out[w] = semiclassical_measure({fam.plk, fam.states[w], true}, a, theta, prop).value.real();
    });
    return out;
}

// P(mu >= delta) under the family probabilities
inline double deviation_probability(const std::vector<double>& measures, const std::vector<double>& probs,
                                    double delta) {
    double p = 0.0;
    for (std::size_t w = 0; w < measures.size(); ++w)
        if (measures[w] >= delta) p += probs[w];
    return p;
}

inline double deviation_probability(const GOFamily& fam, const TrigPolynomial& a, const TimeWeights& theta,
                                    double delta, const TorusOperator& prop, unsigned threads = 1) {
    require_real(a, "deviation_probability");
    if (std::abs(a.mean()) > 1e-12) throw InputError("deviation_probability: observable must have zero mean");
    if (!(delta > 0.0)) throw InputError("deviation_probability: delta must be positive");
    return deviation_probability(family_measures(fam, a, theta, prop, threads), fam.probabilities, delta);
}

struct FamilyStatistics {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;  // quantum variance sum_w P_w |mu_w - mean|^2
    // Chebyshev: P(mu >= delta) <= E mu^2 / delta^2
    bool chebyshev_holds(double prob, double delta) const { return prob <= second_moment / (delta * delta) + 1e-15; }
    // Jensen: E exp(s mu) >= exp(s E mu)
    double jensen_gap(const std::vector<double>& measures, const std::vector<double>& probs, double s) const {
        double e = 0.0;
        for (std::size_t w = 0; w < measures.size(); ++w) e += probs[w] * std::exp(s * measures[w]);
        return e - std::exp(s * mean);
    }
};

inline FamilyStatistics family_statistics(const std::vector<double>& measures, const std::vector<double>& probs) {
    FamilyStatistics st;
    for (std::size_t w = 0; w < measures.size(); ++w) {
        st.mean += probs[w] * measures[w];
        st.second_moment += probs[w] * measures[w] * measures[w];
    }
    for (std::size_t w = 0; w < measures.size(); ++w) st.variance += probs[w] * std::pow(measures[w] - st.mean, 2);
    return st;
}

inline double quantum_variance(const GOFamily& fam, const TrigPolynomial& a, const TimeWeights& theta,
                               const TorusOperator& prop, unsigned threads = 1) {
    require_real(a, "quantum_variance");
    return family_statistics(family_measures(fam, a, theta, prop, threads), fam.probabilities).variance;
}

// Position states weighted so that P(a(j/N) >= delta) = hbar^exponent
// exactly; with theta = delta_0 their measures are a(j/N).
inline GOFamily planted_family(const PlanckData& plk, const TrigPolynomial& a, double delta, double exponent) {
    if (!a.is_x_only()) throw InputError("planted_family: observable must depend on x only");
    std::vector<std::size_t> hit, miss;
    for (std::size_t j = 0; j < plk.N; ++j)
        (a.evaluate(double(j) / double(plk.N), 0.0).real() >= delta ? hit : miss).push_back(j);
    if (hit.empty() || miss.empty()) throw InputError("planted_family: level delta must split the sites");
    const double p = std::pow(plk.hbar, exponent);
    std::vector<CVector> states;
    std::vector<double> probs;
    for (std::size_t j : hit) {
        states.push_back(QuantumState::position(plk, j).amplitudes);
        probs.push_back(p / double(hit.size()));
    }
    for (std::size_t j : miss) {
        states.push_back(QuantumState::position(plk, j).amplitudes);
        probs.push_back((1.0 - p) / double(miss.size()));
    }
    double s = 0.0;
    for (double q : probs) s += q;
    for (double& q : probs) q /= s;
    return make_family(plk, std::move(states), std::move(probs), "planted");
}

// ---------------------------------------------------------------------------
// Deviation-rate report over an N sweep

struct DeviationRow {
    std::size_t N = 0;
    double hbar = 0.0;
    double prob = 0.0;
    double log_prob_over_log_hbar = 0.0;  // NaN for prob = 0
};

struct DeviationRateReport {
    std::vector<DeviationRow> rows;
    double delta = 0.0;
    double slope = std::numeric_limits<double>::quiet_NaN();  // d log P / d log hbar
    double rate_H = std::numeric_limits<double>::quiet_NaN();
    double chi_max = 0.0;                                     // log lambda per step
    double bound = std::numeric_limits<double>::quiet_NaN();  // |H(delta)| / chi_max
    double bound_half = std::numeric_limits<double>::quiet_NaN();  // |H(delta)| / (2 chi_max)
    double margin = 0.2;
    bool degenerate = false;  // fewer than 4 nonzero probabilities
    bool vacuous = false;     // degenerate because the largest-N probabilities vanish
    bool consistent = false;  // slope >= bound - margin
    bool trend_ok = false;    // each value at most twice the previous

    void write_csv(std::ostream& os) const {
        os << "N,hbar,prob,log_prob_over_log_hbar\n";
        char buf[128];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.N, r.hbar, r.prob, r.log_prob_over_log_hbar);
            os << buf;
        }
    }
};

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

// P(hbar) <= hbar^{|H| / chi} asymptotically, i.e. the log-log slope should
// not fall below |H(delta)| / chi_max (up to the margin).
inline DeviationRateReport deviation_rate_report(std::vector<DeviationRow> rows, double delta, double rate_H,
                                                 double chi_max, double margin = 0.2) {
    DeviationRateReport rep;
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.N < b.N; });
    for (auto& r : rows)
        r.log_prob_over_log_hbar =
            r.prob > 0.0 ? std::log(r.prob) / std::log(r.hbar) : std::numeric_limits<double>::quiet_NaN();
    rep.rows = std::move(rows);
    rep.delta = delta;
    rep.rate_H = rate_H;
    rep.chi_max = chi_max;
    rep.margin = margin;
    rep.bound = std::abs(rate_H) / chi_max;
    rep.bound_half = rep.bound / 2.0;
    rep.trend_ok = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (rep.rows[i].prob > 2.0 * rep.rows[i - 1].prob) rep.trend_ok = false;
    std::vector<double> x, y;
    for (const auto& r : rep.rows)
        if (r.prob > 0.0) {
            x.push_back(std::log(r.hbar));
            y.push_back(std::log(r.prob));
        }
    if (x.size() < 4) {
        rep.degenerate = true;
        rep.vacuous = !rep.rows.empty() && x.size() > 0 && rep.rows.back().prob == 0.0;
        return rep;
    }
    rep.slope = least_squares_slope(x, y);
    rep.consistent = std::isfinite(rep.bound) && rep.slope >= rep.bound - margin;
    return rep;
}

struct VarianceRow {
    std::size_t N = 0;
    double variance = 0.0;
};

inline void write_variance_csv(std::ostream& os, const std::vector<VarianceRow>& rows) {
    os << "N,variance\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", r.N, r.variance);
        os << buf;
    }
}

}  // namespace anosov
