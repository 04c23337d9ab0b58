#pragma once

// Classical Monte-Carlo side: invariant-measure samplers, cylinder-count
// estimates of the Kolmogorov-Sinai entropy, and empirical Birkhoff large
// deviations.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "anosov/counter_rng.hpp"
#include "anosov/errors.hpp"
#include "anosov/parallel.hpp"
#include "anosov/thermodynamics.hpp"

namespace anosov {

// Produces orbit segments x, Ax, ..., A^{n-1}x with x drawn from a measure.
class Sampler {
public:
    virtual ~Sampler() = default;
    virtual std::string name() const = 0;
    virtual std::vector<std::array<double, 2>> trajectory(const HyperbolicToralMap& map, std::uint64_t index,
                                                          int n) const = 0;

protected:
    static std::vector<std::array<double, 2>> iterate(const HyperbolicToralMap& map, std::array<double, 2> x, int n) {
        std::vector<std::array<double, 2>> out(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) {
            out[static_cast<std::size_t>(t)] = x;
            x = map.apply(x[0], x[1]);
        }
        return out;
    }
};

class LebesgueSampler : public Sampler {
public:
    explicit LebesgueSampler(std::uint64_t seed) : rng_(seed, 1) {}
    std::string name() const override { return "lebesgue"; }
    std::vector<std::array<double, 2>> trajectory(const HyperbolicToralMap& map, std::uint64_t index,
                                                  int n) const override {
        return iterate(map, {rng_.uniform(2 * index), rng_.uniform(2 * index + 1)}, n);
    }

private:
    CounterRng rng_;
};

class PointMassSampler : public Sampler {
public:
    PointMassSampler(double x, double xi) : p_{x, xi} {}
    std::string name() const override { return "point-mass"; }
    std::vector<std::array<double, 2>> trajectory(const HyperbolicToralMap& map, std::uint64_t,
                                                  int n) const override {
        return iterate(map, p_, n);
    }

private:
    std::array<double, 2> p_;
};

// Uniform measure on the periodic orbit through the rational point num / den,
// iterated in exact integer arithmetic.
class PeriodicOrbitSampler : public Sampler {
public:
    PeriodicOrbitSampler(const HyperbolicToralMap& map, std::array<i64, 2> num, i64 den) : den_(den) {
        if (den < 1) throw InputError("PeriodicOrbitSampler: denominator must be positive");
        std::array<i64, 2> p{mod(num[0], den), mod(num[1], den)};
        const std::array<i64, 2> start = p;
        do {
            orbit_.push_back(p);
            const auto q = map.matrix().apply(p);
            p = {mod(q[0], den), mod(q[1], den)};
            if (orbit_.size() > static_cast<std::size_t>(den * den))
                throw InputError("PeriodicOrbitSampler: point is not periodic");
        } while (p != start);
    }
    std::string name() const override { return "periodic-orbit"; }
    std::size_t period() const { return orbit_.size(); }

    std::vector<std::array<double, 2>> trajectory(const HyperbolicToralMap&, std::uint64_t index,
                                                  int n) const override {
        std::vector<std::array<double, 2>> out(static_cast<std::size_t>(n));
        const std::size_t len = orbit_.size();
        for (int t = 0; t < n; ++t) {
            const auto& p = orbit_[(index + static_cast<std::size_t>(t)) % len];
            out[static_cast<std::size_t>(t)] = {double(p[0]) / double(den_), double(p[1]) / double(den_)};
        }
        return out;
    }

private:
    i64 den_;
    std::vector<std::array<i64, 2>> orbit_;
};

// ---------------------------------------------------------------------------
// Cylinder entropies on the K x K grid partition

struct KsEntropyReport {
    int n = 0;
    int K = 0;
    std::size_t samples = 0;
    std::vector<double> block_entropy;  // H_1 .. H_n (index m - 1), plug-in frequencies
    double estimate = 0.0;              // (H_n - H_1) / (n - 1), or H_1 for n = 1
    double h_over_n = 0.0;              // H_n / n
    double ruelle_bound = 0.0;          // log lambda
    std::size_t cylinders = 0;          // distinct n-cylinders hit
    std::size_t rare_cylinders = 0;     // cylinders with fewer than 10 hits
    bool undersampled = false;
    // H_n <= H_{n0} + H(window [n0, n)), exact for empirical measures
    int subadditivity_split = 0;
    double subadditivity_defect = 0.0;  // H_n - H_{n0} - H_window, should be <= 0
    bool within_ruelle() const { return estimate <= ruelle_bound + 0.05; }
};

namespace detail {

// plug-in entropy of the sorted sequence of keys
inline double sorted_entropy(const std::vector<std::uint64_t>& keys, std::uint64_t divisor, std::size_t* distinct,
                             std::size_t* rare) {
    const double total = double(keys.size());
    double h = 0.0;
    std::size_t d = 0, r = 0;
    for (std::size_t i = 0; i < keys.size();) {
        const std::uint64_t k = keys[i] / divisor;
        std::size_t j = i + 1;
        while (j < keys.size() && keys[j] / divisor == k) ++j;
        const double p = double(j - i) / total;
        h -= p * std::log(p);
        ++d;
        if (j - i < 10) ++r;
        i = j;
    }
    if (distinct) *distinct = d;
    if (rare) *rare = r;
    return h;
}

}  // namespace detail

inline KsEntropyReport ks_entropy_estimate(const HyperbolicToralMap& map, const Sampler& sampler, int K, int n,
                                           std::size_t samples, unsigned threads = 1) {
    if (K < 1 || n < 1) throw InputError("ks_entropy_estimate: need K >= 1 and n >= 1");
    if (samples < 1) throw InputError("ks_entropy_estimate: need at least one sample");
    const double bits = double(n) * std::log2(double(K) * double(K));
    if (bits > 63.0)
        throw CapError("ks_entropy_estimate: n log2(K^2) = " + std::to_string(bits) + " exceeds 63-bit words");
    const std::uint64_t cells = std::uint64_t(K) * std::uint64_t(K);

    std::vector<std::uint64_t> words(samples);
    parallel_for(samples, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const auto traj = sampler.trajectory(map, s, n);
            std::uint64_t w = 0;
            for (const auto& p : traj) {
                const auto ix = std::min<std::uint64_t>(std::uint64_t(p[0] * K), std::uint64_t(K - 1));
                const auto iy = std::min<std::uint64_t>(std::uint64_t(p[1] * K), std::uint64_t(K - 1));
                w = w * cells + ix * std::uint64_t(K) + iy;
            }
            words[s] = w;
        }
    });

    KsEntropyReport rep;
    rep.n = n;
    rep.K = K;
    rep.samples = samples;
    rep.ruelle_bound = map.log_lambda();
    std::vector<std::uint64_t> sorted = words;
    std::sort(sorted.begin(), sorted.end());
    // the first symbol is most significant, so prefixes of length m are
    // word / cells^(n-m) and stay sorted
    std::vector<std::uint64_t> pw(static_cast<std::size_t>(n) + 1, 1);
    for (int m = 1; m <= n; ++m) pw[static_cast<std::size_t>(m)] = pw[static_cast<std::size_t>(m) - 1] * cells;
    for (int m = 1; m <= n; ++m) {
        const std::uint64_t div = pw[static_cast<std::size_t>(n - m)];
        rep.block_entropy.push_back(
            detail::sorted_entropy(sorted, div, m == n ? &rep.cylinders : nullptr, m == n ? &rep.rare_cylinders : nullptr));
    }
    const double hn = rep.block_entropy.back();
    rep.h_over_n = hn / n;
    rep.estimate = n == 1 ? rep.block_entropy[0] : (hn - rep.block_entropy[0]) / (n - 1);
    rep.undersampled = rep.rare_cylinders > 0;

    if (n >= 2) {
        const int n0 = n / 2;
        rep.subadditivity_split = n0;
        const std::uint64_t tail = pw[static_cast<std::size_t>(n - n0)];
        std::vector<std::uint64_t> window(samples);
        for (std::size_t s = 0; s < samples; ++s) window[s] = words[s] % tail;
        std::sort(window.begin(), window.end());
        const double hw = detail::sorted_entropy(window, 1, nullptr, nullptr);
        rep.subadditivity_defect = hn - rep.block_entropy[static_cast<std::size_t>(n0) - 1] - hw;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Empirical Birkhoff deviations under Lebesgue measure

struct EmpiricalDeviation {
    double delta = 0.0;
    int n = 0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    double probability = 0.0;
    double log_rate = 0.0;  // log(probability) / n, -inf with zero hits
    bool below_resolution = false;
    double predicted_bound = std::numeric_limits<double>::quiet_NaN();  // exp(n H(delta)) when supplied
};

inline EmpiricalDeviation empirical_deviation(const HyperbolicToralMap& map, const TrigPolynomial& a, double delta,
                                              int n, std::size_t samples, std::uint64_t seed,
                                              unsigned threads = 1) {
    require_real(a, "empirical_deviation");
    if (n < 1 || samples < 1) throw InputError("empirical_deviation: need n >= 1 and samples >= 1");
    const LebesgueSampler sampler(seed);
    std::vector<char> hit(samples, 0);
    parallel_for(samples, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            double sum = 0.0;
            for (const auto& p : sampler.trajectory(map, s, n)) sum += a.evaluate(p[0], p[1]).real();
            hit[s] = sum / n > delta;
        }
    });
    EmpiricalDeviation out;
    out.delta = delta;
    out.n = n;
    out.samples = samples;
    out.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    out.probability = double(out.hits) / double(samples);
    out.below_resolution = out.hits == 0;
    out.log_rate = out.hits == 0 ? -std::numeric_limits<double>::infinity() : std::log(out.probability) / n;
    return out;
}

inline EmpiricalDeviation empirical_deviation(const HyperbolicToralMap& map, const TrigPolynomial& a, double delta,
                                              int n, std::size_t samples, std::uint64_t seed,
                                              const PressureCurve& curve, unsigned threads = 1) {
    EmpiricalDeviation out = empirical_deviation(map, a, delta, n, samples, seed, threads);
    out.predicted_bound = std::exp(n * rate_at(curve, delta).value);
    return out;
}

}  // namespace anosov
