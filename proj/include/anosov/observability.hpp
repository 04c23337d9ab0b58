#pragma once

// Observability from a multiplication operator M_a and the classical set of
// orbits that never see a.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/linalg.hpp"
#include "anosov/propagator.hpp"
#include "anosov/quantization.hpp"
#include "anosov/toral_map.hpp"

namespace anosov {

// ---------------------------------------------------------------------------
// Grid points whose orbit avoids the support of a for |t| <= n

struct SurvivorReport {
    int n = 0;
    std::size_t G = 0;
    std::vector<std::array<std::size_t, 2>> points;  // grid indices (i, j) for (i / G, j / G)
    std::size_t coarse_count = 0;                    // occupied 2 x 2 blocks
    double dimension = 0.0;                          // log2(count / coarse_count)
    double log_lambda = 0.0;
    double entropy_estimate() const { return 0.5 * dimension * log_lambda; }
    bool dimension_below_two() const { return dimension < 2.0 - 1e-9; }
    bool entropy_below_half() const { return entropy_estimate() < 0.5 * log_lambda; }

    std::size_t count() const { return points.size(); }

    void write_grid_csv(std::ostream& os) const {
        os << "x,xi\n";
        char buf[80];
        for (const auto& p : points) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", double(p[0]) / double(G), double(p[1]) / double(G));
            os << buf;
        }
    }
    void write_summary_csv(std::ostream& os) const {
        os << "n,count,dimension_estimate\n";
        char buf[80];
        std::snprintf(buf, sizeof buf, "%d,%zu,%.17g\n", n, count(), dimension);
        os << buf;
    }
};

// ---------------------------------------------------------------------------
// Gram operator of the observation

struct ObservabilityReport {
    std::size_t N = 0;
    int T = 0;
    double lambda_min = 0.0;  // smallest eigenvalue of the Gram operator
    double lambda_max = 0.0;
    double C = 0.0;           // 1 / lambda_min, +inf when not observable
    bool observable = false;  // lambda_min > 1e-14
    CVector minimizer;        // hardest state to observe
    double hermitian_defect = 0.0;
    bool positive_semidefinite = false;  // lambda_min >= -1e-12 lambda_max
    std::optional<SurvivorReport> survivor;

    std::string status() const { return observable ? "observable" : "not observable at this resolution"; }
};

namespace detail {

inline ObservabilityReport gram_report(const Matrix& gram, std::size_t N, int T) {
    ObservabilityReport r;
    r.N = N;
    r.T = T;
    r.hermitian_defect = gram.hermitian_defect();
    Matrix g = gram;
    // symmetrize the roundoff before the Hermitian solver
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j) {
            const Complex z = 0.5 * (g(i, j) + std::conj(g(j, i)));
            g(i, j) = z;
            g(j, i) = std::conj(z);
        }
    const SpectralResult s = eigendecompose(g, MatrixKind::hermitian);
    r.lambda_min = s.eigenvalues.front().real();
    r.lambda_max = s.eigenvalues.back().real();
    r.minimizer = s.eigenvectors.column(0);
    r.observable = r.lambda_min > 1e-14;
    r.positive_semidefinite = r.lambda_min >= -1e-12 * std::max(1.0, r.lambda_max);
    r.C = r.observable ? 1.0 / r.lambda_min : std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace detail

// G_T = sum_{t < T} U^{-t} M_{a^2} U^t for T = 1..T_max, one report per T
inline std::vector<ObservabilityReport> observability_scan(const TrigPolynomial& a, int T_max, const TorusOperator& u) {
    if (!a.is_x_only()) throw InputError("observability: a must depend on x only");
    if (!a.is_real()) throw InputError("observability: a must be real");
    if (T_max < 1) throw InputError("observability: T must be at least 1");
    const std::size_t n = u.plk.N;
    std::vector<double> a2 = site_values(a, u.plk);
    for (double& v : a2) v *= v;
    Matrix x = Matrix::diagonal(CVector(a2.begin(), a2.end()));
    Matrix gram = x;
    const Matrix ud = u.matrix.adjoint();
    std::vector<ObservabilityReport> out;
    for (int T = 1; T <= T_max; ++T) {
        if (T > 1) {
            x = ud * x * u.matrix;
            gram += x;
        }
        out.push_back(detail::gram_report(gram, n, T));
    }
    return out;
}

inline ObservabilityReport observability_constant(const TrigPolynomial& a, int T, const TorusOperator& u) {
    return observability_scan(a, T, u).back();
}

inline void write_observability_csv(std::ostream& os, const std::vector<ObservabilityReport>& rows) {
    os << "N,T,C,lambda_min\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g\n", r.N, r.T, r.C, r.lambda_min);
        os << buf;
    }
}

inline SurvivorReport survivor_set(const TrigPolynomial& a, int n, std::size_t G, const HyperbolicToralMap& map) {
    if (!a.is_x_only()) throw InputError("survivor_set: a must depend on x only");
    if (G < 2 || G > 2048 || G % 2 != 0) throw InputError("survivor_set: grid size must be even and in [2, 2048]");
    if (n < 0) throw InputError("survivor_set: n must be nonnegative");
    std::vector<char> dark(G);
    for (std::size_t i = 0; i < G; ++i) dark[i] = std::norm(a.evaluate(double(i) / double(G), 0.0)) <= 1e-8;
    const IntMatrix2 fwd = map.matrix();
    const IntMatrix2 bwd = fwd.inverse_unimodular();
    const i64 g = static_cast<i64>(G);
    SurvivorReport rep;
    rep.n = n;
    rep.G = G;
    rep.log_lambda = map.log_lambda();
    std::vector<char> coarse(G * G / 4, 0);
    for (i64 i = 0; i < g; ++i) {
        if (!dark[static_cast<std::size_t>(i)]) continue;
        for (i64 j = 0; j < g; ++j) {
            bool alive = true;
            for (const IntMatrix2* step : {&fwd, &bwd}) {
                std::array<i64, 2> p{i, j};
                for (int t = 0; t < n && alive; ++t) {
                    const auto q = step->apply(p);
                    p = {mod(q[0], g), mod(q[1], g)};
                    alive = dark[static_cast<std::size_t>(p[0])];
                }
            }
            if (!alive) continue;
            rep.points.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
            coarse[static_cast<std::size_t>(i / 2) * (G / 2) + static_cast<std::size_t>(j / 2)] = 1;
        }
    }
    rep.coarse_count = static_cast<std::size_t>(std::count(coarse.begin(), coarse.end(), 1));
    rep.dimension = rep.points.empty() ? 0.0 : std::log2(double(rep.count()) / double(rep.coarse_count));
    return rep;
}

}  // namespace anosov
