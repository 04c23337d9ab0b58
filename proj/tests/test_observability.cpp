#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "anosov/observability.hpp"
#include "anosov/partition.hpp"

using namespace anosov;
using Catch::Matchers::WithinAbs;

namespace {

TrigPolynomial strip_vanishing() { return TrigPolynomial::constant(1.0) - smooth_strip(0.0, 0.2, 0.02, 120); }

const TorusOperator& cat_u(long long N) {
    static std::map<long long, TorusOperator> cache;
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, cat_propagator(cat_map(), PlanckData::make(N))).first;
    return it->second;
}

}  // namespace

TEST_CASE("observing everywhere gives C = 1/T", "[observability]") {
    const auto rows = observability_scan(TrigPolynomial::constant(1.0), 6, cat_u(64));
    for (const auto& r : rows) {
        CHECK_THAT(r.C, WithinAbs(1.0 / r.T, 1e-10));
        CHECK(r.observable);
        CHECK(r.positive_semidefinite);
    }
}

TEST_CASE("observing nothing gives the infinite sentinel", "[observability]") {
    const ObservabilityReport r = observability_constant(TrigPolynomial{}, 4, cat_u(64));
    CHECK_FALSE(r.observable);
    CHECK(std::isinf(r.C));
    CHECK(r.status() == "not observable at this resolution");
}

TEST_CASE("observability constant is nonincreasing in T", "[observability][property]") {
    const TrigPolynomial a = strip_vanishing();
    for (long long N : {64, 128}) {
        const auto rows = observability_scan(a, 8, cat_u(N));
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].C <= rows[i - 1].C + 1e-10);
        for (const auto& r : rows) {
            CHECK(r.positive_semidefinite);
            CHECK(r.hermitian_defect <= 1e-12);
            // sup |a| <= 1 gives Gram <= T Id
            CHECK(r.C >= 1.0 / r.T - 1e-12);
        }
    }
}

TEST_CASE("minimiser attains the smallest Gram eigenvalue", "[observability]") {
    const TrigPolynomial a = strip_vanishing();
    const TorusOperator& u = cat_u(64);
    const ObservabilityReport r = observability_constant(a, 3, u);
    // <v, G v> = sum_t ||M_a U^t v||^2, computed directly
    std::vector<double> s = site_values(a, u.plk);
    CVector v = r.minimizer;
    double energy = 0.0;
    for (int t = 0; t < 3; ++t) {
        for (std::size_t j = 0; j < 64; ++j) energy += s[j] * s[j] * std::norm(v[j]);
        v = u.matrix * std::span<const Complex>(v);
    }
    CHECK_THAT(energy, WithinAbs(r.lambda_min, 1e-10));
}

TEST_CASE("strip-vanishing observable is observable at T = 8", "[observability]") {
    const TrigPolynomial a = strip_vanishing();
    for (long long N : {64, 128, 256}) {
        const ObservabilityReport r = observability_constant(a, 8, cat_u(N));
        CHECK(r.observable);
        CHECK(std::isfinite(r.C));
        CHECK(r.C > 0.0);
    }
}

TEST_CASE("observability input validation and csv", "[observability]") {
    CHECK_THROWS_AS(observability_constant(TrigPolynomial::cosine({0, 1}), 2, cat_u(64)), InputError);
    CHECK_THROWS_AS(observability_constant(TrigPolynomial::sine({1, 0}) * Complex(0, 1), 2, cat_u(64)), InputError);
    CHECK_THROWS_AS(observability_constant(TrigPolynomial::constant(1.0), 0, cat_u(64)), InputError);
    std::ostringstream os;
    write_observability_csv(os, observability_scan(TrigPolynomial::constant(1.0), 2, cat_u(64)));
    CHECK(os.str().rfind("N,T,C,lambda_min\n64,1,1,1\n64,2,0.49999999", 0) == 0);
}

TEST_CASE("survivor set examples", "[survivor]") {
    const HyperbolicToralMap m = cat_map();
    const SurvivorReport none = survivor_set(TrigPolynomial::constant(1.0), 4, 256, m);
    CHECK(none.count() == 0);
    CHECK(none.dimension == 0.0);

    const SurvivorReport all = survivor_set(TrigPolynomial{}, 4, 256, m);
    CHECK(all.count() == 256u * 256u);
    CHECK_THAT(all.dimension, WithinAbs(2.0, 1e-12));
    CHECK_FALSE(all.dimension_below_two());

    const TrigPolynomial a = strip_vanishing();
    std::size_t prev = SIZE_MAX;
    for (int n : {1, 2, 4, 8}) {
        const SurvivorReport r = survivor_set(a, n, 1024, m);
        CHECK(r.count() <= prev);
        prev = r.count();
        // the fixed point at the origin always survives
        CHECK(std::find(r.points.begin(), r.points.end(), std::array<std::size_t, 2>{0, 0}) != r.points.end());
        if (n == 8) {
            CHECK(r.dimension <= 1.2);
            CHECK(r.dimension_below_two());
            CHECK(r.entropy_below_half());
        }
    }
}

TEST_CASE("survivor points avoid the observation region", "[survivor][property]") {
    const HyperbolicToralMap m = cat_map();
    const TrigPolynomial a = strip_vanishing();
    const SurvivorReport r = survivor_set(a, 2, 512, m);
    REQUIRE(r.count() > 1);
    for (const auto& p : r.points) {
        double x = double(p[0]) / 512.0, xi = double(p[1]) / 512.0;
        for (int t = 0; t <= 2; ++t) {
            CHECK(std::norm(a.evaluate(x, 0.0)) <= 1e-8);
            const auto nx = m.apply(x, xi);
            x = nx[0];
            xi = nx[1];
        }
    }
}

TEST_CASE("survivor csv output", "[survivor]") {
    const SurvivorReport r = survivor_set(TrigPolynomial{}, 1, 2, cat_map());
    std::ostringstream grid, summary;
    r.write_grid_csv(grid);
    r.write_summary_csv(summary);
    CHECK(grid.str() == "x,xi\n0,0\n0,0.5\n0.5,0\n0.5,0.5\n");
    CHECK(summary.str() == "n,count,dimension_estimate\n1,4,2\n");
    CHECK_THROWS_AS(survivor_set(TrigPolynomial{}, 1, 4096, cat_map()), InputError);
    CHECK_THROWS_AS(survivor_set(TrigPolynomial{}, 1, 3, cat_map()), InputError);
}
