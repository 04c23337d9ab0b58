#pragma once

// Quick example suite behind `anosov-lab selftest`: exact identities and
// small worked examples, each a few milliseconds to a few seconds.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "anosov/config.hpp"
#include "anosov/ks_entropy.hpp"
#include "anosov/observability.hpp"
#include "anosov/partition.hpp"
#include "anosov/propagator.hpp"
#include "anosov/quantum_entropy.hpp"
#include "anosov/thermodynamics.hpp"

namespace anosov {

struct SelftestResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

inline std::vector<SelftestResult> run_selftest() {
    const HyperbolicToralMap cat = cat_map();
    const TrigPolynomial two_cos = TrigPolynomial::cosine({1, 0}, 2.0);
    std::vector<std::pair<std::string, std::function<std::string()>>> checks;
    // each check returns an empty string on success, else what went wrong
    auto check = [&](std::string name, std::function<std::string()> f) { checks.push_back({std::move(name), std::move(f)}); };
    auto num = [](double x) {
        char b[32];
        std::snprintf(b, sizeof b, "%.3e", x);
        return std::string(b);
    };

    check("Op(1) is the identity", [&] {
        const double d = max_abs_diff(weyl_quantize(TrigPolynomial::constant(1.0), PlanckData::make(64)).matrix,
                                      Matrix::identity(64));
        return d == 0.0 ? "" : "deviation " + num(d);
    });
    check("Op(2cos) is Hermitian", [&] {
        const double d = weyl_quantize(two_cos, PlanckData::make(64)).matrix.hermitian_defect();
        return d <= 1e-12 ? "" : "defect " + num(d);
    });
    check("exact Egorov on a single mode", [&] {
        const double d = egorov_mode_defect({1, 2}, cat, cat_propagator(cat, PlanckData::make(64)));
        return d <= 1e-10 ? "" : "defect " + num(d);
    });
    check("odd N rejected for the cat map", [&] {
        try {
            cat_propagator(cat, PlanckData::make(63));
        } catch (const InputError&) {
            return std::string();
        }
        return std::string("accepted N = 63");
    });
    check("Fix(A) count", [&] { return periodic_point_count(cat, 1) == 1 ? "" : "expected 1"; });
    check("H(0) = 0", [&] {
        const double h = rate_at(pressure_curve(cat, two_cos, linspace(-3, 3, 61), 14), 0.0).value;
        return std::abs(h) <= 1e-6 ? "" : "H(0) = " + num(h);
    });
    check("KS entropy vanishes on a periodic orbit", [&] {
        const PeriodicOrbitSampler orbit(cat, {1, 2}, 5);
        const double h = ks_entropy_estimate(cat, orbit, 8, 10, 1000).estimate;
        return h <= 0.02 ? "" : "estimate " + num(h);
    });
    check("Ehrenfest time at N = 256", [&] {
        const int e = ehrenfest(PlanckData::make(256), 0.0, cat.log_lambda());
        return e == 5 ? "" : "got " + std::to_string(e);
    });
    check("partition of unity, K = 3", [&] {
        const double d = build_partition(3).defect;
        return d <= 1e-10 ? "" : "defect " + num(d);
    });
    check("dual resolutions of identity, N = 32, K = 3, n = 3", [&] {
        const QuantumPartition q = quantize_partition(build_partition(3), cat_propagator(cat, PlanckData::make(32)));
        Matrix l(32, 32), r(32, 32);
        for (int a = 0; a < 27; ++a) {
            const Matrix p = refined_operator({a / 9, (a / 3) % 3, a % 3}, q);
            l += p * p.adjoint();
            r += p.adjoint() * p;
        }
        const double d = std::max(max_abs_diff(l, Matrix::identity(32)), max_abs_diff(r, Matrix::identity(32)));
        return d <= 1e-9 ? "" : "deviation " + num(d);
    });
    check("uncertainty with one atom", [&] {
        const QuantumPartition q = quantize_partition(build_partition(1), cat_propagator(cat, PlanckData::make(32)));
        const UncertaintyReport r = uncertainty_check(QuantumState::position(q.plk, 3), 2, q);
        return r.holds() && r.c == 1.0 ? "" : "gap " + num(r.gap());
    });
    check("observing everywhere gives C = 1/T", [&] {
        const auto rows = observability_scan(TrigPolynomial::constant(1.0), 4, cat_propagator(cat, PlanckData::make(32)));
        for (const auto& r : rows)
            if (std::abs(r.C - 1.0 / r.T) > 1e-10) return "C = " + num(r.C) + " at T = " + std::to_string(r.T);
        return std::string();
    });
    check("observing nothing gives the infinite sentinel", [&] {
        const auto r = observability_constant(TrigPolynomial{}, 3, cat_propagator(cat, PlanckData::make(32)));
        return std::isinf(r.C) ? "" : "C = " + num(r.C);
    });
    check("survivor set of a nonvanishing observable is empty", [&] {
        const auto s = survivor_set(TrigPolynomial::constant(1.0), 3, 64, cat);
        return s.count() == 0 ? "" : std::to_string(s.count()) + " survivors";
    });
    check("survivor set of zero is the full grid", [&] {
        const auto s = survivor_set(TrigPolynomial{}, 3, 64, cat);
        return s.count() == 64 * 64 && std::abs(s.dimension - 2.0) < 1e-12 ? "" : "dimension " + num(s.dimension);
    });
    check("config rejects N = 1", [&] {
        try {
            parse_config_text("[sweep]\nN = 1 64\n", ".");
        } catch (const ConfigError& e) {
            return e.issues().size() == 1 && e.issues()[0].line == 2 ? "" : std::string(e.what());
        }
        return std::string("accepted");
    });

    std::vector<SelftestResult> out;
    for (auto& [name, f] : checks) {
        SelftestResult r{name, false, {}};
        try {
            r.detail = f();
            r.pass = r.detail.empty();
        } catch (const std::exception& e) {
            r.detail = std::string("threw: ") + e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace anosov
