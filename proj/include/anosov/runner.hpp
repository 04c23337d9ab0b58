#pragma once

// Experiment driver: one task per (experiment, N) cell, run on a worker pool,
// results reduced in N order, files written atomically, manifest last.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anosov/config.hpp"
#include "anosov/counter_rng.hpp"
#include "anosov/errors.hpp"
#include "anosov/observability.hpp"
#include "anosov/parallel.hpp"
#include "anosov/partition.hpp"
#include "anosov/propagator.hpp"
#include "anosov/quantum_entropy.hpp"
#include "anosov/semiclassical.hpp"
#include "anosov/thermodynamics.hpp"

#ifndef ANOSOV_VERSION
#define ANOSOV_VERSION "dev"
#endif

namespace anosov {

namespace fs = std::filesystem;

// Write through a sibling temp file and rename over the target, so a reader
// never sees a partial file. The temp file is removed if fill throws.
inline void atomic_write(const fs::path& target, const std::function<void(std::ostream&)>& fill) {
    fs::create_directories(target.parent_path().empty() ? fs::path(".") : target.parent_path());
    const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
    try {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InputError("cannot write '" + tmp.string() + "'");
        fill(f);
        f.flush();
        if (!f) throw InputError("write failed for '" + tmp.string() + "'");
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
    fs::rename(tmp, target);
}

struct RunOptions {
    std::string kind;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    fs::path out = "out";
};

struct TaskRecord {
    std::string name;
    std::string status = "ok";  // ok | skipped | failed
    std::string error;
    double seconds = 0.0;
};

struct OutputRecord {
    std::string file;
    std::size_t bytes = 0;
    std::string hash;
};

struct RunManifest {
    std::string kind;
    std::string config_source;
    std::string config_hash;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::vector<TaskRecord> tasks;
    std::vector<OutputRecord> outputs;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();

    std::size_t failed() const {
        return std::size_t(std::count_if(tasks.begin(), tasks.end(), [](const auto& t) { return t.status == "failed"; }));
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["tool"] = "anosov-lab";
        j["version"] = ANOSOV_VERSION;
        j["kind"] = kind;
        j["config"] = config_source;
        j["config_hash"] = config_hash;
        j["seed"] = seed;
        j["threads"] = threads;
        j["tasks"] = nlohmann::ordered_json::array();
        for (const auto& t : tasks) {
            nlohmann::ordered_json r;
            r["name"] = t.name;
            r["status"] = t.status;
            if (!t.error.empty()) r["error"] = t.error;
            r["seconds"] = t.seconds;
            j["tasks"].push_back(r);
        }
        j["outputs"] = nlohmann::ordered_json::array();
        for (const auto& o : outputs) j["outputs"].push_back({{"file", o.file}, {"bytes", o.bytes}, {"fnv1a", o.hash}});
        j["summary"] = summary;
        return j;
    }
};

namespace detail {

// A file queued for writing once every task has finished
struct PendingFile {
    std::string name;
    std::string body;  // CSV text starting with its header row
};

struct Cell {
    std::string name;
    std::function<void()> work;
};

inline TimeWeights theta_for(const std::string& spec, std::size_t N) {
    if (spec == "log") return TimeWeights::log_window(N);
    const auto colon = spec.find(':');
    const int arg = std::stoi(spec.substr(colon + 1));
    if (spec.compare(0, colon, "uniform") == 0) return TimeWeights::uniform(arg);
    return TimeWeights::delta(arg);
}

inline TrigPolynomial strip_vanishing_observable() {
    return TrigPolynomial::constant(1.0) - smooth_strip(0.0, 0.2, 0.02, 120);
}

inline TrigPolynomial observable_of(const ExperimentConfig& c) {
    if (c.observable) return *c.observable;
    const std::string& b = c.observable_builtin;
    if (b == "strip-vanishing") return strip_vanishing_observable();
    if (b == "one") return TrigPolynomial::constant(1.0);
    if (b == "zero") return {};
    return TrigPolynomial::cosine({1, 0}, 2.0);
}

inline std::vector<double> or_default(const std::vector<double>& v, std::vector<double> d) { return v.empty() ? d : v; }
inline std::vector<int> or_default(const std::vector<int>& v, std::vector<int> d) { return v.empty() ? d : v; }

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_line(std::initializer_list<std::string> cells) {
    std::string s;
    for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
    return s + "\n";
}

template <class F>
std::string capture(F&& f) {
    std::ostringstream os;
    f(os);
    return os.str();
}

inline GOFamily family_for(const std::string& kind, const TorusOperator& u, std::size_t samples, std::uint64_t seed) {
    if (kind == "position") return gof_position(u.plk);
    if (kind == "random") return gof_random(u.plk, samples, seed);
    return gof_eigenbasis(u);
}

// one propagator per N, refusing inadmissible N up front so the task is
// recorded as skipped rather than failed
struct SkipError : InputError {
    using InputError::InputError;
};

inline TorusOperator propagator_for(const HyperbolicToralMap& map, long long N) {
    const PlanckData plk = PlanckData::make(N);
    if (!propagator_admissible(map, plk.N))
        throw SkipError("N = " + std::to_string(N) + " fails the propagator parity check for " + map.matrix().str());
    return cat_propagator(map, plk);
}

}  // namespace detail

class Runner {
public:
    Runner(ExperimentConfig cfg, RunOptions opt) : cfg_(std::move(cfg)), opt_(std::move(opt)), map_(make_map(cfg_.matrix)) {
        man_.kind = opt_.kind;
        man_.config_source = cfg_.source;
        man_.config_hash = cfg_.hash;
        man_.seed = opt_.seed;
        man_.threads = opt_.threads;
    }

    RunManifest run() {
        if (!cfg_.kind.empty() && cfg_.kind != opt_.kind)
            throw InputError("config is for '" + cfg_.kind + "' but the subcommand is '" + opt_.kind + "'");
        const auto& k = opt_.kind;
        if (k == "pressure") pressure();
        else if (k == "rate") rate();
        else if (k == "deviation") deviation();
        else if (k == "variance") variance();
        else if (k == "egorov") egorov();
        else if (k == "uncertainty") uncertainty();
        else if (k == "norm-decay") norm_decay();
        else if (k == "subadditivity") subadditivity();
        else if (k == "observability") observability();
        else if (k == "survivor") survivor();
        else if (k == "entropy") entropy();
        else throw InputError("unknown experiment kind '" + k + "'");
        flush();
        return man_;
    }

private:
    // Runs every cell, each into its own slot; a throwing cell is recorded and
    // its siblings carry on.
    void execute(std::vector<detail::Cell>& cells) {
        std::vector<TaskRecord> recs(cells.size());
        parallel_for(cells.size(), opt_.threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                recs[i].name = cells[i].name;
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    cells[i].work();
                } catch (const detail::SkipError& e) {
                    recs[i].status = "skipped";
                    recs[i].error = e.what();
                } catch (const std::exception& e) {
                    recs[i].status = "failed";
                    recs[i].error = e.what();
                }
                recs[i].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
        });
        for (auto& r : recs) man_.tasks.push_back(std::move(r));
    }

    bool ok(std::size_t offset) const { return man_.tasks[offset].status == "ok"; }

    void add_file(std::string name, std::string body) { files_.push_back({std::move(name), std::move(body)}); }

    void flush() {
        const std::string comment = "# anosov-lab " + opt_.kind + " config_hash=" + cfg_.hash +
                                    " seed=" + std::to_string(opt_.seed) + "\n";
        for (const auto& f : files_) {
            const std::string text = comment + f.body;
            atomic_write(opt_.out / f.name, [&](std::ostream& os) { os << text; });
            man_.outputs.push_back({f.name, text.size(), fnv1a_hex(text)});
        }
        const std::string manifest = man_.to_json().dump(2) + "\n";
        atomic_write(opt_.out / "manifest.json", [&](std::ostream& os) { os << manifest; });
    }

    std::vector<long long> Ns(std::vector<long long> d) const { return cfg_.N.empty() ? d : cfg_.N; }

    PressureCurve curve(const TrigPolynomial& a) const {
        return pressure_curve(map_, a, detail::or_default(cfg_.s, linspace(-3.0, 3.0, 61)), cfg_.period);
    }

    // -- experiments --------------------------------------------------------

    void pressure() {
        const TrigPolynomial a = detail::observable_of(cfg_);
        std::optional<PressureCurve> c;
        std::vector<detail::Cell> cells{{"pressure", [&] { c = curve(a); }}};
        execute(cells);
        if (!c) return;
        add_file("pressure.csv", detail::capture([&](std::ostream& os) { c->write_csv(os); }));
        man_.summary["orbit_order"] = c->orbit_order();
        man_.summary["P_at_0"] = (*c)(0.0);
        man_.summary["log_lambda"] = map_.log_lambda();
        man_.summary["worst_convexity_defect"] = c->worst_convexity_defect();
    }

    void rate() {
        const TrigPolynomial a = detail::observable_of(cfg_);
        std::optional<RateFunction> r;
        std::vector<detail::Cell> cells{{"rate", [&] {
                                             r = rate_function(curve(a),
                                                               detail::or_default(cfg_.delta, linspace(-0.5, 0.5, 41)));
                                         }}};
        execute(cells);
        if (!r) return;
        add_file("rate.csv", detail::capture([&](std::ostream& os) { r->write_csv(os); }));
        std::size_t unattainable = 0;
        for (bool u : r->unattainable) unattainable += u;
        man_.summary["unattainable_levels"] = unattainable;
    }

    void deviation() {
        const TrigPolynomial a = detail::observable_of(cfg_);
        const auto Nv = Ns({64, 128, 256, 512});
        const auto deltas = detail::or_default(cfg_.delta, {0.1});
        const bool planted = cfg_.family == "planted";
        std::vector<std::vector<double>> prob(Nv.size(), std::vector<double>(deltas.size(), 0.0));
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            cells.push_back({"N=" + std::to_string(Nv[i]), [&, i] {
                                 const TorusOperator u = detail::propagator_for(map_, Nv[i]);
                                 const TimeWeights th = detail::theta_for(cfg_.theta, u.plk.N);
                                 if (planted) {
                                     for (std::size_t d = 0; d < deltas.size(); ++d)
                                         prob[i][d] = deviation_probability(
                                             planted_family(u.plk, a, deltas[d], cfg_.exponent), a, th, deltas[d], u);
                                     return;
                                 }
                                 const GOFamily fam = detail::family_for(cfg_.family, u, std::size_t(cfg_.samples),
                                                                         opt_.seed);
                                 for (double d : deltas)
                                     if (!(d > 0.0)) throw InputError("deviation: delta must be positive");
                                 const auto mu = family_measures(fam, a, th, u);
                                 for (std::size_t d = 0; d < deltas.size(); ++d)
                                     prob[i][d] = deviation_probability(mu, fam.probabilities, deltas[d]);
                             }});
        std::vector<double> H(deltas.size(), std::nan(""));
        if (!planted)
            cells.push_back({"rate", [&] {
                                 const PressureCurve c = curve(a);
                                 for (std::size_t d = 0; d < deltas.size(); ++d) H[d] = rate_at(c, deltas[d]).value;
                             }});
        execute(cells);
        auto& reports = man_.summary["deltas"];
        reports = nlohmann::ordered_json::array();
        for (std::size_t d = 0; d < deltas.size(); ++d) {
            std::vector<DeviationRow> rows;
            for (std::size_t i = 0; i < Nv.size(); ++i)
                if (ok(i)) rows.push_back({std::size_t(Nv[i]), PlanckData::make(Nv[i]).hbar, prob[i][d], 0.0});
            const double rateH = planted ? -cfg_.exponent * map_.log_lambda() : H[d];
            const DeviationRateReport rep = deviation_rate_report(rows, deltas[d], rateH, map_.log_lambda(), cfg_.margin);
            add_file("deviation_" + detail::fmt(deltas[d]) + ".csv",
                     detail::capture([&](std::ostream& os) { rep.write_csv(os); }));
            reports.push_back({{"delta", deltas[d]},
                               {"H", rep.rate_H},
                               {"slope", rep.slope},
                               {"bound", rep.bound},
                               {"bound_half", rep.bound_half},
                               {"degenerate", rep.degenerate},
                               {"vacuous", rep.vacuous},
                               {"consistent", rep.consistent},
                               {"trend_ok", rep.trend_ok}});
        }
        man_.summary["family"] = cfg_.family;
    }

    void variance() {
        const TrigPolynomial a = detail::observable_of(cfg_);
        const auto Nv = Ns({64, 128, 256});
        std::vector<double> var(Nv.size());
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            cells.push_back({"N=" + std::to_string(Nv[i]), [&, i] {
                                 const TorusOperator u = detail::propagator_for(map_, Nv[i]);
                                 const GOFamily fam =
                                     detail::family_for(cfg_.family, u, std::size_t(cfg_.samples), opt_.seed);
                                 var[i] = quantum_variance(fam, a, detail::theta_for(cfg_.theta, u.plk.N), u);
                             }});
        double sigma2 = std::nan("");
        cells.push_back({"dynamical-variance", [&] { sigma2 = dynamical_variance(map_, a, 60).sigma2; }});
        execute(cells);
        std::vector<VarianceRow> rows;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            if (ok(i)) rows.push_back({std::size_t(Nv[i]), var[i]});
        add_file("variance.csv", detail::capture([&](std::ostream& os) { write_variance_csv(os, rows); }));
        man_.summary["dynamical_variance"] = sigma2;
        man_.summary["family"] = cfg_.family;
    }

    void egorov() {
        const TrigPolynomial a = detail::observable_of(cfg_);
        const auto Nv = Ns({64, 128});
        std::vector<int> steps = cfg_.n;
        if (steps.empty())
            for (int s = 1; s <= 10; ++s) steps.push_back(s);
        std::vector<std::vector<double>> defect(Nv.size());
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            cells.push_back({"N=" + std::to_string(Nv[i]), [&, i] {
                                 const TorusOperator u = detail::propagator_for(map_, Nv[i]);
                                 for (int s : steps) defect[i].push_back(egorov_translation_defect(a, s, map_, u));
                             }});
        execute(cells);
        std::string body = "N,n,defect\n";
        double worst_ratio = 0.0;
        for (std::size_t i = 0; i < Nv.size(); ++i) {
            if (!ok(i)) continue;
            for (std::size_t j = 0; j < steps.size(); ++j) {
                body += detail::csv_line({std::to_string(Nv[i]), std::to_string(steps[j]), detail::fmt(defect[i][j])});
                if (steps[j] > 0) worst_ratio = std::max(worst_ratio, defect[i][j] / steps[j]);
            }
        }
        add_file("egorov.csv", body);
        man_.summary["worst_defect_per_step"] = worst_ratio;
    }

    QuantumPartition partition_for(const TorusOperator& u) const { return quantize_partition(build_partition(cfg_.K), u); }

    void uncertainty() {
        const auto Nv = Ns({128});
        const auto words = detail::or_default(cfg_.n, {2, 3, 4});
        struct Row {
            int n;
            std::string state;
            double c, lhs, gap;
        };
        std::vector<std::vector<Row>> rows(Nv.size());
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            cells.push_back({"N=" + std::to_string(Nv[i]), [&, i] {
                                 const TorusOperator u = detail::propagator_for(map_, Nv[i]);
                                 const QuantumPartition q = partition_for(u);
                                 std::vector<std::pair<std::string, QuantumState>> states;
                                 for (int s = 0; s < cfg_.samples; ++s)
                                     states.push_back({"random" + std::to_string(s),
                                                       {u.plk, random_state(u.plk.N, opt_.seed, std::uint64_t(s)), true}});
                                 if (cfg_.eigenstates > 0) {
                                     const GOFamily eig = gof_eigenbasis(u);
                                     const std::size_t stride = std::max<std::size_t>(1, eig.size() / std::size_t(cfg_.eigenstates));
                                     for (int e = 0; e < cfg_.eigenstates && std::size_t(e) * stride < eig.size(); ++e)
                                         states.push_back({"eigen" + std::to_string(std::size_t(e) * stride),
                                                           {u.plk, eig.states[std::size_t(e) * stride], true}});
                                 }
                                 for (int n : words) {
                                     const NormSearch c = uncertainty_constant(q, n);
                                     const double cval = c.complete ? c.value : c.upper;
                                     for (const auto& [name, st] : states) {
                                         const UncertaintyReport r = uncertainty_check(st, n, q, cval);
                                         rows[i].push_back({n, name, cval, r.lhs(), r.gap()});
                                     }
                                 }
                             }});
        execute(cells);
        std::string body = "N,n,state,c,lhs,gap\n";
        std::size_t violations = 0, checks = 0;
        for (std::size_t i = 0; i < Nv.size(); ++i) {
            if (!ok(i)) continue;
            for (const auto& r : rows[i]) {
                body += detail::csv_line({std::to_string(Nv[i]), std::to_string(r.n), r.state, detail::fmt(r.c),
                                          detail::fmt(r.lhs), detail::fmt(r.gap)});
                ++checks;
                violations += r.gap < -1e-8;
            }
        }
        add_file("uncertainty.csv", body);
        man_.summary["checks"] = checks;
        man_.summary["violations"] = violations;
        man_.summary["cutoff_is_identity"] = UncertaintyReport::cutoff_is_identity;
    }

    void norm_decay() {
        const auto Nv = Ns({128});
        const int n_max = cfg_.n.empty() ? 4 : cfg_.n.back();
        std::vector<NormDecayTable> tables(Nv.size());
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            cells.push_back({"N=" + std::to_string(Nv[i]), [&, i] {
                                 const TorusOperator u = detail::propagator_for(map_, Nv[i]);
                                 tables[i] = norm_decay_scan(partition_for(u), n_max, map_.log_lambda());
                             }});
        execute(cells);
        std::string body = "N,n,value,upper,complete\n";
        auto& fits = man_.summary["fits"];
        fits = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < Nv.size(); ++i) {
            if (!ok(i)) continue;
            const std::string t = detail::capture([&](std::ostream& os) { tables[i].write_csv(os); });
            body += t.substr(t.find('\n') + 1);
            fits.push_back({{"N", Nv[i]},
                            {"ehrenfest", tables[i].ehrenfest_time},
                            {"fitted_rate", tables[i].fitted_rate},
                            {"predicted_rate", tables[i].predicted_rate},
                            {"predicted_prefactor", tables[i].predicted_prefactor},
                            {"all_complete", tables[i].all_complete}});
        }
        add_file("norm_decay.csv", body);
    }

    void subadditivity() {
        const auto Nv = Ns({256});
        std::vector<std::vector<SubadditivityReport>> reps(Nv.size());
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            cells.push_back({"N=" + std::to_string(Nv[i]), [&, i] {
                                 const TorusOperator u = detail::propagator_for(map_, Nv[i]);
                                 const QuantumPartition q = partition_for(u);
                                 for (int s = 0; s < cfg_.samples; ++s)
                                     reps[i].push_back(subadditivity_check(
                                         {u.plk, random_state(u.plk.N, opt_.seed, std::uint64_t(s)), true}, cfg_.n0,
                                         cfg_.m, q, map_.log_lambda()));
                             }});
        execute(cells);
        std::string body = "N,n0,m,state,r_plus,r_minus,defect,theorem_regime\n";
        double worst = 0.0;
        for (std::size_t i = 0; i < Nv.size(); ++i) {
            if (!ok(i)) continue;
            for (std::size_t s = 0; s < reps[i].size(); ++s) {
                const auto& r = reps[i][s];
                body += detail::csv_line({std::to_string(Nv[i]), std::to_string(r.n0), std::to_string(r.m),
                                          std::to_string(s), detail::fmt(r.r_plus), detail::fmt(r.r_minus),
                                          detail::fmt(r.defect()), std::to_string(int(r.theorem_regime))});
                worst = std::max(worst, r.defect());
            }
        }
        add_file("subadditivity.csv", body);
        man_.summary["worst_defect"] = worst;
    }

    static nlohmann::ordered_json survivor_json(const SurvivorReport& s) {
        return {{"n", s.n},
                {"grid", s.G},
                {"count", s.count()},
                {"dimension_estimate", s.dimension},
                {"dimension_below_two", s.dimension_below_two()},
                {"entropy_estimate", s.entropy_estimate()},
                {"entropy_below_half_log_lambda", s.entropy_below_half()}};
    }

    void observability() {
        const TrigPolynomial a = cfg_.observable || !cfg_.observable_builtin.empty()
                                     ? detail::observable_of(cfg_)
                                     : detail::strip_vanishing_observable();
        const auto Nv = Ns({64, 128, 256});
        std::vector<std::vector<ObservabilityReport>> scans(Nv.size());
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            cells.push_back({"N=" + std::to_string(Nv[i]), [&, i] {
                                 scans[i] = observability_scan(a, cfg_.T, detail::propagator_for(map_, Nv[i]));
                             }});
        std::optional<SurvivorReport> surv;
        const int sn = cfg_.n.empty() ? 8 : cfg_.n.back();
        cells.push_back({"survivor", [&] { surv = survivor_set(a, sn, std::size_t(cfg_.grid), map_); }});
        execute(cells);
        std::vector<ObservabilityReport> rows;
        auto& per = man_.summary["constants"];
        per = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < Nv.size(); ++i) {
            if (!ok(i)) continue;
            rows.insert(rows.end(), scans[i].begin(), scans[i].end());
            const auto& last = scans[i].back();
            bool monotone = true, psd = true;
            for (std::size_t t = 0; t < scans[i].size(); ++t) {
                psd = psd && scans[i][t].positive_semidefinite;
                if (t > 0) monotone = monotone && scans[i][t].C <= scans[i][t - 1].C + 1e-10;
            }
            per.push_back({{"N", Nv[i]},
                           {"T", last.T},
                           {"C", std::isfinite(last.C) ? nlohmann::ordered_json(last.C) : nlohmann::ordered_json("inf")},
                           {"status", last.status()},
                           {"monotone_in_T", monotone},
                           {"gram_psd", psd}});
        }
        add_file("observability.csv", detail::capture([&](std::ostream& os) { write_observability_csv(os, rows); }));
        if (surv) {
            add_file("survivor.csv", detail::capture([&](std::ostream& os) { surv->write_summary_csv(os); }));
            man_.summary["survivor"] = survivor_json(*surv);
        }
    }

    void survivor() {
        const TrigPolynomial a = cfg_.observable || !cfg_.observable_builtin.empty()
                                     ? detail::observable_of(cfg_)
                                     : detail::strip_vanishing_observable();
        const auto steps = detail::or_default(cfg_.n, {1, 2, 4, 8});
        std::vector<SurvivorReport> reps(steps.size());
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < steps.size(); ++i)
            cells.push_back({"n=" + std::to_string(steps[i]),
                             [&, i] { reps[i] = survivor_set(a, steps[i], std::size_t(cfg_.grid), map_); }});
        execute(cells);
        std::string body = "n,count,dimension_estimate\n";
        auto& sets = man_.summary["sets"];
        sets = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (!ok(i)) continue;
            const std::string s = detail::capture([&](std::ostream& os) { reps[i].write_summary_csv(os); });
            body += s.substr(s.find('\n') + 1);
            add_file("survivor_grid_n" + std::to_string(steps[i]) + ".csv",
                     detail::capture([&](std::ostream& os) { reps[i].write_grid_csv(os); }));
            sets.push_back(survivor_json(reps[i]));
        }
        add_file("survivor.csv", body);
    }

    void entropy() {
        const auto Nv = Ns({64, 128, 256});
        const auto words = detail::or_default(cfg_.n, {1, 2, 3, 4});
        std::vector<std::vector<EntropyRow>> rows(Nv.size());
        std::vector<detail::Cell> cells;
        for (std::size_t i = 0; i < Nv.size(); ++i)
            cells.push_back({"N=" + std::to_string(Nv[i]), [&, i] {
                                 const TorusOperator u = detail::propagator_for(map_, Nv[i]);
                                 const QuantumPartition q = partition_for(u);
                                 const QuantumState st = state_for(u);
                                 for (int n : words) rows[i].push_back(entropy_row(st, n, q, map_.log_lambda()));
                             }});
        execute(cells);
        LimitEntropyReport rep;
        rep.lower_target = 0.5 * map_.log_lambda();
        rep.upper = map_.log_lambda();
        for (std::size_t i = 0; i < Nv.size(); ++i)
            if (ok(i)) rep.rows.insert(rep.rows.end(), rows[i].begin(), rows[i].end());
        add_file("entropy.csv", detail::capture([&](std::ostream& os) { rep.write_csv(os); }));
        man_.summary["state"] = cfg_.state;
        man_.summary["lower_target"] = rep.lower_target;
        man_.summary["upper"] = rep.upper;
    }

    QuantumState state_for(const TorusOperator& u) const {
        const std::size_t N = u.plk.N;
        if (cfg_.state == "position") return QuantumState::position(u.plk, N / 2);
        if (cfg_.state == "random") return {u.plk, random_state(N, opt_.seed, 0), true};
        if (cfg_.state == "eigen") return {u.plk, gof_eigenbasis(u).states[0], true};
        // uniform amplitudes, pseudo-random phases
        const CounterRng rng(opt_.seed, 11);
        CVector v(N);
        for (std::size_t j = 0; j < N; ++j) v[j] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform(j));
        return QuantumState::from(u.plk, std::move(v));
    }

    ExperimentConfig cfg_;
    RunOptions opt_;
    HyperbolicToralMap map_;
    RunManifest man_;
    std::vector<detail::PendingFile> files_;
};

inline RunManifest run(const ExperimentConfig& cfg, const RunOptions& opt) { return Runner(cfg, opt).run(); }

}  // namespace anosov
