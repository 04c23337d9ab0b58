#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "anosov/config.hpp"
#include "anosov/runner.hpp"
#include "anosov/selftest.hpp"

namespace {

// --threads beats ANOSOV_THREADS, which beats the config file
unsigned resolve_threads(std::optional<unsigned> flag, unsigned from_config) {
    if (flag) return std::max(1u, *flag);
    if (const char* env = std::getenv("ANOSOV_THREADS")) {
        unsigned v = 0;
        if (anosov::detail::parse_number(std::string(env), v) && v >= 1) return v;
        std::cerr << "anosov-lab: ignoring ANOSOV_THREADS='" << env << "'\n";
    }
    return from_config;
}

int run_experiment(const std::string& kind, const std::string& config, std::optional<std::uint64_t> seed,
                   std::optional<unsigned> threads, std::optional<std::string> out) {
    anosov::ExperimentConfig cfg;
    try {
        cfg = anosov::parse_config(config);
    } catch (const anosov::InputError& e) {
        std::cerr << "anosov-lab: " << e.what() << "\n";
        return 2;
    }
    anosov::RunOptions opt;
    opt.kind = kind;
    opt.seed = seed.value_or(cfg.seed);
    opt.threads = resolve_threads(threads, cfg.threads);
    opt.out = out.value_or(cfg.out);
    try {
        const anosov::RunManifest m = anosov::run(cfg, opt);
        for (const auto& t : m.tasks) {
            std::printf("%-22s %-8s %8.2fs", t.name.c_str(), t.status.c_str(), t.seconds);
            if (!t.error.empty()) std::printf("  %s", t.error.c_str());
            std::printf("\n");
        }
        for (const auto& o : m.outputs) std::printf("wrote %s\n", (opt.out / o.file).string().c_str());
        std::printf("wrote %s\n", (opt.out / "manifest.json").string().c_str());
        if (!m.summary.empty()) std::printf("%s\n", m.summary.dump(2).c_str());
        return m.failed() == 0 ? 0 : 3;
    } catch (const std::exception& e) {
        std::cerr << "anosov-lab: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anosov-lab: experiments on quantized hyperbolic toral automorphisms"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    std::string chosen;

    for (const auto& kind : anosov::experiment_kinds()) {
        CLI::App* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
        sub->add_option("--config", config, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threads", threads, "worker threads (also ANOSOV_THREADS)")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "output directory");
        sub->callback([&chosen, kind] { chosen = kind; });
    }
    CLI::App* self = app.add_subcommand("selftest", "run the built-in example suite");
    self->callback([&chosen] { chosen = "selftest"; });

    CLI11_PARSE(app, argc, argv);

    if (chosen == "selftest") {
        int failed = 0;
        for (const auto& r : anosov::run_selftest()) {
            std::printf("%s  %s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.empty() ? "" : ": ",
                        r.detail.c_str());
            failed += !r.pass;
        }
        return failed == 0 ? 0 : 1;
    }
    return run_experiment(chosen, config, seed, threads, out);
}
