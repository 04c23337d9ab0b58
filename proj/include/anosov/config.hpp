#pragma once

// Experiment configs: "key = value" lines under [section] headers, '#'
// comments. Every problem in a file is collected before reporting.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/toral_map.hpp"
#include "anosov/trig_polynomial.hpp"

namespace anosov {

inline const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> k{"pressure",      "rate",          "deviation", "variance",
                                            "egorov",        "uncertainty",   "norm-decay", "subadditivity",
                                            "observability", "survivor",      "entropy"};
    return k;
}

struct ConfigIssue {
    int line = 0;  // 0 when the problem is not tied to one line
    std::string message;

    std::string str(const std::string& source) const {
        return line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message;
    }
};

class ConfigError : public InputError {
public:
    ConfigError(std::string source, std::vector<ConfigIssue> issues)
        : InputError(join(source, issues)), issues_(std::move(issues)) {}
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    static std::string join(const std::string& source, const std::vector<ConfigIssue>& issues) {
        std::string s = std::to_string(issues.size()) + " config error(s)";
        for (const auto& i : issues) s += "\n  " + i.str(source);
        return s;
    }
    std::vector<ConfigIssue> issues_;
};

struct ExperimentConfig {
    std::string source = "<config>";
    std::string hash;  // FNV-1a of the file bytes, 16 hex digits
    std::string kind;  // empty when the file leaves it to the subcommand

    IntMatrix2 matrix{2, 1, 1, 1};
    std::string observable_file;     // resolved path
    std::string observable_builtin;  // two-cos | strip-vanishing | one | zero
    std::optional<TrigPolynomial> observable;

    std::vector<long long> N;
    std::vector<double> delta;
    std::vector<double> s;
    std::vector<int> n;
    std::string theta = "log";  // log | uniform:T | delta:t
    std::string family = "eigenbasis";
    std::string state = "spread";
    int period = 12;
    int K = 3;
    int T = 8;
    int n0 = 2;
    int m = 3;
    int samples = 20;
    int eigenstates = 20;
    int grid = 1024;
    double exponent = 0.5;
    double margin = 0.2;

    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out = "out";

    std::map<std::string, int> lines;  // "section.key" -> line, for later messages

    bool has(const std::string& key) const { return lines.count(key) > 0; }
};

inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> tokens(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

template <class T>
bool parse_number(const std::string& tok, T& out) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    if (b != e && *b == '+') ++b;
    const auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && p == e;
}

struct KeyHandler {
    std::function<void(ExperimentConfig&, const std::string&, std::vector<std::string>&)> apply;
};

template <class T>
KeyHandler scalar(T ExperimentConfig::*field, T lo) {
    return {[field, lo](ExperimentConfig& c, const std::string& v, std::vector<std::string>& err) {
        const auto t = tokens(v);
        T x{};
        if (t.size() != 1 || !parse_number(t[0], x)) {
            err.push_back("malformed number '" + v + "'");
            return;
        }
        if (x < lo) {
            err.push_back("value " + t[0] + " is below the minimum " + std::to_string(lo));
            return;
        }
        c.*field = x;
    }};
}

template <class T>
KeyHandler list(std::vector<T> ExperimentConfig::*field) {
    return {[field](ExperimentConfig& c, const std::string& v, std::vector<std::string>& err) {
        std::vector<T> out;
        for (const auto& t : tokens(v)) {
            T x{};
            if (!parse_number(t, x)) {
                err.push_back("malformed number '" + t + "'");
                return;
            }
            out.push_back(x);
        }
        if (out.empty()) {
            err.push_back("empty list");
            return;
        }
        if (!std::is_sorted(out.begin(), out.end())) {
            err.push_back("grid must be sorted ascending");
            return;
        }
        c.*field = std::move(out);
    }};
}

inline KeyHandler word(std::string ExperimentConfig::*field, std::vector<std::string> allowed = {}) {
    return {[field, allowed](ExperimentConfig& c, const std::string& v, std::vector<std::string>& err) {
        if (v.empty()) {
            err.push_back("empty value");
            return;
        }
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string opts;
            for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
            err.push_back("'" + v + "' is not one of " + opts);
            return;
        }
        c.*field = v;
    }};
}

inline const std::map<std::string, KeyHandler>& key_table() {
    static const std::map<std::string, KeyHandler> table = [] {
        std::map<std::string, KeyHandler> t;
        t["experiment.kind"] = word(&ExperimentConfig::kind, experiment_kinds());
        t["experiment.seed"] = scalar<std::uint64_t>(&ExperimentConfig::seed, 0);
        t["experiment.threads"] = scalar<unsigned>(&ExperimentConfig::threads, 1);
        t["experiment.out"] = word(&ExperimentConfig::out);
        t["map.matrix"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& err) {
            const auto tk = tokens(v);
            i64 e[4];
            if (tk.size() != 4) {
                err.push_back("matrix needs 4 integers a b c d, got " + std::to_string(tk.size()));
                return;
            }
            for (int i = 0; i < 4; ++i)
                if (!parse_number(tk[static_cast<std::size_t>(i)], e[i])) {
                    err.push_back("malformed number '" + tk[static_cast<std::size_t>(i)] + "'");
                    return;
                }
            c.matrix = {e[0], e[1], e[2], e[3]};
            try {
                make_map(c.matrix);
            } catch (const InputError& ex) {
                err.push_back(ex.what());
            }
        }};
        t["observable.file"] = word(&ExperimentConfig::observable_file);
        t["observable.builtin"] =
            word(&ExperimentConfig::observable_builtin, {"two-cos", "strip-vanishing", "one", "zero"});
        t["sweep.N"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& err) {
            std::vector<std::string> sub;
            list(&ExperimentConfig::N).apply(c, v, sub);
            for (long long x : c.N)
                if (x < 2) sub.push_back("N = " + std::to_string(x) + " is invalid; N must be at least 2");
            if (!sub.empty()) c.N.clear();
            err.insert(err.end(), sub.begin(), sub.end());
        }};
        t["sweep.delta"] = list(&ExperimentConfig::delta);
        t["sweep.s"] = list(&ExperimentConfig::s);
        t["sweep.n"] = list(&ExperimentConfig::n);
        t["sweep.theta"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& err) {
            const auto colon = v.find(':');
            const std::string head = v.substr(0, colon);
            int arg = 0;
            const bool ok = (v == "log") || ((head == "uniform" || head == "delta") && colon != std::string::npos &&
                                             parse_number(v.substr(colon + 1), arg) &&
                                             (head == "delta" ? arg >= 0 : arg >= 1));
            if (!ok) {
                err.push_back("theta must be 'log', 'uniform:T' (T >= 1) or 'delta:t' (t >= 0), got '" + v + "'");
                return;
            }
            c.theta = v;
        }};
        t["sweep.family"] = word(&ExperimentConfig::family, {"eigenbasis", "position", "random", "planted"});
        t["sweep.state"] = word(&ExperimentConfig::state, {"spread", "position", "random", "eigen"});
        t["sweep.period"] = scalar(&ExperimentConfig::period, 1);
        t["sweep.K"] = scalar(&ExperimentConfig::K, 1);
        t["sweep.T"] = scalar(&ExperimentConfig::T, 1);
        t["sweep.n0"] = scalar(&ExperimentConfig::n0, 1);
        t["sweep.m"] = scalar(&ExperimentConfig::m, 1);
        t["sweep.samples"] = scalar(&ExperimentConfig::samples, 1);
        t["sweep.eigenstates"] = scalar(&ExperimentConfig::eigenstates, 0);
        t["sweep.grid"] = scalar(&ExperimentConfig::grid, 2);
        t["sweep.exponent"] = scalar(&ExperimentConfig::exponent, 0.0);
        t["sweep.margin"] = scalar(&ExperimentConfig::margin, 0.0);
        return t;
    }();
    return table;
}

}  // namespace detail

// base_dir resolves relative observable paths (the config file's directory)
inline ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                                          const std::string& source = "<config>") {
    ExperimentConfig c;
    c.source = source;
    c.hash = fnv1a_hex(text);
    std::vector<ConfigIssue> issues;
    const auto& table = detail::key_table();
    std::set<std::string> sections;
    for (const auto& [k, h] : table) sections.insert(k.substr(0, k.find('.')));

    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back({lineno, "unterminated section header '" + line + "'"});
                continue;
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) issues.push_back({lineno, "unknown section [" + section + "]"});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back({lineno, "expected 'key = value', got '" + line + "'"});
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty()) {
            issues.push_back({lineno, "key '" + key + "' appears before any [section]"});
            continue;
        }
        const std::string full = section + "." + key;
        const auto it = table.find(full);
        if (it == table.end()) {
            if (sections.count(section)) issues.push_back({lineno, "unknown key '" + key + "' in [" + section + "]"});
            continue;
        }
        if (const auto prev = c.lines.find(full); prev != c.lines.end()) {
            issues.push_back({lineno, "duplicate key '" + full + "' at line " + std::to_string(lineno) +
                                          " (first set at line " + std::to_string(prev->second) + ")"});
            continue;
        }
        c.lines[full] = lineno;
        std::vector<std::string> errs;
        it->second.apply(c, value, errs);
        for (auto& e : errs) issues.push_back({lineno, full + ": " + e});
    }

    if (c.has("observable.file") && c.has("observable.builtin"))
        issues.push_back({c.lines["observable.builtin"], "give either observable.file or observable.builtin, not both"});
    if (c.has("observable.file") && !c.observable_file.empty()) {
        std::filesystem::path p(c.observable_file);
        if (p.is_relative()) p = base_dir / p;
        c.observable_file = p.lexically_normal().string();
        const int ln = c.lines["observable.file"];
        if (!std::filesystem::is_regular_file(p)) {
            issues.push_back({ln, "observable file '" + c.observable_file + "' does not exist"});
        } else {
            try {
                c.observable = TrigPolynomial::load(c.observable_file);
            } catch (const InputError& e) {
                issues.push_back({ln, e.what()});
            }
        }
    }
    if (!issues.empty()) throw ConfigError(source, std::move(issues));
    return c;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path.parent_path(), path.string());
}

}  // namespace anosov
