// Copyright 2026 The qbaker Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qbaker: command-line front end for the coarse-grained baker's map
// experiments.
//
// Exit codes: 0 success, 2 parameter error, 3 invariant violation,
// 4 resource limit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbaker/experiments.hpp"

namespace {

constexpr int kExitParameter = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitResource = 4;

struct Flags {
    std::optional<int> qubits;
    std::optional<int> dot;
    std::optional<int> left;
    std::optional<int> right;
    std::optional<int> steps;
    std::optional<std::string> init_x;
    std::optional<double> prune;
    std::optional<unsigned> threads;
    std::string out;
    std::string format = "csv";
    bool timings = false;
    std::optional<std::string> l_values;
    std::optional<std::string> k_values;
    std::optional<int> width;
};

std::vector<int> parse_int_list(const std::string &text) {
    std::vector<int> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos) {
            throw std::invalid_argument("bad integer list entry '" + item + "'");
        }
        values.push_back(v);
    }
    return values;
}

unsigned resolve_threads(const Flags &flags) {
    if (flags.threads) {
        return *flags.threads;
    }
    if (const char *env = std::getenv("QBAKER_THREADS")) {
        return static_cast<unsigned>(std::stoul(env));
    }
    return 0;
}

qbaker::RunConfig build_config(qbaker::Experiment experiment, const Flags &flags) {
    qbaker::RunConfig cfg = qbaker::default_config(experiment);
    cfg.qubits = flags.qubits.value_or(cfg.qubits);
    cfg.dot = flags.dot.value_or(cfg.dot);
    cfg.left = flags.left.value_or(cfg.left);
    cfg.right = flags.right.value_or(cfg.right);
    cfg.steps = flags.steps.value_or(cfg.steps);
    if (flags.init_x) {
        cfg.x = qbaker::BitString::parse(*flags.init_x);
    }
    cfg.prune_eps = flags.prune.value_or(cfg.prune_eps);
    cfg.threads = resolve_threads(flags);
    if (flags.l_values) {
        cfg.l_values = parse_int_list(*flags.l_values);
    }
    if (flags.k_values) {
        cfg.k_values = parse_int_list(*flags.k_values);
    }
    cfg.width = flags.width.value_or(cfg.width);
    return cfg;
}

void emit(const qbaker::ResultRecord &record, const Flags &flags) {
    const std::string text =
        flags.format == "json" ? qbaker::to_json(record) : qbaker::to_csv(record);
    if (flags.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(flags.out, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot open output file " + flags.out);
        }
        file << text;
    }
    if (flags.timings) {
        for (const auto &[stage, seconds] : record.timings) {
            std::cerr << "timing " << stage << ' ' << seconds << " s\n";
        }
    }
}

int run_check(const Flags &flags) {
    using qbaker::Experiment;
    qbaker::RunConfig cfg = build_config(Experiment::check, flags);
    const bool explicit_history = flags.left || flags.right || flags.steps;
    bool history_params = true;
    if (!explicit_history && (flags.qubits || flags.dot)) {
        // derive (l, r, k) for a user-chosen shape; skip the history
        // suites if none fits
        cfg.left = std::max(0, cfg.dot - 2);
        cfg.right = cfg.qubits - cfg.dot - 1;
        cfg.steps = std::max(1, cfg.right - 1);
    }
    const qbaker::SystemShape shape(cfg.qubits, cfg.dot);
    if (explicit_history) {
        qbaker::validate_run(shape, cfg.left, cfg.right, cfg.steps);
    } else {
        history_params = qbaker::run_violation(shape, cfg.left, cfg.right, cfg.steps).empty();
    }
    const auto report = qbaker::run_check(cfg, history_params);
    std::cout << "# check N=" << cfg.qubits << " n=" << cfg.dot;
    if (history_params) {
        std::cout << " l=" << cfg.left << " r=" << cfg.right << " k=" << cfg.steps;
    }
    std::cout << '\n' << report.to_text();
    return report.passed() ? 0 : kExitInvariant;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Coarse-grained histories of the qubit quantum baker's map"};
    app.set_config("--config", "", "Flat 'key = value' file; command-line flags take precedence");
    app.require_subcommand(1, 1);

    Flags flags;
    app.add_option("--qubits,-N", flags.qubits, "Number of qubits N");
    app.add_option("--dot", flags.dot, "Dot position n (0 <= n <= N-1)");
    app.add_option("--left,-l", flags.left, "Ignored leftmost (momentum) bits l");
    app.add_option("--right,-r", flags.right, "Ignored rightmost (position) bits r");
    app.add_option("--steps,-k", flags.steps, "Number of iterations k");
    app.add_option("--init-x", flags.init_x, "Initial kept string x");
    app.add_option("--prune", flags.prune, "Branch pruning threshold on squared norm");
    app.add_option("--threads", flags.threads, "Worker threads (default: all cores)");
    app.add_option("--out,-o", flags.out, "Output file (default: stdout)");
    app.add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--timings", flags.timings, "Print per-stage wall-clock timings to stderr");
    app.add_option("--l-values", flags.l_values, "sweep: comma-separated l values");
    app.add_option("--k-values", flags.k_values, "sweep: comma-separated k values");
    app.add_option("--width,-c", flags.width, "sweep: kept width c");

    auto *check = app.add_subcommand("check", "Run the structural invariant suites");
    auto *coarse = app.add_subcommand("coarse-entropy", "Coarse-history probabilities and entropy");
    auto *full = app.add_subcommand("full-histories", "Full-history functional and entropy");
    auto *sweep = app.add_subcommand("sweep", "Residuals over a grid of (l, k)");
    for (auto *sub : {check, coarse, full, sweep}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitParameter;
    }

    try {
        if (*check) {
            return run_check(flags);
        }
        if (*coarse) {
            emit(qbaker::run_coarse_entropy(
                     build_config(qbaker::Experiment::coarse_entropy, flags)),
                 flags);
        } else if (*full) {
            emit(qbaker::run_full_histories(
                     build_config(qbaker::Experiment::full_histories, flags)),
                 flags);
        } else if (*sweep) {
            emit(qbaker::run_sweep(build_config(qbaker::Experiment::sweep, flags)), flags);
        }
    } catch (const qbaker::ResourceLimit &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResource;
    } catch (const qbaker::InvariantViolation &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParameter;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
