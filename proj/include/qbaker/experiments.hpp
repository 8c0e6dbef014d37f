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
/**
 * @file
 * Canned experiments behind the command-line tool, their result records,
 * and the CSV / JSON writers.
 *
 * Output files are byte-identical for identical configurations: rows come
 * out in lexicographic path order, doubles are printed with 17 significant
 * digits, and wall-clock timings are kept out of the serialized record.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bakermap.hpp"
#include "coarsegrain.hpp"
#include "core.hpp"
#include "histories.hpp"

namespace qbaker {

enum class Experiment { check, coarse_entropy, full_histories, sweep };

[[nodiscard]] inline std::string experiment_name(Experiment e) {
    switch (e) {
    case Experiment::check:
        return "check";
    case Experiment::coarse_entropy:
        return "coarse-entropy";
    case Experiment::full_histories:
        return "full-histories";
    case Experiment::sweep:
        return "sweep";
    }
    return "unknown";
}

/// 0101... of the given length.
[[nodiscard]] inline BitString alternating_bits(std::size_t length) {
    std::vector<std::uint8_t> bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        bits[i] = static_cast<std::uint8_t>(i % 2);
    }
    return BitString(std::move(bits));
}

struct RunConfig {
    Experiment experiment = Experiment::full_histories;
    int qubits = 14;
    int dot = 7;
    int left = 6;
    int right = 6;
    int steps = 2;
    /// Initial kept string. For coarse-entropy it may also be the core
    /// string of length c - k, in which case alpha = 0...0 is prepended.
    std::optional<BitString> x;
    double prune_eps = 1e-12;
    unsigned threads = 0;
    // sweep only
    std::vector<int> l_values;
    std::vector<int> k_values;
    int width = 2;
};

/// Defaults per experiment; each satisfies l < n, r < N-n, k < r with margin.
[[nodiscard]] inline RunConfig default_config(Experiment e) {
    RunConfig cfg;
    cfg.experiment = e;
    switch (e) {
    case Experiment::check:
        cfg.qubits = 8, cfg.dot = 4, cfg.left = 2, cfg.right = 3, cfg.steps = 2;
        break;
    case Experiment::coarse_entropy:
        cfg.qubits = 12, cfg.dot = 6, cfg.left = 5, cfg.right = 5, cfg.steps = 2;
        break;
    case Experiment::full_histories:
        cfg.qubits = 14, cfg.dot = 7, cfg.left = 6, cfg.right = 6, cfg.steps = 2;
        break;
    case Experiment::sweep:
        cfg.l_values = {4, 6, 8};
        cfg.k_values = {2};
        cfg.width = 2;
        break;
    }
    return cfg;
}

/// Shape of one sweep point: r = l, N = 2l + c, n = l + ceil(c/2).
struct SweepPoint {
    int qubits;
    int dot;
    int left;
    int right;
    int steps;
    int width;
};

[[nodiscard]] inline SweepPoint sweep_point(int left, int steps, int width) {
    if (width < 2) {
        throw ParameterError("kept width c >= 2 violated");
    }
    return {2 * left + width, left + (width + 1) / 2, left, left, steps, width};
}

using Cell = std::variant<std::string, std::int64_t, double>;

struct ResultRecord {
    std::string experiment;
    std::vector<std::pair<std::string, Cell>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;
    /// Wall-clock seconds per stage. Reported separately, never serialized.
    std::vector<std::pair<std::string, double>> timings;

    [[nodiscard]] const Cell &summary_value(const std::string &key) const {
        for (const auto &[k, v] : summary) {
            if (k == key) {
                return v;
            }
        }
        throw std::out_of_range("no summary key " + key);
    }
    [[nodiscard]] double summary_number(const std::string &key) const {
        const Cell &c = summary_value(key);
        if (const auto *d = std::get_if<double>(&c)) {
            return *d;
        }
        if (const auto *i = std::get_if<std::int64_t>(&c)) {
            return static_cast<double>(*i);
        }
        throw std::invalid_argument("summary key " + key + " is not numeric");
    }
};

namespace detail {

inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "NA";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_cell(const Cell &cell) {
    if (const auto *s = std::get_if<std::string>(&cell)) {
        return *s;
    }
    if (const auto *i = std::get_if<std::int64_t>(&cell)) {
        return std::to_string(*i);
    }
    return format_double(std::get<double>(cell));
}

inline std::string csv_field(const std::string &text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') {
            out.push_back('"');
        }
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

inline nlohmann::ordered_json json_cell(const Cell &cell) {
    if (const auto *s = std::get_if<std::string>(&cell)) {
        return *s;
    }
    if (const auto *i = std::get_if<std::int64_t>(&cell)) {
        return *i;
    }
    const double d = std::get<double>(cell);
    if (!std::isfinite(d)) {
        return nullptr;
    }
    return d;
}

class StageTimer {
  public:
    explicit StageTimer(ResultRecord &record) : record_{record} {}
    void lap(const std::string &stage) {
        const auto now = std::chrono::steady_clock::now();
        record_.timings.emplace_back(stage,
                                     std::chrono::duration<double>(now - start_).count());
        start_ = now;
    }

  private:
    ResultRecord &record_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::vector<std::pair<std::string, Cell>> echo_config(const RunConfig &cfg,
                                                             const BitString &x) {
    return {{"experiment", experiment_name(cfg.experiment)},
            {"N", std::int64_t{cfg.qubits}},
            {"n", std::int64_t{cfg.dot}},
            {"l", std::int64_t{cfg.left}},
            {"r", std::int64_t{cfg.right}},
            {"c", std::int64_t{cfg.qubits - cfg.left - cfg.right}},
            {"k", std::int64_t{cfg.steps}},
            {"x", x.to_string()},
            {"prune_eps", cfg.prune_eps}};
}

inline PropagationOptions propagation_options(const RunConfig &cfg) {
    PropagationOptions opts;
    opts.prune_eps = cfg.prune_eps;
    opts.threads = cfg.threads;
    return opts;
}

inline std::string join_ints(const std::vector<int> &values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            out.push_back(',');
        }
        out += std::to_string(values[i]);
    }
    return out;
}

} // namespace detail

[[nodiscard]] inline std::string to_csv(const ResultRecord &record) {
    std::ostringstream out;
    for (const auto &[key, value] : record.config) {
        out << "# " << key << " = " << detail::format_cell(value) << '\n';
    }
    for (std::size_t i = 0; i < record.columns.size(); ++i) {
        out << (i != 0 ? "," : "") << detail::csv_field(record.columns[i]);
    }
    out << '\n';
    for (const auto &row : record.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i != 0 ? "," : "") << detail::csv_field(detail::format_cell(row[i]));
        }
        out << '\n';
    }
    for (const auto &[key, value] : record.summary) {
        out << "# " << key << " = " << detail::format_cell(value) << '\n';
    }
    return out.str();
}

[[nodiscard]] inline std::string to_json(const ResultRecord &record) {
    nlohmann::ordered_json doc;
    auto &config = doc["config"];
    for (const auto &[key, value] : record.config) {
        config[key] = detail::json_cell(value);
    }
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto &row : record.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            obj[record.columns[i]] = detail::json_cell(row[i]);
        }
        doc["rows"].push_back(std::move(obj));
    }
    auto &summary = doc["summary"];
    summary = nlohmann::ordered_json::object();
    for (const auto &[key, value] : record.summary) {
        summary[key] = detail::json_cell(value);
    }
    return doc.dump(2) + "\n";
}

/// Coarse histories with initial string alpha . x: probabilities of every
/// final string y . beta against 2^{-k} [x == y], and the entropy against k.
[[nodiscard]] inline ResultRecord run_coarse_entropy(const RunConfig &cfg) {
    const SystemShape shape(cfg.qubits, cfg.dot);
    validate_run(shape, cfg.left, cfg.right, cfg.steps);
    const CoarseGraining cg(shape, cfg.left, cfg.right);
    const int c = cg.width();
    const int k = cfg.steps;

    BitString initial;
    std::optional<BitString> core;
    if (!cfg.x) {
        initial = alternating_bits(static_cast<std::size_t>(c));
    } else if (cfg.x->size() == static_cast<std::size_t>(c)) {
        initial = *cfg.x;
    } else if (c > k && cfg.x->size() == static_cast<std::size_t>(c - k)) {
        initial = BitString::zeros(static_cast<std::size_t>(k)).concat(*cfg.x);
    } else {
        throw std::invalid_argument("initial string must have length c=" + std::to_string(c) +
                                    " or c-k=" + std::to_string(c - k));
    }
    if (k <= c) {
        core = initial.slice(static_cast<std::size_t>(k) + 1, static_cast<std::size_t>(c));
    }

    ResultRecord record;
    record.experiment = experiment_name(Experiment::coarse_entropy);
    record.config = detail::echo_config(cfg, initial);
    record.config.emplace_back("x_core", core ? core->to_string() : std::string("NA"));
    record.columns = {"history", "p", "oracle_p", "abs_residual"};

    detail::StageTimer timer(record);
    const auto ens = propagate_branches(cg, initial, k, detail::propagation_options(cfg));
    timer.lap("propagate");
    const auto dist = history_distribution(ens, HistoryKind::coarse);
    timer.lap("functional");

    double residual = core ? 0.0 : std::nan("");
    for (const auto &e : dist.entries) {
        const BitString yb = index_to_bits(e.code, static_cast<std::size_t>(c));
        double oracle = std::nan("");
        if (core) {
            oracle = theorem1_value(*core, yb.slice(1, static_cast<std::size_t>(c - k)), k);
            residual = std::max(residual, std::abs(e.p - oracle));
        }
        record.rows.push_back({yb.to_string(), e.p, oracle, std::abs(e.p - oracle)});
    }
    const double h = entropy_bits(dist);
    timer.lap("entropy");
    const double total = dist.total();
    record.summary = {{"entropy_bits", h},
                      {"oracle_entropy_bits", static_cast<double>(k)},
                      {"entropy_residual", std::abs(h - k)},
                      {"theorem1_residual", residual},
                      {"probability_sum", total},
                      {"discarded_mass", dist.discarded_mass},
                      {"conservation_error", std::abs(total + dist.discarded_mass - 1.0)}};
    return record;
}

/// Full histories: per-path probabilities against the step-by-step shift
/// prediction, off-diagonal functional norms and the entropy against k.
[[nodiscard]] inline ResultRecord run_full_histories(const RunConfig &cfg) {
    const SystemShape shape(cfg.qubits, cfg.dot);
    validate_run(shape, cfg.left, cfg.right, cfg.steps);
    const CoarseGraining cg(shape, cfg.left, cfg.right);
    const int c = cg.width();
    const BitString x = cfg.x.value_or(alternating_bits(static_cast<std::size_t>(c)));
    cg.require_width(x, "initial string");

    ResultRecord record;
    record.experiment = experiment_name(Experiment::full_histories);
    record.config = detail::echo_config(cfg, x);
    record.columns = {"path", "p", "oracle_p", "abs_residual"};

    detail::StageTimer timer(record);
    const auto ens = propagate_branches(cg, x, cfg.steps, detail::propagation_options(cfg));
    timer.lap("propagate");
    const auto dist = history_distribution(ens, HistoryKind::full);
    const double off_max = offdiagonal_norm(ens, OffDiagonalMode::max);
    const double off_rms = offdiagonal_norm(ens, OffDiagonalMode::rms);
    timer.lap("functional");

    std::int64_t supported = 0;
    double violating = 0.0;
    double residual = 0.0;
    for (const auto &e : dist.entries) {
        const auto path = FullHistory::from_code(e.code, c, cfg.steps);
        const double oracle = theorem2_value(x, path, path);
        if (e.p > 0.01) {
            ++supported;
        }
        if (oracle == 0.0) {
            violating += e.p;
        }
        residual = std::max(residual, std::abs(e.p - oracle));
        record.rows.push_back({path.to_string(), e.p, oracle, std::abs(e.p - oracle)});
    }
    const double h = entropy_bits(dist);
    timer.lap("entropy");
    const double total = dist.total();
    record.summary = {{"entropy_bits", h},
                      {"oracle_entropy_bits", static_cast<double>(cfg.steps)},
                      {"entropy_residual", std::abs(h - cfg.steps)},
                      {"offdiag_max", off_max},
                      {"offdiag_rms", off_rms},
                      {"supported_paths", supported},
                      {"shift_violating_mass", violating},
                      {"max_abs_residual", residual},
                      {"probability_sum", total},
                      {"discarded_mass", dist.discarded_mass},
                      {"conservation_error", std::abs(total + dist.discarded_mass - 1.0)}};
    return record;
}

/// One row per (l, k): entropy residuals, the coarse-history residual
/// against 2^{-k} [x == y] and off-diagonal norms, with r = l and c fixed.
[[nodiscard]] inline ResultRecord run_sweep(const RunConfig &cfg) {
    ResultRecord record;
    record.experiment = experiment_name(Experiment::sweep);
    record.config = {{"experiment", record.experiment},
                     {"l_values", detail::join_ints(cfg.l_values)},
                     {"k_values", detail::join_ints(cfg.k_values)},
                     {"c", std::int64_t{cfg.width}},
                     {"x", cfg.x ? cfg.x->to_string()
                                 : alternating_bits(static_cast<std::size_t>(
                                                        std::max(cfg.width, 0)))
                                       .to_string()},
                     {"prune_eps", cfg.prune_eps}};
    record.columns = {"l",
                      "k",
                      "N",
                      "n",
                      "r",
                      "c",
                      "entropy_bits",
                      "entropy_residual",
                      "coarse_entropy_bits",
                      "theorem1_residual",
                      "offdiag_max",
                      "offdiag_rms",
                      "discarded_mass",
                      "conservation_error"};
    if (cfg.l_values.empty() || cfg.k_values.empty()) {
        record.summary.emplace_back("points", std::int64_t{0});
        return record;
    }
    const BitString x = cfg.x.value_or(alternating_bits(static_cast<std::size_t>(cfg.width)));
    if (x.size() != static_cast<std::size_t>(cfg.width)) {
        throw std::invalid_argument("initial string must have length c=" +
                                    std::to_string(cfg.width));
    }
    // validate every point before any computation
    std::vector<SweepPoint> points;
    for (int l : cfg.l_values) {
        for (int k : cfg.k_values) {
            const auto pt = sweep_point(l, k, cfg.width);
            validate_run(SystemShape(pt.qubits, pt.dot), pt.left, pt.right, pt.steps);
            points.push_back(pt);
        }
    }

    std::map<int, std::vector<std::pair<double, double>>> entropy_by_l;
    for (const auto &pt : points) {
        const auto start = std::chrono::steady_clock::now();
        const CoarseGraining cg(SystemShape(pt.qubits, pt.dot), pt.left, pt.right);
        PropagationOptions opts;
        opts.prune_eps = cfg.prune_eps;
        opts.threads = cfg.threads;
        const auto ens = propagate_branches(cg, x, pt.steps, opts);
        const auto full = history_distribution(ens, HistoryKind::full);
        const auto coarse = history_distribution(ens, HistoryKind::coarse);
        const double h = entropy_bits(full);

        double t1 = std::nan("");
        if (pt.steps <= pt.width) {
            const auto k = static_cast<std::size_t>(pt.steps);
            const auto c = static_cast<std::size_t>(pt.width);
            const BitString core = x.slice(k + 1, c);
            t1 = 0.0;
            for (const auto &e : coarse.entries) {
                const BitString y = index_to_bits(e.code, c).slice(1, c - k);
                t1 = std::max(t1, std::abs(e.p - theorem1_value(core, y, pt.steps)));
            }
        }
        const double total = full.total();
        record.rows.push_back({std::int64_t{pt.left}, std::int64_t{pt.steps},
                               std::int64_t{pt.qubits}, std::int64_t{pt.dot},
                               std::int64_t{pt.right}, std::int64_t{pt.width}, h,
                               std::abs(h - pt.steps), entropy_bits(coarse), t1,
                               offdiagonal_norm(ens, OffDiagonalMode::max),
                               offdiagonal_norm(ens, OffDiagonalMode::rms),
                               full.discarded_mass,
                               std::abs(total + full.discarded_mass - 1.0)});
        entropy_by_l[pt.left].emplace_back(pt.steps, h);
        record.timings.emplace_back(
            "l=" + std::to_string(pt.left) + ",k=" + std::to_string(pt.steps),
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }

    record.summary.emplace_back("points", static_cast<std::int64_t>(points.size()));
    for (const auto &[l, samples] : entropy_by_l) {
        if (samples.size() < 2) {
            continue;
        }
        // least-squares slope of H against k
        double mk = 0.0;
        double mh = 0.0;
        for (const auto &[k, h] : samples) {
            mk += k;
            mh += h;
        }
        mk /= static_cast<double>(samples.size());
        mh /= static_cast<double>(samples.size());
        double num = 0.0;
        double den = 0.0;
        for (const auto &[k, h] : samples) {
            num += (k - mk) * (h - mh);
            den += (k - mk) * (k - mk);
        }
        record.summary.emplace_back("entropy_slope_l" + std::to_string(l),
                                    den > 0.0 ? num / den : std::nan(""));
    }
    return record;
}

// ---------------------------------------------------------------------------
// check

struct CheckLine {
    std::string name;
    bool passed;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckLine> lines;

    [[nodiscard]] bool passed() const {
        return std::all_of(lines.begin(), lines.end(),
                           [](const CheckLine &l) { return l.passed; });
    }
    [[nodiscard]] std::string to_text() const {
        std::string out;
        for (const auto &l : lines) {
            out += (l.passed ? "PASS " : "FAIL ") + l.name + "  " + l.detail + "\n";
        }
        return out;
    }
};

namespace detail {

inline std::string describe(const char *what, double value) {
    return std::string(what) + "=" + format_double(value);
}

inline StateVector random_state(std::size_t dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss;
    StateVector v(dim);
    for (auto &a : v) {
        a = {gauss(rng), gauss(rng)};
    }
    return v;
}

inline double basis_gram_error(int num_qubits, int dot) {
    const std::size_t dim = std::size_t{1} << num_qubits;
    std::vector<StateVector> states;
    states.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        states.push_back(
            basis_state(num_qubits, dot, index_to_bits(j, static_cast<std::size_t>(num_qubits))));
    }
    double err = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
            const Complex g = inner_product(states[i], states[j]);
            err = std::max(err, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    }
    return err;
}

} // namespace detail

/**
 * Structural self-checks at one parameter point. The history suites run
 * only when `history_params` is set (l, r and k valid for the shape).
 */
[[nodiscard]] inline CheckReport run_check(const RunConfig &cfg, bool history_params,
                                           double tol = 1e-10) {
    const SystemShape shape(cfg.qubits, cfg.dot);
    if (shape.num_qubits() > kDenseMaxQubits) {
        throw ResourceLimit("check builds dense matrices and is limited to N <= " +
                            std::to_string(kDenseMaxQubits));
    }
    const int N = shape.num_qubits();
    const int n = shape.dot();
    const std::size_t dim = shape.dim();
    CheckReport report;
    auto add = [&](std::string name, double err, std::string what = "max|err|") {
        report.lines.push_back({std::move(name), err <= tol, detail::describe(what.c_str(), err)});
    };

    add("basis-orthonormality m=" + std::to_string(n), detail::basis_gram_error(N, n));
    add("basis-orthonormality m=" + std::to_string(n + 1), detail::basis_gram_error(N, n + 1));

    const DenseMatrix b = baker_matrix(shape);
    add("baker-unitarity", max_abs_diff(b.adjoint() * b, DenseMatrix::identity(dim)));

    std::mt19937_64 rng(20260101);
    const StateVector psi = detail::random_state(dim, rng);
    const double psi_norm = psi.norm();
    for (int m : {n, n + 1}) {
        const StateVector c = analyze(psi, N, m);
        add("analyze-synthesize-inverse m=" + std::to_string(m),
            max_abs_diff(synthesize(c, N, m).span(), psi.span()));
        add("analyze-norm m=" + std::to_string(m), std::abs(c.norm() - psi_norm));
    }

    {
        const DenseMatrix ref = bvs_reference_matrix(N);
        const DenseMatrix top = baker_matrix(SystemShape(N, N - 1));
        add("bvs-correspondence N=" + std::to_string(N), max_abs_diff(top, ref), "max|delta|");
    }

    if (!history_params) {
        report.lines.push_back({"history-suites", true, "skipped: no valid (l, r, k) for this shape"});
        return report;
    }

    validate_run(shape, cfg.left, cfg.right, cfg.steps);
    const CoarseGraining cg(shape, cfg.left, cfg.right);
    const int c = cg.width();
    const std::size_t fanout = std::size_t{1} << c;

    {
        // index masks: exact comparisons
        const StateVector coeffs = detail::random_state(dim, rng);
        bool complete = true;
        bool orthogonal = true;
        bool idempotent = true;
        StateVector sum(dim);
        for (std::uint64_t y = 0; y < fanout; ++y) {
            const BitString ys = index_to_bits(y, static_cast<std::size_t>(c));
            const StateVector py = project(coeffs, cg, ys);
            sum += py;
            idempotent = idempotent && project(py, cg, ys).amplitudes() == py.amplitudes();
            for (std::uint64_t z = 0; z < fanout; ++z) {
                if (z != y) {
                    const StateVector pzy =
                        project(py, cg, index_to_bits(z, static_cast<std::size_t>(c)));
                    orthogonal = orthogonal && pzy.squared_norm() == 0.0;
                }
            }
        }
        complete = max_abs_diff(sum.span(), coeffs.span()) <= tol;
        report.lines.push_back({"projector-algebra", complete && orthogonal && idempotent,
                                std::string("complete=") + (complete ? "yes" : "no") +
                                    " orthogonal=" + (orthogonal ? "yes" : "no") +
                                    " idempotent=" + (idempotent ? "yes" : "no")});
    }

    const BitString x = cfg.x.value_or(alternating_bits(static_cast<std::size_t>(c)));
    cg.require_width(x, "initial string");
    PropagationOptions exact;
    exact.prune_eps = 0.0;
    exact.threads = cfg.threads;
    exact.reduce_spectators = false;
    const auto ens = propagate_branches(cg, x, cfg.steps, exact);

    {
        // Dense Tr[P_y B^k rho_0 B^{k dagger} P_z] from basis-state outer
        // products and the dense map.
        std::vector<StateVector> nbasis;
        nbasis.reserve(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            nbasis.push_back(basis_state(shape, n, index_to_bits(i, static_cast<std::size_t>(N))));
        }
        std::vector<StateVector> evolved;
        for (const auto &s : enumerate_block(cg, x)) {
            StateVector v = nbasis[bits_to_index(s)];
            for (int step = 0; step < cfg.steps; ++step) {
                v = b.apply(v);
            }
            evolved.push_back(std::move(v));
        }
        std::vector<std::vector<StateVector>> projected(fanout);
        for (std::uint64_t y = 0; y < fanout; ++y) {
            for (const auto &v : evolved) {
                StateVector p(dim);
                for (std::uint64_t a = 0; a < (std::uint64_t{1} << cg.left()); ++a) {
                    for (std::uint64_t bb = 0; bb < (std::uint64_t{1} << cg.right()); ++bb) {
                        const StateVector &e = nbasis[cg.compose(a, y, bb)];
                        p += inner_product(e, v) * e;
                    }
                }
                projected[y].push_back(std::move(p));
            }
        }
        const double w = std::ldexp(1.0, -(cg.left() + cg.right()));
        double off = 0.0;
        double diag = 0.0;
        for (std::uint64_t y = 0; y < fanout; ++y) {
            for (std::uint64_t z = 0; z < fanout; ++z) {
                Complex d{};
                for (std::size_t s = 0; s < evolved.size(); ++s) {
                    d += inner_product(projected[z][s], projected[y][s]);
                }
                d *= w;
                if (y == z) {
                    diag = std::max(diag, std::abs(d - ens.coarse_probability(y)));
                } else {
                    off = std::max(off, std::abs(d));
                }
            }
        }
        add("coarse-decoherence-exactness", off, "max|offdiag|");
        add("coarse-diagonal-vs-dense", diag);
    }

    {
        // coarse[y] against the sum of the full functional over all pairs
        // of intermediate paths ending in y
        const int k = cfg.steps;
        const std::uint64_t prefixes = std::uint64_t{1} << (c * (k - 1));
        double err = 0.0;
        for (std::uint64_t y = 0; y < fanout; ++y) {
            Complex s{};
            for (std::uint64_t p = 0; p < prefixes; ++p) {
                for (std::uint64_t q = 0; q < prefixes; ++q) {
                    s += ens.functional((p << c) | y, (q << c) | y);
                }
            }
            err = std::max(err, std::abs(s - ens.coarse_probability(y)));
        }
        add("full-to-coarse-sum-rule", err);
    }

    {
        const auto dist = history_distribution(ens, HistoryKind::full);
        add("probability-conservation",
            std::abs(dist.total() + dist.discarded_mass - 1.0), "|sum p + discarded - 1|");
    }
    return report;
}

} // namespace qbaker
