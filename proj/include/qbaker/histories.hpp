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
 * Coarse-grained histories of the baker's map: branch propagation of the
 * block initial state, decoherence functionals for full and coarse
 * histories, history probabilities and entropies, and the leading-order
 * closed forms for the diagonal elements.
 *
 * A full history is a sequence of k middle strings y^1 ... y^k, each of
 * width c. It is encoded as the integer whose base-2^c digits are
 * y^1 ... y^k, most significant first, so numeric order of codes is
 * lexicographic order of paths.
 *
 * For every initial label s the class-operator images
 * C_y |s> = P_{y^k} B ... P_{y^1} B |s> are produced by splitting the
 * propagated state into its 2^c masked components after every step. The
 * decoherence functional D[y, z] = 2^{-(l+r)} sum_s <C_z s, C_y s> is
 * accumulated on the fly, so branch vectors are only kept when asked for.
 * Two branches with different final strings live on disjoint supports, so
 * D is stored as one dense block per final string.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bakermap.hpp"
#include "coarsegrain.hpp"
#include "core.hpp"

namespace qbaker {

/// Upper bound on c * k, i.e. on log2 of the number of full histories.
inline constexpr int kMaxPathBits = 20;

/// A sequence of k projector labels y^1 ... y^k of common width c.
class FullHistory {
  public:
    explicit FullHistory(std::vector<BitString> strings) : strings_{std::move(strings)} {
        if (strings_.empty()) {
            throw std::invalid_argument("a full history needs at least one step");
        }
        for (const auto &s : strings_) {
            if (s.size() != strings_.front().size()) {
                throw std::invalid_argument("full history strings must share one width");
            }
        }
    }

    [[nodiscard]] static FullHistory from_code(std::uint64_t code, int width, int steps) {
        std::vector<BitString> strings;
        strings.reserve(static_cast<std::size_t>(steps));
        const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
        for (int j = steps - 1; j >= 0; --j) {
            strings.push_back(index_to_bits((code >> (j * width)) & mask,
                                            static_cast<std::size_t>(width)));
        }
        return FullHistory(std::move(strings));
    }

    /// "01;11;10"
    [[nodiscard]] static FullHistory parse(std::string_view text) {
        std::vector<BitString> strings;
        std::size_t start = 0;
        while (true) {
            const auto stop = text.find(';', start);
            strings.push_back(BitString::parse(text.substr(start, stop - start)));
            if (stop == std::string_view::npos) {
                break;
            }
            start = stop + 1;
        }
        return FullHistory(std::move(strings));
    }

    [[nodiscard]] int steps() const noexcept { return static_cast<int>(strings_.size()); }
    [[nodiscard]] int width() const noexcept {
        return static_cast<int>(strings_.front().size());
    }
    /// 1-based: at(1) is y^1.
    [[nodiscard]] const BitString &at(int step) const {
        return strings_.at(static_cast<std::size_t>(step - 1));
    }
    [[nodiscard]] const std::vector<BitString> &strings() const noexcept { return strings_; }

    [[nodiscard]] std::uint64_t code() const {
        std::uint64_t code = 0;
        for (const auto &s : strings_) {
            code = (code << s.size()) | bits_to_index(s);
        }
        return code;
    }

    [[nodiscard]] std::string to_string() const {
        std::string out;
        for (std::size_t j = 0; j < strings_.size(); ++j) {
            if (j != 0) {
                out.push_back(';');
            }
            out += strings_[j].to_string();
        }
        return out;
    }

    friend bool operator==(const FullHistory &, const FullHistory &) = default;

  private:
    std::vector<BitString> strings_;
};

/// The history (1, ..., 1, P_y): only the last projector is recorded.
struct CoarseHistory {
    BitString y;
};

struct PropagationOptions {
    /// Branches whose squared norm falls below this are dropped and their
    /// mass is booked as discarded. 0 keeps every branch.
    double prune_eps = 1e-12;
    /// Worker threads; 0 means hardware concurrency.
    unsigned threads = 0;
    /// Keep the final branch vectors of every initial label. Implies
    /// reduce_spectators = false.
    bool keep_branches = false;
    /// Drop position qubits that never reach the kept window within k steps.
    /// Exact: the functional does not depend on them.
    bool reduce_spectators = true;
    std::size_t memory_budget_bytes = std::size_t{2} << 30U;
};

/**
 * Result of propagating the block initial state through k steps.
 *
 * Holds the full-history decoherence functional (block per final string),
 * the coarse-history diagonal from the unsplit evolution B^k |s>, the
 * discarded mass, and optionally the final branch of every path for every
 * initial label.
 */
class BranchEnsemble {
  public:
    [[nodiscard]] const CoarseGraining &coarse_graining() const noexcept { return cg_; }
    [[nodiscard]] const BitString &x() const noexcept { return x_; }
    [[nodiscard]] int steps() const noexcept { return steps_; }
    [[nodiscard]] int width() const noexcept { return cg_.width(); }
    [[nodiscard]] double prune_eps() const noexcept { return prune_eps_; }
    [[nodiscard]] std::uint64_t path_count() const noexcept {
        return std::uint64_t{1} << (width() * steps_);
    }
    /// Shape the propagation actually ran in (smaller than the requested one
    /// when spectator qubits were removed).
    [[nodiscard]] const SystemShape &simulated_shape() const noexcept {
        return simulated_shape_;
    }

    /// Weighted mean over initial labels of the pruned squared norm.
    [[nodiscard]] double discarded_mass() const noexcept { return discarded_; }
    [[nodiscard]] double max_label_discarded() const noexcept {
        return *std::max_element(label_discarded_.begin(), label_discarded_.end());
    }
    [[nodiscard]] std::size_t label_count() const noexcept { return labels_.size(); }
    [[nodiscard]] const std::vector<std::uint64_t> &labels() const noexcept {
        return labels_;
    }
    [[nodiscard]] double label_discarded(std::size_t i) const {
        return label_discarded_.at(i);
    }

    [[nodiscard]] bool retained(std::uint64_t code) const {
        return code < retained_.size() && retained_[code] != 0;
    }
    [[nodiscard]] std::vector<std::uint64_t> retained_paths() const {
        std::vector<std::uint64_t> out;
        for (std::uint64_t c = 0; c < retained_.size(); ++c) {
            if (retained_[c] != 0) {
                out.push_back(c);
            }
        }
        return out;
    }

    /// D[y, z] by path code. Zero unless y and z end in the same string.
    [[nodiscard]] Complex functional(std::uint64_t y, std::uint64_t z) const {
        const std::uint64_t mask = cg_.width_mask();
        if ((y & mask) != (z & mask)) {
            return {};
        }
        const auto c = static_cast<unsigned>(width());
        return blocks_[(y & mask) * block_dim_ * block_dim_ + (y >> c) * block_dim_ +
                       (z >> c)];
    }

    /// Tr[P_y B^k rho_0 B^{k dagger} P_y].
    [[nodiscard]] double coarse_probability(std::uint64_t y) const {
        return coarse_.at(y);
    }

    [[nodiscard]] bool has_branches() const noexcept { return !branches_.empty(); }
    /// Final branches of label i (n-basis coordinates), keyed by path code.
    [[nodiscard]] const std::map<std::uint64_t, StateVector> &branches(std::size_t i) const {
        if (branches_.empty()) {
            throw std::logic_error("branches were not kept; set keep_branches");
        }
        return branches_.at(i);
    }

  private:
    friend BranchEnsemble propagate_branches(const CoarseGraining &, const BitString &,
                                             int, const PropagationOptions &);

    BranchEnsemble(CoarseGraining cg, BitString x, int steps, double prune_eps,
                   SystemShape simulated)
        : cg_{std::move(cg)}, x_{std::move(x)}, steps_{steps}, prune_eps_{prune_eps},
          simulated_shape_{simulated} {}

    CoarseGraining cg_;
    BitString x_;
    int steps_;
    double prune_eps_;
    SystemShape simulated_shape_;
    std::size_t block_dim_ = 1;
    std::vector<Complex> blocks_;
    std::vector<double> coarse_;
    std::vector<std::uint8_t> retained_;
    double discarded_ = 0.0;
    std::vector<std::uint64_t> labels_;
    std::vector<double> label_discarded_;
    std::vector<std::map<std::uint64_t, StateVector>> branches_;
};

namespace detail {

// Sums for one contiguous run of initial labels. Runs are fixed by the
// label count alone, and are folded in run order, so the result does not
// depend on how many threads did the work.
struct PartialSums {
    std::vector<Complex> blocks;
    std::vector<double> coarse;
    std::vector<std::uint8_t> retained;
    double discarded = 0.0;
};

inline constexpr std::size_t kLabelRuns = 64;

// Index helpers for the support of one middle string y.
struct Support {
    int right;
    int width;
    std::size_t head_count; // 2^l
    std::size_t tail_count; // 2^r

    [[nodiscard]] std::size_t size() const noexcept { return head_count * tail_count; }
    [[nodiscard]] std::size_t full_index(std::size_t compact,
                                         std::uint64_t y) const noexcept {
        const std::size_t hi = compact / tail_count;
        const std::size_t lo = compact % tail_count;
        return (((hi << width) | y) << right) | lo;
    }
};

struct Branch {
    std::uint64_t code;
    std::vector<Complex> amplitudes; // compact, on the support of its last string
};

} // namespace detail

/**
 * Propagates every label of the block a . x . b through k steps of the map,
 * projecting onto each middle string after every step.
 *
 * Spectator reduction: position bits more than k + 1 places to the right of
 * the kept window only ever move left through identity wires, and of the
 * block bits b only the first k ever enter the window. With
 * reduce_spectators the run uses r' = min(r, k+1) right bits and fixes the
 * r' - k trailing bits of b to zero, reweighting the remaining labels; the
 * functional is unchanged.
 */
[[nodiscard]] inline BranchEnsemble propagate_branches(const CoarseGraining &cg,
                                                       const BitString &x, int steps,
                                                       const PropagationOptions &opts = {}) {
    validate_run(cg, steps);
    cg.require_width(x, "propagate_branches");
    if (!(opts.prune_eps >= 0.0) || !std::isfinite(opts.prune_eps)) {
        throw std::invalid_argument("prune threshold must be finite and >= 0");
    }
    const int c = cg.width();
    const int l = cg.left();
    if (c * steps > kMaxPathBits) {
        throw ResourceLimit("2^(c*k) = 2^" + std::to_string(c * steps) +
                            " histories exceed the path budget 2^" +
                            std::to_string(kMaxPathBits) +
                            "; reduce the kept width or the step count");
    }

    const bool reduce = opts.reduce_spectators && !opts.keep_branches;
    const int right = reduce ? std::min(cg.right(), steps + 1) : cg.right();
    const int fixed_tail = reduce ? right - steps : 0;
    const SystemShape shape(cg.shape().num_qubits() - (cg.right() - right), cg.shape().dot(),
                            cg.shape().num_qubits());
    const CoarseGraining sim_cg(shape, l, right);
    const std::size_t dim = shape.dim();

    const std::uint64_t x_index = bits_to_index(x);
    const int free_tail = right - fixed_tail;
    std::vector<std::uint64_t> labels;
    labels.reserve(std::size_t{1} << (l + free_tail));
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << l); ++a) {
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << free_tail); ++b) {
            labels.push_back(sim_cg.compose(a, x_index, b << fixed_tail));
        }
    }
    const double weight = std::ldexp(1.0, -(l + free_tail));

    const std::size_t fanout = std::size_t{1} << c;
    const std::uint64_t paths = std::uint64_t{1} << (c * steps);
    const std::size_t block_dim = std::size_t{1} << (c * (steps - 1));
    const std::size_t block_entries = fanout * block_dim * block_dim;
    const detail::Support support{right, c, std::size_t{1} << l, std::size_t{1} << right};

    const std::size_t run_length =
        std::max<std::size_t>(1, (labels.size() + detail::kLabelRuns - 1) / detail::kLabelRuns);
    const std::size_t run_count = (labels.size() + run_length - 1) / run_length;
    unsigned threads = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(run_count)));

    {
        const double live_vectors = static_cast<double>(paths) / static_cast<double>(fanout) +
                                    static_cast<double>(paths) / static_cast<double>(fanout * fanout) +
                                    4.0;
        const double per_worker = live_vectors * static_cast<double>(dim) * sizeof(Complex) * 1.0;
        const double sums = static_cast<double>(run_count) *
                            (static_cast<double>(block_entries) * sizeof(Complex) +
                             static_cast<double>(paths));
        double kept = 0.0;
        if (opts.keep_branches) {
            kept = static_cast<double>(labels.size()) * static_cast<double>(paths) *
                   static_cast<double>(dim) * sizeof(Complex);
        }
        const double need = per_worker * threads + sums + kept;
        if (need > static_cast<double>(opts.memory_budget_bytes)) {
            throw ResourceLimit("propagation needs about " +
                                std::to_string(static_cast<long long>(need / 1048576.0)) +
                                " MiB, over the memory budget of " +
                                std::to_string(opts.memory_budget_bytes >> 20U) + " MiB");
        }
    }

    BranchEnsemble ens(cg, x, steps, opts.prune_eps, shape);
    ens.block_dim_ = block_dim;
    ens.labels_ = labels;
    ens.label_discarded_.assign(labels.size(), 0.0);
    if (opts.keep_branches) {
        ens.branches_.resize(labels.size());
    }

    const BakerTransfer transfer(shape);
    std::vector<detail::PartialSums> partial(run_count);
    std::atomic<std::size_t> next_run{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto process_label = [&](std::size_t label_pos, detail::PartialSums &sums,
                             BakerTransfer::Workspace &ws, std::vector<Complex> &full,
                             std::vector<Complex> &image, std::vector<double> &mass) {
        const std::uint64_t label = labels[label_pos];
        std::vector<detail::Branch> live;
        std::vector<detail::Branch> next;

        // step 1 starts from e_label, which is not confined to one string
        std::vector<Complex> unsplit(dim);
        unsplit[label] = 1.0;
        double discarded = 0.0;

        auto split = [&](std::uint64_t parent) {
            std::fill(mass.begin(), mass.end(), 0.0);
            for (std::size_t i = 0; i < dim; ++i) {
                mass[sim_cg.middle_bits(i)] += norm2(image[i]);
            }
            for (std::uint64_t y = 0; y < fanout; ++y) {
                if (mass[y] < opts.prune_eps) {
                    discarded += mass[y];
                    continue;
                }
                detail::Branch child{(parent << c) | y,
                                     std::vector<Complex>(support.size())};
                for (std::size_t s = 0; s < support.size(); ++s) {
                    child.amplitudes[s] = image[support.full_index(s, y)];
                }
                next.push_back(std::move(child));
            }
        };

        transfer.apply(unsplit, image, ws);
        split(0);
        std::swap(unsplit, image);
        live.swap(next);

        for (int step = 2; step <= steps; ++step) {
            next.clear();
            for (const auto &branch : live) {
                const std::uint64_t y = branch.code & sim_cg.width_mask();
                std::fill(full.begin(), full.end(), Complex{});
                for (std::size_t s = 0; s < support.size(); ++s) {
                    full[support.full_index(s, y)] = branch.amplitudes[s];
                }
                transfer.apply(full, image, ws);
                split(branch.code);
            }
            live.swap(next);
            transfer.apply(unsplit, image, ws);
            std::swap(unsplit, image);
        }

        double kept = 0.0;
        for (const auto &branch : live) {
            for (const auto &a : branch.amplitudes) {
                kept += norm2(a);
            }
        }
        if (std::abs(kept + discarded - 1.0) > 1e-9) {
            throw InvariantViolation("branch norms for label " + std::to_string(label) +
                                     " sum to " + std::to_string(kept + discarded) +
                                     " instead of 1");
        }

        // live is in increasing code order; group by final string
        for (std::size_t i = 0; i < live.size(); ++i) {
            const std::uint64_t y = live[i].code & sim_cg.width_mask();
            const std::size_t row = live[i].code >> c;
            Complex *block = sums.blocks.data() + y * block_dim * block_dim;
            sums.retained[live[i].code] = 1;
            for (std::size_t j = i; j < live.size(); ++j) {
                if ((live[j].code & sim_cg.width_mask()) != y) {
                    continue;
                }
                const std::size_t col = live[j].code >> c;
                // D[y_i, y_j] collects <branch_j, branch_i>
                const Complex v = inner_product(live[j].amplitudes, live[i].amplitudes);
                if (i == j) {
                    block[row * block_dim + row] += v.real();
                } else {
                    block[row * block_dim + col] += v;
                    block[col * block_dim + row] += std::conj(v);
                }
            }
        }
        for (std::size_t i = 0; i < dim; ++i) {
            sums.coarse[sim_cg.middle_bits(i)] += norm2(unsplit[i]);
        }
        sums.discarded += discarded;
        ens.label_discarded_[label_pos] = discarded;

        if (opts.keep_branches) {
            auto &store = ens.branches_[label_pos];
            for (const auto &branch : live) {
                StateVector v(dim);
                const std::uint64_t y = branch.code & sim_cg.width_mask();
                for (std::size_t s = 0; s < support.size(); ++s) {
                    v[support.full_index(s, y)] = branch.amplitudes[s];
                }
                store.emplace(branch.code, std::move(v));
            }
        }
    };

    auto worker = [&]() {
        try {
            BakerTransfer::Workspace ws(dim);
            std::vector<Complex> full(dim);
            std::vector<Complex> image(dim);
            std::vector<double> mass(fanout);
            while (true) {
                const std::size_t run = next_run.fetch_add(1);
                if (run >= run_count) {
                    break;
                }
                auto &sums = partial[run];
                sums.blocks.assign(block_entries, Complex{});
                sums.coarse.assign(fanout, 0.0);
                sums.retained.assign(paths, 0);
                const std::size_t stop = std::min(labels.size(), (run + 1) * run_length);
                for (std::size_t pos = run * run_length; pos < stop; ++pos) {
                    process_label(pos, sums, ws, full, image, mass);
                }
            }
        } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next_run.store(run_count);
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ens.blocks_.assign(block_entries, Complex{});
    ens.coarse_.assign(fanout, 0.0);
    ens.retained_.assign(paths, 0);
    double discarded = 0.0;
    for (const auto &sums : partial) {
        for (std::size_t i = 0; i < block_entries; ++i) {
            ens.blocks_[i] += sums.blocks[i];
        }
        for (std::size_t y = 0; y < fanout; ++y) {
            ens.coarse_[y] += sums.coarse[y];
        }
        for (std::uint64_t p = 0; p < paths; ++p) {
            ens.retained_[p] |= sums.retained[p];
        }
        discarded += sums.discarded;
    }
    for (auto &v : ens.blocks_) {
        v *= weight;
    }
    for (auto &v : ens.coarse_) {
        v *= weight;
    }
    ens.discarded_ = discarded * weight;
    return ens;
}

namespace detail {
inline void require_history_shape(const BranchEnsemble &ens, const FullHistory &h) {
    if (h.steps() != ens.steps() || h.width() != ens.width()) {
        throw std::invalid_argument("history has k=" + std::to_string(h.steps()) +
                                    ", c=" + std::to_string(h.width()) +
                                    "; ensemble has k=" + std::to_string(ens.steps()) +
                                    ", c=" + std::to_string(ens.width()));
    }
}
inline void require_history_shape(const BranchEnsemble &ens, const CoarseHistory &h) {
    if (h.y.size() != static_cast<std::size_t>(ens.width())) {
        throw std::invalid_argument("coarse history width mismatch");
    }
}
} // namespace detail

/// D[rho_0, h_y, h_z] = Tr[C_y rho_0 C_z^dagger]. Pruned branches count as
/// zero.
[[nodiscard]] inline Complex full_dfunc(const BranchEnsemble &ens, const FullHistory &y,
                                        const FullHistory &z) {
    detail::require_history_shape(ens, y);
    detail::require_history_shape(ens, z);
    return ens.functional(y.code(), z.code());
}

/// D[rho_0, h^c_y, h^c_z] = Tr[P_y B^k rho_0 B^{k dagger} P_z]. The two
/// projections have disjoint supports when y != z, so the off-diagonal
/// elements vanish identically.
[[nodiscard]] inline Complex coarse_dfunc(const BranchEnsemble &ens, const CoarseHistory &y,
                                          const CoarseHistory &z) {
    detail::require_history_shape(ens, y);
    detail::require_history_shape(ens, z);
    if (y.y != z.y) {
        return {};
    }
    return ens.coarse_probability(bits_to_index(y.y));
}

enum class HistoryKind { full, coarse };

struct HistoryDistribution {
    struct Entry {
        std::uint64_t code;
        double p;
    };

    HistoryKind kind;
    int width;
    int steps;
    std::vector<Entry> entries; // increasing code
    double discarded_mass;

    [[nodiscard]] double total() const noexcept {
        double s = 0.0;
        for (const auto &e : entries) {
            s += e.p;
        }
        return s;
    }

    [[nodiscard]] std::string label(const Entry &e) const {
        return kind == HistoryKind::full
                   ? FullHistory::from_code(e.code, width, steps).to_string()
                   : index_to_bits(e.code, static_cast<std::size_t>(width)).to_string();
    }
};

namespace detail {
inline double checked_probability(double p, std::uint64_t code) {
    if (p < -1e-12) {
        throw InvariantViolation("negative diagonal functional value " + std::to_string(p) +
                                 " for history code " + std::to_string(code));
    }
    return std::max(p, 0.0);
}
} // namespace detail

/// Diagonal functional values as raw (never renormalized) probabilities.
[[nodiscard]] inline HistoryDistribution history_distribution(const BranchEnsemble &ens,
                                                              HistoryKind kind) {
    HistoryDistribution dist{kind, ens.width(), ens.steps(), {}, 0.0};
    if (kind == HistoryKind::full) {
        for (auto code : ens.retained_paths()) {
            dist.entries.push_back(
                {code, detail::checked_probability(ens.functional(code, code).real(), code)});
        }
        dist.discarded_mass = ens.discarded_mass();
    } else {
        for (std::uint64_t y = 0; y < (std::uint64_t{1} << ens.width()); ++y) {
            dist.entries.push_back(
                {y, detail::checked_probability(ens.coarse_probability(y), y)});
        }
    }
    return dist;
}

/// Shannon entropy in bits of the retained probabilities; values below
/// 1e-15 are treated as zero.
[[nodiscard]] inline double entropy_bits(const HistoryDistribution &dist) {
    double h = 0.0;
    for (const auto &e : dist.entries) {
        if (e.p > 1e-15) {
            h -= e.p * std::log2(e.p);
        }
    }
    return h;
}

/// Leading-order diagonal element for the coarse histories with initial
/// string alpha . x and final string y . beta: 2^{-k} [x == y].
[[nodiscard]] inline double theorem1_value(const BitString &x, const BitString &y, int steps) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("theorem1_value: |x| != |y|");
    }
    return x == y ? std::ldexp(1.0, -steps) : 0.0;
}

/**
 * Leading-order full-history functional: 2^{-k} times the diagonal delta,
 * times the step-by-step shift deltas
 * y^1_{1:g-1} = x_{2:g} and y^{j+1}_{1:g-1} = y^j_{2:g}.
 */
[[nodiscard]] inline double theorem2_value(const BitString &x, const FullHistory &y,
                                           const FullHistory &z) {
    const std::size_t g = x.size();
    if (static_cast<std::size_t>(y.width()) != g || static_cast<std::size_t>(z.width()) != g ||
        y.steps() != z.steps()) {
        throw std::invalid_argument("theorem2_value: history shape does not match |x|");
    }
    if (y != z) {
        return 0.0;
    }
    if (y.at(1).slice(1, g - 1) != x.slice(2, g)) {
        return 0.0;
    }
    for (int j = 1; j < y.steps(); ++j) {
        if (y.at(j + 1).slice(1, g - 1) != y.at(j).slice(2, g)) {
            return 0.0;
        }
    }
    return std::ldexp(1.0, -y.steps());
}

[[nodiscard]] inline bool shift_consistent(const BitString &x, const FullHistory &path) {
    return theorem2_value(x, path, path) > 0.0;
}

enum class OffDiagonalMode { max, rms };

/// Max or root-mean-square of |D[y, z]| over retained paths y != z.
[[nodiscard]] inline double offdiagonal_norm(const BranchEnsemble &ens, OffDiagonalMode mode) {
    const auto paths = ens.retained_paths();
    const std::uint64_t mask = ens.coarse_graining().width_mask();
    double max_abs = 0.0;
    double sum_sq = 0.0;
    // pairs with different final strings are exactly zero
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t j = 0; j < paths.size(); ++j) {
            if (i == j || (paths[i] & mask) != (paths[j] & mask)) {
                continue;
            }
            const double a = std::abs(ens.functional(paths[i], paths[j]));
            max_abs = std::max(max_abs, a);
            sum_sq += a * a;
        }
    }
    if (mode == OffDiagonalMode::max) {
        return max_abs;
    }
    const auto n = static_cast<double>(paths.size());
    return paths.size() < 2 ? 0.0 : std::sqrt(sum_sq / (n * (n - 1.0)));
}

} // namespace qbaker
