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
 * Coarse-graining projectors P_y^{(l,r)} and block initial states.
 *
 * P_y keeps the dot-position-n basis states whose label has the middle bits
 * l+1 .. N-r equal to y; the l leftmost and r rightmost bits are summed
 * over. The projectors are diagonal in n-basis coordinates, so they are
 * implemented as index masks and never materialized.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"

namespace qbaker {

/// Empty when l < n, r < N-n and 1 <= k < r all hold; otherwise the first
/// violated inequality. The step-count check is skipped when `steps` is
/// empty.
[[nodiscard]] inline std::string run_violation(const SystemShape &shape, int left,
                                               int right,
                                               std::optional<int> steps = std::nullopt) {
    if (left < 0) {
        return "l >= 0 violated";
    }
    if (right < 0) {
        return "r >= 0 violated";
    }
    if (left >= shape.dot()) {
        return "l < n violated";
    }
    if (right >= shape.num_qubits() - shape.dot()) {
        return "r < N-n violated";
    }
    if (steps) {
        if (*steps < 1) {
            return "k >= 1 violated";
        }
        if (*steps >= right) {
            return "k < r violated";
        }
    }
    return {};
}

/// Ignored-bit counts (l, r) on top of a system shape; c = N - l - r bits
/// are kept.
class CoarseGraining {
  public:
    CoarseGraining(const SystemShape &shape, int left, int right)
        : shape_{shape}, left_{left}, right_{right} {
        if (auto violation = run_violation(shape, left, right); !violation.empty()) {
            throw ParameterError(violation);
        }
    }

    [[nodiscard]] const SystemShape &shape() const noexcept { return shape_; }
    [[nodiscard]] int left() const noexcept { return left_; }
    [[nodiscard]] int right() const noexcept { return right_; }
    [[nodiscard]] int width() const noexcept {
        return shape_.num_qubits() - left_ - right_;
    }
    [[nodiscard]] std::uint64_t width_mask() const noexcept {
        return (std::uint64_t{1} << width()) - 1;
    }

    /// Middle string y of an n-basis coefficient index.
    [[nodiscard]] std::uint64_t middle_bits(std::uint64_t index) const noexcept {
        return (index >> right_) & width_mask();
    }

    /// Index of the label a . y . b.
    [[nodiscard]] std::uint64_t compose(std::uint64_t a, std::uint64_t y,
                                        std::uint64_t b) const noexcept {
        return (((a << width()) | y) << right_) | b;
    }

    [[nodiscard]] std::uint64_t block_size() const noexcept {
        return std::uint64_t{1} << (left_ + right_);
    }

    void require_width(const BitString &y, const char *what) const {
        if (y.size() != static_cast<std::size_t>(width())) {
            throw std::invalid_argument(std::string(what) + ": string length " +
                                        std::to_string(y.size()) +
                                        " != kept width c=" +
                                        std::to_string(width()));
        }
    }

  private:
    SystemShape shape_;
    int left_;
    int right_;
};

/// Throws ParameterError naming the violated inequality.
inline void validate_run(const SystemShape &shape, int left, int right, int steps) {
    if (auto violation = run_violation(shape, left, right, steps); !violation.empty()) {
        throw ParameterError(violation);
    }
}

inline void validate_run(const CoarseGraining &cg, int steps) {
    validate_run(cg.shape(), cg.left(), cg.right(), steps);
}

/// Zeroes coefficients outside the subspace of middle string y, in place.
inline void project_in_place(std::span<Complex> coeffs, const CoarseGraining &cg,
                             std::uint64_t y) {
    for (std::uint64_t i = 0; i < coeffs.size(); ++i) {
        if (cg.middle_bits(i) != y) {
            coeffs[i] = Complex{};
        }
    }
}

/// P_y applied to n-basis coordinates.
[[nodiscard]] inline StateVector project(const StateVector &coeffs,
                                         const CoarseGraining &cg, const BitString &y) {
    cg.require_width(y, "project");
    if (coeffs.dim() != cg.shape().dim()) {
        throw std::invalid_argument("project: dimension mismatch");
    }
    StateVector out = coeffs;
    project_in_place(out.span(), cg, bits_to_index(y));
    return out;
}

/// All labels a . x . b, a-major, each part in lexicographic order.
[[nodiscard]] inline std::vector<BitString> enumerate_block(const CoarseGraining &cg,
                                                            const BitString &x) {
    cg.require_width(x, "enumerate_block");
    const auto l = static_cast<std::size_t>(cg.left());
    const auto r = static_cast<std::size_t>(cg.right());
    std::vector<BitString> out;
    out.reserve(cg.block_size());
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << l); ++a) {
        const BitString head = index_to_bits(a, l).concat(x);
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << r); ++b) {
            out.push_back(head.concat(index_to_bits(b, r)));
        }
    }
    return out;
}

/// rho_0 = 2^{-(l+r)} P_x, held as the uniform ensemble over
/// enumerate_block(cg, x).
class BlockInitialState {
  public:
    BlockInitialState(CoarseGraining cg, BitString x)
        : cg_{std::move(cg)}, x_{std::move(x)} {
        cg_.require_width(x_, "BlockInitialState");
    }

    [[nodiscard]] const CoarseGraining &coarse_graining() const noexcept { return cg_; }
    [[nodiscard]] const BitString &x() const noexcept { return x_; }
    [[nodiscard]] double weight() const noexcept {
        return std::ldexp(1.0, -(cg_.left() + cg_.right()));
    }
    [[nodiscard]] std::vector<BitString> labels() const { return enumerate_block(cg_, x_); }

  private:
    CoarseGraining cg_;
    BitString x_;
};

} // namespace qbaker
