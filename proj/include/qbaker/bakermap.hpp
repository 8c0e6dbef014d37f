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
 * Localized basis states, the fast analysis/synthesis transforms between
 * computational coordinates and the dot-position-m basis, and the quantum
 * baker's map that shifts the dot by one position.
 *
 * Index conventions. For dot position m, write M = 2^m and P = 2^(N-m).
 * A basis label xi_1 ... xi_N has coefficient index a * P + pos where
 * a = index(xi_1 ... xi_m) and pos = index(xi_{m+1} ... xi_N). The state it
 * labels is |pos> (position qubits, most significant) tensored with the
 * antiperiodic momentum state of the m rightmost qubits,
 *
 *   <J|p_k> = M^{-1/2} exp(2 pi i (J + 1/2)(k + 1/2) / M),
 *
 * with k = index(xi_m ... xi_1), the bit reversal of a. Expanding the
 * kernel gives exactly the product of single-qubit factors of the
 * localized basis, including its global phase.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace qbaker {

/// Largest N for which the dense matrix builders run.
inline constexpr int kDenseMaxQubits = 10;

/// Kernel sign for which G_D^{-1} (G_{D/2} + G_{D/2}) reproduces the n = N-1
/// map. Calibrated against the basis-state construction at N = 2, 3.
inline constexpr int kBvsKernelSign = -1;

namespace detail {

inline void require_dot_range(int num_qubits, int dot) {
    if (dot < 0 || dot > num_qubits) {
        throw std::invalid_argument("dot position must satisfy 0 <= m <= N, got m=" +
                                    std::to_string(dot) + " for N=" +
                                    std::to_string(num_qubits));
    }
}

inline Complex unit_phase(double turns_times_pi) {
    return std::polar(1.0, std::numbers::pi * turns_times_pi);
}

} // namespace detail

/**
 * The localized state |xi_1 ... xi_m . xi_{m+1} ... xi_N>, built directly
 * from its tensor-product form: position qubits |xi_{m+1}> ... |xi_N>
 * followed by the factors (|0> + exp(2 pi i 0.xi_t...xi_1 1)|1>)/sqrt(2),
 * t = 1..m, with global phase exp(i pi 0.xi_m...xi_1 1).
 *
 * This is the reference construction. analyze/synthesize reach the same
 * vectors through the fast transform.
 */
[[nodiscard]] inline StateVector basis_state(int num_qubits, int dot,
                                             const BitString &xi) {
    detail::require_dot_range(num_qubits, dot);
    if (xi.size() != static_cast<std::size_t>(num_qubits)) {
        throw std::invalid_argument("basis_state: label length " +
                                    std::to_string(xi.size()) + " != N=" +
                                    std::to_string(num_qubits));
    }
    const auto m = static_cast<std::size_t>(dot);
    const std::size_t momentum_dim = std::size_t{1} << m;
    const std::size_t pos = bits_to_index(xi.slice(m + 1, xi.size()));

    std::vector<Complex> factor(m);
    for (std::size_t t = 1; t <= m; ++t) {
        factor[t - 1] =
            detail::unit_phase(2.0 * binary_fraction(xi.slice(1, t).reversed(), true));
    }
    const Complex global =
        detail::unit_phase(binary_fraction(xi.slice(1, m).reversed(), true)) /
        std::sqrt(static_cast<double>(momentum_dim));

    StateVector out(std::size_t{1} << xi.size());
    for (std::size_t j = 0; j < momentum_dim; ++j) {
        Complex amp = global;
        for (std::size_t t = 1; t <= m; ++t) {
            // qubit t of the momentum block is bit (m - t) of j
            if (((j >> (m - t)) & 1U) != 0) {
                amp *= factor[t - 1];
            }
        }
        out[pos * momentum_dim + j] = amp;
    }
    return out;
}

[[nodiscard]] inline StateVector basis_state(const SystemShape &shape, int dot,
                                             const BitString &xi) {
    return basis_state(shape.num_qubits(), dot, xi);
}

/// Phase-space centre and width of a localized basis state.
struct Localization {
    double q;
    double p;
    double dq;
    double dp;
};

[[nodiscard]] inline Localization localization_centers(int num_qubits, int dot,
                                                       const BitString &xi) {
    if (dot < 1 || dot > num_qubits - 1) {
        throw std::invalid_argument("localization_centers requires 1 <= m <= N-1");
    }
    if (xi.size() != static_cast<std::size_t>(num_qubits)) {
        throw std::invalid_argument("localization_centers: label length mismatch");
    }
    const auto m = static_cast<std::size_t>(dot);
    return {binary_fraction(xi.slice(m + 1, xi.size()), true),
            binary_fraction(xi.slice(1, m).reversed(), true),
            std::ldexp(1.0, -(num_qubits - dot)), std::ldexp(1.0, -dot)};
}

/**
 * Precomputed tables for the change of basis between computational
 * coordinates and dot-position-m coordinates.
 *
 * Both directions run in O(N 2^N): a diagonal phase, a radix-2 transform
 * over the m momentum qubits, and a transpose that moves the momentum
 * qubits from the least to the most significant end of the index. The
 * radix-2 passes act on whole rows of length P = 2^(N-m), so every inner
 * loop is contiguous. Bit reversal is folded into the phase tables: the
 * decimation-in-time pass consumes bit-reversed input and the
 * decimation-in-frequency pass produces bit-reversed output, which is the
 * coefficient order a = rev(k) already.
 *
 * Instances are immutable after construction and may be shared between
 * threads.
 */
class BasisTransform {
  public:
    BasisTransform(int num_qubits, int dot) : num_qubits_{num_qubits}, dot_{dot} {
        if (num_qubits < 1 || num_qubits > 62) {
            throw std::invalid_argument("BasisTransform: unsupported qubit count");
        }
        detail::require_dot_range(num_qubits, dot);
        momentum_dim_ = std::size_t{1} << dot;
        position_dim_ = std::size_t{1} << (num_qubits - dot);

        const auto M = static_cast<double>(momentum_dim_);
        const double inv_sqrt = 1.0 / std::sqrt(M);
        const std::size_t half = momentum_dim_ / 2;
        twiddle_plus_.resize(half);
        twiddle_minus_.resize(half);
        for (std::size_t t = 0; t < half; ++t) {
            twiddle_plus_[t] = detail::unit_phase(2.0 * static_cast<double>(t) / M);
            twiddle_minus_[t] = std::conj(twiddle_plus_[t]);
        }
        synth_pre_.resize(momentum_dim_);
        synth_post_.resize(momentum_dim_);
        analyze_pre_.resize(momentum_dim_);
        analyze_post_.resize(momentum_dim_);
        for (std::size_t i = 0; i < momentum_dim_; ++i) {
            const auto rev = static_cast<double>(reverse_bits(i, dot));
            const auto di = static_cast<double>(i);
            synth_pre_[i] = detail::unit_phase(rev / M);
            synth_post_[i] = detail::unit_phase((2.0 * di + 1.0) / (2.0 * M)) * inv_sqrt;
            analyze_pre_[i] = detail::unit_phase(-di / M);
            analyze_post_[i] =
                detail::unit_phase(-(2.0 * rev + 1.0) / (2.0 * M)) * inv_sqrt;
        }
    }

    [[nodiscard]] int num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] int dot() const noexcept { return dot_; }
    [[nodiscard]] std::size_t dim() const noexcept {
        return momentum_dim_ * position_dim_;
    }

    /// Basis coefficients -> computational amplitudes. `scratch` must hold
    /// dim() elements and must not alias `coeffs` or `out`.
    void synthesize(std::span<const Complex> coeffs, std::span<Complex> out,
                    std::span<Complex> scratch) const {
        require_dims(coeffs.size(), out.size());
        if (scratch.size() != dim()) {
            throw std::invalid_argument("synthesize: scratch size mismatch");
        }
        const std::size_t P = position_dim_;
        for (std::size_t a = 0; a < momentum_dim_; ++a) {
            const Complex w = synth_pre_[a];
            const Complex *src = coeffs.data() + a * P;
            Complex *dst = scratch.data() + a * P;
            for (std::size_t pos = 0; pos < P; ++pos) {
                dst[pos] = cmul(src[pos], w);
            }
        }
        dit_rows(scratch, twiddle_plus_);
        transpose(scratch, out, momentum_dim_, P, synth_post_, /*scale_rows=*/true);
    }

    /// Computational amplitudes -> basis coefficients.
    void analyze(std::span<const Complex> state, std::span<Complex> out) const {
        require_dims(state.size(), out.size());
        const std::size_t P = position_dim_;
        transpose(state, out, P, momentum_dim_, analyze_pre_, /*scale_rows=*/false);
        dif_rows(out, twiddle_minus_);
        for (std::size_t a = 0; a < momentum_dim_; ++a) {
            const Complex w = analyze_post_[a];
            Complex *row = out.data() + a * P;
            for (std::size_t pos = 0; pos < P; ++pos) {
                row[pos] = cmul(row[pos], w);
            }
        }
    }

  private:
    void require_dims(std::size_t in, std::size_t out) const {
        if (in != dim() || out != dim()) {
            throw std::invalid_argument("basis transform: dimension mismatch, expected " +
                                        std::to_string(dim()));
        }
    }

    // Radix-2 passes over the row index. Each "element" is a row of P
    // contiguous values.
    void dit_rows(std::span<Complex> data, const std::vector<Complex> &tw) const {
        const std::size_t M = momentum_dim_;
        const std::size_t P = position_dim_;
        for (std::size_t len = 2; len <= M; len <<= 1U) {
            const std::size_t half = len / 2;
            const std::size_t stride = M / len;
            for (std::size_t start = 0; start < M; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    const Complex w = tw[j * stride];
                    Complex *a = data.data() + (start + j) * P;
                    Complex *b = data.data() + (start + j + half) * P;
                    for (std::size_t p = 0; p < P; ++p) {
                        const Complex v = cmul(b[p], w);
                        const Complex u = a[p];
                        a[p] = u + v;
                        b[p] = u - v;
                    }
                }
            }
        }
    }

    void dif_rows(std::span<Complex> data, const std::vector<Complex> &tw) const {
        const std::size_t M = momentum_dim_;
        const std::size_t P = position_dim_;
        for (std::size_t len = M; len >= 2; len >>= 1U) {
            const std::size_t half = len / 2;
            const std::size_t stride = M / len;
            for (std::size_t start = 0; start < M; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    const Complex w = tw[j * stride];
                    Complex *a = data.data() + (start + j) * P;
                    Complex *b = data.data() + (start + j + half) * P;
                    for (std::size_t p = 0; p < P; ++p) {
                        const Complex u = a[p];
                        const Complex v = b[p];
                        a[p] = u + v;
                        b[p] = cmul(u - v, w);
                    }
                }
            }
        }
    }

    // dst (cols x rows) = transpose of src (rows x cols), each element scaled
    // by phase[src row] or phase[src col].
    static void transpose(std::span<const Complex> src, std::span<Complex> dst,
                          std::size_t rows, std::size_t cols,
                          const std::vector<Complex> &phase, bool scale_rows) {
        constexpr std::size_t tile = 16;
        for (std::size_t r0 = 0; r0 < rows; r0 += tile) {
            const std::size_t r1 = std::min(rows, r0 + tile);
            for (std::size_t c0 = 0; c0 < cols; c0 += tile) {
                const std::size_t c1 = std::min(cols, c0 + tile);
                for (std::size_t r = r0; r < r1; ++r) {
                    for (std::size_t c = c0; c < c1; ++c) {
                        const Complex w = scale_rows ? phase[r] : phase[c];
                        dst[c * rows + r] = cmul(src[r * cols + c], w);
                    }
                }
            }
        }
    }

    int num_qubits_;
    int dot_;
    std::size_t momentum_dim_ = 1;
    std::size_t position_dim_ = 1;
    std::vector<Complex> twiddle_plus_;
    std::vector<Complex> twiddle_minus_;
    std::vector<Complex> synth_pre_;
    std::vector<Complex> synth_post_;
    std::vector<Complex> analyze_pre_;
    std::vector<Complex> analyze_post_;
};

/// c[index(xi)] = <basis_state(m, xi)|state>.
[[nodiscard]] inline StateVector analyze(const StateVector &state, int num_qubits,
                                         int dot) {
    const BasisTransform plan(num_qubits, dot);
    StateVector out(plan.dim());
    plan.analyze(state.span(), out.span());
    return out;
}

[[nodiscard]] inline StateVector synthesize(const StateVector &coeffs, int num_qubits,
                                            int dot) {
    const BasisTransform plan(num_qubits, dot);
    StateVector out(plan.dim());
    std::vector<Complex> scratch(plan.dim());
    plan.synthesize(coeffs.span(), out.span(), scratch);
    return out;
}

/**
 * One step of the map expressed in dot-position-n coordinates:
 * T = analyze_n o synthesize_{n+1}. Since B|n, xi> = |n+1, xi>, the
 * coefficients of B psi in the n basis are T applied to those of psi.
 */
class BakerTransfer {
  public:
    struct Workspace {
        explicit Workspace(std::size_t dim) : scratch(dim), state(dim) {}
        std::vector<Complex> scratch;
        std::vector<Complex> state;
    };

    explicit BakerTransfer(const SystemShape &shape)
        : shape_{shape}, source_{shape.num_qubits(), shape.dot()},
          target_{shape.num_qubits(), shape.dot() + 1} {}

    [[nodiscard]] const SystemShape &shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t dim() const noexcept { return shape_.dim(); }

    void apply(std::span<const Complex> coeffs, std::span<Complex> out,
               Workspace &ws) const {
        target_.synthesize(coeffs, ws.state, ws.scratch);
        source_.analyze(ws.state, out);
    }

    /// B applied in computational coordinates.
    void apply_computational(std::span<const Complex> state, std::span<Complex> out,
                             Workspace &ws) const {
        source_.analyze(state, ws.state);
        target_.synthesize(ws.state, out, ws.scratch);
    }

  private:
    SystemShape shape_;
    BasisTransform source_;
    BasisTransform target_;
};

/// B psi with B|n, xi> = |n+1, xi>, n = shape.dot().
[[nodiscard]] inline StateVector apply_baker(const StateVector &state,
                                             const SystemShape &shape) {
    if (state.dim() != shape.dim()) {
        throw std::invalid_argument("apply_baker: dimension mismatch");
    }
    const BakerTransfer transfer(shape);
    BakerTransfer::Workspace ws(shape.dim());
    StateVector out(shape.dim());
    transfer.apply_computational(state.span(), out.span(), ws);
    return out;
}

namespace detail {
inline void require_dense_size(int num_qubits) {
    if (num_qubits > kDenseMaxQubits) {
        throw ResourceLimit("dense matrices are limited to N <= " +
                            std::to_string(kDenseMaxQubits) + ", got N=" +
                            std::to_string(num_qubits));
    }
}
} // namespace detail

/// Dense matrix of the map in computational coordinates, column j = B e_j.
[[nodiscard]] inline DenseMatrix baker_matrix(const SystemShape &shape) {
    detail::require_dense_size(shape.num_qubits());
    const std::size_t dim = shape.dim();
    const BakerTransfer transfer(shape);
    BakerTransfer::Workspace ws(dim);
    DenseMatrix out(dim, dim);
    StateVector column(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const StateVector e = StateVector::basis(dim, j);
        transfer.apply_computational(e.span(), column.span(), ws);
        out.set_column(j, column.span());
    }
    return out;
}

/// M x M antiperiodic Fourier matrix M^{-1/2} exp(sign 2 pi i (j+1/2)(k+1/2)/M).
[[nodiscard]] inline DenseMatrix antiperiodic_fourier_matrix(std::size_t dim,
                                                             int sign) {
    DenseMatrix g(dim, dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    const auto M = static_cast<double>(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t k = 0; k < dim; ++k) {
            // (2j+1)(2k+1)/(2M) half-turns, reduced mod 4M to keep the
            // argument small
            const std::size_t num = ((2 * j + 1) * (2 * k + 1)) % (4 * dim);
            g(j, k) = scale * detail::unit_phase(sign * static_cast<double>(num) / (2.0 * M));
        }
    }
    return g;
}

/**
 * Balazs-Voros-Saraceno baker's map G_D^{-1} (G_{D/2} (+) G_{D/2}), built
 * from Fourier matrices alone. Independent reference for n = N-1.
 */
[[nodiscard]] inline DenseMatrix bvs_reference_matrix(int num_qubits,
                                                      int kernel_sign = kBvsKernelSign) {
    if (num_qubits < 1) {
        throw std::invalid_argument("bvs_reference_matrix: N must be >= 1");
    }
    detail::require_dense_size(num_qubits);
    if (kernel_sign != 1 && kernel_sign != -1) {
        throw std::invalid_argument("kernel sign must be +1 or -1");
    }
    const std::size_t dim = std::size_t{1} << num_qubits;
    const std::size_t half = dim / 2;
    const DenseMatrix g_half = antiperiodic_fourier_matrix(half, kernel_sign);
    DenseMatrix blocks(dim, dim);
    for (std::size_t i = 0; i < half; ++i) {
        for (std::size_t j = 0; j < half; ++j) {
            blocks(i, j) = g_half(i, j);
            blocks(half + i, half + j) = g_half(i, j);
        }
    }
    // G_D is unitary, so its inverse is its adjoint.
    return antiperiodic_fourier_matrix(dim, kernel_sign).adjoint() * blocks;
}

} // namespace qbaker
