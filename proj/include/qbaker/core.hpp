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
 * Bit strings, index conventions, state vectors and the small dense matrix
 * type shared by the rest of the library.
 *
 * Bit order is MSB-first everywhere: a string xi_1 ... xi_m labels the
 * integer sum_l xi_l 2^(m-l), so xi_1 is the most significant bit.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qbaker {

using Complex = std::complex<double>;

/// Default ceiling on the qubit count accepted by SystemShape.
inline constexpr int kDefaultMaxQubits = 24;

/// Raised when run parameters violate one of the coarse-graining
/// inequalities. The message names the violated inequality.
class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A computed quantity broke an invariant that holds by construction.
class InvariantViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A request would exceed a configured size or memory ceiling.
class ResourceLimit : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Complex product without the C99 Annex G NaN recovery path.
[[nodiscard]] inline Complex cmul(Complex a, Complex b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

/// conj(a) * b
[[nodiscard]] inline Complex cmul_conj(Complex a, Complex b) noexcept {
    return {a.real() * b.real() + a.imag() * b.imag(),
            a.real() * b.imag() - a.imag() * b.real()};
}

[[nodiscard]] inline double norm2(Complex a) noexcept {
    return a.real() * a.real() + a.imag() * a.imag();
}

/// Qubit count N, dot position n and Hilbert-space dimension D = 2^N.
class SystemShape {
  public:
    SystemShape(int num_qubits, int dot, int max_qubits = kDefaultMaxQubits)
        : num_qubits_{num_qubits}, dot_{dot} {
        if (num_qubits < 1 || num_qubits > max_qubits) {
            throw std::invalid_argument(
                "qubit count must satisfy 1 <= N <= " +
                std::to_string(max_qubits) + ", got " +
                std::to_string(num_qubits));
        }
        if (dot < 0 || dot > num_qubits - 1) {
            throw std::invalid_argument(
                "dot position must satisfy 0 <= n <= N-1, got n=" +
                std::to_string(dot) + " for N=" + std::to_string(num_qubits));
        }
    }

    [[nodiscard]] int num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] int dot() const noexcept { return dot_; }
    [[nodiscard]] std::size_t dim() const noexcept {
        return std::size_t{1} << num_qubits_;
    }

    friend bool operator==(const SystemShape &, const SystemShape &) = default;

  private:
    int num_qubits_;
    int dot_;
};

/**
 * Ordered sequence of bits, most significant first.
 *
 * bit() and slice() use 1-based inclusive positions so that xi_{a:b}
 * reads the same in code as in the symbolic notation.
 */
class BitString {
  public:
    BitString() = default;

    explicit BitString(std::vector<std::uint8_t> bits) : bits_{std::move(bits)} {
        for (auto b : bits_) {
            if (b > 1) {
                throw std::invalid_argument("bit values must be 0 or 1");
            }
        }
    }

    BitString(std::initializer_list<int> bits) {
        bits_.reserve(bits.size());
        for (int b : bits) {
            if (b != 0 && b != 1) {
                throw std::invalid_argument("bit values must be 0 or 1");
            }
            bits_.push_back(static_cast<std::uint8_t>(b));
        }
    }

    /// Parses a string of '0'/'1' characters.
    [[nodiscard]] static BitString parse(std::string_view text) {
        std::vector<std::uint8_t> bits;
        bits.reserve(text.size());
        for (char ch : text) {
            if (ch != '0' && ch != '1') {
                throw std::invalid_argument("invalid bit string '" +
                                            std::string(text) + "'");
            }
            bits.push_back(static_cast<std::uint8_t>(ch - '0'));
        }
        return BitString(std::move(bits));
    }

    [[nodiscard]] static BitString zeros(std::size_t length) {
        return BitString(std::vector<std::uint8_t>(length, 0));
    }

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] bool empty() const noexcept { return bits_.empty(); }

    /// 1-based access: bit(1) is the most significant bit.
    [[nodiscard]] int bit(std::size_t position) const {
        if (position < 1 || position > bits_.size()) {
            throw std::out_of_range("bit position out of range");
        }
        return bits_[position - 1];
    }

    /// Bits first..last inclusive, 1-based. first > last yields the empty
    /// string.
    [[nodiscard]] BitString slice(std::size_t first, std::size_t last) const {
        if (first > last) {
            return {};
        }
        if (first < 1 || last > bits_.size()) {
            throw std::out_of_range("bit slice out of range");
        }
        return BitString(std::vector<std::uint8_t>(
            bits_.begin() + static_cast<std::ptrdiff_t>(first - 1),
            bits_.begin() + static_cast<std::ptrdiff_t>(last)));
    }

    [[nodiscard]] BitString reversed() const {
        return BitString(std::vector<std::uint8_t>(bits_.rbegin(), bits_.rend()));
    }

    [[nodiscard]] BitString concat(const BitString &other) const {
        std::vector<std::uint8_t> out = bits_;
        out.insert(out.end(), other.bits_.begin(), other.bits_.end());
        return BitString(std::move(out));
    }

    [[nodiscard]] std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) {
            s.push_back(static_cast<char>('0' + b));
        }
        return s;
    }

    [[nodiscard]] const std::vector<std::uint8_t> &bits() const noexcept {
        return bits_;
    }

    friend bool operator==(const BitString &, const BitString &) = default;
    friend auto operator<=>(const BitString &, const BitString &) = default;

  private:
    std::vector<std::uint8_t> bits_;
};

/// Positional value of an MSB-first bit string.
[[nodiscard]] inline std::uint64_t bits_to_index(const BitString &bits) {
    if (bits.size() > 63) {
        throw std::invalid_argument("bit string too long for an index");
    }
    std::uint64_t j = 0;
    for (auto b : bits.bits()) {
        j = (j << 1U) | b;
    }
    return j;
}

[[nodiscard]] inline BitString index_to_bits(std::uint64_t j, std::size_t length) {
    if (length > 63 || j >= (std::uint64_t{1} << length)) {
        throw std::invalid_argument("index " + std::to_string(j) +
                                    " does not fit in " +
                                    std::to_string(length) + " bits");
    }
    std::vector<std::uint8_t> bits(length);
    for (std::size_t l = 0; l < length; ++l) {
        bits[length - 1 - l] = static_cast<std::uint8_t>((j >> l) & 1U);
    }
    return BitString(std::move(bits));
}

/// Value of the binary fraction 0.b_1 b_2 ... b_m, optionally with a
/// trailing 1 bit appended (the half-integer offset of q_j and p_k).
[[nodiscard]] inline double binary_fraction(const BitString &bits, bool append_one) {
    double value = 0.0;
    double place = 0.5;
    for (auto b : bits.bits()) {
        if (b != 0) {
            value += place;
        }
        place *= 0.5;
    }
    if (append_one) {
        value += place;
    }
    return value;
}

/// Reverses the lowest `width` bits of `value`.
[[nodiscard]] constexpr std::uint64_t reverse_bits(std::uint64_t value,
                                                   int width) noexcept {
    std::uint64_t out = 0;
    for (int i = 0; i < width; ++i) {
        out = (out << 1U) | ((value >> i) & 1U);
    }
    return out;
}

/// Amplitudes over the computational basis (or over any labelled basis
/// when used as a coefficient vector), indexed 0..D-1.
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(std::size_t dim) : amplitudes_(dim) {}
    explicit StateVector(std::vector<Complex> amplitudes)
        : amplitudes_{std::move(amplitudes)} {}
    StateVector(std::initializer_list<Complex> amplitudes)
        : amplitudes_(amplitudes) {}

    /// Unit vector e_index.
    [[nodiscard]] static StateVector basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw std::invalid_argument("basis index out of range");
        }
        StateVector v(dim);
        v.amplitudes_[index] = 1.0;
        return v;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return amplitudes_.size(); }

    Complex &operator[](std::size_t i) noexcept { return amplitudes_[i]; }
    const Complex &operator[](std::size_t i) const noexcept {
        return amplitudes_[i];
    }

    [[nodiscard]] std::span<Complex> span() noexcept { return amplitudes_; }
    [[nodiscard]] std::span<const Complex> span() const noexcept {
        return amplitudes_;
    }
    [[nodiscard]] const std::vector<Complex> &amplitudes() const noexcept {
        return amplitudes_;
    }

    auto begin() noexcept { return amplitudes_.begin(); }
    auto end() noexcept { return amplitudes_.end(); }
    auto begin() const noexcept { return amplitudes_.begin(); }
    auto end() const noexcept { return amplitudes_.end(); }

    [[nodiscard]] double squared_norm() const noexcept {
        double s = 0.0;
        for (const auto &a : amplitudes_) {
            s += norm2(a);
        }
        return s;
    }
    [[nodiscard]] double norm() const noexcept { return std::sqrt(squared_norm()); }

    StateVector &operator+=(const StateVector &other) {
        require_same_dim(other);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            amplitudes_[i] += other.amplitudes_[i];
        }
        return *this;
    }
    StateVector &operator-=(const StateVector &other) {
        require_same_dim(other);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            amplitudes_[i] -= other.amplitudes_[i];
        }
        return *this;
    }
    StateVector &operator*=(Complex s) noexcept {
        for (auto &a : amplitudes_) {
            a *= s;
        }
        return *this;
    }

    friend StateVector operator+(StateVector a, const StateVector &b) {
        return a += b;
    }
    friend StateVector operator-(StateVector a, const StateVector &b) {
        return a -= b;
    }
    friend StateVector operator*(Complex s, StateVector a) { return a *= s; }

  private:
    void require_same_dim(const StateVector &other) const {
        if (other.dim() != dim()) {
            throw std::invalid_argument("state vector dimension mismatch");
        }
    }

    std::vector<Complex> amplitudes_;
};

/// <u|v>, conjugate-linear in u.
[[nodiscard]] inline Complex inner_product(std::span<const Complex> u,
                                           std::span<const Complex> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("inner_product: dimension mismatch (" +
                                    std::to_string(u.size()) + " vs " +
                                    std::to_string(v.size()) + ")");
    }
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Complex p = cmul_conj(u[i], v[i]);
        re += p.real();
        im += p.imag();
    }
    return {re, im};
}

[[nodiscard]] inline Complex inner_product(const StateVector &u,
                                           const StateVector &v) {
    return inner_product(u.span(), v.span());
}

/// Largest |u_i - v_i|.
[[nodiscard]] inline double max_abs_diff(std::span<const Complex> u,
                                         std::span<const Complex> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("max_abs_diff: dimension mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        m = std::max(m, std::abs(u[i] - v[i]));
    }
    return m;
}

/// Row-major dense complex matrix. Only used for small oracles and checks.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_{rows}, cols_{cols}, data_(rows * cols) {}

    [[nodiscard]] static DenseMatrix identity(std::size_t dim) {
        DenseMatrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    Complex &operator()(std::size_t i, std::size_t j) noexcept {
        return data_[i * cols_ + j];
    }
    const Complex &operator()(std::size_t i, std::size_t j) const noexcept {
        return data_[i * cols_ + j];
    }

    void set_column(std::size_t j, std::span<const Complex> column) {
        if (column.size() != rows_) {
            throw std::invalid_argument("set_column: length mismatch");
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            (*this)(i, j) = column[i];
        }
    }

    [[nodiscard]] DenseMatrix adjoint() const {
        DenseMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                out(j, i) = std::conj((*this)(i, j));
            }
        }
        return out;
    }

    friend DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("matrix product: shape mismatch");
        }
        DenseMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    out(i, j) += cmul(aik, b(k, j));
                }
            }
        }
        return out;
    }

    [[nodiscard]] StateVector apply(const StateVector &v) const {
        if (v.dim() != cols_) {
            throw std::invalid_argument("matrix-vector product: shape mismatch");
        }
        StateVector out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            Complex s{};
            for (std::size_t j = 0; j < cols_; ++j) {
                s += cmul((*this)(i, j), v[j]);
            }
            out[i] = s;
        }
        return out;
    }

    [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

[[nodiscard]] inline double max_abs_diff(const DenseMatrix &a, const DenseMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    }
    return max_abs_diff(a.data(), b.data());
}

} // namespace qbaker
