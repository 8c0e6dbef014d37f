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

// Dense reference constructions for small N. Everything here is built from
// basis_state() (the tensor-product formula) and explicit matrices; nothing
// goes through the fast transforms or the branch propagation.
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qbaker/bakermap.hpp"
#include "qbaker/coarsegrain.hpp"
#include "qbaker/core.hpp"

namespace qbaker::testing {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Vector to_eigen(const StateVector &v) {
    Vector out(static_cast<Eigen::Index>(v.dim()));
    for (std::size_t i = 0; i < v.dim(); ++i) {
        out(static_cast<Eigen::Index>(i)) = v[i];
    }
    return out;
}

inline StateVector from_eigen(const Vector &v) {
    StateVector out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out[static_cast<std::size_t>(i)] = v(i);
    }
    return out;
}

inline Matrix to_eigen(const DenseMatrix &m) {
    Matrix out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
        }
    }
    return out;
}

inline StateVector random_state(std::size_t dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss;
    StateVector v(dim);
    for (auto &a : v) {
        a = {gauss(rng), gauss(rng)};
    }
    return v;
}

/// Column index(xi) = basis_state(N, m, xi).
inline Matrix basis_matrix(int num_qubits, int dot) {
    const auto dim = std::size_t{1} << num_qubits;
    Matrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        out.col(static_cast<Eigen::Index>(j)) = to_eigen(
            basis_state(num_qubits, dot, index_to_bits(j, static_cast<std::size_t>(num_qubits))));
    }
    return out;
}

/// B = sum_xi |n+1, xi><n, xi|.
inline Matrix baker_from_basis(int num_qubits, int dot) {
    return basis_matrix(num_qubits, dot + 1) * basis_matrix(num_qubits, dot).adjoint();
}

/// P_y^{(l,r)} in computational coordinates, sum over a, b of |a y b><a y b|.
inline Matrix projector_matrix(const CoarseGraining &cg, std::uint64_t y, const Matrix &nbasis) {
    const auto dim = static_cast<Eigen::Index>(cg.shape().dim());
    Matrix p = Matrix::Zero(dim, dim);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << cg.left()); ++a) {
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << cg.right()); ++b) {
            const auto col = nbasis.col(static_cast<Eigen::Index>(cg.compose(a, y, b)));
            p += col * col.adjoint();
        }
    }
    return p;
}

/**
 * Direct evaluation of Tr[C_y rho_0 C_z^dagger] with rho_0 = 2^{-(l+r)} P_x
 * and C_y = P_{y^k} B ... P_{y^1} B, for every pair of full histories, plus
 * Tr[P_y B^k rho_0 B^{k dagger} P_z] for every pair of coarse histories.
 *
 * rho_0 is factored as 2^{-(l+r)} W W^dagger with W the block basis
 * vectors, so Tr[C_y rho_0 C_z^dagger] = 2^{-(l+r)} Tr[(C_y W)(C_z W)^dagger].
 */
struct DenseFunctional {
    Matrix full;   // paths x paths, indexed by path code
    Matrix coarse; // 2^c x 2^c
};

inline DenseFunctional dense_functional(const CoarseGraining &cg, std::uint64_t x, int steps) {
    const int N = cg.shape().num_qubits();
    const int n = cg.shape().dot();
    const int c = cg.width();
    const Matrix nbasis = basis_matrix(N, n);
    const Matrix b = baker_from_basis(N, n);
    const std::size_t fanout = std::size_t{1} << c;
    std::vector<Matrix> proj;
    proj.reserve(fanout);
    for (std::uint64_t y = 0; y < fanout; ++y) {
        proj.push_back(projector_matrix(cg, y, nbasis));
    }

    const auto block = static_cast<Eigen::Index>(cg.block_size());
    Matrix w(nbasis.rows(), block);
    Eigen::Index col = 0;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << cg.left()); ++a) {
        for (std::uint64_t bb = 0; bb < (std::uint64_t{1} << cg.right()); ++bb) {
            w.col(col++) = nbasis.col(static_cast<Eigen::Index>(cg.compose(a, x, bb)));
        }
    }
    const double weight = std::ldexp(1.0, -(cg.left() + cg.right()));

    const std::uint64_t paths = std::uint64_t{1} << (c * steps);
    std::vector<Matrix> images(paths);
    for (std::uint64_t code = 0; code < paths; ++code) {
        Matrix v = w;
        for (int j = steps - 1; j >= 0; --j) {
            const std::uint64_t y = (code >> (j * c)) & (fanout - 1);
            v = proj[y] * (b * v);
        }
        images[code] = std::move(v);
    }
    DenseFunctional out;
    out.full.resize(static_cast<Eigen::Index>(paths), static_cast<Eigen::Index>(paths));
    for (std::uint64_t y = 0; y < paths; ++y) {
        for (std::uint64_t z = 0; z < paths; ++z) {
            out.full(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z)) =
                weight * (images[y] * images[z].adjoint()).trace();
        }
    }

    Matrix evolved = w;
    for (int j = 0; j < steps; ++j) {
        evolved = b * evolved;
    }
    out.coarse.resize(static_cast<Eigen::Index>(fanout), static_cast<Eigen::Index>(fanout));
    for (std::uint64_t y = 0; y < fanout; ++y) {
        for (std::uint64_t z = 0; z < fanout; ++z) {
            out.coarse(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z)) =
                weight * (proj[y] * evolved * (proj[z] * evolved).adjoint()).trace();
        }
    }
    return out;
}

} // namespace qbaker::testing
