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
#include <array>
#include <random>
#include <string>

#include <catch_amalgamated.hpp>

#include "dense_oracle.hpp"
#include "qbaker/coarsegrain.hpp"

using namespace qbaker;
using namespace qbaker::testing;

namespace {

std::string violation_of(int N, int n, int l, int r, int k) {
    try {
        validate_run(SystemShape(N, n), l, r, k);
    } catch (const ParameterError &e) {
        return e.what();
    }
    return {};
}

StateVector ones(std::size_t dim) {
    StateVector v(dim);
    for (auto &a : v) {
        a = 1.0;
    }
    return v;
}

} // namespace

TEST_CASE("validate_run names the violated inequality", "[coarsegrain]") {
    CHECK(violation_of(8, 4, 2, 3, 2).empty());
    CHECK(violation_of(8, 4, 5, 3, 2) == "l < n violated");
    CHECK(violation_of(8, 4, 2, 4, 2) == "r < N-n violated");
    CHECK(violation_of(8, 4, 2, 3, 3) == "k < r violated");
    CHECK(violation_of(8, 4, 2, 3, 0) == "k >= 1 violated");
    CHECK(violation_of(8, 4, -1, 3, 1) == "l >= 0 violated");
    CHECK_THROWS_AS(CoarseGraining(SystemShape(8, 4), 4, 3), ParameterError);
    CHECK_THROWS_AS(CoarseGraining(SystemShape(8, 4), 4, 3), std::invalid_argument);
}

TEST_CASE("CoarseGraining geometry", "[coarsegrain]") {
    const CoarseGraining cg(SystemShape(8, 4), 2, 3);
    CHECK(cg.width() == 3);
    CHECK(cg.block_size() == 32);
    CHECK(cg.compose(0b10, 0b011, 0b101) == 0b10011101);
    CHECK(cg.middle_bits(0b10011101) == 0b011);
}

TEST_CASE("project keeps the selected middle string", "[coarsegrain]") {
    const CoarseGraining cg(SystemShape(3, 1), 0, 1);
    const StateVector out = project(ones(8), cg, BitString::parse("10"));
    for (std::size_t i = 0; i < 8; ++i) {
        INFO("index " << i);
        CHECK(out[i] == Complex{(i == 4 || i == 5) ? 1.0 : 0.0, 0.0});
    }
    CHECK_THROWS_AS(project(ones(8), cg, BitString::parse("1")), std::invalid_argument);
    CHECK_THROWS_AS(project(ones(4), cg, BitString::parse("10")), std::invalid_argument);
}

TEST_CASE("projectors are complete, orthogonal and idempotent", "[coarsegrain][property]") {
    std::mt19937_64 rng(5);
    for (int N = 2; N <= 8; ++N) {
        for (int n = 1; n < N; ++n) {
            for (int l = 0; l < n; ++l) {
                for (int r = 0; r < N - n; ++r) {
                    const CoarseGraining cg(SystemShape(N, n), l, r);
                    const StateVector v = random_state(cg.shape().dim(), rng);
                    StateVector sum(v.dim());
                    bool orthogonal = true;
                    bool idempotent = true;
                    for (std::uint64_t y = 0; y <= cg.width_mask(); ++y) {
                        const BitString ys = index_to_bits(y, static_cast<std::size_t>(cg.width()));
                        const StateVector py = project(v, cg, ys);
                        sum += py;
                        idempotent = idempotent && project(py, cg, ys).amplitudes() == py.amplitudes();
                        const BitString other =
                            index_to_bits((y + 1) & cg.width_mask(), static_cast<std::size_t>(cg.width()));
                        if (cg.width_mask() > 0) {
                            orthogonal = orthogonal && project(py, cg, other).squared_norm() == 0.0;
                        }
                    }
                    INFO("N=" << N << " n=" << n << " l=" << l << " r=" << r);
                    CHECK(sum.amplitudes() == v.amplitudes());
                    CHECK(orthogonal);
                    CHECK(idempotent);
                }
            }
        }
    }
}

TEST_CASE("projectors match the dense outer-product sum", "[coarsegrain]") {
    for (auto [N, n, l, r] : {std::array{4, 2, 1, 1}, std::array{6, 3, 1, 2},
                              std::array{8, 4, 2, 3}, std::array{8, 5, 0, 2}}) {
        const CoarseGraining cg(SystemShape(N, n), l, r);
        const Matrix nbasis = basis_matrix(N, n);
        const std::size_t dim = cg.shape().dim();
        for (std::uint64_t y = 0; y <= cg.width_mask(); ++y) {
            const Matrix dense = projector_matrix(cg, y, nbasis);
            const BitString ys = index_to_bits(y, static_cast<std::size_t>(cg.width()));
            double err = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const StateVector e = StateVector::basis(dim, j);
                const StateVector fast = synthesize(project(analyze(e, N, n), cg, ys), N, n);
                err = std::max(err, (to_eigen(fast) - dense.col(static_cast<Eigen::Index>(j)))
                                        .cwiseAbs()
                                        .maxCoeff());
            }
            INFO("N=" << N << " n=" << n << " l=" << l << " r=" << r << " y=" << y);
            CHECK(err < 1e-10);
        }
    }
}

TEST_CASE("enumerate_block lists the block in a-major order", "[coarsegrain]") {
    const CoarseGraining one(SystemShape(4, 2), 1, 1);
    const auto labels = enumerate_block(one, BitString::parse("01"));
    REQUIRE(labels.size() == 4);
    CHECK(labels[0].to_string() == "0010");
    CHECK(labels[1].to_string() == "0011");
    CHECK(labels[2].to_string() == "1010");
    CHECK(labels[3].to_string() == "1011");

    const CoarseGraining none(SystemShape(3, 1), 0, 0);
    const auto single = enumerate_block(none, BitString::parse("101"));
    REQUIRE(single.size() == 1);
    CHECK(single[0].to_string() == "101");

    CHECK_THROWS_AS(enumerate_block(one, BitString::parse("0")), std::invalid_argument);
}

TEST_CASE("BlockInitialState has unit trace", "[coarsegrain]") {
    const CoarseGraining cg(SystemShape(8, 4), 2, 3);
    const BlockInitialState rho(cg, BitString::parse("010"));
    const auto labels = rho.labels();
    CHECK(labels.size() == 32);
    CHECK(rho.weight() * static_cast<double>(labels.size()) == 1.0);
    for (const auto &s : labels) {
        CHECK(s.slice(3, 5).to_string() == "010");
    }
}
