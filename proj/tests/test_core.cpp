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
#include <cmath>
#include <complex>
#include <random>

#include <catch_amalgamated.hpp>

#include "qbaker/core.hpp"

using namespace qbaker;
using Catch::Matchers::WithinAbs;

TEST_CASE("bits_to_index", "[core]") {
    CHECK(bits_to_index(BitString::parse("101")) == 5);
    CHECK(bits_to_index(BitString::parse("0001")) == 1);
    CHECK(bits_to_index(BitString::parse("1000")) == 8);
    CHECK(bits_to_index(BitString{}) == 0);
}

TEST_CASE("index_to_bits", "[core]") {
    CHECK(index_to_bits(6, 4).to_string() == "0110");
    CHECK(index_to_bits(0, 3).to_string() == "000");
    CHECK(index_to_bits(0, 0).empty());
    CHECK_THROWS_AS(index_to_bits(8, 3), std::invalid_argument);
    CHECK_THROWS_AS(index_to_bits(1, 0), std::invalid_argument);
}

TEST_CASE("index round trip for every length up to 20", "[core][property]") {
    for (std::size_t m = 0; m <= 20; ++m) {
        const std::uint64_t count = std::uint64_t{1} << m;
        bool ok = true;
        for (std::uint64_t j = 0; j < count && ok; ++j) {
            const BitString bits = index_to_bits(j, m);
            ok = bits.size() == m && bits_to_index(bits) == j;
        }
        INFO("m = " << m);
        CHECK(ok);
    }
}

TEST_CASE("binary_fraction", "[core]") {
    CHECK(binary_fraction(BitString::parse("1"), false) == 0.5);
    CHECK(binary_fraction(BitString::parse("01"), true) == 0.375);
    CHECK(binary_fraction(BitString{}, true) == 0.5);
    CHECK(binary_fraction(BitString{}, false) == 0.0);
    CHECK(binary_fraction(BitString::parse("11"), false) == 0.75);
}

TEST_CASE("binary_fraction is monotone in the index", "[core][property]") {
    for (std::size_t m : {1U, 4U, 8U}) {
        for (bool append : {false, true}) {
            double prev = -1.0;
            for (std::uint64_t j = 0; j < (std::uint64_t{1} << m); ++j) {
                const double v = binary_fraction(index_to_bits(j, m), append);
                REQUIRE(v > prev);
                REQUIRE(v >= 0.0);
                REQUIRE(v < 1.0);
                // exact dyadic value
                const double expected =
                    (static_cast<double>(j) + (append ? 0.5 : 0.0)) / std::ldexp(1.0, static_cast<int>(m));
                REQUIRE(v == expected);
                prev = v;
            }
        }
    }
}

TEST_CASE("BitString parse, slice and concat", "[core]") {
    const BitString xi = BitString::parse("0110");
    CHECK(xi.size() == 4);
    CHECK(xi.bit(1) == 0);
    CHECK(xi.bit(2) == 1);
    CHECK(xi.slice(2, 3).to_string() == "11");
    CHECK(xi.slice(3, 2).empty());
    CHECK(xi.reversed().to_string() == "0110");
    CHECK(BitString::parse("001").reversed().to_string() == "100");
    CHECK(xi.concat(BitString::parse("1")).to_string() == "01101");
    CHECK_THROWS_AS(BitString::parse("01a"), std::invalid_argument);
    CHECK_THROWS_AS(xi.bit(0), std::out_of_range);
    CHECK_THROWS_AS(xi.bit(5), std::out_of_range);
}

TEST_CASE("SystemShape bounds", "[core]") {
    const SystemShape s(4, 2);
    CHECK(s.dim() == 16);
    CHECK_NOTHROW(SystemShape(1, 0));
    CHECK_THROWS_AS(SystemShape(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(SystemShape(4, 4), std::invalid_argument);
    CHECK_THROWS_AS(SystemShape(4, -1), std::invalid_argument);
    CHECK_THROWS_AS(SystemShape(kDefaultMaxQubits + 1, 0), std::invalid_argument);
}

TEST_CASE("inner_product conjugates the first argument", "[core]") {
    const Complex i{0.0, 1.0};
    const StateVector u{1.0, 0.0};
    const StateVector v{i, 0.0};
    CHECK(inner_product(u, v) == i);
    CHECK(inner_product(v, u) == -i);
    CHECK(inner_product(v, v) == Complex{1.0, 0.0});
    CHECK_THROWS_AS(inner_product(u, StateVector(3)), std::invalid_argument);
}

TEST_CASE("inner_product satisfies Cauchy-Schwarz and Hermitian symmetry",
          "[core][property]") {
    std::mt19937_64 rng(20260101);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = std::size_t{1} << (trial % 7);
        StateVector u(dim);
        StateVector v(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            u[i] = {gauss(rng), gauss(rng)};
            v[i] = {gauss(rng), gauss(rng)};
        }
        const Complex uv = inner_product(u, v);
        CHECK(std::abs(uv) <= u.norm() * v.norm() * (1.0 + 1e-12));
        CHECK(std::abs(uv - std::conj(inner_product(v, u))) < 1e-12);
        CHECK_THAT(inner_product(u, u).real(), WithinAbs(u.squared_norm(), 1e-9));
    }
}

TEST_CASE("DenseMatrix product and adjoint", "[core]") {
    DenseMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = Complex{0.0, 1.0};
    a(1, 0) = 2.0;
    a(1, 1) = 3.0;
    const DenseMatrix h = a.adjoint();
    CHECK(h(0, 1) == Complex{2.0, 0.0});
    CHECK(h(1, 0) == Complex{0.0, -1.0});
    const DenseMatrix p = a * DenseMatrix::identity(2);
    CHECK(max_abs_diff(p, a) == 0.0);
    const StateVector x{1.0, 1.0};
    const StateVector y = a.apply(x);
    CHECK(y[0] == Complex{1.0, 1.0});
    CHECK(y[1] == Complex{5.0, 0.0});
}
